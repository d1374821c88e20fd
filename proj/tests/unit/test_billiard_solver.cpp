#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "hcb/billiard_solver.hpp"
#include "hcb/coxeter_groups.hpp"
#include "hcb/exact_solver.hpp"
#include "hcb/quadrature.hpp"

using namespace hcb;

namespace {

const std::array<Vec3, 3> kOctant = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};

MassSequence h3_masses() { return standard_masses(coxeter_spec("H3")); }

// Random point strictly inside the canonical triangle.
Eigen::Vector2d interior_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.02, 0.98);
  double a = u(rng), b = u(rng);
  if (a + b > 0.98) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  a = std::clamp(a, 0.01, 0.97);
  b = std::clamp(b, 0.01, 0.98 - a);
  return Eigen::Vector2d(-1.0 + 2.0 * a, -1.0 + 2.0 * b);
}

double apply(const OperatorCoefficients& c, double fs, double ft, double fss, double fst, double ftt) {
  return c.g_ss * fss + 2.0 * c.g_st * fst + c.g_tt * ftt + c.b_s * fs + c.b_t * ft;
}

// Value, (s,t) gradient and Hessian of z -> (rho^lambda Y)(z / |z|) along the chart.
struct Jet {
  double f;
  Eigen::Vector2d g;
  Eigen::Matrix2d H;
};

Jet harmonic_jet(const FlattenedSector& sec, const HomogeneousPolynomial& P, double s, double t) {
  const int lam = P.degree();
  const Eigen::Vector2d uv = sec.to_uv(Eigen::Vector2d(s, t));
  const double u = uv.x(), v = uv.y(), f = 1.0 + u * u + v * v;
  const Vec3 w = sec.center + u * sec.e_u + v * sec.e_v;
  const std::array<Vec3, 2> e = {sec.e_u, sec.e_v};
  Vec3 grad;
  Mat3 hess;
  for (int i = 0; i < 3; ++i) {
    const auto di = P.derivative(i);
    grad(i) = di.evaluate(w);
    for (int j = 0; j < 3; ++j) hess(i, j) = di.derivative(j).evaluate(w);
  }
  // P(w) along the chart
  const double p0 = P.evaluate(w);
  Eigen::Vector2d pg;
  Eigen::Matrix2d ph;
  for (int a = 0; a < 2; ++a) {
    pg(a) = grad.dot(e[a]);
    for (int b = 0; b < 2; ++b) ph(a, b) = e[a].dot(hess * e[b]);
  }
  // q = f^{-lambda/2}
  const double q = std::pow(f, -0.5 * lam);
  const Eigen::Vector2d x(u, v);
  const Eigen::Vector2d qg = -lam * std::pow(f, -0.5 * lam - 1.0) * x;
  const Eigen::Matrix2d qh = -lam * std::pow(f, -0.5 * lam - 1.0) * Eigen::Matrix2d::Identity() +
                             lam * (lam + 2.0) * std::pow(f, -0.5 * lam - 2.0) * x * x.transpose();
  const double g0 = p0 * q;
  const Eigen::Vector2d gg = pg * q + p0 * qg;
  const Eigen::Matrix2d gh = ph * q + pg * qg.transpose() + qg * pg.transpose() + p0 * qh;
  const Eigen::Matrix2d N = sec.affine.inverse();  // d(u,v)/d(s,t)
  return {g0, N.transpose() * gg, N.transpose() * gh * N};
}

// The eight-exponential form of h_{n,m}.
double basis_exponential(int n, int m, double s, double t) {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  auto e = [&](double a, double b) { return std::exp(i * (kPi / 2.0) * (a * (s + 1.0) + b * (t - 1.0))); };
  const C sum = e(-n, m) - e(-n, -m) + e(n, -m) - e(n, m) - e(-m, n) + e(-m, -n) - e(m, -n) + e(m, n);
  return (0.25 * sum).real();
}

double flat_inner(int n1, int m1, int n2, int m2) {
  const auto rule = duffy_triangle(40);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.w.size(); ++q)
    acc += rule.w[q] * basis_function(n1, m1, rule.s[q], rule.t[q]) * basis_function(n2, m2, rule.s[q], rule.t[q]);
  return acc;
}

double measure(const FlattenedSector& f, int order) {
  const auto rule = duffy_triangle(order);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.w.size(); ++q) acc += rule.w[q] * operator_coefficients(f, rule.s[q], rule.t[q]).density;
  return acc;
}

}  // namespace

TEST_CASE("flatten_sector maps the Coxeter sector onto the canonical triangle") {
  const auto m = h3_masses();
  for (auto chart : {ChartCenter::Axis, ChartCenter::Centroid}) {
    const auto f = flatten_sector(m, {1, 2, 3, 4}, chart);
    REQUIRE(f.abcd.has_value());
    for (double x : *f.abcd) CHECK((std::isfinite(x) && x > 0.0));
    // corners
    const auto& V = f.geometry.vertices;
    const Eigen::Vector2d c0 = f.to_st(f.chart(V[0])), c1 = f.to_st(f.chart(V[1])), c2 = f.to_st(f.chart(V[2]));
    CHECK((c0 - Eigen::Vector2d(-1, 1)).norm() < 1e-10);
    CHECK((c1 - Eigen::Vector2d(1, -1)).norm() < 1e-10);
    CHECK((c2 - Eigen::Vector2d(-1, -1)).norm() < 1e-10);
    // edges: P1 -> s = -1, P2 -> s + t = 0, P3 -> t = -1 (great-circle arcs between the vertices)
    const std::array<std::pair<int, int>, 3> edges = {{{0, 2}, {0, 1}, {1, 2}}};
    for (int k = 0; k < 3; ++k) {
      for (int j = 1; j < 10; ++j) {
        const double a = j / 10.0;
        const Vec3 z = ((1 - a) * V[edges[k].first] + a * V[edges[k].second]).normalized();
        const Eigen::Vector2d st = f.to_st(f.chart(z));
        const double off = k == 0 ? st.x() + 1.0 : k == 1 ? st.x() + st.y() : st.y() + 1.0;
        CHECK(std::abs(off) < 1e-10);
        CHECK((f.to_sphere(st.x(), st.y()) - z).norm() < 1e-10);
      }
    }
  }
}

TEST_CASE("flattening constants") {
  const auto f = flatten_sector(MassSequence({1, 1, 1, 1}), {1, 3, 4, 2});
  const auto [a, b, c, d] = *f.abcd;
  CHECK(a == doctest::Approx(c).epsilon(1e-14));
  CHECK(b == doctest::Approx(d).epsilon(1e-14));
  CHECK(b == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));  // sqrt(M m1 / ((m3 + m4) m2))
  // canonical ordering needs no relabeling
  CHECK(f.relabeling == Ordering{1, 2, 3, 4});
  const auto g = flatten_sector(MassSequence({1, 2, 3, 4}), {2, 4, 1, 3});
  CHECK(g.relabeling == Ordering{2, 3, 4, 1});
  CHECK_THROWS_AS(flatten_sector(MassSequence({1, 1, 1}), {1, 2, 3, 4}), Error);
  CHECK_THROWS_AS(flatten_sector(MassSequence({1, 1, 1, 1}), {1, 2, 2, 4}), Error);
}

TEST_CASE("pulled-back measure integrates to the Girard area") {
  std::vector<FlattenedSector> sectors;
  const auto m = h3_masses();
  for (const auto& p : distinct_sectors(m)) {
    sectors.push_back(flatten_sector(m, p));
    sectors.push_back(flatten_sector(m, p, ChartCenter::Centroid));
  }
  const MassSequence random({1.3, 0.4, 2.2, 0.9});
  for (const auto& p : all_orderings()) sectors.push_back(flatten_sector(random, p));
  sectors.push_back(flatten_normals(kOctant));
  for (const auto& f : sectors) CHECK(std::abs(measure(f, 60) - f.geometry.area) < 1e-8 * f.geometry.area);
  CHECK(sectors.back().geometry.area == doctest::Approx(kPi / 2).epsilon(1e-14));
}

TEST_CASE("operator coefficients") {
  const auto c = operator_coefficients_uv(0.0, 0.0);
  CHECK(c.g_ss == 1.0);
  CHECK(c.g_st == 0.0);
  CHECK(c.g_tt == 1.0);
  CHECK(c.b_s == 0.0);
  CHECK(c.b_t == 0.0);
  CHECK(c.density == 1.0);
  const auto f = flatten_normals(kOctant);
  CHECK_THROWS_AS(operator_coefficients(f, 0.5, 0.5), Error);
  CHECK_THROWS_AS(operator_coefficients(f, -1.5, 0.0), Error);
  CHECK_NOTHROW(operator_coefficients(f, -0.5, -0.5));
}

TEST_CASE("flattened operator annihilates harmonics up to -lambda(lambda+1)") {
  std::mt19937 rng(5);
  const auto m = h3_masses();
  const std::vector<FlattenedSector> sectors = {flatten_sector(m, {1, 2, 3, 4}),
                                                flatten_sector(m, {1, 3, 4, 2}, ChartCenter::Centroid),
                                                flatten_sector(MassSequence({1.3, 0.4, 2.2, 0.9}), {2, 1, 4, 3}),
                                                flatten_normals(kOctant)};
  std::uniform_int_distribution<int> mu_pick(0, 100);
  for (const auto& sec : sectors) {
    for (int lam = 1; lam <= 6; ++lam) {
      const int mu = mu_pick(rng) % (2 * lam + 1) - lam;
      const auto P = real_spherical_harmonic(lam, mu);
      for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Vector2d st = interior_point(rng);
        const auto j = harmonic_jet(sec, P, st.x(), st.y());
        const auto c = operator_coefficients(sec, st.x(), st.y());
        const double Lf = apply(c, j.g(0), j.g(1), j.H(0, 0), j.H(0, 1), j.H(1, 1));
        const double want = -lam * (lam + 1.0) * j.f;
        const double scale = std::max(std::abs(want), lam * (lam + 1.0) * 1e-3);
        CHECK(std::abs(Lf - want) < 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("operator action matches a five-point stencil") {
  std::mt19937 rng(9);
  const auto sec = flatten_sector(h3_masses(), {2, 1, 4, 3});
  const double h = 1e-4;
  for (auto [n, m] : std::vector<std::pair<int, int>>{{1, 2}, {2, 5}, {3, 4}}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Vector2d p = interior_point(rng);
      const double s = p.x(), t = p.y();
      const auto c = operator_coefficients(sec, s, t);
      const auto d = basis_derivatives(n, m, s, t);
      const double exact = apply(c, d.ds, d.dt, d.dss, d.dst, d.dtt);
      auto H = [&](double a, double b) { return basis_function(n, m, a, b); };
      const double fss = (H(s + h, t) - 2 * H(s, t) + H(s - h, t)) / (h * h);
      const double ftt = (H(s, t + h) - 2 * H(s, t) + H(s, t - h)) / (h * h);
      const double fst = (H(s + h, t + h) - H(s + h, t - h) - H(s - h, t + h) + H(s - h, t - h)) / (4 * h * h);
      const double fs = (H(s + h, t) - H(s - h, t)) / (2 * h), ft = (H(s, t + h) - H(s, t - h)) / (2 * h);
      const double fd = apply(c, fs, ft, fss, fst, ftt);
      const double scale = std::abs(c.g_ss) + std::abs(c.g_tt) + std::abs(c.b_s) + std::abs(c.b_t);
      CHECK(std::abs(fd - exact) < 1e-5 * std::max(std::abs(exact), scale));
    }
  }
}

TEST_CASE("basis functions") {
  std::mt19937 rng(3);
  for (int n = 1; n <= 4; ++n)
    for (int m = n + 1; m <= 6; ++m) {
      for (int j = 0; j <= 10; ++j) {
        const double a = -1.0 + 2.0 * j / 10.0;
        CHECK(std::abs(basis_function(n, m, -1.0, a)) < 1e-12);
        CHECK(std::abs(basis_function(n, m, a, -1.0)) < 1e-12);
        CHECK(std::abs(basis_function(n, m, a, -a)) < 1e-12);
      }
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Vector2d p = interior_point(rng);
        const double v = basis_function(n, m, p.x(), p.y());
        CHECK(v == doctest::Approx(basis_exponential(n, m, p.x(), p.y())).epsilon(1e-12));
        CHECK(basis_function(m, n, p.x(), p.y()) == doctest::Approx(-v).epsilon(1e-14));
        CHECK(basis_derivatives(n, m, p.x(), p.y()).value == doctest::Approx(v).epsilon(1e-14));
      }
    }
  CHECK(std::abs(flat_inner(1, 2, 1, 3)) < 1e-12);
  CHECK(std::abs(flat_inner(2, 3, 1, 4)) < 1e-12);
  CHECK(flat_inner(1, 2, 1, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat_inner(3, 7, 3, 7) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("assembly") {
  const auto t3 = make_truncation(3);
  REQUIRE(t3.size() == 3);
  CHECK(t3.index_pairs[0] == std::make_pair(1, 2));
  CHECK(t3.index_pairs[1] == std::make_pair(1, 3));
  CHECK(t3.index_pairs[2] == std::make_pair(2, 3));
  CHECK_THROWS_AS(make_truncation(1), Error);
  const auto sec = flatten_sector(h3_masses(), {1, 4, 2, 3});
  const auto sys3 = assemble(sec, t3, 9);
  CHECK(sys3.stiffness.rows() == 3);
  CHECK(sys3.overlap.cols() == 3);
  CHECK_THROWS_AS(assemble(sec, t3, 8), Error);

  const auto t = make_truncation(12);
  const auto a = assemble(sec, t, 36), b = assemble(sec, t, 72);
  CHECK((a.overlap - a.overlap.transpose()).norm() <= 1e-10 * a.overlap.norm());
  CHECK((a.stiffness - a.stiffness.transpose()).norm() <= 1e-10 * a.stiffness.norm());
  CHECK(std::abs(a.overlap.trace() - b.overlap.trace()) < 1e-6 * b.overlap.trace());
  const auto ea = solve_spectrum(a, 10), eb = solve_spectrum(b, 10);
  for (int k = 0; k < 10; ++k) CHECK(ea.values[k] == doctest::Approx(eb.values[k]).epsilon(1e-8));
  // B is the Gram matrix of the basis under the spherical measure
  CHECK(Eigen::LLT<Eigen::MatrixXd>(a.overlap).info() == Eigen::Success);
}

TEST_CASE("octant spectrum") {
  const auto f = flatten_normals(kOctant);
  const auto sp = solve_sector(f, 24, 10);
  REQUIRE(sp.values.size() == 10);
  // lambda = 3, 5, 5, 7, 7, 7, 9, 9, 9, 9
  const std::array<int, 10> want = {3, 5, 5, 7, 7, 7, 9, 9, 9, 9};
  for (int k = 0; k < 10; ++k) {
    CHECK(std::abs(sp.effective_lambda[k] - want[k]) < 2e-3);
    CHECK(sp.effective_lambda[k] >= want[k] - 1e-9);  // Galerkin upper bounds
    CHECK(sp.effective_lambda[k] * (sp.effective_lambda[k] + 1) == doctest::Approx(sp.values[k]).epsilon(1e-12));
  }
  CHECK(sp.values[0] == doctest::Approx(12.0).epsilon(1e-4));

  const auto study = convergence_study(f, {10, 15, 20}, 10, 1e-2);
  REQUIRE(study.deltas.size() == 2);
  CHECK(study.deltas[1][0] < study.deltas[0][0]);
  CHECK(study.deltas[1][0] < 2e-3);
  int leading = 0;
  while (leading < 10 && study.deltas[1][leading] < 1e-2) ++leading;
  CHECK(study.converged_count == leading);
  CHECK(study.converged_count >= 1);
  CHECK(study.final_spectrum().converged_count == leading);
  CHECK(std::isfinite(study.final_spectrum().delta_last[0]));
}

TEST_CASE("Coxeter sectors reproduce the exact ladders") {
  const auto a3 = solve_sector(flatten_sector(standard_masses(coxeter_spec("A3")), {1, 2, 3, 4}), 20, 3);
  CHECK(std::abs(a3.effective_lambda[0] - 6.0) < 1e-3);
  CHECK(a3.values[0] == doctest::Approx(42.0).epsilon(1e-4));
  const auto h3 = solve_sector(flatten_sector(h3_masses(), {1, 2, 3, 4}), 24, 4);
  const std::array<double, 4> want = {15, 21, 25, 27};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(h3.effective_lambda[k] - want[k]) < 0.01);
}

TEST_CASE("variational monotonicity and inversion symmetry") {
  const auto m = h3_masses();
  const auto f = flatten_sector(m, {1, 3, 2, 4});
  const auto study = convergence_study(f, {8, 12, 16}, 30, 1.0);
  for (std::size_t j = 0; j + 1 < study.spectra.size(); ++j)
    for (int k = 0; k < 20; ++k)
      CHECK(study.spectra[j + 1].values[k] <= study.spectra[j].values[k] * (1 + 1e-10));

  const auto fwd = solve_sector(f, 16, 20);
  const auto rev = solve_sector(flatten_sector(m, reversed(Ordering{1, 3, 2, 4})), 16, 20);
  for (int k = 0; k < 20; ++k) CHECK(fwd.values[k] == doctest::Approx(rev.values[k]).epsilon(1e-9));
  // the other chart converges to the same levels
  const auto cen = solve_sector(flatten_sector(m, {1, 3, 2, 4}, ChartCenter::Centroid), 16, 5);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(cen.effective_lambda[k] - fwd.effective_lambda[k]) < 0.05);

  CHECK_THROWS_AS(convergence_study(f, {12, 8}, 5, 1.0), Error);
  CHECK_THROWS_AS(convergence_study(f, {12}, 5, 1.0), Error);
}

TEST_CASE("extreme mass ratio is reported, not hidden") {
  const MassSequence m({1e6, 1, 1, 1});
  bool reported = false;
  try {
    const auto f = flatten_sector(m, {1, 2, 3, 4});
    const auto study = convergence_study(f, {8, 12}, 10, 1e-3);
    reported = study.converged_count < 10;
  } catch (const Error&) {
    reported = true;
  }
  CHECK(reported);
}

TEST_CASE("spectrum csv") {
  EigenSpectrum s;
  s.values = {12.0, 30.5};
  s.effective_lambda = {3.0, effective_lambda(30.5)};
  s.delta_last = {1e-3, std::nan("")};
  const std::string csv = spectrum_csv(s);
  CHECK(csv == "k,eigenvalue,lambda_eff,delta_last_refinement\n1,12,3,0.001\n2,30.5,5.0452682532,\n");
}
