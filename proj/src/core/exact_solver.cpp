#include "hcb/exact_solver.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "hcb/jacobi_geometry.hpp"
#include "json.hpp"

namespace hcb {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

std::vector<double> normalized_legendre_row(int lambda, double x) {
  if (lambda < 0) fail(ErrorKind::InvalidArgument, "lambda must be non-negative");
  x = std::clamp(x, -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  std::vector<double> row(lambda + 1, 0.0);
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= lambda; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    if (m == lambda) {
      row[m] = pmm;
      break;
    }
    double p0 = pmm, p1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
    for (int l = m + 2; l <= lambda; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                                 (4.0 * (l - 1) * (l - 1) - 1.0));
      const double p2 = a * (x * p1 - b * p0);
      p0 = p1;
      p1 = p2;
    }
    row[m] = p1;
  }
  return row;
}

double real_spherical_harmonic_value(int lambda, int mu, const Vec3& unit) {
  if (std::abs(mu) > lambda) fail(ErrorKind::InvalidArgument, "|mu| must not exceed lambda");
  const double r = unit.norm();
  if (!(r > 0.0)) fail(ErrorKind::Domain, "direction must be non-zero");
  const auto row = normalized_legendre_row(lambda, unit.z() / r);
  const int m = std::abs(mu);
  if (m == 0) return row[0];
  const double phi = std::atan2(unit.y(), unit.x());
  return std::sqrt(2.0) * row[m] * (mu > 0 ? std::cos(m * phi) : std::sin(m * phi));
}

HomogeneousPolynomial real_spherical_harmonic(int lambda, int mu) {
  if (lambda < 0 || std::abs(mu) > lambda) fail(ErrorKind::InvalidArgument, "need 0 <= |mu| <= lambda");
  const int m = std::abs(mu);
  HomogeneousPolynomial out(lambda);
  const double log_norm = 0.5 * (std::log((2.0 * lambda + 1.0) / (4.0 * kPi)) + log_factorial(lambda - m) - log_factorial(lambda + m));
  const double pre = (m > 0 ? std::sqrt(2.0) : 1.0) * ((m % 2) ? -1.0 : 1.0);

  // Terms of Re or Im (z1 + i z2)^m: z1^{m-j} z2^j with binomial and sign.
  std::vector<std::pair<int, double>> azim;
  for (int j = 0; j <= m; ++j) {
    const bool real_part = (j % 2 == 0);
    if (real_part != (mu >= 0)) continue;
    const double sign = ((real_part ? j / 2 : (j - 1) / 2) % 2) ? -1.0 : 1.0;
    azim.emplace_back(j, sign * std::exp(log_factorial(m) - log_factorial(j) - log_factorial(m - j)));
  }

  for (int k = 0; 2 * k + m <= lambda; ++k) {
    // P_lambda^{(m)} coefficient of x^{lambda-2k-m}.
    const double mag = std::exp(log_norm + log_factorial(2 * lambda - 2 * k) - lambda * std::log(2.0) - log_factorial(k) -
                                log_factorial(lambda - k) - log_factorial(lambda - 2 * k - m));
    const double ck = pre * ((k % 2) ? -1.0 : 1.0) * mag;
    const int e3 = lambda - 2 * k - m;
    for (const auto& [j, bj] : azim) {
      const int e1 = m - j, e2 = j;
      // rho^{2k} expanded by the multinomial theorem.
      for (int i1 = 0; i1 <= k; ++i1)
        for (int i2 = 0; i1 + i2 <= k; ++i2) {
          const int i3 = k - i1 - i2;
          const double multi = std::exp(log_factorial(k) - log_factorial(i1) - log_factorial(i2) - log_factorial(i3));
          out.add(e1 + 2 * i1, e2 + 2 * i2, e3 + 2 * i3, ck * bj * multi);
        }
    }
  }
  return out;
}

HarmonicSpace::HarmonicSpace(int lambda) : lambda_(lambda), rule_(sphere_rule(lambda + 1, 2 * lambda + 2)) {
  if (lambda < 0) fail(ErrorKind::InvalidArgument, "lambda must be non-negative");
  pmm_.resize(lambda + 1);
  for (int m = 1; m <= lambda; ++m) pmm_[m] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
  for (int m = 0; m < lambda; ++m)
    for (int l = m + 2; l <= lambda; ++l) {
      ab_.push_back(std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m)));
      ab_.push_back(std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0)));
    }
  weighted_values_ = values(rule_.points);
  for (Eigen::Index q = 0; q < weighted_values_.rows(); ++q) weighted_values_.row(q) *= rule_.weights[q];
}

void HarmonicSpace::legendre_row(double x, double* row) const {
  x = std::clamp(x, -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  const double* ab = ab_.data();
  for (int m = 0; m <= lambda_; ++m) {
    if (m > 0) pmm *= pmm_[m] * s;
    if (m == lambda_) {
      row[m] = pmm;
      break;
    }
    double p0 = pmm, p1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
    for (int l = m + 2; l <= lambda_; ++l, ab += 2) {
      const double p2 = ab[0] * (x * p1 - ab[1] * p0);
      p0 = p1;
      p1 = p2;
    }
    row[m] = p1;
  }
}

Eigen::MatrixXd HarmonicSpace::values(const std::vector<Vec3>& pts) const {
  const int l = lambda_;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(pts.size()), dim());
  const double r2 = std::sqrt(2.0);
  std::vector<double> row(l + 1);
  for (std::size_t q = 0; q < pts.size(); ++q) {
    const Vec3 u = pts[q].normalized();
    legendre_row(u.z(), row.data());
    const double rxy = std::hypot(u.x(), u.y());
    const double c1 = rxy > 0 ? u.x() / rxy : 1.0, s1 = rxy > 0 ? u.y() / rxy : 0.0;
    const auto i = static_cast<Eigen::Index>(q);
    out(i, l) = row[0];
    // cos(m phi), sin(m phi) by repeated rotation
    double cm = 1.0, sm = 0.0;
    for (int m = 1; m <= l; ++m) {
      const double cn = cm * c1 - sm * s1;
      sm = sm * c1 + cm * s1;
      cm = cn;
      out(i, l + m) = r2 * row[m] * cm;
      out(i, l - m) = r2 * row[m] * sm;
    }
  }
  return out;
}

Eigen::MatrixXd HarmonicSpace::representation(const Mat3& O) const {
  std::vector<Vec3> moved;
  moved.reserve(rule_.points.size());
  for (const auto& z : rule_.points) moved.push_back(O * z);
  return weighted_values_.transpose() * values(moved);
}

std::vector<Eigen::MatrixXd> HarmonicSpace::representations(const ReflectionGroup& group) const {
  std::array<Eigen::MatrixXd, 3> gens;
  for (int k = 0; k < 3; ++k) {
    const Vec3& n = group.simple_roots[k];
    gens[k] = representation(Mat3::Identity() - 2.0 * n * n.transpose());
  }
  std::vector<Eigen::MatrixXd> reps(group.elements.size());
  reps[0] = Eigen::MatrixXd::Identity(dim(), dim());
  for (std::size_t i = 1; i < group.elements.size(); ++i) {
    const auto& e = group.elements[i];
    // O_i = R_gen O_parent, so Y(O_i z) expands with D(parent) D(gen).
    reps[i] = reps[e.parent] * gens[e.generator];
  }
  return reps;
}

Eigen::MatrixXd HarmonicSpace::anti_invariant_projector(const ReflectionGroup& group) const {
  const auto reps = representations(group);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim(), dim());
  for (std::size_t i = 0; i < reps.size(); ++i) p += group.elements[i].det * reps[i];
  return p / static_cast<double>(group.order());
}

HomogeneousPolynomial HarmonicSpace::polynomial(const Eigen::VectorXd& c) const {
  if (c.size() != dim()) fail(ErrorKind::InvalidArgument, "coefficient vector has the wrong length");
  HomogeneousPolynomial out(lambda_);
  for (int mu = -lambda_; mu <= lambda_; ++mu)
    if (c[mu + lambda_] != 0.0) out += real_spherical_harmonic(lambda_, mu) * c[mu + lambda_];
  return out;
}

std::array<Vec3, 3> fundamental_chamber(const ReflectionGroup& group) {
  const double target = 4.0 * kPi / static_cast<double>(group.order());
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) {
      const std::array<Vec3, 3> n{group.simple_roots[0], s1 * group.simple_roots[1], s2 * group.simple_roots[2]};
      try {
        const auto g = triangle_geometry(n);
        if (std::abs(g.area - target) < 1e-9) return g.bounding_normals;
      } catch (const Error&) {
      }
    }
  fail(ErrorKind::Consistency, "simple roots do not bound a fundamental chamber");
}

HyperangularState ground_state(const ReflectionGroup& group) {
  HomogeneousPolynomial p = HomogeneousPolynomial::constant(1.0);
  for (const auto& n : group.reflection_normals()) p = p.times_linear(n);
  const auto chamber = triangle_geometry(fundamental_chamber(group));
  const Vec3 inside = (chamber.vertices[0] + chamber.vertices[1] + chamber.vertices[2]).normalized();
  double norm = sphere_norm(p);
  if (!(norm > 0.0)) fail(ErrorKind::Numerical, "ground-state product has zero norm");
  p *= (p.evaluate(inside) < 0 ? -1.0 : 1.0) / norm;
  HyperangularState s;
  s.lambda = p.degree();
  s.polynomial = std::move(p);
  s.norm = sphere_norm(s.polynomial);
  return s;
}

HomogeneousPolynomial project_anti_invariant(int lambda, int mu, const ReflectionGroup& group) {
  const auto y = real_spherical_harmonic(lambda, mu);
  HomogeneousPolynomial acc(lambda);
  for (const auto& e : group.elements) {
    auto moved = y.compose(e.matrix);
    if (e.det < 0) moved *= -1.0;
    acc += moved;
  }
  acc *= 1.0 / static_cast<double>(group.order());
  return acc;
}

std::vector<int> mu_sweep(int lambda) {
  std::vector<int> out{0};
  for (int m = 1; m <= lambda; ++m) {
    out.push_back(m);
    out.push_back(-m);
  }
  return out;
}

std::vector<HyperangularState> excited_basis(int lambda, const ReflectionGroup& group, bool with_polynomials) {
  const int expected = degeneracy(lambda, group);
  const HarmonicSpace space(lambda);
  const Eigen::MatrixXd proj = space.anti_invariant_projector(group);
  std::vector<Eigen::VectorXd> basis;
  std::vector<int> sources;
  for (int mu : mu_sweep(lambda)) {
    Eigen::VectorXd v = proj.col(mu + lambda);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b.dot(v) * b;
    const double n = v.norm();
    if (n < 1e-8) continue;
    basis.push_back(v / n);
    sources.push_back(mu);
  }
  if (static_cast<int>(basis.size()) != expected)
    fail(ErrorKind::Consistency, "found " + std::to_string(basis.size()) + " independent anti-invariant harmonics at lambda " +
                                     std::to_string(lambda) + ", the character count is " + std::to_string(expected));
  std::vector<HyperangularState> out;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    HyperangularState s;
    s.lambda = lambda;
    s.y_coefficients = basis[i];
    s.norm = basis[i].norm();
    s.source_mu = sources[i];
    if (with_polynomials) s.polynomial = space.polynomial(basis[i]);
    out.push_back(std::move(s));
  }
  return out;
}

double anti_invariance_residual(const HyperangularState& state, const ReflectionGroup& group) {
  if (state.y_coefficients.size() != 2 * state.lambda + 1) fail(ErrorKind::InvalidArgument, "state has no Y-basis coefficients");
  const HarmonicSpace space(state.lambda);
  double worst = 0.0;
  const auto reps = space.representations(group);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const Eigen::VectorXd diff = reps[i] * state.y_coefficients - group.elements[i].det * state.y_coefficients;
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return worst;
}

double laguerre(int n, double alpha, double x) {
  if (n < 0) fail(ErrorKind::InvalidArgument, "Laguerre degree must be non-negative");
  double l0 = 1.0;
  if (n == 0) return l0;
  double l1 = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double l2 = ((2.0 * k + 1.0 + alpha - x) * l1 - (k + alpha) * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

double radial_wavefunction(int nu, double lambda, double rho, int particles) {
  if (nu < 0 || lambda < 0 || particles < 2) fail(ErrorKind::InvalidArgument, "need nu >= 0, lambda >= 0, N >= 2");
  if (!(rho >= 0.0) || !std::isfinite(rho)) fail(ErrorKind::Domain, "rho must be non-negative and finite");
  const double half = 0.5 * (particles - 1);
  const double log_a = 0.5 * (std::log(2.0) + std::lgamma(nu + 1.0) - std::lgamma(nu + lambda + half));
  const double lag = laguerre(nu, lambda + 0.5 * (particles - 3), rho * rho);
  if (rho == 0.0) return lambda == 0.0 ? std::exp(log_a) * lag : 0.0;
  return std::exp(log_a + lambda * std::log(rho) - 0.5 * rho * rho) * lag;
}

std::vector<EnergyLevel> energy_levels(const CoxeterSpec& spec, double e_max, int particles) {
  if (spec.particles() != particles)
    fail(ErrorKind::InvalidArgument, spec.name + " describes " + std::to_string(spec.particles()) + " particles, not " +
                                         std::to_string(particles));
  int a = 0, b = 0;
  if (spec.rank == 2) {
    a = spec.bracket.at(0);
  } else {
    std::tie(a, b) = lambda_steps(spec);
  }
  const double base = 0.5 * particles;
  std::vector<EnergyLevel> out;
  for (int n1 = 0; spec.lambda0 + a * n1 + base <= e_max; ++n1)
    for (int n2 = 0; n2 == 0 || (b > 0 && spec.lambda0 + a * n1 + b * n2 + base <= e_max); ++n2) {
      const int lambda = spec.lambda0 + a * n1 + b * n2;
      if (lambda + base > e_max) break;
      for (int nu = 0; lambda + 2 * nu + base <= e_max; ++nu)
        for (int n = 0; lambda + 2 * nu + n + base <= e_max; ++n)
          out.push_back({n, nu, n1, n2, lambda, n + 2.0 * nu + lambda + base});
    }
  std::sort(out.begin(), out.end(), [](const EnergyLevel& x, const EnergyLevel& y) {
    return std::tie(x.energy, x.n, x.nu, x.n1, x.n2) < std::tie(y.energy, y.n, y.nu, y.n1, y.n2);
  });
  return out;
}

std::string energy_levels_csv(const std::vector<EnergyLevel>& levels) {
  std::string out = "n,nu,n1,n2,lambda,energy\n";
  for (const auto& l : levels)
    out += std::to_string(l.n) + "," + std::to_string(l.nu) + "," + std::to_string(l.n1) + "," + std::to_string(l.n2) + "," +
           std::to_string(l.lambda) + "," + fmt12(l.energy) + "\n";
  return out;
}

std::string to_json(const HyperangularState& state, double rel_tol) {
  nlohmann::json j;
  j["lambda"] = state.lambda;
  j["norm"] = round12(state.norm);
  j["source_mu"] = state.source_mu;
  j["polynomial"] = nlohmann::json::parse(to_json(state.polynomial, rel_tol));
  if (state.y_coefficients.size() > 0) {
    j["y_coefficients"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < state.y_coefficients.size(); ++i) j["y_coefficients"].push_back(round12(state.y_coefficients[i]));
  }
  return j.dump(2);
}

}  // namespace hcb
