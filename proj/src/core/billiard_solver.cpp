#include "hcb/billiard_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "hcb/quadrature.hpp"

#ifdef HCB_HAVE_OPENMP
#include <omp.h>
#endif

namespace hcb {

namespace {

constexpr double kHalfPi = 0.5 * kPi;

// Corners of the canonical triangle in vertex order P1^P2, P2^P3, P1^P3.
const std::array<Eigen::Vector2d, 3> kCorners = {Eigen::Vector2d(-1.0, 1.0), Eigen::Vector2d(1.0, -1.0),
                                                 Eigen::Vector2d(-1.0, -1.0)};

void check_corners(const FlattenedSector& f) {
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector2d st = f.to_st(f.chart(f.geometry.vertices[k]));
    if ((st - kCorners[k]).norm() > 1e-8)
      fail(ErrorKind::Consistency, "flattened vertex " + std::to_string(k) + " misses its corner by " +
                                       std::to_string((st - kCorners[k]).norm()));
  }
}

void finish(FlattenedSector& f) {
  const double det = f.affine.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-300)
    fail(ErrorKind::Numerical, "degenerate flattening map (determinant " + std::to_string(det) + ")");
  f.jacobian_const = 1.0 / std::abs(det);
}

}  // namespace

Eigen::Vector2d FlattenedSector::to_uv(const Eigen::Vector2d& st) const {
  return affine.partialPivLu().solve(st - offset);
}

Vec3 FlattenedSector::to_sphere(double s, double t) const {
  const Eigen::Vector2d uv = to_uv(Eigen::Vector2d(s, t));
  return (center + uv.x() * e_u + uv.y() * e_v).normalized();
}

Eigen::Vector2d FlattenedSector::chart(const Vec3& z) const {
  const double c = center.dot(z);
  return Eigen::Vector2d(e_u.dot(z) / c, e_v.dot(z) / c);
}

FlattenedSector flatten_sector(const MassSequence& masses, const Ordering& p, ChartCenter chart) {
  if (masses.size() != 4) fail(ErrorKind::InvalidArgument, "flattening needs exactly four masses");
  if (!is_permutation_of_four(p)) fail(ErrorKind::InvalidArgument, "ordering must be a permutation of 1..4");
  FlattenedSector f;
  f.ordering = p;
  f.relabeling = {p[0], p[3], p[1], p[2]};
  std::vector<double> mr(4);
  for (int k = 0; k < 4; ++k) mr[k] = masses[f.relabeling[k] - 1];
  const MassSequence relabeled(mr);
  const double m1 = mr[0], m2 = mr[1], m3 = mr[2], m4 = mr[3];
  const double m12 = m1 + m2, m34 = m3 + m4, M = m12 + m34;
  const double a = std::sqrt(m12 * m1 * m4 / (m34 * m3 * m2));
  const double b = std::sqrt(M * m1 / (m34 * m2));
  const double c = std::sqrt(m12 * m2 * m3 / (m34 * m1 * m4));
  const double d = std::sqrt(M * m2 / (m34 * m1));
  f.abcd = std::array<double, 4>{a, b, c, d};
  for (double x : *f.abcd)
    if (!std::isfinite(x) || x <= 0.0) fail(ErrorKind::Numerical, "non-finite flattening constants");

  f.geometry = sector_geometry(coincidence_normals(relabeled), {1, 3, 4, 2});
  if (chart == ChartCenter::Centroid) {
    FlattenedSector g = flatten_normals(f.geometry.bounding_normals);
    g.ordering = f.ordering;
    g.relabeling = f.relabeling;
    g.abcd = f.abcd;
    g.geometry = f.geometry;
    return g;
  }
  // u = z2/z1 and v = z3/z1 are unchanged under z -> -z; centre the chart on
  // whichever half-axis the sector lies around.
  const double sign = f.geometry.vertices[0].x() < 0 ? -1.0 : 1.0;
  for (const auto& vtx : f.geometry.vertices)
    if (sign * vtx.x() <= 1e-12)
      fail(ErrorKind::Domain, "sector " + to_string(p) + " is not contained in an open hemisphere of the chart");
  f.center = sign * Vec3::UnitX();
  f.e_u = sign * Vec3::UnitY();
  f.e_v = sign * Vec3::UnitZ();

  const double bd = b + d;
  f.affine << -2.0 * a * d / bd, 2.0 * b * d / bd, -2.0 * b * c / bd, -2.0 * b * d / bd;
  f.offset << -(b - d) / bd, -(d - b) / bd;
  finish(f);
  check_corners(f);
  return f;
}

FlattenedSector flatten_normals(const std::array<Vec3, 3>& inward_normals) {
  FlattenedSector f;
  f.geometry = triangle_geometry(inward_normals);
  const auto& V = f.geometry.vertices;
  f.center = (V[0] + V[1] + V[2]).normalized();
  for (const auto& vtx : V)
    if (f.center.dot(vtx) <= 1e-9) fail(ErrorKind::Domain, "triangle is not contained in an open hemisphere");
  Eigen::Index axis = 0;
  f.center.cwiseAbs().minCoeff(&axis);
  f.e_u = f.center.cross(Vec3::Unit(axis)).normalized();
  f.e_v = f.center.cross(f.e_u);

  std::array<Eigen::Vector2d, 3> uv;
  for (int k = 0; k < 3; ++k) uv[k] = f.chart(V[k]);
  Eigen::Matrix2d P, Q;
  P << uv[0] - uv[2], uv[1] - uv[2];
  Q << kCorners[0] - kCorners[2], kCorners[1] - kCorners[2];
  f.affine = Q * P.inverse();
  f.offset = kCorners[2] - f.affine * uv[2];
  finish(f);
  check_corners(f);
  return f;
}

OperatorCoefficients operator_coefficients_uv(double u, double v) {
  const double f = 1.0 + u * u + v * v;
  OperatorCoefficients c;
  c.g_ss = f * (1.0 + u * u);
  c.g_st = f * u * v;
  c.g_tt = f * (1.0 + v * v);
  c.b_s = 2.0 * f * u;
  c.b_t = 2.0 * f * v;
  c.density = std::pow(f, -1.5);
  return c;
}

OperatorCoefficients operator_coefficients(const FlattenedSector& sector, double s, double t) {
  constexpr double tol = 1e-12;
  if (s < -1.0 - tol || t < -1.0 - tol || s + t > tol)
    fail(ErrorKind::Domain, "point (" + std::to_string(s) + ", " + std::to_string(t) + ") is outside the triangle");
  const Eigen::Vector2d uv = sector.to_uv(Eigen::Vector2d(s, t));
  const auto c = operator_coefficients_uv(uv.x(), uv.y());
  Eigen::Matrix2d G;
  G << c.g_ss, c.g_st, c.g_st, c.g_tt;
  const Eigen::Matrix2d Gst = sector.affine * G * sector.affine.transpose();
  const Eigen::Vector2d bst = sector.affine * Eigen::Vector2d(c.b_s, c.b_t);
  OperatorCoefficients out;
  out.g_ss = Gst(0, 0);
  out.g_st = 0.5 * (Gst(0, 1) + Gst(1, 0));
  out.g_tt = Gst(1, 1);
  out.b_s = bst.x();
  out.b_t = bst.y();
  out.density = c.density * sector.jacobian_const;
  return out;
}

BasisTruncation make_truncation(int n_max) {
  if (n_max < 2) fail(ErrorKind::InvalidArgument, "n_max must be at least 2");
  BasisTruncation t;
  t.n_max = n_max;
  for (int n = 1; n <= n_max; ++n)
    for (int m = n + 1; m <= n_max; ++m) t.index_pairs.emplace_back(n, m);
  return t;
}

double basis_function(int n, int m, double s, double t) {
  const double X = kHalfPi * (s + 1.0), Y = kHalfPi * (t - 1.0);
  return std::sin(n * X) * std::sin(m * Y) - std::sin(m * X) * std::sin(n * Y);
}

BasisValue basis_derivatives(int n, int m, double s, double t) {
  const double X = kHalfPi * (s + 1.0), Y = kHalfPi * (t - 1.0);
  const double snx = std::sin(n * X), cnx = std::cos(n * X), smx = std::sin(m * X), cmx = std::cos(m * X);
  const double sny = std::sin(n * Y), cny = std::cos(n * Y), smy = std::sin(m * Y), cmy = std::cos(m * Y);
  const double k = kHalfPi, k2 = kHalfPi * kHalfPi;
  BasisValue r;
  r.value = snx * smy - smx * sny;
  r.ds = k * (n * cnx * smy - m * cmx * sny);
  r.dt = k * (m * snx * cmy - n * smx * cny);
  r.dss = -k2 * (n * n * snx * smy - m * m * smx * sny);
  r.dst = k2 * n * m * (cnx * cmy - cmx * cny);
  r.dtt = -k2 * (m * m * snx * smy - n * n * smx * sny);
  return r;
}

GalerkinSystem assemble(const FlattenedSector& sector, const BasisTruncation& trunc, int quadrature_order) {
  if (trunc.size() == 0) fail(ErrorKind::InvalidArgument, "empty basis");
  if (quadrature_order < 3 * trunc.n_max)
    fail(ErrorKind::InvalidArgument, "quadrature order " + std::to_string(quadrature_order) +
                                         " is below 3 n_max = " + std::to_string(3 * trunc.n_max));
  const TriangleRule rule = duffy_triangle(quadrature_order);
  const int nb = trunc.size(), nmax = trunc.n_max;
  const Eigen::Index npts = static_cast<Eigen::Index>(rule.w.size());
  const Eigen::Matrix2d Minv = sector.affine.inverse();
  constexpr Eigen::Index block = 256;
  const Eigen::Index nblocks = (npts + block - 1) / block;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nb, nb), B = Eigen::MatrixXd::Zero(nb, nb);
#pragma omp parallel if (nblocks > 1)
  {
    Eigen::MatrixXd Al = Eigen::MatrixXd::Zero(nb, nb), Bl = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::MatrixXd U1(nb, block), U2(nb, block), Phi(nb, block);
    std::vector<double> sx(nmax + 1), cx(nmax + 1), sy(nmax + 1), cy(nmax + 1);
#pragma omp for schedule(dynamic)
    for (Eigen::Index blk = 0; blk < nblocks; ++blk) {
      const Eigen::Index q0 = blk * block, q1 = std::min(npts, q0 + block), cols = q1 - q0;
      for (Eigen::Index q = q0; q < q1; ++q) {
        const double s = rule.s[q], t = rule.t[q];
        const Eigen::Vector2d uv = Minv * (Eigen::Vector2d(s, t) - sector.offset);
        const auto c = operator_coefficients_uv(uv.x(), uv.y());
        Eigen::Matrix2d G;
        G << c.g_ss, c.g_st, c.g_st, c.g_tt;
        const double wq = rule.w[q] * c.density * sector.jacobian_const;
        const Eigen::Matrix2d K = wq * (sector.affine * G * sector.affine.transpose());
        // grad h . K grad h = (l11 h_s + l21 h_t)^2 + (l22 h_t)^2
        const double l11 = std::sqrt(K(0, 0)), l21 = K(0, 1) / l11;
        const double l22 = std::sqrt(std::max(0.0, K(1, 1) - l21 * l21));
        const double rb = std::sqrt(wq);
        const double X = kHalfPi * (s + 1.0), Y = kHalfPi * (t - 1.0);
        for (int k = 1; k <= nmax; ++k) {
          sx[k] = std::sin(k * X);
          cx[k] = std::cos(k * X);
          sy[k] = std::sin(k * Y);
          cy[k] = std::cos(k * Y);
        }
        const Eigen::Index col = q - q0;
        for (int i = 0; i < nb; ++i) {
          const auto [n, m] = trunc.index_pairs[i];
          const double hs = kHalfPi * (n * cx[n] * sy[m] - m * cx[m] * sy[n]);
          const double ht = kHalfPi * (m * sx[n] * cy[m] - n * sx[m] * cy[n]);
          U1(i, col) = l11 * hs + l21 * ht;
          U2(i, col) = l22 * ht;
          Phi(i, col) = rb * (sx[n] * sy[m] - sx[m] * sy[n]);
        }
      }
      Al.selfadjointView<Eigen::Lower>().rankUpdate(U1.leftCols(cols));
      Al.selfadjointView<Eigen::Lower>().rankUpdate(U2.leftCols(cols));
      Bl.selfadjointView<Eigen::Lower>().rankUpdate(Phi.leftCols(cols));
    }
#pragma omp critical
    {
      A += Al;
      B += Bl;
    }
  }
  A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
  B.triangularView<Eigen::StrictlyUpper>() = B.transpose();

  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::Numerical, "overlap matrix is not positive-definite; increase the quadrature order");

  GalerkinSystem sys;
  sys.stiffness = std::move(A);
  sys.overlap = std::move(B);
  sys.truncation = trunc;
  sys.quadrature_order = quadrature_order;
  return sys;
}

double effective_lambda(double eigenvalue) { return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * eigenvalue)); }

EigenSpectrum solve_spectrum(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int k) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows() || A.rows() == 0)
    fail(ErrorKind::InvalidArgument, "A and B must be square matrices of equal size");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) {
    const Eigen::VectorXd bev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B, Eigen::EigenvaluesOnly).eigenvalues();
    const double cond = bev.minCoeff() > 0 ? bev.maxCoeff() / bev.minCoeff() : std::numeric_limits<double>::infinity();
    fail(ErrorKind::Numerical, "generalized eigensolver did not converge (condition of B ~ " + std::to_string(cond) + ")");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  const int count = (k <= 0 || k > ev.size()) ? static_cast<int>(ev.size()) : k;
  EigenSpectrum spec;
  spec.values.assign(ev.data(), ev.data() + count);
  if (!spec.values.empty() && !(spec.values.front() > 0.0))
    fail(ErrorKind::Numerical, "non-positive eigenvalue " + std::to_string(spec.values.front()));
  for (double e : spec.values) spec.effective_lambda.push_back(effective_lambda(e));
  spec.delta_last.assign(count, std::numeric_limits<double>::quiet_NaN());
  return spec;
}

EigenSpectrum solve_spectrum(const GalerkinSystem& system, int k) {
  EigenSpectrum spec = solve_spectrum(system.stiffness, system.overlap, k);
  spec.truncation = system.truncation;
  spec.quadrature_order = system.quadrature_order;
  return spec;
}

EigenSpectrum solve_sector(const FlattenedSector& sector, int n_max, int k, int quadrature_order) {
  const int order = quadrature_order > 0 ? quadrature_order : 3 * n_max;
  return solve_spectrum(assemble(sector, make_truncation(n_max), order), k);
}

ConvergenceStudy convergence_study(const FlattenedSector& sector, const std::vector<int>& n_max_grid, int k,
                                   double tolerance, int quadrature_order_factor) {
  if (n_max_grid.size() < 2) fail(ErrorKind::InvalidArgument, "convergence study needs at least two n_max values");
  if (!std::is_sorted(n_max_grid.begin(), n_max_grid.end()) ||
      std::adjacent_find(n_max_grid.begin(), n_max_grid.end()) != n_max_grid.end())
    fail(ErrorKind::InvalidArgument, "n_max grid must be strictly ascending");
  if (quadrature_order_factor < 3) fail(ErrorKind::InvalidArgument, "quadrature order factor must be at least 3");
  ConvergenceStudy study;
  study.n_max_grid = n_max_grid;
  study.tolerance = tolerance;
  for (int n : n_max_grid) study.spectra.push_back(solve_sector(sector, n, k, quadrature_order_factor * n));
  for (std::size_t j = 0; j + 1 < study.spectra.size(); ++j) {
    const auto& lo = study.spectra[j].values;
    auto& hi = study.spectra[j + 1];
    std::vector<double> d(std::min(lo.size(), hi.values.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = std::abs(hi.values[i] - lo[i]);
      hi.delta_last[i] = d[i];
    }
    study.deltas.push_back(std::move(d));
  }
  const auto& last = study.deltas.back();
  int conv = 0;
  while (conv < static_cast<int>(last.size()) && last[conv] < tolerance) ++conv;
  study.converged_count = conv;
  study.spectra.back().converged_count = conv;
  return study;
}

std::string spectrum_csv(const EigenSpectrum& spectrum) {
  std::ostringstream os;
  os << "k,eigenvalue,lambda_eff,delta_last_refinement\n";
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
    os << (i + 1) << ',' << fmt12(spectrum.values[i]) << ',' << fmt12(spectrum.effective_lambda[i]) << ',';
    if (i < spectrum.delta_last.size() && std::isfinite(spectrum.delta_last[i])) os << fmt12(spectrum.delta_last[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace hcb
