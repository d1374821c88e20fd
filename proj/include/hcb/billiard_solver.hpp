#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hcb/jacobi_geometry.hpp"
#include "hcb/mass_families.hpp"

namespace hcb {

/// A spherical triangle charted gnomonically, u = (e_u . z)/(c . z) and
/// v = (e_v . z)/(c . z) with c . z > 0 on the triangle, then mapped affinely onto the right isosceles triangle
/// s > -1, t > -1, s + t < 0.
struct FlattenedSector {
  Ordering ordering{1, 2, 3, 4};
  /// Canonical particle k+1 is the caller's particle relabeling[k]. The canonical
  /// sector is x1 < x3 < x4 < x2.
  Ordering relabeling{1, 2, 3, 4};
  /// a, b, c, d of the canonical frame (mass route only).
  std::optional<std::array<double, 4>> abcd;
  Vec3 center = Vec3::UnitX();
  Vec3 e_u = Vec3::UnitY();
  Vec3 e_v = Vec3::UnitZ();
  Eigen::Matrix2d affine = Eigen::Matrix2d::Identity();  // d(s,t)/d(u,v)
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  double jacobian_const = 1.0;  // |det d(u,v)/d(s,t)|
  SectorGeometry geometry;      // in the chart's z frame

  Eigen::Vector2d to_st(const Eigen::Vector2d& uv) const { return affine * uv + offset; }
  Eigen::Vector2d to_uv(const Eigen::Vector2d& st) const;
  Vec3 to_sphere(double s, double t) const;
  Eigen::Vector2d chart(const Vec3& z) const;
};

/// Where the gnomonic chart is centred. Axis uses u = z2/z1, v = z3/z1 and the
/// closed-form a, b, c, d map; Centroid centres the chart on the normalized
/// vertex sum, which distorts obtuse sectors less. Both send the same vertex to
/// each corner, so the spectra agree in the converged limit.
enum class ChartCenter { Axis, Centroid };

/// Relabels the masses so that ordering p becomes the canonical sector, builds
/// the H-type plane set and the (u, v) -> (s, t) map. Throws
/// ErrorKind::Domain if the sector leaves the chart hemisphere and
/// ErrorKind::Consistency if a vertex fails to land on its corner.
FlattenedSector flatten_sector(const MassSequence& masses, const Ordering& p, ChartCenter chart = ChartCenter::Axis);

/// Same construction for an arbitrary triangle given by inward normals; the chart
/// is centred on the normalized vertex sum. Vertices map as
/// P1^P3 -> (-1,-1), P1^P2 -> (-1,1), P2^P3 -> (1,-1).
FlattenedSector flatten_normals(const std::array<Vec3, 3>& inward_normals);

/// L f = g^ss f_ss + 2 g^st f_st + g^tt f_tt + b^s f_s + b^t f_t equals the
/// Laplace-Beltrami operator of the unit sphere in the flattened coordinates.
/// `density` is the pulled-back spherical measure per ds dt.
struct OperatorCoefficients {
  double g_ss = 0, g_st = 0, g_tt = 0, b_s = 0, b_t = 0;
  double density = 0;
};

/// Coefficients of the gnomonic-chart operator at (u, v); at the origin they are {1, 0, 1, 0, 0}.
OperatorCoefficients operator_coefficients_uv(double u, double v);
/// Affine pushforward of the (u, v) coefficients. Throws ErrorKind::Domain outside the triangle.
OperatorCoefficients operator_coefficients(const FlattenedSector& sector, double s, double t);

struct BasisTruncation {
  int n_max = 0;
  std::vector<std::pair<int, int>> index_pairs;  // (n, m), 1 <= n < m <= n_max
  int size() const noexcept { return static_cast<int>(index_pairs.size()); }
};

BasisTruncation make_truncation(int n_max);

struct BasisValue {
  double value = 0, ds = 0, dt = 0, dss = 0, dst = 0, dtt = 0;
};

/// h_{n,m}(s,t) = sin(n X) sin(m Y) - sin(m X) sin(n Y), X = pi(s+1)/2,
/// Y = pi(t-1)/2: the Dirichlet eigenfunctions of the flat triangle, unit norm
/// under ds dt.
double basis_function(int n, int m, double s, double t);
BasisValue basis_derivatives(int n, int m, double s, double t);

struct GalerkinSystem {
  Eigen::MatrixXd stiffness;  // A
  Eigen::MatrixXd overlap;    // B
  BasisTruncation truncation;
  int quadrature_order = 0;
};

/// A_ij = int grad h_i . G grad h_j sqrt(g), B_ij = int h_i h_j sqrt(g) over the
/// triangle. Throws ErrorKind::InvalidArgument if quadrature_order < 3 n_max and
/// ErrorKind::Numerical if B is not positive-definite.
GalerkinSystem assemble(const FlattenedSector& sector, const BasisTruncation& trunc, int quadrature_order);

struct EigenSpectrum {
  std::vector<double> values;            // ascending eigenvalues of -Laplacian
  std::vector<double> effective_lambda;  // (-1 + sqrt(1 + 4 E)) / 2
  std::vector<double> delta_last;        // |E_k(this) - E_k(previous n_max)|, NaN if unknown
  BasisTruncation truncation;
  int quadrature_order = 0;
  int converged_count = 0;
};

double effective_lambda(double eigenvalue);

/// Lowest k eigenvalues of A x = E B x (all of them if k <= 0).
EigenSpectrum solve_spectrum(const GalerkinSystem& system, int k);
EigenSpectrum solve_spectrum(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int k);

/// Assemble and solve at one truncation; quadrature_order <= 0 selects 3 n_max.
EigenSpectrum solve_sector(const FlattenedSector& sector, int n_max, int k, int quadrature_order = 0);

struct ConvergenceStudy {
  std::vector<int> n_max_grid;
  std::vector<EigenSpectrum> spectra;
  /// deltas[j][k] = |E_k(grid[j+1]) - E_k(grid[j])|.
  std::vector<std::vector<double>> deltas;
  double tolerance = 0.0;
  int converged_count = 0;
  /// Finest spectrum with delta_last filled in and converged_count set.
  const EigenSpectrum& final_spectrum() const { return spectra.back(); }
};

/// Solves at each n_max of an ascending grid (at least two entries). A level is
/// converged when its last-refinement delta is below `tolerance`;
/// converged_count is the length of the leading run of converged levels.
ConvergenceStudy convergence_study(const FlattenedSector& sector, const std::vector<int>& n_max_grid, int k,
                                   double tolerance, int quadrature_order_factor = 3);

/// Columns k, eigenvalue, lambda_eff, delta_last_refinement.
std::string spectrum_csv(const EigenSpectrum& spectrum);

}  // namespace hcb
