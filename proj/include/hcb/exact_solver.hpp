#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hcb/coxeter_groups.hpp"
#include "hcb/polynomial.hpp"
#include "hcb/quadrature.hpp"

namespace hcb {

/// Orthonormal real spherical harmonic Y_{lambda,mu} at a unit vector, with
/// theta measured from z3 and phi = atan2(z2, z1).
double real_spherical_harmonic_value(int lambda, int mu, const Vec3& unit);

/// Normalized associated Legendre values Pbar_l^m(cos theta) for l = lambda and
/// every m in [0, lambda], Condon-Shortley phase included.
std::vector<double> normalized_legendre_row(int lambda, double cos_theta);

/// rho^lambda Y_{lambda,mu} as a homogeneous polynomial of degree lambda.
HomogeneousPolynomial real_spherical_harmonic(int lambda, int mu);

struct HyperangularState {
  int lambda = 0;
  HomogeneousPolynomial polynomial;
  double norm = 0.0;                // sphere L2 norm of `polynomial`
  Eigen::VectorXd y_coefficients;   // in the basis Y_{lambda,-lambda..lambda}; empty if not computed
  int source_mu = 0;                // harmonic whose projection produced the state
};

/// The degree-lambda harmonics as a (2 lambda + 1)-dimensional space, with group
/// actions represented in the orthonormal real-Y basis. Column mu + lambda of
/// representation(O) holds the coefficients of Y_mu(O z).
class HarmonicSpace {
 public:
  explicit HarmonicSpace(int lambda);

  int lambda() const noexcept { return lambda_; }
  int dim() const noexcept { return 2 * lambda_ + 1; }

  /// Rows: points, columns: mu = -lambda..lambda.
  Eigen::MatrixXd values(const std::vector<Vec3>& unit_points) const;
  Eigen::MatrixXd representation(const Mat3& O) const;
  /// One matrix per group element, built along the word tree from the generators.
  std::vector<Eigen::MatrixXd> representations(const ReflectionGroup& group) const;
  /// (1/G) sum_g det(g) D(g).
  Eigen::MatrixXd anti_invariant_projector(const ReflectionGroup& group) const;

  HomogeneousPolynomial polynomial(const Eigen::VectorXd& coefficients) const;

 private:
  void legendre_row(double x, double* row) const;

  int lambda_;
  // Recurrence factors: pmm_[m] multiplies by sin(theta) per step, ab_ stores
  // (a_lm, b_lm) for l = m+2..lambda in column-major blocks.
  std::vector<double> pmm_;
  std::vector<double> ab_;
  SphereRule rule_;
  Eigen::MatrixXd weighted_values_;  // W Y at the rule points
};

/// Product of the linear forms of all reflection normals, unit sphere norm,
/// signed positive inside the fundamental chamber.
HyperangularState ground_state(const ReflectionGroup& group);

/// Inward normals of the chamber bounded by the simple-root planes whose
/// dihedral angles are pi/q (area 4 pi / G).
std::array<Vec3, 3> fundamental_chamber(const ReflectionGroup& group);

/// (1/G) sum_g det(g) (rho^lambda Y_{lambda,mu})(O(g) z) by polynomial composition.
HomogeneousPolynomial project_anti_invariant(int lambda, int mu, const ReflectionGroup& group);

/// Orthonormal anti-invariant harmonics of degree lambda, obtained by projecting
/// Y_mu for mu = 0, +1, -1, +2, ... and Gram-Schmidt in the Y basis. Throws
/// ErrorKind::Consistency when the number found differs from degeneracy(lambda).
std::vector<HyperangularState> excited_basis(int lambda, const ReflectionGroup& group, bool with_polynomials = true);

/// Order in which harmonics are swept: 0, 1, -1, 2, -2, ...
std::vector<int> mu_sweep(int lambda);

/// Largest |c' - det(g) c| over all g in the Y basis.
double anti_invariance_residual(const HyperangularState& state, const ReflectionGroup& group);

/// Generalized Laguerre L_n^alpha(x) by upward recurrence.
double laguerre(int n, double alpha, double x);

/// Hyperradial factor of an (N-1)-dimensional isotropic oscillator, unit norm
/// under rho^{N-2} d rho.
double radial_wavefunction(int nu, double lambda, double rho, int particles);

struct EnergyLevel {
  int n = 0, nu = 0, n1 = 0, n2 = 0;
  int lambda = 0;
  double energy = 0.0;
};

/// Every (n, nu, n1, n2) with energy <= e_max, sorted by energy then quantum numbers.
/// Supports A3, C3, H3 (four particles) and I2(q) (three particles).
std::vector<EnergyLevel> energy_levels(const CoxeterSpec& spec, double e_max, int particles);

std::string energy_levels_csv(const std::vector<EnergyLevel>& levels);
std::string to_json(const HyperangularState& state, double rel_tol = 1e-13);

}  // namespace hcb
