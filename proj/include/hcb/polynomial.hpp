#pragma once

#include <array>
#include <string>
#include <vector>

#include "hcb/common.hpp"

namespace hcb {

/// Homogeneous polynomial of a fixed degree d in (z1, z2, z3). Coefficients are
/// stored densely over all (d+1)(d+2)/2 monomials z1^a z2^b z3^c, c = d - a - b.
class HomogeneousPolynomial {
 public:
  struct Term {
    std::array<int, 3> exponents;
    double coefficient;
  };

  HomogeneousPolynomial() : HomogeneousPolynomial(0) {}
  explicit HomogeneousPolynomial(int degree);

  static HomogeneousPolynomial constant(double c);
  static HomogeneousPolynomial linear(const Vec3& v);
  static HomogeneousPolynomial monomial(int a, int b, int c, double coefficient = 1.0);

  int degree() const noexcept { return degree_; }
  static constexpr int num_vars() noexcept { return 3; }
  std::size_t size() const noexcept { return coef_.size(); }

  double coefficient(int a, int b, int c) const;
  void set(int a, int b, int c, double value);
  void add(int a, int b, int c, double value);

  /// Flat index of z1^a z2^b z3^(d-a-b).
  std::size_t index(int a, int b) const noexcept {
    return static_cast<std::size_t>(a) * (2 * degree_ + 3 - a) / 2 + static_cast<std::size_t>(b);
  }
  const std::vector<double>& coefficients() const noexcept { return coef_; }
  std::vector<double>& coefficients() noexcept { return coef_; }

  /// Nonzero monomials; coefficients with |c| <= rel_tol * max|c| are omitted.
  std::vector<Term> terms(double rel_tol = 0.0) const;
  double max_abs_coefficient() const noexcept;
  bool is_zero(double abs_tol = 0.0) const noexcept;

  double evaluate(const Vec3& z) const;

  HomogeneousPolynomial& operator+=(const HomogeneousPolynomial& o);
  HomogeneousPolynomial& operator-=(const HomogeneousPolynomial& o);
  HomogeneousPolynomial& operator*=(double s);
  friend HomogeneousPolynomial operator+(HomogeneousPolynomial a, const HomogeneousPolynomial& b) { return a += b; }
  friend HomogeneousPolynomial operator-(HomogeneousPolynomial a, const HomogeneousPolynomial& b) { return a -= b; }
  friend HomogeneousPolynomial operator*(HomogeneousPolynomial a, double s) { return a *= s; }
  friend HomogeneousPolynomial operator*(double s, HomogeneousPolynomial a) { return a *= s; }
  friend HomogeneousPolynomial operator*(const HomogeneousPolynomial& a, const HomogeneousPolynomial& b);

  /// Multiplication by the linear form v . z.
  HomogeneousPolynomial times_linear(const Vec3& v) const;

  /// z -> p(O z).
  HomogeneousPolynomial compose(const Mat3& O) const;

  HomogeneousPolynomial laplacian() const;
  /// Partial derivative with respect to z_{var+1}.
  HomogeneousPolynomial derivative(int var) const;

 private:
  int degree_;
  std::vector<double> coef_;
};

/// Integral of z1^a z2^b z3^c over the unit sphere.
double sphere_moment(int a, int b, int c);

/// Unit-sphere L2 inner product from closed-form moments.
double sphere_inner(const HomogeneousPolynomial& p, const HomogeneousPolynomial& q);
double sphere_norm(const HomogeneousPolynomial& p);

/// (x1^2 + x2^2 + x3^2)^k as a polynomial of degree 2k.
HomogeneousPolynomial radius_power(int k);

/// JSON list of {"exponents": [a,b,c], "coefficient": x}, 12 significant digits.
std::string to_json(const HomogeneousPolynomial& p, double rel_tol = 0.0);

}  // namespace hcb
