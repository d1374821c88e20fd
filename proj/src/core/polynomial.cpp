#include "hcb/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace hcb {

HomogeneousPolynomial::HomogeneousPolynomial(int degree) : degree_(degree) {
  if (degree < 0) fail(ErrorKind::InvalidArgument, "polynomial degree must be non-negative");
  coef_.assign(static_cast<std::size_t>(degree + 1) * (degree + 2) / 2, 0.0);
}

HomogeneousPolynomial HomogeneousPolynomial::constant(double c) {
  HomogeneousPolynomial p(0);
  p.coef_[0] = c;
  return p;
}

HomogeneousPolynomial HomogeneousPolynomial::linear(const Vec3& v) {
  HomogeneousPolynomial p(1);
  p.set(1, 0, 0, v.x());
  p.set(0, 1, 0, v.y());
  p.set(0, 0, 1, v.z());
  return p;
}

HomogeneousPolynomial HomogeneousPolynomial::monomial(int a, int b, int c, double coefficient) {
  HomogeneousPolynomial p(a + b + c);
  p.set(a, b, c, coefficient);
  return p;
}

double HomogeneousPolynomial::coefficient(int a, int b, int c) const {
  if (a < 0 || b < 0 || c < 0 || a + b + c != degree_) return 0.0;
  return coef_[index(a, b)];
}

void HomogeneousPolynomial::set(int a, int b, int c, double value) {
  if (a < 0 || b < 0 || c < 0 || a + b + c != degree_)
    fail(ErrorKind::InvalidArgument, "exponents do not match the polynomial degree");
  coef_[index(a, b)] = value;
}

void HomogeneousPolynomial::add(int a, int b, int c, double value) {
  if (a < 0 || b < 0 || c < 0 || a + b + c != degree_)
    fail(ErrorKind::InvalidArgument, "exponents do not match the polynomial degree");
  coef_[index(a, b)] += value;
}

std::vector<HomogeneousPolynomial::Term> HomogeneousPolynomial::terms(double rel_tol) const {
  const double cut = rel_tol * max_abs_coefficient();
  std::vector<Term> out;
  for (int a = degree_; a >= 0; --a)
    for (int b = degree_ - a; b >= 0; --b) {
      const double x = coef_[index(a, b)];
      if (x != 0.0 && std::abs(x) > cut) out.push_back({{a, b, degree_ - a - b}, x});
    }
  return out;
}

double HomogeneousPolynomial::max_abs_coefficient() const noexcept {
  double m = 0.0;
  for (double x : coef_) m = std::max(m, std::abs(x));
  return m;
}

bool HomogeneousPolynomial::is_zero(double abs_tol) const noexcept { return max_abs_coefficient() <= abs_tol; }

double HomogeneousPolynomial::evaluate(const Vec3& z) const {
  std::vector<double> p1(degree_ + 1, 1.0), p2(degree_ + 1, 1.0), p3(degree_ + 1, 1.0);
  for (int k = 1; k <= degree_; ++k) {
    p1[k] = p1[k - 1] * z.x();
    p2[k] = p2[k - 1] * z.y();
    p3[k] = p3[k - 1] * z.z();
  }
  double s = 0.0;
  for (int a = 0; a <= degree_; ++a)
    for (int b = 0; a + b <= degree_; ++b) s += coef_[index(a, b)] * p1[a] * p2[b] * p3[degree_ - a - b];
  return s;
}

HomogeneousPolynomial& HomogeneousPolynomial::operator+=(const HomogeneousPolynomial& o) {
  if (o.degree_ != degree_) fail(ErrorKind::InvalidArgument, "adding polynomials of different degree");
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
  return *this;
}

HomogeneousPolynomial& HomogeneousPolynomial::operator-=(const HomogeneousPolynomial& o) {
  if (o.degree_ != degree_) fail(ErrorKind::InvalidArgument, "subtracting polynomials of different degree");
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
  return *this;
}

HomogeneousPolynomial& HomogeneousPolynomial::operator*=(double s) {
  for (double& x : coef_) x *= s;
  return *this;
}

HomogeneousPolynomial operator*(const HomogeneousPolynomial& p, const HomogeneousPolynomial& q) {
  HomogeneousPolynomial out(p.degree_ + q.degree_);
  for (int a = 0; a <= p.degree_; ++a)
    for (int b = 0; a + b <= p.degree_; ++b) {
      const double x = p.coef_[p.index(a, b)];
      if (x == 0.0) continue;
      for (int a2 = 0; a2 <= q.degree_; ++a2)
        for (int b2 = 0; a2 + b2 <= q.degree_; ++b2) out.coef_[out.index(a + a2, b + b2)] += x * q.coef_[q.index(a2, b2)];
    }
  return out;
}

HomogeneousPolynomial HomogeneousPolynomial::times_linear(const Vec3& v) const {
  HomogeneousPolynomial out(degree_ + 1);
  for (int a = 0; a <= degree_; ++a)
    for (int b = 0; a + b <= degree_; ++b) {
      const double x = coef_[index(a, b)];
      if (x == 0.0) continue;
      out.coef_[out.index(a + 1, b)] += v.x() * x;
      out.coef_[out.index(a, b + 1)] += v.y() * x;
      out.coef_[out.index(a, b)] += v.z() * x;
    }
  return out;
}

HomogeneousPolynomial HomogeneousPolynomial::compose(const Mat3& O) const {
  const Vec3 r1 = O.row(0).transpose(), r2 = O.row(1).transpose(), r3 = O.row(2).transpose();
  std::vector<HomogeneousPolynomial> l3pow;
  l3pow.reserve(degree_ + 1);
  l3pow.push_back(constant(1.0));
  for (int k = 1; k <= degree_; ++k) l3pow.push_back(l3pow.back().times_linear(r3));

  // p = sum_a z1^a Q_a(z2, z3), each level evaluated by homogeneous Horner.
  auto inner = [&](int a) {
    const int k = degree_ - a;
    HomogeneousPolynomial r = constant(coef_[index(a, k)]);
    for (int b = k - 1; b >= 0; --b) {
      r = r.times_linear(r2);
      const double c = coef_[index(a, b)];
      if (c != 0.0) {
        const auto& pw = l3pow[k - b];
        for (std::size_t i = 0; i < r.coef_.size(); ++i) r.coef_[i] += c * pw.coef_[i];
      }
    }
    return r;
  };
  HomogeneousPolynomial acc = inner(degree_);
  for (int a = degree_ - 1; a >= 0; --a) {
    acc = acc.times_linear(r1);
    acc += inner(a);
  }
  return acc;
}

HomogeneousPolynomial HomogeneousPolynomial::laplacian() const {
  if (degree_ < 2) return HomogeneousPolynomial(0);
  HomogeneousPolynomial out(degree_ - 2);
  for (int a = 0; a <= degree_; ++a)
    for (int b = 0; a + b <= degree_; ++b) {
      const int c = degree_ - a - b;
      const double x = coef_[index(a, b)];
      if (x == 0.0) continue;
      if (a >= 2) out.coef_[out.index(a - 2, b)] += a * (a - 1) * x;
      if (b >= 2) out.coef_[out.index(a, b - 2)] += b * (b - 1) * x;
      if (c >= 2) out.coef_[out.index(a, b)] += c * (c - 1) * x;
    }
  return out;
}

HomogeneousPolynomial HomogeneousPolynomial::derivative(int var) const {
  if (var < 0 || var > 2) fail(ErrorKind::InvalidArgument, "derivative variable must be 0, 1 or 2");
  if (degree_ == 0) return HomogeneousPolynomial(0);
  HomogeneousPolynomial out(degree_ - 1);
  for (int a = 0; a <= degree_; ++a)
    for (int b = 0; a + b <= degree_; ++b) {
      const int c = degree_ - a - b;
      const double x = coef_[index(a, b)];
      if (x == 0.0) continue;
      if (var == 0 && a > 0) out.coef_[out.index(a - 1, b)] += a * x;
      if (var == 1 && b > 0) out.coef_[out.index(a, b - 1)] += b * x;
      if (var == 2 && c > 0) out.coef_[out.index(a, b)] += c * x;
    }
  return out;
}

double sphere_moment(int a, int b, int c) {
  if ((a | b | c) & 1) return 0.0;
  return 2.0 * std::exp(std::lgamma(0.5 * (a + 1)) + std::lgamma(0.5 * (b + 1)) + std::lgamma(0.5 * (c + 1)) -
                        std::lgamma(0.5 * (a + b + c + 3)));
}

double sphere_inner(const HomogeneousPolynomial& p, const HomogeneousPolynomial& q) {
  const int dp = p.degree(), dq = q.degree();
  if ((dp + dq) & 1) return 0.0;
  // Moments only depend on the summed exponents; tabulate them once.
  const int d = dp + dq;
  std::vector<double> mom(static_cast<std::size_t>(d + 1) * (d + 1), 0.0);
  for (int a = 0; a <= d; a += 2)
    for (int b = 0; a + b <= d; b += 2)
      if (((d - a - b) & 1) == 0) mom[static_cast<std::size_t>(a) * (d + 1) + b] = sphere_moment(a, b, d - a - b);
  double s = 0.0;
  for (int a = 0; a <= dp; ++a)
    for (int b = 0; a + b <= dp; ++b) {
      const double x = p.coefficients()[p.index(a, b)];
      if (x == 0.0) continue;
      for (int a2 = a & 1; a2 <= dq; a2 += 2)
        for (int b2 = b & 1; a2 + b2 <= dq; b2 += 2)
          s += x * q.coefficients()[q.index(a2, b2)] * mom[static_cast<std::size_t>(a + a2) * (d + 1) + b + b2];
    }
  return s;
}

double sphere_norm(const HomogeneousPolynomial& p) { return std::sqrt(std::max(0.0, sphere_inner(p, p))); }

HomogeneousPolynomial radius_power(int k) {
  HomogeneousPolynomial out(2 * k);
  std::vector<double> fact(k + 1, 1.0);
  for (int i = 1; i <= k; ++i) fact[i] = fact[i - 1] * i;
  for (int i = 0; i <= k; ++i)
    for (int j = 0; i + j <= k; ++j) out.set(2 * i, 2 * j, 2 * (k - i - j), fact[k] / (fact[i] * fact[j] * fact[k - i - j]));
  return out;
}

std::string to_json(const HomogeneousPolynomial& p, double rel_tol) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : p.terms(rel_tol))
    j.push_back({{"exponents", {t.exponents[0], t.exponents[1], t.exponents[2]}}, {"coefficient", round12(t.coefficient)}});
  return j.dump();
}

}  // namespace hcb
