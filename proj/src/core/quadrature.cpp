#include "hcb/quadrature.hpp"

#include <cmath>

namespace hcb {

Rule1D gauss_legendre(int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "Gauss-Legendre order must be positive");
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

SphereRule sphere_rule(int n_theta, int n_phi) {
  if (n_phi < 1) fail(ErrorKind::InvalidArgument, "azimuthal point count must be positive");
  const Rule1D gl = gauss_legendre(n_theta);
  SphereRule r;
  r.points.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  r.weights.reserve(r.points.capacity());
  const double dphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = gl.nodes[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = dphi * j;
      r.points.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      r.weights.push_back(gl.weights[i] * dphi);
    }
  }
  return r;
}

TriangleRule duffy_triangle(int order) {
  const Rule1D gl = gauss_legendre(order);
  TriangleRule r;
  const std::size_t n = static_cast<std::size_t>(order) * order;
  r.s.reserve(n);
  r.t.reserve(n);
  r.w.reserve(n);
  // (xi, eta) in [0,1]^2 -> s = -1 + 2 xi (1 - eta), t = -1 + 2 xi eta, |J| = 4 xi.
  for (int i = 0; i < order; ++i) {
    const double xi = 0.5 * (gl.nodes[i] + 1.0), wx = 0.5 * gl.weights[i];
    for (int j = 0; j < order; ++j) {
      const double eta = 0.5 * (gl.nodes[j] + 1.0), we = 0.5 * gl.weights[j];
      r.s.push_back(-1.0 + 2.0 * xi * (1.0 - eta));
      r.t.push_back(-1.0 + 2.0 * xi * eta);
      r.w.push_back(4.0 * xi * wx * we);
    }
  }
  return r;
}

}  // namespace hcb
