#pragma once

#include <vector>

#include "hcb/common.hpp"

namespace hcb {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule1D gauss_legendre(int n);

struct SphereRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
};

/// Product rule: Gauss-Legendre in cos(theta) times equispaced azimuths.
/// Exact for polynomials of total degree <= min(2 n_theta - 1, n_phi - 1).
SphereRule sphere_rule(int n_theta, int n_phi);

struct TriangleRule {
  std::vector<double> s, t, w;
};

/// Rule on {s > -1, t > -1, s + t < 0}: a tensor Gauss-Legendre rule of the
/// given order per direction collapsed onto the corner (-1, -1).
TriangleRule duffy_triangle(int order);

}  // namespace hcb
