#include "hcb/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace hcb {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Infeasible: return "infeasible parameters";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Consistency: return "consistency error";
  }
  return "unknown error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

bool is_permutation_of_four(const Ordering& p) noexcept {
  std::array<int, 4> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  return sorted == std::array<int, 4>{1, 2, 3, 4};
}

Ordering reversed(const Ordering& p) noexcept { return {p[3], p[2], p[1], p[0]}; }

std::string to_string(const Ordering& p) {
  std::string s;
  for (int label : p) s += std::to_string(label);
  return s;
}

double round12(double x) noexcept {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace hcb
