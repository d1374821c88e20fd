#pragma once

#include <array>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hcb {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

/// Error categories. The C API maps each one onto a status code.
enum class ErrorKind {
  InvalidArgument,
  Domain,
  Infeasible,
  Geometry,
  Numerical,
  InsufficientData,
  Unsupported,
  Consistency,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

/// Particle order x_{p1} <= ... <= x_{p4}, 1-based labels.
using Ordering = std::array<int, 4>;

bool is_permutation_of_four(const Ordering& p) noexcept;
Ordering reversed(const Ordering& p) noexcept;
std::string to_string(const Ordering& p);

/// Rounds to 12 significant digits so that JSON and CSV output carry no more.
double round12(double x) noexcept;

/// printf "%.12g".
std::string fmt12(double x);

}  // namespace hcb
