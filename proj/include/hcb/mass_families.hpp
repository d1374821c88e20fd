#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hcb {

/// Ordered positive masses (arbitrary common unit) together with the
/// normalized fractions mu_i = m_i / M.
class MassSequence {
 public:
  MassSequence() = default;
  /// Throws ErrorKind::Domain on a non-positive or non-finite mass and
  /// ErrorKind::InvalidArgument on fewer than three masses.
  explicit MassSequence(std::vector<double> masses);

  const std::vector<double>& masses() const noexcept { return masses_; }
  const std::vector<double>& fractions() const noexcept { return fractions_; }
  double total() const noexcept { return total_; }
  std::size_t size() const noexcept { return masses_.size(); }
  double operator[](std::size_t i) const { return masses_[i]; }

 private:
  std::vector<double> masses_;
  std::vector<double> fractions_;
  double total_ = 0.0;
};

/// One row of the table of connected, non-branching finite Coxeter groups.
struct CoxeterSpec {
  std::string name;          // "A3", "C3", "H3", "F4", "I2(7)", ...
  int rank = 0;              // m = N - 1
  std::vector<int> bracket;  // [q_1, ..., q_{N-2}]
  int lambda0 = 0;           // number of reflections
  long long order = 0;       // group order G

  int particles() const noexcept { return rank + 1; }
  bool operator==(const CoxeterSpec&) const = default;
};

/// The rows for three, four and five particles.
const std::vector<CoxeterSpec>& coxeter_table();

CoxeterSpec dihedral_spec(int q);
CoxeterSpec a_series(int rank);
CoxeterSpec c_series(int rank);

/// Parses names like "A3", "C5", "H3", "F4", "I2(7)" (case-insensitive).
CoxeterSpec coxeter_spec(std::string_view name);

/// Every candidate bracket for `particles` particles: Table rows plus the
/// A and C series beyond five particles.
std::vector<CoxeterSpec> candidate_specs(int particles);

/// Kaleidoscope angle between the coincidence planes Z_ij and Z_jk, in (0, pi/2).
double sector_angle(double mi, double mj, double mk);

/// omega_{i,i+1,i+2} for every consecutive triple.
std::vector<double> kaleidoscope_angles(const MassSequence& masses);

/// Runs the mass recurrence forward from (m1, m2). Throws ErrorKind::Infeasible
/// when a denominator becomes non-positive.
MassSequence generate_family(const CoxeterSpec& spec, double m1, double m2);

/// Open interval of ratios r = m2/m1 for which every recurrence step is
/// positive. `hi` may be +infinity and `lo` may be 0.
struct RatioInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double r) const noexcept { return r > lo && r < hi; }
};

RatioInterval feasible_ratio_interval(const CoxeterSpec& spec);

struct FamilyPoint {
  double ratio = 0.0;
  bool feasible = false;
  MassSequence masses;  // normalized so that the fractions sum to one; empty if infeasible
  std::string reason;   // why the point is infeasible
};

struct FamilyCurve {
  CoxeterSpec spec;
  RatioInterval interval;
  std::vector<FamilyPoint> points;
  std::size_t infeasible_count() const noexcept;
};

/// One normalized mass sequence per grid ratio. Infeasible points stay in the
/// output flagged as such. Throws ErrorKind::Infeasible if none is feasible.
FamilyCurve family_curve(const CoxeterSpec& spec, const std::vector<double>& ratio_grid);

/// `count` ratios spread geometrically across the open feasible interval.
std::vector<double> default_ratio_grid(const CoxeterSpec& spec, int count);

/// Ratio r at which the first and last masses coincide, if the family has one.
std::optional<double> symmetric_ratio(const CoxeterSpec& spec);

struct ClassificationResult {
  CoxeterSpec best;
  std::vector<double> measured_angles;
  std::vector<double> target_angles;  // pi/q_i in the order of the measured angles
  double max_deviation = 0.0;         // Chebyshev distance in radians
  bool reversed = false;              // the masses match the reversed bracket
  double fitted_q = 0.0;              // continuous pi/omega, three particles only
};

ClassificationResult classify(const MassSequence& masses);

/// Header `r,mu1,...,muN`, 12 significant digits, infeasible points skipped.
std::string family_curve_csv(const FamilyCurve& curve);

}  // namespace hcb
