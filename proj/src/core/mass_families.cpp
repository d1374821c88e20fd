#include "hcb/mass_families.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "hcb/common.hpp"

namespace hcb {

namespace {

// tan^2(pi/q), exact where the value is rational or a simple surd.
double tan_squared_pi_over(int q) {
  switch (q) {
    case 3: return 3.0;
    case 4: return 1.0;
    case 5: return 5.0 - 2.0 * std::sqrt(5.0);
    case 6: return 1.0 / 3.0;
    default: {
      const double t = std::tan(kPi / q);
      return t * t;
    }
  }
}

long long factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::string format_interval(const RatioInterval& iv) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << iv.lo << ", " << iv.hi << ")";
  return os.str();
}

// Forward recurrence with m1 = 1, m2 = r. Returns an empty vector and sets
// `reason` when a denominator is not positive.
std::vector<double> run_recurrence(const CoxeterSpec& spec, double m1, double m2, std::string* reason) {
  std::vector<double> m{m1, m2};
  m.reserve(spec.bracket.size() + 2);
  for (std::size_t i = 0; i < spec.bracket.size(); ++i) {
    const double t2 = tan_squared_pi_over(spec.bracket[i]);
    const double denom = t2 * m[i] - m[i + 1];
    if (!(denom > 0.0)) {
      if (reason) {
        std::ostringstream os;
        os << "recurrence step " << i + 1 << " has non-positive denominator " << denom;
        *reason = os.str();
      }
      return {};
    }
    const double next = m[i + 1] * (m[i] + m[i + 1]) / denom;
    if (!std::isfinite(next)) {
      if (reason) *reason = "recurrence overflow at step " + std::to_string(i + 1);
      return {};
    }
    m.push_back(next);
  }
  return m;
}

bool ratio_feasible(const CoxeterSpec& spec, double r) {
  return !run_recurrence(spec, 1.0, r, nullptr).empty();
}

}  // namespace

MassSequence::MassSequence(std::vector<double> masses) : masses_(std::move(masses)) {
  if (masses_.size() < 3) fail(ErrorKind::InvalidArgument, "a mass sequence needs at least three masses");
  total_ = 0.0;
  for (double m : masses_) {
    if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorKind::Domain, "masses must be positive and finite");
    total_ += m;
  }
  fractions_.reserve(masses_.size());
  for (double m : masses_) fractions_.push_back(m / total_);
}

const std::vector<CoxeterSpec>& coxeter_table() {
  static const std::vector<CoxeterSpec> table = {
      {"A2", 2, {3}, 3, 6},
      {"C2", 2, {4}, 4, 8},
      {"H2", 2, {5}, 5, 10},
      {"A3", 3, {3, 3}, 6, 24},
      {"C3", 3, {4, 3}, 9, 48},
      {"H3", 3, {5, 3}, 15, 120},
      {"A4", 4, {3, 3, 3}, 10, 120},
      {"C4", 4, {4, 3, 3}, 16, 384},
      {"H4", 4, {5, 3, 3}, 60, 14400},
      {"F4", 4, {3, 4, 3}, 24, 1152},
  };
  return table;
}

CoxeterSpec dihedral_spec(int q) {
  if (q < 3) fail(ErrorKind::InvalidArgument, "dihedral bracket entries must be at least 3");
  std::string name;
  switch (q) {
    case 3: name = "A2"; break;
    case 4: name = "C2"; break;
    case 5: name = "H2"; break;
    default: name = "I2(" + std::to_string(q) + ")";
  }
  return {name, 2, {q}, q, 2LL * q};
}

CoxeterSpec a_series(int rank) {
  if (rank < 2 || rank > 19) fail(ErrorKind::InvalidArgument, "A-series rank must be in [2, 19]");
  return {"A" + std::to_string(rank), rank, std::vector<int>(rank - 1, 3), rank * (rank + 1) / 2,
          factorial(rank + 1)};
}

CoxeterSpec c_series(int rank) {
  if (rank < 2 || rank > 19) fail(ErrorKind::InvalidArgument, "C-series rank must be in [2, 19]");
  std::vector<int> bracket(rank - 1, 3);
  bracket[0] = 4;
  return {"C" + std::to_string(rank), rank, bracket, rank * rank, (1LL << rank) * factorial(rank)};
}

CoxeterSpec coxeter_spec(std::string_view name) {
  std::string s;
  for (char c : name)
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s.empty()) fail(ErrorKind::InvalidArgument, "empty Coxeter group name");

  if (s.rfind("I2(", 0) == 0 && s.back() == ')') {
    const std::string inner = s.substr(3, s.size() - 4);
    try {
      return dihedral_spec(std::stoi(inner));
    } catch (const std::logic_error&) {
      fail(ErrorKind::InvalidArgument, "bad dihedral group name '" + std::string(name) + "'");
    }
  }
  for (const auto& row : coxeter_table())
    if (row.name == s) return row;

  const char family = s[0];
  int rank = 0;
  try {
    std::size_t used = 0;
    rank = std::stoi(s.substr(1), &used);
    if (used != s.size() - 1) rank = 0;
  } catch (const std::logic_error&) {
    rank = 0;
  }
  if (rank >= 2 && family == 'A') return a_series(rank);
  if (rank >= 2 && family == 'C') return c_series(rank);
  fail(ErrorKind::InvalidArgument, "unknown Coxeter group '" + std::string(name) + "'");
}

std::vector<CoxeterSpec> candidate_specs(int particles) {
  std::vector<CoxeterSpec> out;
  if (particles <= 3) return out;
  for (const auto& row : coxeter_table())
    if (row.particles() == particles) out.push_back(row);
  if (out.empty()) {
    out.push_back(a_series(particles - 1));
    out.push_back(c_series(particles - 1));
  }
  return out;
}

double sector_angle(double mi, double mj, double mk) {
  if (!(mi > 0.0) || !(mj > 0.0) || !(mk > 0.0) || !std::isfinite(mi) || !std::isfinite(mj) || !std::isfinite(mk))
    fail(ErrorKind::Domain, "sector_angle requires positive finite masses");
  return std::atan(std::sqrt(mj * (mi + mj + mk) / (mi * mk)));
}

std::vector<double> kaleidoscope_angles(const MassSequence& masses) {
  std::vector<double> angles;
  for (std::size_t i = 0; i + 2 < masses.size(); ++i)
    angles.push_back(sector_angle(masses[i], masses[i + 1], masses[i + 2]));
  return angles;
}

MassSequence generate_family(const CoxeterSpec& spec, double m1, double m2) {
  if (!(m1 > 0.0) || !(m2 > 0.0) || !std::isfinite(m1) || !std::isfinite(m2))
    fail(ErrorKind::Domain, "family seeds m1, m2 must be positive and finite");
  if (static_cast<int>(spec.bracket.size()) != spec.rank - 1)
    fail(ErrorKind::InvalidArgument, "bracket length does not match rank for " + spec.name);
  std::string reason;
  auto m = run_recurrence(spec, m1, m2, &reason);
  if (m.empty()) {
    std::string interval;
    try {
      interval = format_interval(feasible_ratio_interval(spec));
    } catch (const Error&) {
      interval = "(empty)";
    }
    fail(ErrorKind::Infeasible, spec.name + " family with m2/m1 = " + std::to_string(m2 / m1) + ": " + reason +
                                    "; feasible m2/m1 interval is " + interval);
  }
  return MassSequence(std::move(m));
}

RatioInterval feasible_ratio_interval(const CoxeterSpec& spec) {
  constexpr int kPerDecade = 100;
  constexpr double kLogLo = -9.0, kLogHi = 9.0;
  const int n = static_cast<int>((kLogHi - kLogLo) * kPerDecade) + 1;
  auto grid = [&](int i) { return std::pow(10.0, kLogLo + static_cast<double>(i) / kPerDecade); };

  int best_first = -1, best_last = -1, first = -1;
  for (int i = 0; i <= n; ++i) {
    const bool ok = i < n && ratio_feasible(spec, grid(i));
    if (ok && first < 0) first = i;
    if (!ok && first >= 0) {
      if (best_first < 0 || (i - 1 - first) > (best_last - best_first)) {
        best_first = first;
        best_last = i - 1;
      }
      first = -1;
    }
  }
  if (best_first < 0) fail(ErrorKind::Infeasible, spec.name + " family has no feasible m2/m1 ratio");

  auto refine = [&](double bad, double good) {
    for (int it = 0; it < 200; ++it) {
      const double mid = std::sqrt(bad * good);
      if (mid == bad || mid == good) break;
      (ratio_feasible(spec, mid) ? good : bad) = mid;
    }
    return good;
  };

  RatioInterval iv;
  iv.lo = best_first == 0 ? 0.0 : refine(grid(best_first - 1), grid(best_first));
  iv.hi = best_last == n - 1 ? std::numeric_limits<double>::infinity() : refine(grid(best_last + 1), grid(best_last));
  return iv;
}

std::size_t FamilyCurve::infeasible_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const FamilyPoint& p) { return !p.feasible; }));
}

FamilyCurve family_curve(const CoxeterSpec& spec, const std::vector<double>& ratio_grid) {
  FamilyCurve curve;
  curve.spec = spec;
  curve.interval = feasible_ratio_interval(spec);
  for (double r : ratio_grid) {
    FamilyPoint pt;
    pt.ratio = r;
    if (!(r > 0.0) || !std::isfinite(r)) {
      pt.reason = "ratio must be positive and finite";
    } else {
      std::string reason;
      auto m = run_recurrence(spec, 1.0, r, &reason);
      if (m.empty()) {
        pt.reason = reason;
      } else {
        double total = 0.0;
        for (double x : m) total += x;
        for (double& x : m) x /= total;
        pt.masses = MassSequence(std::move(m));
        pt.feasible = true;
      }
    }
    curve.points.push_back(std::move(pt));
  }
  if (curve.infeasible_count() == curve.points.size())
    fail(ErrorKind::Infeasible, "no grid ratio lies in the feasible " + spec.name + " interval " +
                                    format_interval(curve.interval));
  return curve;
}

std::vector<double> default_ratio_grid(const CoxeterSpec& spec, int count) {
  if (count < 1) fail(ErrorKind::InvalidArgument, "grid size must be positive");
  const RatioInterval iv = feasible_ratio_interval(spec);
  double lo = iv.lo, hi = iv.hi;
  if (lo <= 0.0 && std::isinf(hi)) {
    lo = 1e-3;
    hi = 1e3;
  } else if (lo <= 0.0) {
    lo = hi * 1e-4;
  } else if (std::isinf(hi)) {
    hi = lo * 1e4;
  }
  std::vector<double> grid;
  grid.reserve(count);
  const double span = std::log(hi / lo);
  for (int i = 0; i < count; ++i) grid.push_back(lo * std::exp(span * (i + 0.5) / count));
  return grid;
}

std::optional<double> symmetric_ratio(const CoxeterSpec& spec) {
  const auto grid = default_ratio_grid(spec, 4000);
  auto gap = [&](double r) {
    const auto m = run_recurrence(spec, 1.0, r, nullptr);
    return m.empty() ? std::numeric_limits<double>::quiet_NaN() : std::log(m.back() / m.front());
  };
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double a = grid[i], b = grid[i + 1];
    double fa = gap(a), fb = gap(b);
    if (std::isnan(fa) || std::isnan(fb)) continue;
    if (fa == 0.0) return a;
    if ((fa < 0.0) == (fb < 0.0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      const double fm = gap(mid);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  }
  return std::nullopt;
}

ClassificationResult classify(const MassSequence& masses) {
  ClassificationResult result;
  result.measured_angles = kaleidoscope_angles(masses);

  if (masses.size() == 3) {
    const double omega = result.measured_angles.front();
    result.fitted_q = kPi / omega;
    const int q = std::max(3, static_cast<int>(std::lround(result.fitted_q)));
    result.best = dihedral_spec(q);
    result.target_angles = {kPi / q};
    result.max_deviation = std::abs(omega - kPi / q);
    return result;
  }

  bool have = false;
  for (const auto& spec : candidate_specs(static_cast<int>(masses.size()))) {
    for (bool rev : {false, true}) {
      std::vector<int> bracket = spec.bracket;
      if (rev) std::reverse(bracket.begin(), bracket.end());
      if (rev && bracket == spec.bracket) continue;
      double dev = 0.0;
      std::vector<double> targets;
      for (std::size_t i = 0; i < bracket.size(); ++i) {
        targets.push_back(kPi / bracket[i]);
        dev = std::max(dev, std::abs(result.measured_angles[i] - targets.back()));
      }
      if (!have || dev < result.max_deviation) {
        have = true;
        result.best = spec;
        result.reversed = rev;
        result.target_angles = std::move(targets);
        result.max_deviation = dev;
      }
    }
  }
  return result;
}

std::string family_curve_csv(const FamilyCurve& curve) {
  std::string out = "r";
  const int n = curve.spec.particles();
  for (int i = 1; i <= n; ++i) out += ",mu" + std::to_string(i);
  out += '\n';
  for (const auto& pt : curve.points) {
    if (!pt.feasible) continue;
    out += fmt12(pt.ratio);
    for (double mu : pt.masses.fractions()) out += "," + fmt12(mu);
    out += '\n';
  }
  return out;
}

}  // namespace hcb
