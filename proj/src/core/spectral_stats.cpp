#include "hcb/spectral_stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hcb {

double weyl_count(double eigenvalue, double area, double perimeter) {
  if (eigenvalue <= 0.0) return 0.0;
  return (area * eigenvalue - perimeter * std::sqrt(eigenvalue)) / (4.0 * kPi);
}

double weyl_count(double eigenvalue, const SectorGeometry& geometry) {
  return weyl_count(eigenvalue, geometry.area, geometry.perimeter);
}

std::vector<double> polynomial_staircase(const std::vector<double>& levels, int degree) {
  const auto n = static_cast<Eigen::Index>(levels.size());
  if (degree < 1 || n <= degree) fail(ErrorKind::InsufficientData, "too few levels for the polynomial fit");
  const double lo = levels.front(), hi = levels.back();
  const double span = hi > lo ? hi - lo : 1.0;
  // Scaling to [-1, 1] keeps the Vandermonde system well conditioned.
  Eigen::MatrixXd V(n, degree + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = 2.0 * (levels[i] - lo) / span - 1.0;
    double p = 1.0;
    for (int d = 0; d <= degree; ++d, p *= x) V(i, d) = p;
    y(i) = static_cast<double>(i + 1);
  }
  const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd fit = V * c;
  return std::vector<double>(fit.data(), fit.data() + n);
}

UnfoldedSpectrum unfold_levels(const std::vector<double>& levels, const SectorGeometry& geometry, UnfoldMethod method,
                               int min_levels) {
  if (static_cast<int>(levels.size()) < min_levels)
    fail(ErrorKind::InsufficientData, "unfolding needs at least " + std::to_string(min_levels) + " levels, got " +
                                          std::to_string(levels.size()));
  if (!std::is_sorted(levels.begin(), levels.end())) fail(ErrorKind::InvalidArgument, "levels must be ascending");
  UnfoldedSpectrum u;
  u.levels = levels;
  u.area = geometry.area;
  u.perimeter = geometry.perimeter;
  u.method = method;
  if (method == UnfoldMethod::Weyl) {
    u.epsilon.reserve(levels.size());
    for (double e : levels) u.epsilon.push_back(weyl_count(e, geometry));
  } else {
    u.epsilon = polynomial_staircase(levels, 5);
  }
  if (u.epsilon.size() > 1)
    u.mean_spacing = (u.epsilon.back() - u.epsilon.front()) / static_cast<double>(u.epsilon.size() - 1);
  return u;
}

UnfoldedSpectrum unfold(const EigenSpectrum& spectrum, const SectorGeometry& geometry, UnfoldMethod method,
                        int min_levels) {
  const int window = std::min<int>(spectrum.converged_count, static_cast<int>(spectrum.values.size()));
  if (window < min_levels)
    fail(ErrorKind::InsufficientData, "only " + std::to_string(window) + " converged levels; unfolding needs " +
                                          std::to_string(min_levels));
  return unfold_levels(std::vector<double>(spectrum.values.begin(), spectrum.values.begin() + window), geometry,
                       method, min_levels);
}

double poisson_density(double s) { return s < 0 ? 0.0 : std::exp(-s); }
double wigner_density(double s) { return s < 0 ? 0.0 : 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s); }
double poisson_cdf(double s) { return s < 0 ? 0.0 : 1.0 - std::exp(-s); }
double wigner_cdf(double s) { return s < 0 ? 0.0 : 1.0 - std::exp(-0.25 * kPi * s * s); }

SpacingHistogram spacing_histogram(const std::vector<double>& spacings, int bins, int min_spacings) {
  if (bins < 1) fail(ErrorKind::InvalidArgument, "bin count must be positive");
  if (static_cast<int>(spacings.size()) < min_spacings)
    fail(ErrorKind::InsufficientData, "need at least " + std::to_string(min_spacings) + " spacings, got " +
                                          std::to_string(spacings.size()));
  SpacingHistogram h;
  h.spacings = spacings;
  h.n_spacings = static_cast<int>(spacings.size());
  double sum = 0.0, smax = 0.0;
  for (double s : spacings) {
    if (s < 0) fail(ErrorKind::InvalidArgument, "negative spacing");
    sum += s;
    smax = std::max(smax, s);
  }
  h.mean_spacing = sum / h.n_spacings;
  const double upper = std::max(3.0, smax);
  const double width = upper / bins;
  h.bin_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.bin_edges[b] = width * b;
  std::vector<int> counts(bins, 0);
  for (double s : spacings) ++counts[std::min(bins - 1, static_cast<int>(s / width))];
  h.densities.resize(bins);
  for (int b = 0; b < bins; ++b) {
    h.densities[b] = counts[b] / (h.n_spacings * width);
    // expected counts from the exact bin probabilities
    const double lo = h.bin_edges[b], hi = b + 1 == bins ? 1e300 : h.bin_edges[b + 1];
    const double ep = h.n_spacings * (poisson_cdf(hi) - poisson_cdf(lo));
    const double ew = h.n_spacings * (wigner_cdf(hi) - wigner_cdf(lo));
    if (ep > 0) h.chi2_poisson += (counts[b] - ep) * (counts[b] - ep) / ep;
    if (ew > 0) h.chi2_wigner += (counts[b] - ew) * (counts[b] - ew) / ew;
  }
  h.ks_poisson = ks_distance(spacings, poisson_cdf);
  h.ks_wigner = ks_distance(spacings, wigner_cdf);
  return h;
}

SpacingHistogram spacing_histogram(const UnfoldedSpectrum& unfolded, int bins, int min_spacings) {
  std::vector<double> s;
  for (std::size_t i = 1; i < unfolded.epsilon.size(); ++i)
    s.push_back(std::max(0.0, unfolded.epsilon[i] - unfolded.epsilon[i - 1]));
  return spacing_histogram(s, bins, min_spacings);
}

WeylResidual weyl_residual(const std::vector<double>& levels, const SectorGeometry& geometry) {
  WeylResidual r;
  r.levels = levels;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double e = levels[i];
    const double stair = static_cast<double>(i) + 0.5;
    const double w = weyl_count(e, geometry);
    r.staircase.push_back(stair);
    r.weyl.push_back(w);
    r.residual.push_back(stair - w);
    if (e > 0) r.max_scaled = std::max(r.max_scaled, std::abs(stair - w) / std::sqrt(e));
    if (i > 0 && ((r.residual[i - 1] < 0) != (r.residual[i] < 0))) ++r.zero_crossings;
  }
  return r;
}

std::string histogram_csv(const SpacingHistogram& h) {
  std::ostringstream os;
  os << "bin_left,bin_right,density\n";
  for (std::size_t b = 0; b < h.densities.size(); ++b)
    os << fmt12(h.bin_edges[b]) << ',' << fmt12(h.bin_edges[b + 1]) << ',' << fmt12(h.densities[b]) << '\n';
  return os.str();
}

std::string reference_curves_csv(double s_max, int points) {
  if (points < 2) fail(ErrorKind::InvalidArgument, "need at least two reference points");
  std::ostringstream os;
  os << "s,poisson,wigner\n";
  for (int i = 0; i < points; ++i) {
    const double s = s_max * i / (points - 1);
    os << fmt12(s) << ',' << fmt12(poisson_density(s)) << ',' << fmt12(wigner_density(s)) << '\n';
  }
  return os.str();
}

std::string weyl_residual_csv(const WeylResidual& r) {
  std::ostringstream os;
  os << "k,eigenvalue,staircase,weyl,residual\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i)
    os << (i + 1) << ',' << fmt12(r.levels[i]) << ',' << fmt12(r.staircase[i]) << ',' << fmt12(r.weyl[i]) << ','
       << fmt12(r.residual[i]) << '\n';
  return os.str();
}

std::string summary_json(const UnfoldedSpectrum& u, const SpacingHistogram& h) {
  nlohmann::ordered_json j;
  j["n_levels"] = u.levels.size();
  j["mean_spacing"] = round12(u.mean_spacing);
  j["ks_poisson"] = round12(h.ks_poisson);
  j["ks_wigner"] = round12(h.ks_wigner);
  j["chi2_poisson"] = round12(h.chi2_poisson);
  j["chi2_wigner"] = round12(h.chi2_wigner);
  j["n_spacings"] = h.n_spacings;
  j["unfolding"] = u.method == UnfoldMethod::Weyl ? "weyl" : "polynomial";
  return j.dump(2);
}

}  // namespace hcb
