#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hcb/billiard_solver.hpp"
#include "hcb/jacobi_geometry.hpp"

namespace hcb {

/// Two-term Weyl estimate N(E) = A E / 4 pi - l sqrt(E) / 4 pi on the unit sphere.
double weyl_count(double eigenvalue, double area, double perimeter);
double weyl_count(double eigenvalue, const SectorGeometry& geometry);

enum class UnfoldMethod { Weyl, Polynomial };

struct UnfoldedSpectrum {
  std::vector<double> levels;   // the retained eigenvalues
  std::vector<double> epsilon;  // unfolded levels, same length
  double mean_spacing = 0.0;
  double area = 0.0;
  double perimeter = 0.0;
  UnfoldMethod method = UnfoldMethod::Weyl;
};

/// Unfolds the converged window of a solved spectrum. Throws
/// ErrorKind::InsufficientData when fewer than `min_levels` levels are converged.
UnfoldedSpectrum unfold(const EigenSpectrum& spectrum, const SectorGeometry& geometry,
                        UnfoldMethod method = UnfoldMethod::Weyl, int min_levels = 50);
/// Same for a plain ascending list of levels, all of which are retained.
UnfoldedSpectrum unfold_levels(const std::vector<double>& levels, const SectorGeometry& geometry,
                               UnfoldMethod method = UnfoldMethod::Weyl, int min_levels = 50);

/// Least-squares polynomial fit of the staircase k(E_k), k = 1..n, evaluated at E.
std::vector<double> polynomial_staircase(const std::vector<double>& levels, int degree);

double poisson_density(double s);
double wigner_density(double s);
double poisson_cdf(double s);
double wigner_cdf(double s);

/// Kolmogorov-Smirnov distance between the empirical CDF of the samples and a model CDF.
template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf cdf);

struct SpacingHistogram {
  std::vector<double> bin_edges;  // bins + 1 entries
  std::vector<double> densities;  // integrate to 1
  std::vector<double> spacings;
  int n_spacings = 0;
  double mean_spacing = 0.0;
  double ks_poisson = 0.0;
  double ks_wigner = 0.0;
  double chi2_poisson = 0.0;  // binned, for reference
  double chi2_wigner = 0.0;
};

/// Nearest-neighbour spacings of the unfolded levels, binned on [0, max(3, s_max)].
/// Zero spacings from degenerate levels are kept. Throws
/// ErrorKind::InsufficientData for fewer than `min_spacings` spacings.
SpacingHistogram spacing_histogram(const UnfoldedSpectrum& unfolded, int bins = 24, int min_spacings = 50);
SpacingHistogram spacing_histogram(const std::vector<double>& spacings, int bins = 24, int min_spacings = 50);

struct WeylResidual {
  std::vector<double> levels;
  std::vector<double> staircase;  // k - 1/2 at the k-th level
  std::vector<double> weyl;
  std::vector<double> residual;   // staircase - weyl
  double max_scaled = 0.0;        // max |residual| / sqrt(E)
  int zero_crossings = 0;
};

WeylResidual weyl_residual(const std::vector<double>& levels, const SectorGeometry& geometry);

std::string histogram_csv(const SpacingHistogram& h);
/// Columns s, poisson, wigner on a uniform grid over [0, s_max].
std::string reference_curves_csv(double s_max = 4.0, int points = 201);
std::string weyl_residual_csv(const WeylResidual& r);
/// {n_levels, mean_spacing, ks_poisson, ks_wigner, ...}
std::string summary_json(const UnfoldedSpectrum& u, const SpacingHistogram& h);

template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf cdf) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace hcb
