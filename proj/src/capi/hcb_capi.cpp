#include "hcb/hcb.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "hcb/billiard_solver.hpp"
#include "hcb/coxeter_groups.hpp"
#include "hcb/exact_solver.hpp"
#include "hcb/jacobi_geometry.hpp"
#include "hcb/mass_families.hpp"
#include "hcb/spectral_stats.hpp"

#ifdef HCB_HAVE_OPENMP
#include <omp.h>
#endif

struct hcb_group {
  hcb::ReflectionGroup group;
};

struct hcb_sector {
  hcb::FlattenedSector sector;
};

struct hcb_spectrum {
  hcb::EigenSpectrum spectrum;
};

namespace {

thread_local std::string g_last_error;

hcb_status to_status(hcb::ErrorKind kind) {
  switch (kind) {
    case hcb::ErrorKind::InvalidArgument: return HCB_ERR_INVALID_ARGUMENT;
    case hcb::ErrorKind::Domain: return HCB_ERR_DOMAIN;
    case hcb::ErrorKind::Infeasible: return HCB_ERR_INFEASIBLE;
    case hcb::ErrorKind::Geometry: return HCB_ERR_GEOMETRY;
    case hcb::ErrorKind::Numerical: return HCB_ERR_NUMERICAL;
    case hcb::ErrorKind::InsufficientData: return HCB_ERR_INSUFFICIENT_DATA;
    case hcb::ErrorKind::Unsupported: return HCB_ERR_UNSUPPORTED;
    case hcb::ErrorKind::Consistency: return HCB_ERR_CONSISTENCY;
  }
  return HCB_ERR_INTERNAL;
}

// Runs f, translating exceptions into status codes and the thread-local message.
template <class F>
hcb_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return HCB_OK;
  } catch (const hcb::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HCB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HCB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HCB_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) hcb::fail(hcb::ErrorKind::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** dst, const std::string& s) {
  if (dst) *dst = dup_string(s);
}

hcb::MassSequence masses_of(const double* m, std::size_t n) {
  require(m != nullptr, "masses must not be NULL");
  return hcb::MassSequence(std::vector<double>(m, m + n));
}

hcb::Ordering ordering_of(const int* p) {
  require(p != nullptr, "ordering must not be NULL");
  hcb::Ordering o{p[0], p[1], p[2], p[3]};
  require(hcb::is_permutation_of_four(o), "ordering must be a permutation of 1..4");
  return o;
}

hcb::CoxeterSpec spec_of(const char* name) {
  require(name != nullptr, "group name must not be NULL");
  return hcb::coxeter_spec(name);
}

hcb::SectorGeometry measure_only(double area, double perimeter) {
  hcb::SectorGeometry g;
  g.area = area;
  g.perimeter = perimeter;
  return g;
}

void stats_outputs(const hcb::UnfoldedSpectrum& u, int bins, hcb_stats_summary* summary, char** histogram_csv,
                   char** summary_json, char** weyl_csv) {
  const auto h = hcb::spacing_histogram(u, bins);
  const auto r = hcb::weyl_residual(u.levels, measure_only(u.area, u.perimeter));
  if (summary) {
    summary->n_levels = u.levels.size();
    summary->mean_spacing = u.mean_spacing;
    summary->ks_poisson = h.ks_poisson;
    summary->ks_wigner = h.ks_wigner;
    summary->weyl_max_scaled = r.max_scaled;
    summary->weyl_zero_crossings = r.zero_crossings;
  }
  std::string hist, js, wc;
  if (histogram_csv) hist = hcb::histogram_csv(h);
  if (summary_json) {
    auto j = nlohmann::ordered_json::parse(hcb::summary_json(u, h));
    j["weyl_max_scaled"] = hcb::round12(r.max_scaled);
    j["weyl_zero_crossings"] = r.zero_crossings;
    js = j.dump(2);
  }
  if (weyl_csv) wc = hcb::weyl_residual_csv(r);
  // allocate only after everything that can throw has run
  put(histogram_csv, hist);
  put(summary_json, js);
  put(weyl_csv, wc);
}

}  // namespace

extern "C" {

const char* hcb_version(void) { return HCB_VERSION_STRING; }

const char* hcb_last_error(void) { return g_last_error.c_str(); }

const char* hcb_status_name(hcb_status status) {
  switch (status) {
    case HCB_OK: return "ok";
    case HCB_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case HCB_ERR_DOMAIN: return "domain";
    case HCB_ERR_INFEASIBLE: return "infeasible";
    case HCB_ERR_GEOMETRY: return "geometry";
    case HCB_ERR_NUMERICAL: return "numerical";
    case HCB_ERR_INSUFFICIENT_DATA: return "insufficient-data";
    case HCB_ERR_UNSUPPORTED: return "unsupported";
    case HCB_ERR_CONSISTENCY: return "consistency";
    case HCB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void hcb_string_free(char* s) { std::free(s); }

hcb_status hcb_set_threads(int threads) {
  return guarded([&] {
    require(threads >= 1, "thread count must be at least 1");
#ifdef HCB_HAVE_OPENMP
    omp_set_num_threads(threads);
#endif
  });
}

hcb_status hcb_sector_angle(double mi, double mj, double mk, double* angle) {
  return guarded([&] {
    require(angle != nullptr, "output must not be NULL");
    *angle = hcb::sector_angle(mi, mj, mk);
  });
}

hcb_status hcb_generate_family(const char* spec, double m1, double m2, double* masses, size_t capacity,
                               size_t* count) {
  return guarded([&] {
    const auto s = spec_of(spec);
    if (count) *count = static_cast<size_t>(s.particles());
    require(masses != nullptr && capacity >= static_cast<size_t>(s.particles()), "mass buffer too small");
    const auto seq = hcb::generate_family(s, m1, m2);
    for (std::size_t i = 0; i < seq.size(); ++i) masses[i] = seq[i];
  });
}

hcb_status hcb_feasible_interval(const char* spec, double* lo, double* hi) {
  return guarded([&] {
    require(lo && hi, "outputs must not be NULL");
    const auto iv = hcb::feasible_ratio_interval(spec_of(spec));
    *lo = iv.lo;
    *hi = iv.hi;
  });
}

hcb_status hcb_symmetric_ratio(const char* spec, double* ratio) {
  return guarded([&] {
    require(ratio != nullptr, "output must not be NULL");
    const auto r = hcb::symmetric_ratio(spec_of(spec));
    if (!r) hcb::fail(hcb::ErrorKind::Infeasible, std::string(spec) + " has no member with m_1 = m_N");
    *ratio = *r;
  });
}

hcb_status hcb_family_curve_csv(const char* spec, const double* grid, size_t n_grid, int grid_points, char** csv,
                                size_t* n_feasible, size_t* n_infeasible) {
  return guarded([&] {
    require(csv != nullptr, "output must not be NULL");
    const auto s = spec_of(spec);
    std::vector<double> g;
    if (grid) {
      g.assign(grid, grid + n_grid);
    } else {
      require(grid_points >= 1, "grid point count must be positive");
      g = hcb::default_ratio_grid(s, grid_points);
      if (const auto r = hcb::symmetric_ratio(s)) g.insert(std::upper_bound(g.begin(), g.end(), *r), *r);
    }
    const auto curve = hcb::family_curve(s, g);
    const std::string out = hcb::family_curve_csv(curve);
    if (n_infeasible) *n_infeasible = curve.infeasible_count();
    if (n_feasible) *n_feasible = curve.points.size() - curve.infeasible_count();
    *csv = dup_string(out);
  });
}

hcb_status hcb_classify(const double* masses, size_t n, hcb_classification* out) {
  return guarded([&] {
    require(out != nullptr, "output must not be NULL");
    const auto r = hcb::classify(masses_of(masses, n));
    std::memset(out->name, 0, sizeof(out->name));
    std::strncpy(out->name, r.best.name.c_str(), sizeof(out->name) - 1);
    out->max_deviation = r.max_deviation;
  });
}

hcb_status hcb_classify_json(const double* masses, size_t n, char** json) {
  return guarded([&] {
    require(json != nullptr, "output must not be NULL");
    const auto m = masses_of(masses, n);
    const auto r = hcb::classify(m);
    nlohmann::ordered_json j;
    j["masses"] = m.masses();
    std::vector<double> fr;
    for (double f : m.fractions()) fr.push_back(hcb::round12(f));
    j["fractions"] = fr;
    j["best"] = {{"name", r.best.name}, {"rank", r.best.rank}, {"bracket", r.best.bracket},
                 {"lambda0", r.best.lambda0}, {"order", r.best.order}};
    std::vector<double> ma, ta;
    for (double a : r.measured_angles) ma.push_back(hcb::round12(a));
    for (double a : r.target_angles) ta.push_back(hcb::round12(a));
    j["measured_angles"] = ma;
    j["target_angles"] = ta;
    j["max_deviation"] = hcb::round12(r.max_deviation);
    j["reversed"] = r.reversed;
    if (m.size() == 3) j["fitted_q"] = hcb::round12(r.fitted_q);
    *json = dup_string(j.dump(2));
  });
}

hcb_status hcb_sector_geometry_json(const double masses[4], const int ordering[4], char** json) {
  return guarded([&] {
    require(json != nullptr, "output must not be NULL");
    const auto planes = hcb::coincidence_normals(masses_of(masses, 4));
    *json = dup_string(hcb::to_json(hcb::sector_geometry(planes, ordering_of(ordering))));
  });
}

hcb_status hcb_distinct_sectors(const double masses[4], int* orderings, size_t capacity, size_t* count) {
  return guarded([&] {
    const auto reps = hcb::distinct_sectors(masses_of(masses, 4));
    if (count) *count = reps.size();
    require(orderings != nullptr && capacity >= reps.size(), "ordering buffer too small");
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (int k = 0; k < 4; ++k) orderings[4 * i + k] = reps[i][k];
  });
}

hcb_status hcb_standard_masses(const char* spec, double masses[4]) {
  return guarded([&] {
    require(masses != nullptr, "output must not be NULL");
    const auto m = hcb::standard_masses(spec_of(spec));
    for (int k = 0; k < 4; ++k) masses[k] = m[k];
  });
}

hcb_status hcb_group_create(const char* spec, hcb_group** out) {
  return guarded([&] {
    require(out != nullptr, "output must not be NULL");
    *out = nullptr;
    auto g = std::make_unique<hcb_group>();
    g->group = hcb::coxeter_group(spec_of(spec));
    *out = g.release();
  });
}

hcb_status hcb_group_from_masses(const double masses[4], hcb_group** out) {
  return guarded([&] {
    require(out != nullptr, "output must not be NULL");
    *out = nullptr;
    auto g = std::make_unique<hcb_group>();
    g->group = hcb::group_from_masses(masses_of(masses, 4));
    *out = g.release();
  });
}

void hcb_group_destroy(hcb_group* group) { delete group; }

hcb_status hcb_group_order(const hcb_group* group, long long* order) {
  return guarded([&] {
    require(group && order, "arguments must not be NULL");
    *order = group->group.order();
  });
}

hcb_status hcb_group_reflections(const hcb_group* group, int* count) {
  return guarded([&] {
    require(group && count, "arguments must not be NULL");
    *count = static_cast<int>(group->group.reflections.size());
  });
}

hcb_status hcb_group_json(const hcb_group* group, char** json) {
  return guarded([&] {
    require(group && json, "arguments must not be NULL");
    *json = dup_string(hcb::to_json(group->group));
  });
}

hcb_status hcb_group_degeneracy(const hcb_group* group, int lambda, int* count) {
  return guarded([&] {
    require(group && count, "arguments must not be NULL");
    require(lambda >= 0, "lambda must be non-negative");
    *count = hcb::degeneracy(lambda, group->group);
  });
}

hcb_status hcb_exact_states_json(const hcb_group* group, int lambda, char** json) {
  return guarded([&] {
    require(group && json, "arguments must not be NULL");
    require(lambda >= 0, "lambda must be non-negative");
    const auto states = hcb::excited_basis(lambda, group->group);
    nlohmann::ordered_json j;
    j["group"] = group->group.spec.name;
    j["lambda"] = lambda;
    j["degeneracy"] = states.size();
    j["states"] = nlohmann::ordered_json::array();
    for (const auto& s : states) j["states"].push_back(nlohmann::ordered_json::parse(hcb::to_json(s)));
    *json = dup_string(j.dump(2));
  });
}

hcb_status hcb_ground_state_json(const hcb_group* group, char** json) {
  return guarded([&] {
    require(group && json, "arguments must not be NULL");
    *json = dup_string(hcb::to_json(hcb::ground_state(group->group)));
  });
}

hcb_status hcb_lambda_spectrum_csv(const hcb_group* group, int lambda_max, char** csv) {
  return guarded([&] {
    require(group && csv, "arguments must not be NULL");
    require(lambda_max >= 0, "lambda_max must be non-negative");
    const auto ladder = hcb::lambda_spectrum(group->group.spec, lambda_max);
    std::string out = "lambda,count,a_lambda\n";
    for (int l = 0; l <= lambda_max; ++l) {
      const auto it = ladder.find(l);
      const int count = it == ladder.end() ? 0 : it->second;
      const int a = hcb::degeneracy(l, group->group);
      if (count == 0 && a == 0) continue;
      out += std::to_string(l) + ',' + std::to_string(count) + ',' + std::to_string(a) + '\n';
    }
    *csv = dup_string(out);
  });
}

hcb_status hcb_energy_levels_csv(const char* spec, double e_max, char** csv) {
  return guarded([&] {
    require(csv != nullptr, "output must not be NULL");
    const auto s = spec_of(spec);
    *csv = dup_string(hcb::energy_levels_csv(hcb::energy_levels(s, e_max, s.particles())));
  });
}

hcb_status hcb_sector_create(const double masses[4], const int ordering[4], hcb_chart chart, hcb_sector** out) {
  return guarded([&] {
    require(out != nullptr, "output must not be NULL");
    *out = nullptr;
    require(chart == HCB_CHART_AXIS || chart == HCB_CHART_CENTROID, "unknown chart");
    auto s = std::make_unique<hcb_sector>();
    s->sector = hcb::flatten_sector(masses_of(masses, 4), ordering_of(ordering),
                                    chart == HCB_CHART_AXIS ? hcb::ChartCenter::Axis : hcb::ChartCenter::Centroid);
    *out = s.release();
  });
}

hcb_status hcb_sector_from_normals(const double normals[9], hcb_sector** out) {
  return guarded([&] {
    require(out != nullptr && normals != nullptr, "arguments must not be NULL");
    *out = nullptr;
    std::array<hcb::Vec3, 3> n;
    for (int k = 0; k < 3; ++k) n[k] = hcb::Vec3(normals[3 * k], normals[3 * k + 1], normals[3 * k + 2]);
    auto s = std::make_unique<hcb_sector>();
    s->sector = hcb::flatten_normals(n);
    *out = s.release();
  });
}

void hcb_sector_destroy(hcb_sector* sector) { delete sector; }

hcb_status hcb_sector_area(const hcb_sector* sector, double* area, double* perimeter) {
  return guarded([&] {
    require(sector != nullptr, "sector must not be NULL");
    if (area) *area = sector->sector.geometry.area;
    if (perimeter) *perimeter = sector->sector.geometry.perimeter;
  });
}

hcb_status hcb_sector_abcd(const hcb_sector* sector, double abcd[4]) {
  return guarded([&] {
    require(sector && abcd, "arguments must not be NULL");
    if (!sector->sector.abcd) hcb::fail(hcb::ErrorKind::Unsupported, "sector was not built from masses");
    for (int k = 0; k < 4; ++k) abcd[k] = (*sector->sector.abcd)[k];
  });
}

hcb_status hcb_solve(const hcb_sector* sector, int n_max, int k, int quadrature_order, hcb_spectrum** out) {
  return guarded([&] {
    require(sector && out, "arguments must not be NULL");
    *out = nullptr;
    auto s = std::make_unique<hcb_spectrum>();
    s->spectrum = hcb::solve_sector(sector->sector, n_max, k, quadrature_order);
    *out = s.release();
  });
}

hcb_status hcb_convergence_study(const hcb_sector* sector, const int* n_max_grid, size_t n_grid, int k,
                                 double tolerance, int quadrature_factor, hcb_spectrum** out) {
  return guarded([&] {
    require(sector && out && n_max_grid, "arguments must not be NULL");
    *out = nullptr;
    auto s = std::make_unique<hcb_spectrum>();
    const auto study = hcb::convergence_study(sector->sector, std::vector<int>(n_max_grid, n_max_grid + n_grid), k,
                                              tolerance, quadrature_factor);
    s->spectrum = study.final_spectrum();
    *out = s.release();
  });
}

void hcb_spectrum_destroy(hcb_spectrum* spectrum) { delete spectrum; }

hcb_status hcb_spectrum_size(const hcb_spectrum* spectrum, size_t* size) {
  return guarded([&] {
    require(spectrum && size, "arguments must not be NULL");
    *size = spectrum->spectrum.values.size();
  });
}

hcb_status hcb_spectrum_values(const hcb_spectrum* spectrum, double* values, size_t capacity) {
  return guarded([&] {
    require(spectrum && values, "arguments must not be NULL");
    const auto& v = spectrum->spectrum.values;
    require(capacity >= v.size(), "value buffer too small");
    std::copy(v.begin(), v.end(), values);
  });
}

hcb_status hcb_spectrum_lambdas(const hcb_spectrum* spectrum, double* lambdas, size_t capacity) {
  return guarded([&] {
    require(spectrum && lambdas, "arguments must not be NULL");
    const auto& v = spectrum->spectrum.effective_lambda;
    require(capacity >= v.size(), "lambda buffer too small");
    std::copy(v.begin(), v.end(), lambdas);
  });
}

hcb_status hcb_spectrum_converged(const hcb_spectrum* spectrum, int* count) {
  return guarded([&] {
    require(spectrum && count, "arguments must not be NULL");
    *count = spectrum->spectrum.converged_count;
  });
}

hcb_status hcb_spectrum_csv(const hcb_spectrum* spectrum, char** csv) {
  return guarded([&] {
    require(spectrum && csv, "arguments must not be NULL");
    *csv = dup_string(hcb::spectrum_csv(spectrum->spectrum));
  });
}

double hcb_weyl_count(double eigenvalue, double area, double perimeter) {
  return hcb::weyl_count(eigenvalue, area, perimeter);
}

hcb_status hcb_level_stats(const double* levels, size_t n, double area, double perimeter, int bins,
                           hcb_unfold method, hcb_stats_summary* summary, char** histogram_csv, char** summary_json,
                           char** weyl_csv) {
  return guarded([&] {
    require(levels != nullptr, "levels must not be NULL");
    require(area > 0 && perimeter > 0, "area and perimeter must be positive");
    const auto g = measure_only(area, perimeter);
    const auto u = hcb::unfold_levels(std::vector<double>(levels, levels + n), g,
                                      method == HCB_UNFOLD_POLYNOMIAL ? hcb::UnfoldMethod::Polynomial
                                                                      : hcb::UnfoldMethod::Weyl);
    stats_outputs(u, bins, summary, histogram_csv, summary_json, weyl_csv);
  });
}

hcb_status hcb_spectrum_stats(const hcb_spectrum* spectrum, const hcb_sector* sector, int bins, hcb_unfold method,
                              hcb_stats_summary* summary, char** histogram_csv, char** summary_json,
                              char** weyl_csv) {
  return guarded([&] {
    require(spectrum && sector, "arguments must not be NULL");
    const auto u = hcb::unfold(spectrum->spectrum, sector->sector.geometry,
                               method == HCB_UNFOLD_POLYNOMIAL ? hcb::UnfoldMethod::Polynomial
                                                               : hcb::UnfoldMethod::Weyl);
    stats_outputs(u, bins, summary, histogram_csv, summary_json, weyl_csv);
  });
}

hcb_status hcb_reference_curves_csv(double s_max, int points, char** csv) {
  return guarded([&] {
    require(csv != nullptr, "output must not be NULL");
    require(s_max > 0, "s_max must be positive");
    *csv = dup_string(hcb::reference_curves_csv(s_max, points));
  });
}

}  // extern "C"
