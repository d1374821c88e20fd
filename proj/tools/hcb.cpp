// Command-line front end. Talks to the library only through hcb.h.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "hcb/hcb.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

const std::vector<std::string> kCommands = {"classify", "family", "geometry", "group",
                                            "exact",    "billiard", "stats",  "weyl"};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LibraryError : std::runtime_error {
  hcb_status status;
  LibraryError(hcb_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(hcb_status s) {
  switch (s) {
    case HCB_ERR_INVALID_ARGUMENT:
    case HCB_ERR_DOMAIN:
    case HCB_ERR_INFEASIBLE:
    case HCB_ERR_UNSUPPORTED:
      return kExitValidation;
    default:
      return kExitNumerical;
  }
}

void check(hcb_status s) {
  if (s != HCB_OK) throw LibraryError(s, std::string(hcb_status_name(s)) + ": " + hcb_last_error());
}

// Owning wrapper for strings handed out by the library.
std::string take(char* s) {
  if (!s) return {};
  std::string out(s);
  hcb_string_free(s);
  return out;
}

struct GroupDeleter {
  void operator()(hcb_group* g) const { hcb_group_destroy(g); }
};
struct SectorDeleter {
  void operator()(hcb_sector* s) const { hcb_sector_destroy(s); }
};
struct SpectrumDeleter {
  void operator()(hcb_spectrum* s) const { hcb_spectrum_destroy(s); }
};
using GroupPtr = std::unique_ptr<hcb_group, GroupDeleter>;
using SectorPtr = std::unique_ptr<hcb_sector, SectorDeleter>;
using SpectrumPtr = std::unique_ptr<hcb_spectrum, SpectrumDeleter>;

// ---- parsing helpers ------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("invalid number '" + s + "' in " + what);
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("invalid integer '" + s + "' in " + what);
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item, what));
  if (out.empty()) throw ValidationError(what + " is empty");
  return out;
}

std::vector<int> parse_ints(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_int(item, what));
  if (out.empty()) throw ValidationError(what + " is empty");
  return out;
}

// Accepts "1,2,3,4" or "1234".
std::array<int, 4> parse_ordering(const std::string& s) {
  std::vector<int> v;
  if (s.find(',') == std::string::npos && s.size() == 4) {
    for (char c : s) v.push_back(c - '0');
  } else {
    v = parse_ints(s, "--ordering");
  }
  std::array<int, 4> p{};
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != std::vector<int>{1, 2, 3, 4}) throw ValidationError("--ordering must be a permutation of 1,2,3,4");
  std::copy(v.begin(), v.end(), p.begin());
  return p;
}

std::string ordering_label(const std::array<int, 4>& p) {
  std::string s;
  for (int k : p) s += std::to_string(k);
  return s;
}

json ordering_json(const std::array<int, 4>& p) { return json::array({p[0], p[1], p[2], p[3]}); }

// ---- output ---------------------------------------------------------------

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Temp file in the target directory, then rename.
void write_atomic(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << body;
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

struct Run {
  std::string command;
  json inputs = json::object();
  json results = json::object();
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::string started = utc_now();

  // Writes the body to `path`, or to stdout when the path is empty or "-".
  void emit(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
      std::cout << body;
      if (!body.empty() && body.back() != '\n') std::cout << '\n';
      return;
    }
    write_atomic(path, body);
    outputs.push_back(path);
  }

  json metadata() const {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m;
    m["command"] = command;
    m["inputs"] = inputs;
    m["versions"] = {{"hcb", hcb_version()}, {"cli", hcb_version()}};
    m["started_utc"] = started;
    m["wall_time_s"] = std::round(wall * 1000.0) / 1000.0;
    m["outputs"] = outputs;
    if (!results.empty()) m["results"] = results;
    return m;
  }
};

void write_metadata(const Run& run, const fs::path& path) { write_atomic(path, run.metadata().dump(2) + "\n"); }

// Metadata next to a single output file.
void finish_file(Run& run, const std::string& path) {
  if (path.empty() || path == "-") return;
  write_metadata(run, path + ".meta.json");
}

// ---- options --------------------------------------------------------------

struct Options {
  std::string masses, ordering, spec, output, format, chart, unfold, n_max_grid, spectrum;
  int n_max = 40;
  int quadrature_order = 0;
  int k = 0;
  int lambda = -1;
  int lambda_max = 60;
  double e_max = 0.0;
  int bins = 24;
  int grid = 200;
  int window = 0;
  double tolerance = 0.1;
};

int env_threads() {
  const char* s = std::getenv("HCB_THREADS");
  if (!s || !*s) return 1;
  const int t = parse_int(s, "HCB_THREADS");
  if (t < 1) throw ValidationError("HCB_THREADS must be at least 1");
  return t;
}

std::array<double, 4> four_masses(const Options& o) {
  std::array<double, 4> m{};
  if (!o.masses.empty() && !o.spec.empty()) throw ValidationError("give either --masses or --spec, not both");
  if (!o.masses.empty()) {
    const auto v = parse_doubles(o.masses, "--masses");
    if (v.size() != 4) throw ValidationError("--masses needs exactly four values for this command");
    std::copy(v.begin(), v.end(), m.begin());
  } else if (!o.spec.empty()) {
    check(hcb_standard_masses(o.spec.c_str(), m.data()));
  } else {
    throw ValidationError("--masses or --spec is required");
  }
  return m;
}

std::vector<int> refinement_grid(const Options& o) {
  if (o.n_max_grid.empty()) return {o.n_max};
  auto g = parse_ints(o.n_max_grid, "--n-max-grid");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g[i] <= g[i - 1]) throw ValidationError("--n-max-grid must be strictly ascending");
  return g;
}

hcb_chart parse_chart(const std::string& s) {
  if (s == "axis") return HCB_CHART_AXIS;
  if (s == "centroid") return HCB_CHART_CENTROID;
  throw ValidationError("--chart must be axis or centroid");
}

hcb_unfold parse_unfold(const std::string& s) {
  if (s == "weyl") return HCB_UNFOLD_WEYL;
  if (s == "polynomial") return HCB_UNFOLD_POLYNOMIAL;
  throw ValidationError("--unfold must be weyl or polynomial");
}

json mass_json(const std::array<double, 4>& m) { return json::array({m[0], m[1], m[2], m[3]}); }

// One solved sector: a single truncation, or a convergence study when the grid has two or more entries.
struct Solved {
  SpectrumPtr spectrum;
  double area = 0.0, perimeter = 0.0;
  int converged = 0;
  bool studied = false;
};

Solved solve(const hcb_sector* sector, const Options& o, const std::vector<int>& grid) {
  Solved s;
  check(hcb_sector_area(sector, &s.area, &s.perimeter));
  hcb_spectrum* out = nullptr;
  if (grid.size() == 1) {
    if (o.quadrature_order != 0 && o.quadrature_order < 3 * grid[0])
      throw ValidationError("--quadrature-order must be at least 3*n_max");
    check(hcb_solve(sector, grid[0], o.k, o.quadrature_order, &out));
  } else {
    if (o.tolerance <= 0) throw ValidationError("--tolerance must be positive");
    const double absolute = o.tolerance * 4.0 * M_PI / s.area;
    check(hcb_convergence_study(sector, grid.data(), grid.size(), o.k, absolute, 3, &out));
    s.studied = true;
  }
  s.spectrum.reset(out);
  check(hcb_spectrum_converged(out, &s.converged));
  return s;
}

std::vector<double> spectrum_values(const hcb_spectrum* s) {
  std::size_t n = 0;
  check(hcb_spectrum_size(s, &n));
  std::vector<double> v(n);
  if (n) check(hcb_spectrum_values(s, v.data(), n));
  return v;
}

// Levels used for statistics: the converged window of a study, else everything solved; --window caps it.
std::vector<double> stats_window(const Solved& s, const Options& o) {
  auto v = spectrum_values(s.spectrum.get());
  std::size_t n = s.studied ? static_cast<std::size_t>(s.converged) : v.size();
  if (o.window > 0) {
    if (static_cast<std::size_t>(o.window) > n)
      throw LibraryError(HCB_ERR_INSUFFICIENT_DATA, "insufficient-data: window of " + std::to_string(o.window) +
                                                        " levels requested but only " + std::to_string(n) +
                                                        " available");
    n = o.window;
  }
  v.resize(std::min(n, v.size()));
  return v;
}

// ---- commands -------------------------------------------------------------

int cmd_classify(const Options& o, Run& run) {
  if (o.masses.empty()) throw ValidationError("--masses is required");
  const auto m = parse_doubles(o.masses, "--masses");
  run.inputs["masses"] = m;
  hcb_classification c;
  check(hcb_classify(m.data(), m.size(), &c));
  const bool integrable = c.max_deviation < 1e-9;
  std::printf("%s deviation %.6g %s\n", c.name, c.max_deviation, integrable ? "integrable" : "not-integrable");
  if (!o.output.empty()) {
    if (o.format == "csv") throw ValidationError("classify writes json only");
    char* js = nullptr;
    check(hcb_classify_json(m.data(), m.size(), &js));
    run.emit(o.output, take(js) + "\n");
    run.results = {{"best", c.name}, {"max_deviation", c.max_deviation}, {"integrable", integrable}};
    finish_file(run, o.output);
  }
  return kExitOk;
}

int cmd_family(const Options& o, Run& run) {
  if (o.spec.empty()) throw ValidationError("--spec is required");
  if (o.grid < 1) throw ValidationError("--grid must be positive");
  run.inputs["spec"] = o.spec;
  run.inputs["grid"] = o.grid;
  char* csv = nullptr;
  std::size_t feasible = 0, infeasible = 0;
  check(hcb_family_curve_csv(o.spec.c_str(), nullptr, 0, o.grid, &csv, &feasible, &infeasible));
  const std::string body = take(csv);
  double lo = 0, hi = 0, sym = 0;
  check(hcb_feasible_interval(o.spec.c_str(), &lo, &hi));
  run.results["feasible_points"] = feasible;
  run.results["infeasible_points"] = infeasible;
  run.results["ratio_interval"] = {lo, std::isinf(hi) ? json("inf") : json(hi)};
  if (hcb_symmetric_ratio(o.spec.c_str(), &sym) == HCB_OK) run.results["symmetric_ratio"] = sym;
  run.emit(o.output, body);
  finish_file(run, o.output);
  return kExitOk;
}

int cmd_geometry(const Options& o, Run& run) {
  const auto m = four_masses(o);
  run.inputs["masses"] = mass_json(m);
  std::string body;
  if (!o.ordering.empty()) {
    const auto p = parse_ordering(o.ordering);
    run.inputs["ordering"] = ordering_json(p);
    char* js = nullptr;
    check(hcb_sector_geometry_json(m.data(), p.data(), &js));
    body = take(js) + "\n";
  } else {
    int buf[96];
    std::size_t n = 0;
    check(hcb_distinct_sectors(m.data(), buf, 24, &n));
    json all = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      char* js = nullptr;
      check(hcb_sector_geometry_json(m.data(), buf + 4 * i, &js));
      all.push_back(json::parse(take(js)));
    }
    run.results["distinct_sectors"] = n;
    body = all.dump(2) + "\n";
  }
  run.emit(o.output, body);
  finish_file(run, o.output);
  return kExitOk;
}

GroupPtr make_group(const Options& o, Run& run) {
  hcb_group* g = nullptr;
  if (!o.spec.empty() && o.masses.empty()) {
    run.inputs["spec"] = o.spec;
    check(hcb_group_create(o.spec.c_str(), &g));
  } else {
    const auto m = four_masses(o);
    run.inputs["masses"] = mass_json(m);
    check(hcb_group_from_masses(m.data(), &g));
  }
  return GroupPtr(g);
}

int cmd_group(const Options& o, Run& run) {
  auto g = make_group(o, run);
  std::string body;
  if (o.format == "csv") {
    if (o.lambda_max < 0) throw ValidationError("--lambda-max must be non-negative");
    run.inputs["lambda_max"] = o.lambda_max;
    char* csv = nullptr;
    check(hcb_lambda_spectrum_csv(g.get(), o.lambda_max, &csv));
    body = take(csv);
  } else {
    char* js = nullptr;
    check(hcb_group_json(g.get(), &js));
    body = take(js) + "\n";
  }
  long long order = 0;
  check(hcb_group_order(g.get(), &order));
  run.results["order"] = order;
  run.emit(o.output, body);
  finish_file(run, o.output);
  return kExitOk;
}

int cmd_exact(const Options& o, Run& run) {
  std::string body;
  if (o.format == "csv") {
    if (o.spec.empty()) throw ValidationError("--spec is required for the energy-level table");
    if (!(o.e_max > 0)) throw ValidationError("--e-max must be positive for the energy-level table");
    run.inputs["spec"] = o.spec;
    run.inputs["e_max"] = o.e_max;
    char* csv = nullptr;
    check(hcb_energy_levels_csv(o.spec.c_str(), o.e_max, &csv));
    body = take(csv);
  } else {
    auto g = make_group(o, run);
    char* js = nullptr;
    if (o.lambda < 0) {
      check(hcb_ground_state_json(g.get(), &js));
    } else {
      run.inputs["lambda"] = o.lambda;
      check(hcb_exact_states_json(g.get(), o.lambda, &js));
    }
    body = take(js) + "\n";
  }
  run.emit(o.output, body);
  finish_file(run, o.output);
  return kExitOk;
}

void billiard_inputs(const Options& o, Run& run, const std::array<double, 4>& m, const std::vector<int>& grid) {
  run.inputs["masses"] = mass_json(m);
  if (grid.size() == 1)
    run.inputs["n_max"] = grid[0];
  else
    run.inputs["n_max_grid"] = grid;
  run.inputs["quadrature_order"] = o.quadrature_order > 0 ? o.quadrature_order : 3 * grid.back();
  run.inputs["k"] = o.k;
  run.inputs["chart"] = o.chart;
  if (grid.size() > 1) run.inputs["tolerance_spacings"] = o.tolerance;
}

SectorPtr make_sector(const std::array<double, 4>& m, const std::array<int, 4>& p, hcb_chart chart) {
  hcb_sector* s = nullptr;
  check(hcb_sector_create(m.data(), p.data(), chart, &s));
  return SectorPtr(s);
}

int cmd_billiard(const Options& o, Run& run) {
  const auto m = four_masses(o);
  if (o.ordering.empty()) throw ValidationError("--ordering is required");
  const auto p = parse_ordering(o.ordering);
  const auto grid = refinement_grid(o);
  const auto chart = parse_chart(o.chart);
  billiard_inputs(o, run, m, grid);
  run.inputs["ordering"] = ordering_json(p);
  check(hcb_set_threads(env_threads()));
  auto sector = make_sector(m, p, chart);
  const auto solved = solve(sector.get(), o, grid);
  char* csv = nullptr;
  check(hcb_spectrum_csv(solved.spectrum.get(), &csv));
  run.results["area"] = solved.area;
  run.results["perimeter"] = solved.perimeter;
  if (solved.studied) run.results["converged_count"] = solved.converged;
  run.emit(o.output, take(csv));
  finish_file(run, o.output);
  return kExitOk;
}

struct SectorStats {
  std::array<int, 4> ordering{};
  std::string spectrum_csv, histogram_csv, summary_json, weyl_csv;
  hcb_stats_summary summary{};
  double area = 0, perimeter = 0;
  int converged = 0;
  std::string error;
  int exit = kExitOk;
};

SectorStats run_sector(const std::array<double, 4>& m, const std::array<int, 4>& p, const Options& o,
                       const std::vector<int>& grid, hcb_chart chart, hcb_unfold unfold, int threads) {
  SectorStats r;
  r.ordering = p;
  try {
    check(hcb_set_threads(threads));
    auto sector = make_sector(m, p, chart);
    const auto solved = solve(sector.get(), o, grid);
    r.area = solved.area;
    r.perimeter = solved.perimeter;
    r.converged = solved.converged;
    char* csv = nullptr;
    check(hcb_spectrum_csv(solved.spectrum.get(), &csv));
    r.spectrum_csv = take(csv);
    const auto levels = stats_window(solved, o);
    char *h = nullptr, *s = nullptr, *w = nullptr;
    check(hcb_level_stats(levels.data(), levels.size(), r.area, r.perimeter, o.bins, unfold, &r.summary, &h, &s, &w));
    r.histogram_csv = take(h);
    r.summary_json = take(s) + "\n";
    r.weyl_csv = take(w);
  } catch (const LibraryError& e) {
    r.error = e.what();
    r.exit = exit_code(e.status);
  } catch (const ValidationError& e) {
    r.error = e.what();
    r.exit = kExitValidation;
  }
  return r;
}

int cmd_stats(const Options& o, Run& run) {
  if (o.output.empty() || o.output == "-") throw ValidationError("stats needs --output DIR");
  if (o.bins < 1) throw ValidationError("--bins must be positive");
  const auto m = four_masses(o);
  auto grid = refinement_grid(o);
  if (o.n_max_grid.empty() && o.n_max > 12) grid = {o.n_max - 10, o.n_max};
  const auto chart = parse_chart(o.chart);
  const auto unfold = parse_unfold(o.unfold);
  billiard_inputs(o, run, m, grid);
  run.inputs["bins"] = o.bins;
  run.inputs["unfold"] = o.unfold;
  if (o.window > 0) run.inputs["window"] = o.window;

  int buf[96];
  std::size_t n = 0;
  check(hcb_distinct_sectors(m.data(), buf, 24, &n));
  std::vector<std::array<int, 4>> sectors(n);
  for (std::size_t i = 0; i < n; ++i) std::copy(buf + 4 * i, buf + 4 * i + 4, sectors[i].begin());

  // Sectors are independent; spread the thread budget over them.
  const int threads = env_threads();
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  const int inner = std::max(1, threads / workers);
  std::vector<SectorStats> results(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) results[i] = run_sector(m, sectors[i], o, grid, chart, unfold, inner);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  // Single writer from here on.
  const fs::path dir(o.output);
  char* ref = nullptr;
  check(hcb_reference_curves_csv(4.0, 201, &ref));
  run.emit((dir / "reference_curves.csv").string(), take(ref));
  std::string table = "ordering,area,perimeter,converged,n_levels,mean_spacing,ks_poisson,ks_wigner,closer_to,"
                      "weyl_max_scaled,weyl_zero_crossings\n";
  int status = kExitOk;
  json per_sector = json::array();
  for (const auto& r : results) {
    const std::string label = ordering_label(r.ordering);
    json entry{{"ordering", ordering_json(r.ordering)}};
    const fs::path sub = dir / ("sector_" + label);
    if (!r.spectrum_csv.empty()) run.emit((sub / "spectrum.csv").string(), r.spectrum_csv);
    if (!r.error.empty()) {
      std::cerr << "hcb stats: sector " << label << ": " << r.error << "\n";
      status = std::max(status, r.exit);
      entry["error"] = r.error;
      per_sector.push_back(entry);
      continue;
    }
    run.emit((sub / "histogram.csv").string(), r.histogram_csv);
    run.emit((sub / "weyl_residual.csv").string(), r.weyl_csv);
    run.emit((sub / "summary.json").string(), r.summary_json);
    const auto& s = r.summary;
    char line[512];
    std::snprintf(line, sizeof line, "%s,%.12g,%.12g,%d,%zu,%.12g,%.12g,%.12g,%s,%.12g,%d\n", label.c_str(), r.area,
                  r.perimeter, r.converged, s.n_levels, s.mean_spacing, s.ks_poisson, s.ks_wigner,
                  s.ks_poisson < s.ks_wigner ? "poisson" : "wigner", s.weyl_max_scaled, s.weyl_zero_crossings);
    table += line;
    entry["n_levels"] = s.n_levels;
    entry["ks_poisson"] = s.ks_poisson;
    entry["ks_wigner"] = s.ks_wigner;
    per_sector.push_back(entry);
  }
  run.emit((dir / "sectors.csv").string(), table);
  run.results["sectors"] = per_sector;
  write_metadata(run, dir / "run.meta.json");
  return status;
}

// Eigenvalue column of a spectrum CSV written by `billiard`.
std::vector<double> read_spectrum_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("k,eigenvalue", 0) != 0) throw ValidationError(path + " is not a spectrum CSV");
  std::vector<double> v;
  while (std::getline(in, line)) {
    const auto cols = split(line, ',');
    if (cols.size() >= 2) v.push_back(parse_double(cols[1], path));
  }
  return v;
}

int cmd_weyl(const Options& o, Run& run) {
  const auto m = four_masses(o);
  if (o.ordering.empty()) throw ValidationError("--ordering is required");
  const auto p = parse_ordering(o.ordering);
  const auto chart = parse_chart(o.chart);
  auto sector = make_sector(m, p, chart);
  std::vector<double> levels;
  double area = 0, perimeter = 0;
  check(hcb_sector_area(sector.get(), &area, &perimeter));
  run.inputs["masses"] = mass_json(m);
  run.inputs["ordering"] = ordering_json(p);
  if (!o.spectrum.empty()) {
    run.inputs["spectrum"] = o.spectrum;
    levels = read_spectrum_csv(o.spectrum);
    if (o.window > 0 && static_cast<std::size_t>(o.window) < levels.size()) levels.resize(o.window);
  } else {
    const auto grid = refinement_grid(o);
    billiard_inputs(o, run, m, grid);
    check(hcb_set_threads(env_threads()));
    levels = stats_window(solve(sector.get(), o, grid), o);
  }
  hcb_stats_summary s{};
  char* w = nullptr;
  check(hcb_level_stats(levels.data(), levels.size(), area, perimeter, o.bins, HCB_UNFOLD_WEYL, &s, nullptr, nullptr,
                        &w));
  run.results["n_levels"] = s.n_levels;
  run.results["max_scaled_residual"] = s.weyl_max_scaled;
  run.results["zero_crossings"] = s.weyl_zero_crossings;
  run.emit(o.output, take(w));
  finish_file(run, o.output);
  return kExitOk;
}

// ---- config ---------------------------------------------------------------

std::string config_value(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + config_value(x, key);
    return s;
  }
  throw ValidationError("config key '" + key + "' has an unsupported value");
}

std::string option_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  if (key == "k-levels") return "k";
  if (key == "output-path") return "output";
  return key;
}

// Turns the config document into flags placed before the user's own, so flags win (TakeLast).
std::vector<std::string> config_args(const json& cfg, const std::string& command, const CLI::App& sub) {
  std::vector<std::string> args;
  auto add = [&](const json& obj, bool strict) {
    for (const auto& [key, value] : obj.items()) {
      if (key == "command" || (std::find(kCommands.begin(), kCommands.end(), key) != kCommands.end())) continue;
      const std::string name = option_name(key);
      const CLI::Option* opt = nullptr;
      try {
        opt = sub.get_option("--" + name);
      } catch (const CLI::OptionNotFound&) {
      }
      if (!opt) {
        if (strict) throw ValidationError("config key '" + key + "' is not an option of " + command);
        continue;
      }
      args.push_back("--" + name);
      args.push_back(config_value(value, key));
    }
  };
  add(cfg, false);
  if (cfg.contains(command)) {
    if (!cfg[command].is_object()) throw ValidationError("config section '" + command + "' must be an object");
    add(cfg[command], true);
  }
  return args;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path);
  try {
    json cfg = json::parse(in);
    if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
    return cfg;
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Hard-core few-body integrability and quantum billiard toolkit", "hcb"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config; top-level keys apply to every command, "
                                          "a section named after the command overrides them, flags override both");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hcb_version()));
  app.footer("Environment: HCB_THREADS sets the worker thread count (default 1).\n"
             "Exit codes: 0 success, 2 invalid input, 3 numerical failure, 1 I/O failure.");

  auto output = [&](CLI::App* c, const char* what) {
    c->add_option("-o,--output", o.output, what);
  };
  auto masses = [&](CLI::App* c) {
    c->add_option("--masses", o.masses, "comma-separated masses m1,...,mN");
  };
  auto billiard_opts = [&](CLI::App* c) {
    c->add_option("--spec", o.spec, "use the representative masses of A3, C3 or H3 instead of --masses");
    c->add_option("--n-max", o.n_max, "basis truncation")->capture_default_str();
    c->add_option("--n-max-grid", o.n_max_grid,
                  "ascending truncations for a convergence study, e.g. 30,40 (overrides --n-max)");
    c->add_option("--quadrature-order", o.quadrature_order,
                  "Gauss-Legendre order per direction (default 3*n_max)");
    c->add_option("--k,--k-levels", o.k, "number of eigenvalues kept (0 keeps all)")->capture_default_str();
    c->add_option("--chart", o.chart, "gnomonic chart centre: axis or centroid");
    c->add_option("--tolerance", o.tolerance,
                  "convergence tolerance on |dE| in units of the mean level spacing 4*pi/area")
        ->capture_default_str();
  };

  auto* classify = app.add_subcommand("classify", "match a mass sequence to the nearest Coxeter kaleidoscope");
  masses(classify);
  classify->add_option("--format", o.format, "file format (json)");
  output(classify, "JSON report path (the summary line is always printed)");

  auto* family = app.add_subcommand("family", "normalized mass fractions along a Coxeter family");
  family->add_option("--spec", o.spec, "group name, e.g. A3, C3, H3, F4");
  family->add_option("--grid", o.grid, "number of ratios r = m2/m1")->capture_default_str();
  output(family, "CSV path (stdout if omitted)");

  auto* geometry = app.add_subcommand("geometry", "spherical-triangle geometry of ordering sectors");
  masses(geometry);
  geometry->add_option("--spec", o.spec, "use the representative masses of A3, C3 or H3");
  geometry->add_option("--ordering", o.ordering, "one sector, e.g. 1,2,3,4 (all distinct sectors if omitted)");
  output(geometry, "JSON path (stdout if omitted)");

  auto* group = app.add_subcommand("group", "reflection group of a Coxeter spec or an integrable mass set");
  masses(group);
  group->add_option("--spec", o.spec, "A3, C3 or H3");
  group->add_option("--format", o.format, "json (group tables) or csv (lambda ladder)");
  group->add_option("--lambda-max", o.lambda_max, "largest lambda in the csv ladder")->capture_default_str();
  output(group, "output path (stdout if omitted)");

  auto* exact = app.add_subcommand("exact", "exact anti-invariant states and energy levels");
  masses(exact);
  exact->add_option("--spec", o.spec, "A3, C3 or H3");
  exact->add_option("--lambda", o.lambda, "degree of the states (ground state if omitted)");
  exact->add_option("--e-max", o.e_max, "energy cutoff for --format csv");
  exact->add_option("--format", o.format, "json (states) or csv (energy levels up to --e-max)");
  output(exact, "output path (stdout if omitted)");

  auto* billiard = app.add_subcommand("billiard", "numerical spectrum of one four-particle sector");
  masses(billiard);
  billiard->add_option("--ordering", o.ordering, "particle ordering, e.g. 1,2,3,4");
  billiard_opts(billiard);
  output(billiard, "spectrum CSV path (stdout if omitted)");

  auto* stats = app.add_subcommand("stats", "spectra and spacing statistics for every distinct sector");
  masses(stats);
  billiard_opts(stats);
  stats->add_option("--bins", o.bins, "histogram bins")->capture_default_str();
  stats->add_option("--unfold", o.unfold, "weyl or polynomial");
  stats->add_option("--window", o.window, "use only the first N converged levels");
  output(stats, "output directory (required)");

  auto* weyl = app.add_subcommand("weyl", "staircase minus the two-term Weyl estimate for one sector");
  masses(weyl);
  weyl->add_option("--ordering", o.ordering, "particle ordering, e.g. 1,2,3,4");
  weyl->add_option("--spectrum", o.spectrum, "reuse a spectrum CSV from `billiard` instead of solving");
  weyl->add_option("--window", o.window, "use only the first N levels");
  billiard_opts(weyl);
  output(weyl, "CSV path (stdout if omitted)");

  o.chart = "axis";
  o.unfold = "weyl";
  stats->get_option("--chart")->default_str("centroid");
  billiard->get_option("--chart")->default_str("axis");
  weyl->get_option("--chart")->default_str("axis");
  stats->get_option("--unfold")->default_str("weyl");

  Run run;
  int code = kExitOk;
  try {
    // Pull --config out first so its values can be spliced in ahead of the flags.
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        config_path = args[i + 1];
        args.erase(args.begin() + i, args.begin() + i + 2);
        break;
      }
      if (args[i].rfind("--config=", 0) == 0) {
        config_path = args[i].substr(9);
        args.erase(args.begin() + i);
        break;
      }
    }
    if (!config_path.empty()) {
      const json cfg = load_config(config_path);
      auto cmd_it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
        return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
      });
      if (cmd_it == args.end()) {
        if (!cfg.contains("command") || !cfg["command"].is_string())
          throw ValidationError("no command given on the command line or in the config");
        args.insert(args.begin(), cfg["command"].get<std::string>());
        cmd_it = args.begin();
      }
      const std::string command = *cmd_it;
      if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
        throw ValidationError("unknown command '" + command + "'");
      const auto extra = config_args(cfg, command, *app.get_subcommand(command));
      args.insert(cmd_it + 1, extra.begin(), extra.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);  // CLI11 takes the vector in reverse order

    auto* sub = app.get_subcommands().front();
    run.command = sub->get_name();
    if (!config_path.empty()) run.inputs["config"] = config_path;
    if (o.format.empty()) o.format = "json";
    if (o.format != "json" && o.format != "csv") throw ValidationError("--format must be csv or json");
    if (sub == stats && stats->get_option("--chart")->count() == 0) o.chart = "centroid";

    if (sub == classify) code = cmd_classify(o, run);
    else if (sub == family) code = cmd_family(o, run);
    else if (sub == geometry) code = cmd_geometry(o, run);
    else if (sub == group) code = cmd_group(o, run);
    else if (sub == exact) code = cmd_exact(o, run);
    else if (sub == billiard) code = cmd_billiard(o, run);
    else if (sub == stats) code = cmd_stats(o, run);
    else code = cmd_weyl(o, run);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "hcb: " << e.what() << "\n";
    return kExitValidation;
  } catch (const LibraryError& e) {
    std::cerr << "hcb: " << e.what() << "\n";
    return exit_code(e.status);
  } catch (const IoError& e) {
    std::cerr << "hcb: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "hcb: " << e.what() << "\n";
    return kExitIo;
  }
  return code;
}
