/* C interface to the hard-core billiard library.
 *
 * Every function returns an hcb_status. On failure the message is available
 * from hcb_last_error() on the calling thread until the next call into the
 * library. Strings returned through char** are owned by the caller and must be
 * released with hcb_string_free(). Handles are released with their
 * *_destroy() function; passing NULL to a destroy function is a no-op.
 */
#ifndef HCB_H
#define HCB_H

#include <stddef.h>

#if defined(_WIN32)
#define HCB_API __declspec(dllexport)
#else
#define HCB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hcb_status {
  HCB_OK = 0,
  HCB_ERR_INVALID_ARGUMENT = 1,
  HCB_ERR_DOMAIN = 2,
  HCB_ERR_INFEASIBLE = 3,
  HCB_ERR_GEOMETRY = 4,
  HCB_ERR_NUMERICAL = 5,
  HCB_ERR_INSUFFICIENT_DATA = 6,
  HCB_ERR_UNSUPPORTED = 7,
  HCB_ERR_CONSISTENCY = 8,
  HCB_ERR_INTERNAL = 9
} hcb_status;

typedef enum hcb_chart { HCB_CHART_AXIS = 0, HCB_CHART_CENTROID = 1 } hcb_chart;
typedef enum hcb_unfold { HCB_UNFOLD_WEYL = 0, HCB_UNFOLD_POLYNOMIAL = 1 } hcb_unfold;

typedef struct hcb_group hcb_group;
typedef struct hcb_sector hcb_sector;
typedef struct hcb_spectrum hcb_spectrum;

/* ---- library ---------------------------------------------------------- */

HCB_API const char* hcb_version(void);
HCB_API const char* hcb_last_error(void);
HCB_API const char* hcb_status_name(hcb_status status);
HCB_API void hcb_string_free(char* s);
/* Threads used inside one solver call (OpenMP); ignored without OpenMP. */
HCB_API hcb_status hcb_set_threads(int threads);

/* ---- mass families ---------------------------------------------------- */

HCB_API hcb_status hcb_sector_angle(double mi, double mj, double mk, double* angle);
/* Writes spec.rank + 1 masses; *count receives the number needed. */
HCB_API hcb_status hcb_generate_family(const char* spec, double m1, double m2, double* masses, size_t capacity,
                                       size_t* count);
/* Endpoints of the feasible r = m2/m1 interval; hi is +inf when unbounded. */
HCB_API hcb_status hcb_feasible_interval(const char* spec, double* lo, double* hi);
/* r with m_1 = m_N inside the feasible interval, HCB_ERR_INFEASIBLE if none. */
HCB_API hcb_status hcb_symmetric_ratio(const char* spec, double* ratio);
/* Grid NULL: geometric grid of grid_points ratios across the feasible interval,
 * plus the symmetric ratio when the family has one. */
HCB_API hcb_status hcb_family_curve_csv(const char* spec, const double* grid, size_t n_grid, int grid_points,
                                        char** csv, size_t* n_feasible, size_t* n_infeasible);

typedef struct hcb_classification {
  char name[32];
  double max_deviation;
} hcb_classification;

HCB_API hcb_status hcb_classify(const double* masses, size_t n, hcb_classification* out);
HCB_API hcb_status hcb_classify_json(const double* masses, size_t n, char** json);

/* ---- geometry --------------------------------------------------------- */

/* Orderings are 1-based permutations of (1,2,3,4). */
HCB_API hcb_status hcb_sector_geometry_json(const double masses[4], const int ordering[4], char** json);
/* Representatives of the distinct sectors, 4 ints each; capacity in orderings (24 suffices). */
HCB_API hcb_status hcb_distinct_sectors(const double masses[4], int* orderings, size_t capacity, size_t* count);

/* ---- groups and exact states ------------------------------------------ */

/* Representative masses of A3, C3 or H3 (H3: the member with m_1 = m_4). */
HCB_API hcb_status hcb_standard_masses(const char* spec, double masses[4]);
HCB_API hcb_status hcb_group_create(const char* spec, hcb_group** out);
HCB_API hcb_status hcb_group_from_masses(const double masses[4], hcb_group** out);
HCB_API void hcb_group_destroy(hcb_group* group);
HCB_API hcb_status hcb_group_order(const hcb_group* group, long long* order);
HCB_API hcb_status hcb_group_reflections(const hcb_group* group, int* count);
HCB_API hcb_status hcb_group_json(const hcb_group* group, char** json);
HCB_API hcb_status hcb_group_degeneracy(const hcb_group* group, int lambda, int* count);
/* Orthonormal anti-invariant harmonics of degree lambda as JSON. */
HCB_API hcb_status hcb_exact_states_json(const hcb_group* group, int lambda, char** json);
HCB_API hcb_status hcb_ground_state_json(const hcb_group* group, char** json);
/* Columns lambda, count (ladder enumeration) and a_lambda (character formula). */
HCB_API hcb_status hcb_lambda_spectrum_csv(const hcb_group* group, int lambda_max, char** csv);
HCB_API hcb_status hcb_energy_levels_csv(const char* spec, double e_max, char** csv);

/* ---- billiard --------------------------------------------------------- */

HCB_API hcb_status hcb_sector_create(const double masses[4], const int ordering[4], hcb_chart chart,
                                     hcb_sector** out);
/* Three inward unit normals, row-major 3x3. */
HCB_API hcb_status hcb_sector_from_normals(const double normals[9], hcb_sector** out);
HCB_API void hcb_sector_destroy(hcb_sector* sector);
HCB_API hcb_status hcb_sector_area(const hcb_sector* sector, double* area, double* perimeter);
/* a, b, c, d; HCB_ERR_UNSUPPORTED for sectors built from normals. */
HCB_API hcb_status hcb_sector_abcd(const hcb_sector* sector, double abcd[4]);

/* quadrature_order <= 0 selects 3 n_max; k <= 0 keeps all eigenvalues. */
HCB_API hcb_status hcb_solve(const hcb_sector* sector, int n_max, int k, int quadrature_order, hcb_spectrum** out);
/* Solves on an ascending n_max grid; the returned spectrum is the finest one
 * with last-refinement deltas and its converged count (tolerance on |dE|). */
HCB_API hcb_status hcb_convergence_study(const hcb_sector* sector, const int* n_max_grid, size_t n_grid, int k,
                                         double tolerance, int quadrature_factor, hcb_spectrum** out);
HCB_API void hcb_spectrum_destroy(hcb_spectrum* spectrum);
HCB_API hcb_status hcb_spectrum_size(const hcb_spectrum* spectrum, size_t* size);
HCB_API hcb_status hcb_spectrum_values(const hcb_spectrum* spectrum, double* values, size_t capacity);
HCB_API hcb_status hcb_spectrum_lambdas(const hcb_spectrum* spectrum, double* lambdas, size_t capacity);
HCB_API hcb_status hcb_spectrum_converged(const hcb_spectrum* spectrum, int* count);
HCB_API hcb_status hcb_spectrum_csv(const hcb_spectrum* spectrum, char** csv);

/* ---- statistics ------------------------------------------------------- */

HCB_API double hcb_weyl_count(double eigenvalue, double area, double perimeter);

typedef struct hcb_stats_summary {
  size_t n_levels;
  double mean_spacing;
  double ks_poisson;
  double ks_wigner;
  double weyl_max_scaled; /* max |staircase - Weyl| / sqrt(E) */
  int weyl_zero_crossings;
} hcb_stats_summary;

/* Unfolds the first n levels (ascending) of a sector with the given area and
 * perimeter. Any output pointer may be NULL. */
HCB_API hcb_status hcb_level_stats(const double* levels, size_t n, double area, double perimeter, int bins,
                                   hcb_unfold method, hcb_stats_summary* summary, char** histogram_csv,
                                   char** summary_json, char** weyl_csv);
/* Same on the converged window of a solved spectrum. */
HCB_API hcb_status hcb_spectrum_stats(const hcb_spectrum* spectrum, const hcb_sector* sector, int bins,
                                      hcb_unfold method, hcb_stats_summary* summary, char** histogram_csv,
                                      char** summary_json, char** weyl_csv);
HCB_API hcb_status hcb_reference_curves_csv(double s_max, int points, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* HCB_H */
