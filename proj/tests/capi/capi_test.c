/* Exercises the public C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "hcb/hcb.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static void test_families(void) {
  double m[4];
  size_t count = 0;
  EXPECT(hcb_generate_family("C3", 3.0, 1.0, m, 4, &count) == HCB_OK);
  EXPECT(count == 4);
  EXPECT(fabs(m[2] - 2.0) < 1e-12 && fabs(m[3] - 6.0) < 1e-12);
  EXPECT(hcb_generate_family("C3", 3.0, 1.0, m, 2, &count) == HCB_ERR_INVALID_ARGUMENT);
  EXPECT(count == 4);

  hcb_classification c;
  const double c3[4] = {3, 1, 2, 6};
  EXPECT(hcb_classify(c3, 4, &c) == HCB_OK);
  EXPECT(strcmp(c.name, "C3") == 0);
  EXPECT(c.max_deviation < 1e-12);

  char* json = NULL;
  EXPECT(hcb_classify_json(c3, 4, &json) == HCB_OK);
  EXPECT(json && strstr(json, "\"C3\""));
  hcb_string_free(json);

  const double bad[4] = {3, -1, 2, 6};
  EXPECT(hcb_classify(bad, 4, &c) == HCB_ERR_DOMAIN);
  EXPECT(strlen(hcb_last_error()) > 0);
  EXPECT(strcmp(hcb_status_name(HCB_ERR_DOMAIN), "domain") == 0);

  double lo = 0, hi = 0;
  EXPECT(hcb_feasible_interval("H3", &lo, &hi) == HCB_OK);
  EXPECT(lo < hi);
  EXPECT(hcb_feasible_interval("Z9", &lo, &hi) != HCB_OK);
}

static void test_groups(void) {
  hcb_group* g = NULL;
  long long order = 0;
  int refl = 0, a = -1;
  EXPECT(hcb_group_create("H3", &g) == HCB_OK);
  EXPECT(hcb_group_order(g, &order) == HCB_OK && order == 120);
  EXPECT(hcb_group_reflections(g, &refl) == HCB_OK && refl == 15);
  EXPECT(hcb_group_degeneracy(g, 15, &a) == HCB_OK && a == 1);
  EXPECT(hcb_group_degeneracy(g, 45, &a) == HCB_OK && a == 2);
  char* csv = NULL;
  EXPECT(hcb_lambda_spectrum_csv(g, 30, &csv) == HCB_OK);
  EXPECT(csv && strncmp(csv, "lambda,count,a_lambda\n15,1,1\n", 29) == 0);
  hcb_string_free(csv);
  hcb_group_destroy(g);
  hcb_group_destroy(NULL);
}

static void test_billiard(void) {
  const double octant[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  hcb_sector* s = NULL;
  EXPECT(hcb_sector_from_normals(octant, &s) == HCB_OK);
  double area = 0, perimeter = 0, abcd[4];
  EXPECT(hcb_sector_area(s, &area, &perimeter) == HCB_OK);
  EXPECT(fabs(area - 2.0 * atan(1.0)) < 1e-12);
  EXPECT(hcb_sector_abcd(s, abcd) == HCB_ERR_UNSUPPORTED);

  hcb_spectrum* sp = NULL;
  EXPECT(hcb_solve(s, 16, 6, 0, &sp) == HCB_OK);
  size_t n = 0;
  double lam[6];
  EXPECT(hcb_spectrum_size(sp, &n) == HCB_OK && n == 6);
  EXPECT(hcb_spectrum_lambdas(sp, lam, 6) == HCB_OK);
  EXPECT(fabs(lam[0] - 3.0) < 1e-2);
  EXPECT(hcb_spectrum_lambdas(sp, lam, 2) == HCB_ERR_INVALID_ARGUMENT);
  hcb_spectrum_destroy(sp);

  sp = NULL;
  EXPECT(hcb_solve(s, 10, 6, 8, &sp) == HCB_ERR_INVALID_ARGUMENT);
  EXPECT(sp == NULL);

  const int grid[2] = {10, 14};
  int conv = -1;
  EXPECT(hcb_convergence_study(s, grid, 2, 6, 1e-1, 3, &sp) == HCB_OK);
  EXPECT(hcb_spectrum_converged(sp, &conv) == HCB_OK && conv >= 1);
  char* csv = NULL;
  EXPECT(hcb_spectrum_csv(sp, &csv) == HCB_OK);
  EXPECT(csv && strncmp(csv, "k,eigenvalue,lambda_eff,delta_last_refinement\n", 46) == 0);
  hcb_string_free(csv);
  hcb_spectrum_destroy(sp);
  hcb_sector_destroy(s);

  const double masses[4] = {1, 1, 1, 1};
  const int bad_order[4] = {1, 2, 2, 4};
  s = NULL;
  EXPECT(hcb_sector_create(masses, bad_order, HCB_CHART_AXIS, &s) == HCB_ERR_INVALID_ARGUMENT);
  EXPECT(s == NULL);
  int orderings[96];
  size_t count = 0;
  EXPECT(hcb_distinct_sectors(masses, orderings, 24, &count) == HCB_OK && count == 1);
}

static void test_stats(void) {
  double levels[200];
  /* Levels placed exactly on the Weyl curve of the octant. */
  const double pi = 4.0 * atan(1.0), area = pi / 2, perimeter = 3 * pi / 2;
  for (int k = 0; k < 200; ++k) {
    const double n = k + 1.0, x = (perimeter + sqrt(perimeter * perimeter + 16 * pi * area * n)) / (2 * area);
    levels[k] = x * x;
  }
  hcb_stats_summary sum;
  char* hist = NULL;
  EXPECT(hcb_level_stats(levels, 200, area, perimeter, 24, HCB_UNFOLD_WEYL, &sum, &hist, NULL, NULL) == HCB_OK);
  EXPECT(sum.n_levels == 200);
  EXPECT(fabs(sum.mean_spacing - 1.0) < 1e-9);
  EXPECT(fabs(hcb_weyl_count(levels[9], area, perimeter) - 10.0) < 1e-9);
  EXPECT(hist && strncmp(hist, "bin_left,bin_right,density\n", 27) == 0);
  hcb_string_free(hist);
  EXPECT(hcb_level_stats(levels, 20, area, perimeter, 24, HCB_UNFOLD_WEYL, &sum, NULL, NULL, NULL) ==
         HCB_ERR_INSUFFICIENT_DATA);
}

int main(void) {
  printf("hcb %s\n", hcb_version());
  EXPECT(hcb_set_threads(0) == HCB_ERR_INVALID_ARGUMENT);
  test_families();
  test_groups();
  test_billiard();
  test_stats();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  puts("all C API checks passed");
  return 0;
}
