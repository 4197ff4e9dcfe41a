#include <math.h>
#include <stdio.h>
#include <string.h>

#include "mpspin/mpspin.h"

static int failures = 0;

#define CHECK(cond)                                          \
  do {                                                       \
    if (!(cond)) {                                           \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                            \
    }                                                        \
  } while (0)

static void test_errors(void) {
  mpspin_equilibrium eq;
  CHECK(mpspin_sigma0(10.0, 1.0, 1, NULL) == MPSPIN_NULL_ARGUMENT);
  CHECK(mpspin_sigma0(1.5, 1.0, 1, &eq) != MPSPIN_OK);
  CHECK(strlen(mpspin_last_error()) > 0);
  CHECK(mpspin_sigma0(10.0, 1.0, 1, &eq) == MPSPIN_OK);
  CHECK(strlen(mpspin_last_error()) == 0);
  CHECK(strcmp(mpspin_status_name(MPSPIN_OUTSIDE_DOMAIN), "OutsideDomain") == 0);
}

static void test_config(void) {
  mpspin_config* cfg = NULL;
  double v = 0.0;
  CHECK(mpspin_config_new(&cfg) == MPSPIN_OK);
  CHECK(mpspin_config_get(cfg, "rtol", &v) == MPSPIN_OK && v == 1e-12);
  CHECK(mpspin_config_set(cfg, "tau_max", 50.0) == MPSPIN_OK);
  CHECK(mpspin_config_get(cfg, "tau_max", &v) == MPSPIN_OK && v == 50.0);
  CHECK(mpspin_config_set(cfg, "bogus", 1.0) == MPSPIN_INVALID_ARGUMENT);
  CHECK(mpspin_config_set(cfg, "rtol", -1.0) == MPSPIN_INVALID_ARGUMENT);
  mpspin_config_free(cfg);
}

static void test_equilibrium_and_rhs(void) {
  mpspin_equilibrium eq;
  double rhs[8], inv[6], h;
  int i;
  CHECK(mpspin_sigma0(8.0, 0.5, 1, &eq) == MPSPIN_OK);
  CHECK(mpspin_reduced_rhs(eq.state, &eq.params, rhs) == MPSPIN_OK);
  for (i = 0; i < 8; ++i) CHECK(fabs(rhs[i]) < 1e-8);
  CHECK(mpspin_reduced_hamiltonian(eq.state, &eq.params, &h) == MPSPIN_OK);
  CHECK(fabs(h + 0.5) < 1e-10);
  CHECK(mpspin_reduced_invariants(eq.state, &eq.params, inv) == MPSPIN_OK);
  CHECK(fabs(inv[0] - 0.25) < 1e-10);
  CHECK(eq.stability == MPSPIN_CENTER_CENTER);
  CHECK(fabs(eq.spin[1]) < 1e-10 && fabs(eq.spin[3]) < 1e-10);
}

static void test_full_round_trip(void) {
  const double x[4] = {0.0, 10.0, 1.3, 0.0};
  const double spin[3] = {0.4, -0.3, 0.5};
  const double p[3] = {0.02, 0.05, 0.37};
  double y[14], inv[9], red[8];
  mpspin_integrals q;
  mpspin_config* cfg = NULL;
  mpspin_trajectory* t = NULL;
  CHECK(mpspin_tulczyjew_state(x, spin, p, 1.0, 1.0, y) == MPSPIN_OK);
  CHECK(mpspin_full_invariants(y, 1.0, 1.0, inv) == MPSPIN_OK);
  CHECK(fabs(inv[1] - 1.0) < 1e-12);
  CHECK(fabs(inv[2]) < 1e-12);
  CHECK(mpspin_reduce(y, 1.0, 1.0, red, &q) == MPSPIN_OK);
  CHECK(fabs(red[6] - 10.0) < 1e-12);
  mpspin_config_new(&cfg);
  mpspin_config_set(cfg, "tau_max", 20.0);
  CHECK(mpspin_simulate_full(y, 1.0, 1.0, cfg, 1.0, &t) == MPSPIN_OK);
  CHECK(mpspin_trajectory_size(t) == 21);
  CHECK(mpspin_trajectory_dim(t) == 14);
  CHECK(strcmp(mpspin_trajectory_termination(t), "Completed") == 0);
  mpspin_trajectory_free(t);
  mpspin_config_free(cfg);
}

static void test_section(void) {
  mpspin_integrals p;
  mpspin_config* cfg = NULL;
  mpspin_fixed_point fp;
  int admissible = 0, roots = 0, found = 0;
  double s[8], tau;
  mpspin_integrals_default(&p);
  p.c = 1.0;
  p.ell = 3.807 * 3.807;
  p.energy = 0.9235;
  p.pphi = 1.0;
  CHECK(mpspin_lift(5.0, 0.0, &p, &admissible, &roots, s) == MPSPIN_OK);
  CHECK(admissible == 1 && roots >= 1);
  mpspin_config_new(&cfg);
  mpspin_config_set(cfg, "tau_max", 5e3);
  CHECK(mpspin_map(5.0, 0.0, &p, cfg, 1, &found, s, &tau) == MPSPIN_OK);
  CHECK(found == 1 && fabs(s[0]) < 1e-10 && tau > 0.0);
  CHECK(mpspin_fixed_point_find(5.2, 0.0, &p, cfg, &fp) == MPSPIN_OK);
  CHECK(fp.residual < 1e-10);
  CHECK(fabs(fp.jacobian[0] * fp.jacobian[3] - fp.jacobian[1] * fp.jacobian[2] - 1.0) < 1e-4);
  mpspin_config_free(cfg);
}

static void test_polyline(void) {
  const double a[4] = {0, 0, 2, 2}, b[4] = {0, 2, 2, 0};
  double out[2];
  size_t n = 0;
  CHECK(mpspin_polyline_intersections(a, 2, b, 2, out, 1, &n) == MPSPIN_OK);
  CHECK(n == 1 && out[0] == 1.0 && out[1] == 1.0);
}

int main(void) {
  test_errors();
  test_config();
  test_equilibrium_and_rhs();
  test_full_round_trip();
  test_section();
  test_polyline();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
