#ifndef MPSPIN_H
#define MPSPIN_H

#include <stddef.h>

#if defined(_WIN32)
#define MPSPIN_API __declspec(dllexport)
#else
#define MPSPIN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; every entry point returns one of these. */
typedef enum {
  MPSPIN_OK = 0,
  MPSPIN_INVALID_ARGUMENT = 1,
  MPSPIN_HORIZON_DOMAIN = 2,
  MPSPIN_POLAR_AXIS = 3,
  MPSPIN_SINGULAR_V = 4,
  MPSPIN_SPACELIKE_VELOCITY = 5,
  MPSPIN_REDUCTION_SINGULARITY = 6,
  MPSPIN_SINGULAR_E1Z2 = 7,
  MPSPIN_INVALID_THETA = 8,
  MPSPIN_OUTSIDE_DOMAIN = 9,
  MPSPIN_NO_CUSP = 10,
  MPSPIN_CONTINUATION_FAILED = 11,
  MPSPIN_NOT_AN_EQUILIBRIUM = 12,
  MPSPIN_DEGENERATE_SPECTRUM = 13,
  MPSPIN_BRACKET_FAILED = 14,
  MPSPIN_NO_CONVERGENCE = 15,
  MPSPIN_DEGENERATE_CROSSING = 16,
  MPSPIN_MANIFOLD_TERMINATED = 17,
  MPSPIN_STEP_UNDERFLOW = 18,
  MPSPIN_SINGULAR_V0 = 19,
  MPSPIN_MASS_NON_CONSERVING = 20,
  MPSPIN_LIFT_FAILED = 21,
  MPSPIN_NULL_ARGUMENT = 98,
  MPSPIN_INTERNAL = 99
} mpspin_status;

/* Message of the last failure on the calling thread. */
MPSPIN_API const char* mpspin_last_error(void);
MPSPIN_API const char* mpspin_status_name(int status);
MPSPIN_API const char* mpspin_version(void);

/* Integrals of the reduced system. */
typedef struct {
  double m, mu, c, ell, energy, pphi;
} mpspin_integrals;

MPSPIN_API void mpspin_integrals_default(mpspin_integrals* p);

/* Integrator settings. Keys: rtol atol h_init h_max h_min tau_max r_max
   horizon_tol max_steps. */
typedef struct mpspin_config mpspin_config;
MPSPIN_API int mpspin_config_new(mpspin_config** out);
MPSPIN_API void mpspin_config_free(mpspin_config* cfg);
MPSPIN_API int mpspin_config_set(mpspin_config* cfg, const char* key, double value);
MPSPIN_API int mpspin_config_get(const mpspin_config* cfg, const char* key, double* value);

/* Full 14-dimensional system; layout t r theta phi | P | L | M. */
enum { MPSPIN_FULL_DIM = 14, MPSPIN_REDUCED_DIM = 8 };

MPSPIN_API int mpspin_tulczyjew_state(const double x[4], const double spin[3], const double p_tetrad[3],
                                      double m, double mu, double out[14]);
/* out: H, m, casimir_star, casimir_circ, energy, Q1, Q2, Q3, F */
MPSPIN_API int mpspin_full_invariants(const double y[14], double m, double mu, double out[9]);
MPSPIN_API int mpspin_full_rhs(const double y[14], double m, double mu, double out[14]);
MPSPIN_API int mpspin_reduce(const double y[14], double m, double mu, double out[8], mpspin_integrals* p);

/* Reduced system; layout E1 E2 E3 Z1 Z2 Z3 r Pr. */
MPSPIN_API int mpspin_reduced_rhs(const double y[8], const mpspin_integrals* p, double out[8]);
MPSPIN_API int mpspin_reduced_hamiltonian(const double y[8], const mpspin_integrals* p, double* h);
/* out: casimir_circ, F, m^2, f_r, f_theta, U */
MPSPIN_API int mpspin_reduced_invariants(const double y[8], const mpspin_integrals* p, double out[6]);

/* Sampled trajectory. */
typedef struct mpspin_trajectory mpspin_trajectory;
MPSPIN_API int mpspin_simulate_full(const double y0[14], double m, double mu, const mpspin_config* cfg,
                                    double output_step, mpspin_trajectory** out);
MPSPIN_API int mpspin_simulate_reduced(const double y0[8], const mpspin_integrals* p, const mpspin_config* cfg,
                                       double output_step, mpspin_trajectory** out);
MPSPIN_API size_t mpspin_trajectory_size(const mpspin_trajectory* t);
MPSPIN_API int mpspin_trajectory_dim(const mpspin_trajectory* t);
MPSPIN_API int mpspin_trajectory_row(const mpspin_trajectory* t, size_t i, double* tau, double* state);
/* Termination reason name, e.g. "Completed" or "HorizonReached". */
MPSPIN_API const char* mpspin_trajectory_termination(const mpspin_trajectory* t);
MPSPIN_API void mpspin_trajectory_free(mpspin_trajectory* t);

/* Equilibria. */
typedef enum { MPSPIN_SIGMA0_PLUS, MPSPIN_SIGMA0_MINUS, MPSPIN_SIGMA1, MPSPIN_SIGMA2 } mpspin_family;
typedef enum {
  MPSPIN_CENTER_CENTER,
  MPSPIN_SADDLE_CENTER,
  MPSPIN_SADDLE_SADDLE,
  MPSPIN_FOCUS_FOCUS,
  MPSPIN_UNCLASSIFIED
} mpspin_stability;

typedef struct {
  int family;
  int stability;
  double r, z, A, B, U;
  mpspin_integrals params;
  double state[8];
  double spin[4]; /* Pauli-Lubanski (S^t, S^r, S^theta, S^phi) */
} mpspin_equilibrium;

MPSPIN_API const char* mpspin_family_name(int family);
MPSPIN_API const char* mpspin_stability_name(int stability);

MPSPIN_API int mpspin_sigma0(double r, double c, int sign, mpspin_equilibrium* out);
MPSPIN_API int mpspin_sigma1(double c, double energy, mpspin_equilibrium out[2]);

typedef struct mpspin_eq_list mpspin_eq_list;
MPSPIN_API int mpspin_sigma2(double c, double e1_step, double e1_max, mpspin_eq_list** out);
MPSPIN_API size_t mpspin_eq_list_size(const mpspin_eq_list* l);
MPSPIN_API int mpspin_eq_list_get(const mpspin_eq_list* l, size_t i, mpspin_equilibrium* out);
MPSPIN_API void mpspin_eq_list_free(mpspin_eq_list* l);

MPSPIN_API int mpspin_cusp(double c, int sign, double* r, double* ell, double* energy);
MPSPIN_API int mpspin_ell_star(double c, double* ell);
MPSPIN_API int mpspin_c2_point_radius(double c, double* r);
MPSPIN_API int mpspin_critical_spins(double tol, double* c1, double* c2);
MPSPIN_API int mpspin_classify(const double y[8], const mpspin_integrals* p, double* A, double* B, int* stability);

/* Poincare section E1 = 0, dE1/dtau > 0. */
MPSPIN_API int mpspin_lift(double r, double pr, const mpspin_integrals* p, int* admissible, int* root_count,
                           double state[8]);
/* One application of the map (direction +1) or its inverse (-1); found = 0
   when the orbit terminates before crossing. */
MPSPIN_API int mpspin_map(double r, double pr, const mpspin_integrals* p, const mpspin_config* cfg, int direction,
                          int* found, double state[8], double* tau);

typedef struct mpspin_portrait mpspin_portrait;
MPSPIN_API int mpspin_portrait_run(const mpspin_integrals* p, const mpspin_config* cfg, const double* seeds,
                                   size_t n_seeds, int iterations, int jobs, mpspin_portrait** out);
MPSPIN_API size_t mpspin_portrait_orbits(const mpspin_portrait* pt);
MPSPIN_API size_t mpspin_portrait_orbit_size(const mpspin_portrait* pt, size_t orbit);
MPSPIN_API int mpspin_portrait_seed_admissible(const mpspin_portrait* pt, size_t orbit);
MPSPIN_API int mpspin_portrait_point(const mpspin_portrait* pt, size_t orbit, size_t k, double* r, double* pr,
                                     double* tau, double* e1);
MPSPIN_API const char* mpspin_portrait_termination(const mpspin_portrait* pt, size_t orbit);
MPSPIN_API void mpspin_portrait_free(mpspin_portrait* pt);

/* admissible flags, row-major over r then pr, length nr * npr */
MPSPIN_API int mpspin_gray_mask(const mpspin_integrals* p, double r_min, double r_max, double pr_min, double pr_max,
                                int nr, int npr, int jobs, int* out);

typedef struct {
  double r, pr;
  double multiplier_re[2], multiplier_im[2];
  double jacobian[4]; /* row-major */
  double residual;
  int iterations;
  int saddle;
  double unstable_dir[2], stable_dir[2];
  double state[8];
} mpspin_fixed_point;

MPSPIN_API int mpspin_fixed_point_find(double r, double pr, const mpspin_integrals* p, const mpspin_config* cfg,
                                       mpspin_fixed_point* out);

typedef struct mpspin_separatrix mpspin_separatrix;
/* branch: 0 unstable+, 1 unstable-, 2 stable+, 3 stable- */
MPSPIN_API int mpspin_separatrix_run(const mpspin_fixed_point* saddle, const mpspin_integrals* p,
                                     const mpspin_config* cfg, double arc_tol, int max_points, double diameter,
                                     mpspin_separatrix** out);
MPSPIN_API int mpspin_separatrix_branch(const mpspin_separatrix* s, int branch, const double** xy, size_t* n,
                                        int* terminated);
MPSPIN_API void mpspin_separatrix_free(mpspin_separatrix* s);

/* Proper crossings of two polylines given as interleaved (x, y). Writes up
   to cap points into out and the total into count. */
MPSPIN_API int mpspin_polyline_intersections(const double* a, size_t na, const double* b, size_t nb, double* out,
                                             size_t cap, size_t* count);

typedef struct mpspin_bifurcation mpspin_bifurcation;
MPSPIN_API int mpspin_bifurcation_run(double c, double ell, double e_min, double e_max, int steps, double r0,
                                      double pr0, const mpspin_config* cfg, mpspin_bifurcation** out);
MPSPIN_API size_t mpspin_bifurcation_steps(const mpspin_bifurcation* b);
MPSPIN_API int mpspin_bifurcation_step(const mpspin_bifurcation* b, size_t i, double* energy, int* count,
                                       mpspin_fixed_point* central);
MPSPIN_API size_t mpspin_bifurcation_events(const mpspin_bifurcation* b);
MPSPIN_API int mpspin_bifurcation_event(const mpspin_bifurcation* b, size_t i, double* energy, int* supercritical,
                                        int* count_before, int* count_after, mpspin_fixed_point pair[2],
                                        int* n_pair);
MPSPIN_API void mpspin_bifurcation_free(mpspin_bifurcation* b);

#ifdef __cplusplus
}
#endif

#endif
