#include "mpspin/mpspin.h"

#include <cstring>
#include <cmath>
#include <exception>
#include <memory>
#include <string>

#include "mpspin/equilibria.hpp"
#include "mpspin/full_system.hpp"
#include "mpspin/integrate.hpp"
#include "mpspin/poincare.hpp"
#include "mpspin/reduced_system.hpp"

using namespace mpspin;

struct mpspin_config {
  IntegratorConfig cfg;
};
struct mpspin_trajectory {
  Trajectory traj;
  int dim = 0;
};
struct mpspin_eq_list {
  std::vector<EquilibriumRecord> points;
};
struct mpspin_portrait {
  Portrait portrait;
};
struct mpspin_separatrix {
  Separatrices sep;
  std::vector<double> flat[4];
};
struct mpspin_bifurcation {
  BifurcationScan scan;
};

namespace {

thread_local std::string g_error;

int set_error(int code, const char* what) {
  g_error = what;
  return code;
}

template <class Fn>
int guarded(Fn fn) {
  try {
    fn();
    g_error.clear();
    return MPSPIN_OK;
  } catch (const Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::exception& e) {
    return set_error(MPSPIN_INTERNAL, e.what());
  } catch (...) {
    return set_error(MPSPIN_INTERNAL, "unknown failure");
  }
}

#define MPSPIN_REQUIRE(ptr) \
  if (!(ptr)) return set_error(MPSPIN_NULL_ARGUMENT, "null argument: " #ptr)

IntegralParams to_params(const mpspin_integrals* p) {
  IntegralParams q;
  q.m = p->m;
  q.mu = p->mu;
  q.c = p->c;
  q.ell = p->ell;
  q.energy = p->energy;
  q.pphi = p->pphi;
  return q;
}

mpspin_integrals from_params(const IntegralParams& q) { return {q.m, q.mu, q.c, q.ell, q.energy, q.pphi}; }

IntegratorConfig config_or_default(const mpspin_config* c) { return c ? c->cfg : IntegratorConfig{}; }

double* config_field(IntegratorConfig& c, const char* key) {
  if (!std::strcmp(key, "rtol")) return &c.rtol;
  if (!std::strcmp(key, "atol")) return &c.atol;
  if (!std::strcmp(key, "h_init")) return &c.hInit;
  if (!std::strcmp(key, "h_max")) return &c.hMax;
  if (!std::strcmp(key, "h_min")) return &c.hMin;
  if (!std::strcmp(key, "tau_max")) return &c.tauMax;
  if (!std::strcmp(key, "r_max")) return &c.rMax;
  if (!std::strcmp(key, "horizon_tol")) return &c.horizonTol;
  return nullptr;
}

void copy_state(const ReducedState& s, double* out) {
  const ReducedVector v = s.pack();
  std::copy(v.begin(), v.end(), out);
}

void fill_equilibrium(EquilibriumRecord rec, mpspin_equilibrium* out) {
  if (rec.stability == Stability::Unclassified) {
    try {
      classify(rec);
    } catch (const Error&) {
    }
  }
  out->family = static_cast<int>(rec.family);
  out->stability = static_cast<int>(rec.stability);
  out->r = rec.r;
  out->z = rec.z;
  out->A = rec.A;
  out->B = rec.B;
  out->U = rec.U;
  out->params = from_params(rec.params);
  copy_state(rec.state, out->state);
  const auto s = pauli_lubanski(rec.state, rec.params);
  std::copy(s.begin(), s.end(), out->spin);
}

void fill_fixed_point(const FixedPoint& fp, mpspin_fixed_point* out) {
  out->r = fp.point.r;
  out->pr = fp.point.Pr;
  for (int k = 0; k < 2; ++k) {
    out->multiplier_re[k] = fp.multipliers[k].real();
    out->multiplier_im[k] = fp.multipliers[k].imag();
    out->unstable_dir[k] = fp.unstableDir[k];
    out->stable_dir[k] = fp.stableDir[k];
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out->jacobian[2 * i + j] = fp.jacobian[i][j];
  out->residual = fp.residual;
  out->iterations = fp.iterations;
  out->saddle = fp.saddle ? 1 : 0;
  copy_state(fp.point.state, out->state);
}

FixedPoint to_fixed_point(const mpspin_fixed_point* in) {
  FixedPoint fp;
  fp.point.r = in->r;
  fp.point.Pr = in->pr;
  fp.point.admissible = true;
  fp.point.state = ReducedState::unpack(in->state);
  for (int k = 0; k < 2; ++k) {
    fp.multipliers[k] = {in->multiplier_re[k], in->multiplier_im[k]};
    fp.unstableDir[k] = in->unstable_dir[k];
    fp.stableDir[k] = in->stable_dir[k];
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) fp.jacobian[i][j] = in->jacobian[2 * i + j];
  fp.residual = in->residual;
  fp.iterations = in->iterations;
  fp.saddle = in->saddle != 0;
  return fp;
}

std::vector<Point2> to_points(const double* xy, size_t n) {
  std::vector<Point2> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = {xy[2 * i], xy[2 * i + 1]};
  return out;
}

}  // namespace

extern "C" {

const char* mpspin_last_error(void) { return g_error.c_str(); }

const char* mpspin_status_name(int status) {
  if (status == MPSPIN_NULL_ARGUMENT) return "NullArgument";
  if (status == MPSPIN_INTERNAL) return "Internal";
  return error_name(static_cast<ErrorCode>(status));
}

const char* mpspin_version(void) { return "1.0.0"; }

void mpspin_integrals_default(mpspin_integrals* p) {
  if (p) *p = from_params(IntegralParams{});
}

int mpspin_config_new(mpspin_config** out) {
  MPSPIN_REQUIRE(out);
  return guarded([&] { *out = new mpspin_config(); });
}

void mpspin_config_free(mpspin_config* cfg) { delete cfg; }

int mpspin_config_set(mpspin_config* cfg, const char* key, double value) {
  MPSPIN_REQUIRE(cfg);
  MPSPIN_REQUIRE(key);
  if (!std::strcmp(key, "max_steps")) {
    if (!(value >= 1)) return set_error(MPSPIN_INVALID_ARGUMENT, "max_steps must be positive");
    cfg->cfg.maxSteps = static_cast<long>(value);
    return MPSPIN_OK;
  }
  double* f = config_field(cfg->cfg, key);
  if (!f) return set_error(MPSPIN_INVALID_ARGUMENT, "unknown integrator key");
  if (!(value >= 0.0) || !std::isfinite(value)) return set_error(MPSPIN_INVALID_ARGUMENT, "integrator setting must be finite and non-negative");
  *f = value;
  return MPSPIN_OK;
}

int mpspin_config_get(const mpspin_config* cfg, const char* key, double* value) {
  MPSPIN_REQUIRE(cfg);
  MPSPIN_REQUIRE(key);
  MPSPIN_REQUIRE(value);
  if (!std::strcmp(key, "max_steps")) {
    *value = static_cast<double>(cfg->cfg.maxSteps);
    return MPSPIN_OK;
  }
  IntegratorConfig c = cfg->cfg;
  double* f = config_field(c, key);
  if (!f) return set_error(MPSPIN_INVALID_ARGUMENT, "unknown integrator key");
  *value = *f;
  return MPSPIN_OK;
}

int mpspin_tulczyjew_state(const double x[4], const double spin[3], const double p_tetrad[3], double m, double mu,
                           double out[14]) {
  MPSPIN_REQUIRE(x);
  MPSPIN_REQUIRE(spin);
  MPSPIN_REQUIRE(p_tetrad);
  MPSPIN_REQUIRE(out);
  return guarded([&] {
    const FullState s = tulczyjew_state({x[0], x[1], x[2], x[3]}, {spin[0], spin[1], spin[2]},
                                        {p_tetrad[0], p_tetrad[1], p_tetrad[2]}, m, mu);
    const FullVector v = s.pack();
    std::copy(v.begin(), v.end(), out);
  });
}

int mpspin_full_invariants(const double y[14], double m, double mu, double out[9]) {
  MPSPIN_REQUIRE(y);
  MPSPIN_REQUIRE(out);
  return guarded([&] {
    FullVector v;
    std::copy(y, y + kFullDim, v.begin());
    const FullState s = FullState::unpack(v);
    const MPInvariants inv = invariants(s, mu);
    const FullConserved c = conserved(s);
    const double vals[9] = {hamiltonian_full(s, m, mu), inv.m, inv.casimirStar, inv.casimirCirc, c.energy,
                            c.Q[0], c.Q[1], c.Q[2], c.F};
    std::copy(vals, vals + 9, out);
  });
}

int mpspin_full_rhs(const double y[14], double m, double mu, double out[14]) {
  MPSPIN_REQUIRE(y);
  MPSPIN_REQUIRE(out);
  return guarded([&] {
    FullVector v;
    std::copy(y, y + kFullDim, v.begin());
    const FullVector d = mp_rhs(v, m, mu);
    std::copy(d.begin(), d.end(), out);
  });
}

int mpspin_reduce(const double y[14], double m, double mu, double out[8], mpspin_integrals* p) {
  MPSPIN_REQUIRE(y);
  MPSPIN_REQUIRE(out);
  MPSPIN_REQUIRE(p);
  return guarded([&] {
    FullVector v;
    std::copy(y, y + kFullDim, v.begin());
    const auto [s, q] = reduce(FullState::unpack(v), m, mu);
    copy_state(s, out);
    *p = from_params(q);
  });
}

int mpspin_reduced_rhs(const double y[8], const mpspin_integrals* p, double out[8]) {
  MPSPIN_REQUIRE(y);
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(out);
  return guarded([&] {
    const ReducedVector d = reduced_rhs(ReducedState::unpack(y), to_params(p));
    std::copy(d.begin(), d.end(), out);
  });
}

int mpspin_reduced_hamiltonian(const double y[8], const mpspin_integrals* p, double* h) {
  MPSPIN_REQUIRE(y);
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(h);
  return guarded([&] { *h = hamiltonian_reduced(ReducedState::unpack(y), to_params(p)); });
}

int mpspin_reduced_invariants(const double y[8], const mpspin_integrals* p, double out[6]) {
  MPSPIN_REQUIRE(y);
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(out);
  return guarded([&] {
    const ReducedState s = ReducedState::unpack(y);
    const IntegralParams q = to_params(p);
    const auto [fr, fth] = tulczyjew_residuals(s, q);
    const double vals[6] = {casimir_circ(s), casimir_F(s), mass_squared(s, q), fr, fth, timelike_indicator(s, q)};
    std::copy(vals, vals + 6, out);
  });
}

int mpspin_simulate_full(const double y0[14], double m, double mu, const mpspin_config* cfg, double output_step,
                         mpspin_trajectory** out) {
  MPSPIN_REQUIRE(y0);
  MPSPIN_REQUIRE(out);
  if (!(output_step > 0.0)) return set_error(MPSPIN_INVALID_ARGUMENT, "output step must be positive");
  return guarded([&] {
    const IntegratorConfig c = config_or_default(cfg);
    auto t = std::make_unique<mpspin_trajectory>();
    t->dim = kFullDim;
    const RhsFn f = [m, mu](double, const double* y, double* dy) {
      FullVector v;
      std::copy(y, y + kFullDim, v.begin());
      const FullVector d = mp_rhs(v, m, mu);
      std::copy(d.begin(), d.end(), dy);
    };
    t->traj = integrate_dense(kFullDim, f, {y0, y0 + kFullDim}, 0.0, output_step, c, radial_guard(1, mu, c));
    *out = t.release();
  });
}

int mpspin_simulate_reduced(const double y0[8], const mpspin_integrals* p, const mpspin_config* cfg,
                            double output_step, mpspin_trajectory** out) {
  MPSPIN_REQUIRE(y0);
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(out);
  if (!(output_step > 0.0)) return set_error(MPSPIN_INVALID_ARGUMENT, "output step must be positive");
  return guarded([&] {
    const IntegratorConfig c = config_or_default(cfg);
    const IntegralParams q = to_params(p);
    check_reduced_domain(ReducedState::unpack(y0), q);
    auto t = std::make_unique<mpspin_trajectory>();
    t->dim = kReducedDim;
    t->traj = integrate_dense(kReducedDim, reduced_rhs_fn(q), {y0, y0 + kReducedDim}, 0.0, output_step, c,
                              reduced_guard(q, c));
    *out = t.release();
  });
}

size_t mpspin_trajectory_size(const mpspin_trajectory* t) { return t ? t->traj.tau.size() : 0; }

int mpspin_trajectory_dim(const mpspin_trajectory* t) { return t ? t->dim : 0; }

int mpspin_trajectory_row(const mpspin_trajectory* t, size_t i, double* tau, double* state) {
  MPSPIN_REQUIRE(t);
  if (i >= t->traj.tau.size()) return set_error(MPSPIN_INVALID_ARGUMENT, "row index out of range");
  if (tau) *tau = t->traj.tau[i];
  if (state) std::copy(t->traj.states[i].begin(), t->traj.states[i].end(), state);
  return MPSPIN_OK;
}

const char* mpspin_trajectory_termination(const mpspin_trajectory* t) {
  return t ? termination_name(t->traj.termination.reason) : "";
}

void mpspin_trajectory_free(mpspin_trajectory* t) { delete t; }

const char* mpspin_family_name(int family) { return family_name(static_cast<Family>(family)); }

const char* mpspin_stability_name(int stability) { return stability_name(static_cast<Stability>(stability)); }

int mpspin_sigma0(double r, double c, int sign, mpspin_equilibrium* out) {
  MPSPIN_REQUIRE(out);
  return guarded([&] { fill_equilibrium(sigma0(r, c, sign), out); });
}

int mpspin_sigma1(double c, double energy, mpspin_equilibrium out[2]) {
  MPSPIN_REQUIRE(out);
  return guarded([&] {
    const auto recs = sigma1(c, energy);
    for (int k = 0; k < 2; ++k) fill_equilibrium(recs[k], out + k);
  });
}

int mpspin_sigma2(double c, double e1_step, double e1_max, mpspin_eq_list** out) {
  MPSPIN_REQUIRE(out);
  return guarded([&] {
    Sigma2Options opt;
    if (e1_step > 0.0) opt.e1Step = e1_step;
    if (e1_max > 0.0) opt.e1Max = e1_max;
    auto l = std::make_unique<mpspin_eq_list>();
    Sigma2Curve curve = sigma2(c, opt);
    l->points.push_back(curve.origin);
    for (auto& p : curve.points) l->points.push_back(p);
    *out = l.release();
  });
}

size_t mpspin_eq_list_size(const mpspin_eq_list* l) { return l ? l->points.size() : 0; }

int mpspin_eq_list_get(const mpspin_eq_list* l, size_t i, mpspin_equilibrium* out) {
  MPSPIN_REQUIRE(l);
  MPSPIN_REQUIRE(out);
  if (i >= l->points.size()) return set_error(MPSPIN_INVALID_ARGUMENT, "index out of range");
  return guarded([&] { fill_equilibrium(l->points[i], out); });
}

void mpspin_eq_list_free(mpspin_eq_list* l) { delete l; }

int mpspin_cusp(double c, int sign, double* r, double* ell, double* energy) {
  MPSPIN_REQUIRE(r);
  return guarded([&] {
    *r = cusp_radius(c, sign);
    const auto [l, e] = sigma0_values(*r, c, sign);
    if (ell) *ell = l;
    if (energy) *energy = e;
  });
}

int mpspin_ell_star(double c, double* ell) {
  MPSPIN_REQUIRE(ell);
  return guarded([&] { *ell = ell_star(c); });
}

int mpspin_c2_point_radius(double c, double* r) {
  MPSPIN_REQUIRE(r);
  return guarded([&] { *r = c2_point_radius(c); });
}

int mpspin_critical_spins(double tol, double* c1, double* c2) {
  MPSPIN_REQUIRE(c1);
  MPSPIN_REQUIRE(c2);
  return guarded([&] {
    const CriticalSpins cs = critical_spins(tol > 0.0 ? tol : 1e-6);
    *c1 = cs.c1;
    *c2 = cs.c2;
  });
}

int mpspin_classify(const double y[8], const mpspin_integrals* p, double* A, double* B, int* stability) {
  MPSPIN_REQUIRE(y);
  MPSPIN_REQUIRE(p);
  return guarded([&] {
    const Classification c = classify(ReducedState::unpack(y), to_params(p));
    if (A) *A = c.A;
    if (B) *B = c.B;
    if (stability) *stability = static_cast<int>(c.stability);
  });
}

int mpspin_lift(double r, double pr, const mpspin_integrals* p, int* admissible, int* root_count, double state[8]) {
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(admissible);
  return guarded([&] {
    const SectionPoint sp = lift(r, pr, to_params(p));
    *admissible = sp.admissible ? 1 : 0;
    if (root_count) *root_count = sp.rootCount;
    if (state && sp.admissible) copy_state(sp.state, state);
  });
}

int mpspin_map(double r, double pr, const mpspin_integrals* p, const mpspin_config* cfg, int direction, int* found,
               double state[8], double* tau) {
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(found);
  return guarded([&] {
    const MapResult m = poincare_map(r, pr, to_params(p), config_or_default(cfg), direction);
    *found = m.point ? 1 : 0;
    if (m.point) {
      if (state) copy_state(m.point->state, state);
      if (tau) *tau = m.point->tau;
    }
  });
}

int mpspin_portrait_run(const mpspin_integrals* p, const mpspin_config* cfg, const double* seeds, size_t n_seeds,
                        int iterations, int jobs, mpspin_portrait** out) {
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(out);
  if (n_seeds > 0 && !seeds) return set_error(MPSPIN_NULL_ARGUMENT, "null argument: seeds");
  if (iterations < 0) return set_error(MPSPIN_INVALID_ARGUMENT, "iterations must be non-negative");
  return guarded([&] {
    auto pt = std::make_unique<mpspin_portrait>();
    pt->portrait = portrait(to_points(seeds, n_seeds), iterations, to_params(p), config_or_default(cfg), jobs);
    *out = pt.release();
  });
}

size_t mpspin_portrait_orbits(const mpspin_portrait* pt) { return pt ? pt->portrait.orbits.size() : 0; }

size_t mpspin_portrait_orbit_size(const mpspin_portrait* pt, size_t orbit) {
  if (!pt || orbit >= pt->portrait.orbits.size()) return 0;
  return pt->portrait.orbits[orbit].points.size();
}

int mpspin_portrait_seed_admissible(const mpspin_portrait* pt, size_t orbit) {
  if (!pt || orbit >= pt->portrait.orbits.size()) return 0;
  return pt->portrait.orbits[orbit].seed.admissible ? 1 : 0;
}

int mpspin_portrait_point(const mpspin_portrait* pt, size_t orbit, size_t k, double* r, double* pr, double* tau,
                          double* e1) {
  MPSPIN_REQUIRE(pt);
  if (orbit >= pt->portrait.orbits.size() || k >= pt->portrait.orbits[orbit].points.size())
    return set_error(MPSPIN_INVALID_ARGUMENT, "index out of range");
  const SectionPoint& s = pt->portrait.orbits[orbit].points[k];
  if (r) *r = s.r;
  if (pr) *pr = s.Pr;
  if (tau) *tau = s.tau;
  if (e1) *e1 = s.state.E[0];
  return MPSPIN_OK;
}

const char* mpspin_portrait_termination(const mpspin_portrait* pt, size_t orbit) {
  if (!pt || orbit >= pt->portrait.orbits.size()) return "";
  return termination_name(pt->portrait.orbits[orbit].termination.reason);
}

void mpspin_portrait_free(mpspin_portrait* pt) { delete pt; }

int mpspin_gray_mask(const mpspin_integrals* p, double r_min, double r_max, double pr_min, double pr_max, int nr,
                     int npr, int jobs, int* out) {
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(out);
  if (nr < 1 || npr < 1) return set_error(MPSPIN_INVALID_ARGUMENT, "grid must be at least 1x1");
  return guarded([&] {
    const auto cells = gray_mask({r_min, r_max, pr_min, pr_max}, nr, npr, to_params(p), jobs);
    for (size_t i = 0; i < cells.size(); ++i) out[i] = cells[i].admissible ? 1 : 0;
  });
}

int mpspin_fixed_point_find(double r, double pr, const mpspin_integrals* p, const mpspin_config* cfg,
                            mpspin_fixed_point* out) {
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(out);
  return guarded([&] { fill_fixed_point(map_fixed_point(r, pr, to_params(p), config_or_default(cfg)), out); });
}

int mpspin_separatrix_run(const mpspin_fixed_point* saddle, const mpspin_integrals* p, const mpspin_config* cfg,
                          double arc_tol, int max_points, double diameter, mpspin_separatrix** out) {
  MPSPIN_REQUIRE(saddle);
  MPSPIN_REQUIRE(p);
  MPSPIN_REQUIRE(out);
  return guarded([&] {
    SeparatrixOptions opt;
    if (arc_tol > 0.0) opt.arcTol = arc_tol;
    if (max_points > 0) opt.maxPoints = max_points;
    if (diameter > 0.0) opt.diameter = diameter;
    auto s = std::make_unique<mpspin_separatrix>();
    s->sep = separatrix(to_fixed_point(saddle), to_params(p), config_or_default(cfg), opt);
    const ManifoldBranch* b[4] = {&s->sep.unstablePlus, &s->sep.unstableMinus, &s->sep.stablePlus,
                                  &s->sep.stableMinus};
    for (int k = 0; k < 4; ++k)
      for (const auto& q : b[k]->points) {
        s->flat[k].push_back(q[0]);
        s->flat[k].push_back(q[1]);
      }
    *out = s.release();
  });
}

int mpspin_separatrix_branch(const mpspin_separatrix* s, int branch, const double** xy, size_t* n, int* terminated) {
  MPSPIN_REQUIRE(s);
  MPSPIN_REQUIRE(xy);
  MPSPIN_REQUIRE(n);
  if (branch < 0 || branch > 3) return set_error(MPSPIN_INVALID_ARGUMENT, "branch must be 0..3");
  const ManifoldBranch* b[4] = {&s->sep.unstablePlus, &s->sep.unstableMinus, &s->sep.stablePlus,
                                &s->sep.stableMinus};
  *xy = s->flat[branch].data();
  *n = s->flat[branch].size() / 2;
  if (terminated) *terminated = b[branch]->terminated ? 1 : 0;
  return MPSPIN_OK;
}

void mpspin_separatrix_free(mpspin_separatrix* s) { delete s; }

int mpspin_polyline_intersections(const double* a, size_t na, const double* b, size_t nb, double* out, size_t cap,
                                  size_t* count) {
  MPSPIN_REQUIRE(count);
  if ((na && !a) || (nb && !b)) return set_error(MPSPIN_NULL_ARGUMENT, "null polyline");
  if (cap && !out) return set_error(MPSPIN_NULL_ARGUMENT, "null argument: out");
  return guarded([&] {
    const auto x = polyline_intersections(to_points(a, na), to_points(b, nb));
    *count = x.size();
    for (size_t i = 0; i < x.size() && i < cap; ++i) {
      out[2 * i] = x[i][0];
      out[2 * i + 1] = x[i][1];
    }
  });
}

int mpspin_bifurcation_run(double c, double ell, double e_min, double e_max, int steps, double r0, double pr0,
                           const mpspin_config* cfg, mpspin_bifurcation** out) {
  MPSPIN_REQUIRE(out);
  if (steps < 1) return set_error(MPSPIN_INVALID_ARGUMENT, "steps must be positive");
  return guarded([&] {
    auto b = std::make_unique<mpspin_bifurcation>();
    b->scan = bifurcation_scan(c, ell, e_min, e_max, steps, r0, pr0, config_or_default(cfg));
    *out = b.release();
  });
}

size_t mpspin_bifurcation_steps(const mpspin_bifurcation* b) { return b ? b->scan.energies.size() : 0; }

int mpspin_bifurcation_step(const mpspin_bifurcation* b, size_t i, double* energy, int* count,
                            mpspin_fixed_point* central) {
  MPSPIN_REQUIRE(b);
  if (i >= b->scan.energies.size()) return set_error(MPSPIN_INVALID_ARGUMENT, "index out of range");
  if (energy) *energy = b->scan.energies[i];
  if (count) *count = b->scan.counts[i];
  if (central) fill_fixed_point(b->scan.central[i], central);
  return MPSPIN_OK;
}

size_t mpspin_bifurcation_events(const mpspin_bifurcation* b) { return b ? b->scan.events.size() : 0; }

int mpspin_bifurcation_event(const mpspin_bifurcation* b, size_t i, double* energy, int* supercritical,
                             int* count_before, int* count_after, mpspin_fixed_point pair[2], int* n_pair) {
  MPSPIN_REQUIRE(b);
  if (i >= b->scan.events.size()) return set_error(MPSPIN_INVALID_ARGUMENT, "index out of range");
  const BifurcationEvent& e = b->scan.events[i];
  if (energy) *energy = e.energy;
  if (supercritical) *supercritical = e.supercritical ? 1 : 0;
  if (count_before) *count_before = e.countBefore;
  if (count_after) *count_after = e.countAfter;
  if (n_pair) *n_pair = static_cast<int>(e.pair.size());
  if (pair)
    for (size_t k = 0; k < e.pair.size() && k < 2; ++k) fill_fixed_point(e.pair[k], pair + k);
  return MPSPIN_OK;
}

void mpspin_bifurcation_free(mpspin_bifurcation* b) { delete b; }

}  // extern "C"
