#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mpspin/mpspin.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kDomainError = 3, kSolverError = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure from the library, mapped onto an exit code.
struct ApiError : std::runtime_error {
  int status;
  ApiError(int s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(int status, const char* what) {
  if (status != MPSPIN_OK)
    throw ApiError(status, std::string(what) + ": " + mpspin_status_name(status) + ": " + mpspin_last_error());
}

int exit_for_status(int status) {
  switch (status) {
    case MPSPIN_INVALID_ARGUMENT:
    case MPSPIN_NULL_ARGUMENT:
      return kConfigError;
    case MPSPIN_HORIZON_DOMAIN:
    case MPSPIN_POLAR_AXIS:
    case MPSPIN_OUTSIDE_DOMAIN:
    case MPSPIN_LIFT_FAILED:
    case MPSPIN_REDUCTION_SINGULARITY:
    case MPSPIN_SINGULAR_E1Z2:
    case MPSPIN_SINGULAR_V:
    case MPSPIN_SINGULAR_V0:
    case MPSPIN_SPACELIKE_VELOCITY:
    case MPSPIN_INVALID_THETA:
    case MPSPIN_NO_CUSP:
      return kDomainError;
    default:
      return kSolverError;
  }
}

// ---------------------------------------------------------------- config

json parse_toml(std::istream& in) {
  json out = json::object();
  for (const auto& item : CLI::ConfigTOML().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    json* node = &out;
    for (const auto& p : item.parents) node = &(*node)[p];
    std::vector<json> vals;
    for (const auto& s : item.inputs) {
      try {
        vals.push_back(json::parse(s));
      } catch (const json::exception&) {
        vals.push_back(s);
      }
    }
    if (vals.size() == 1)
      (*node)[item.name] = vals[0];
    else
      (*node)[item.name] = vals;
  }
  return out;
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  json cfg;
  try {
    if (first != std::string::npos && text[first] == '{') {
      cfg = json::parse(text);
    } else {
      std::istringstream in(text);
      cfg = parse_toml(in);
    }
  } catch (const std::exception& e) {
    throw ConfigError("malformed config: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw ConfigError("config root must be a table");
  // a run manifest is accepted as its own config
  if (cfg.contains("config") && cfg.contains("version")) cfg = cfg["config"];
  return cfg;
}

const std::map<std::string, std::set<std::string>> kSchema = {
    {"params", {"m", "mu", "c", "ell", "energy", "pphi"}},
    {"integrator", {"rtol", "atol", "h_init", "h_max", "h_min", "tau_max", "r_max", "horizon_tol", "max_steps"}},
    {"window", {"r_min", "r_max", "pr_min", "pr_max"}},
    {"grid", {"nr", "npr"}},
    {"gray", {"nr", "npr"}},
    {"poincare", {"iterations"}},
    {"simulate",
     {"system", "r", "pr", "state", "x", "spin", "p_tetrad", "output_step", "crossings"}},
    {"equilibria",
     {"c", "r_min", "r_max", "r_steps", "energy_min", "energy_max", "energy_steps", "e1_step", "e1_max"}},
    {"separatrix", {"saddles", "arc_tol", "max_points", "diameter"}},
    {"bifurcation", {"energy_min", "energy_max", "steps", "r0", "pr0"}},
    {"critical_spins", {"tol"}},
};

void validate_schema(const json& cfg) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const auto s = kSchema.find(it.key());
    if (s == kSchema.end()) throw ConfigError("unknown section [" + it.key() + "]");
    if (!it.value().is_object()) throw ConfigError("section [" + it.key() + "] must be a table");
    for (auto kv = it.value().begin(); kv != it.value().end(); ++kv) {
      if (!s->second.count(kv.key())) throw ConfigError("unknown key " + it.key() + "." + kv.key());
      std::vector<const json*> stack{&kv.value()};
      while (!stack.empty()) {
        const json* v = stack.back();
        stack.pop_back();
        if (v->is_number() && !std::isfinite(v->get<double>()))
          throw ConfigError(it.key() + "." + kv.key() + " must be finite");
        if (v->is_array())
          for (const auto& e : *v) stack.push_back(&e);
      }
    }
  }
}

double num(const json& cfg, const std::string& sec, const std::string& key) {
  if (!cfg.contains(sec) || !cfg[sec].contains(key)) throw ConfigError("missing " + sec + "." + key);
  const json& v = cfg[sec][key];
  if (!v.is_number()) throw ConfigError(sec + "." + key + " must be a number");
  return v.get<double>();
}

double num_or(const json& cfg, const std::string& sec, const std::string& key, double def) {
  if (!cfg.contains(sec) || !cfg[sec].contains(key)) return def;
  return num(cfg, sec, key);
}

int int_or(const json& cfg, const std::string& sec, const std::string& key, int def) {
  const double v = num_or(cfg, sec, key, def);
  if (v != std::floor(v) || v < 0 || v > 1e9) throw ConfigError(sec + "." + key + " must be a non-negative integer");
  return static_cast<int>(v);
}

std::vector<double> vec(const json& cfg, const std::string& sec, const std::string& key, size_t n) {
  if (!cfg.contains(sec) || !cfg[sec].contains(key)) throw ConfigError("missing " + sec + "." + key);
  const json& v = cfg[sec][key];
  if (!v.is_array() || v.size() != n) throw ConfigError(sec + "." + key + " must be an array of " + std::to_string(n));
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(sec + "." + key + " must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

mpspin_integrals read_params(json& cfg) {
  mpspin_integrals p;
  mpspin_integrals_default(&p);
  p.m = num_or(cfg, "params", "m", p.m);
  p.mu = num_or(cfg, "params", "mu", p.mu);
  p.c = num_or(cfg, "params", "c", p.c);
  p.ell = num_or(cfg, "params", "ell", p.ell);
  p.energy = num_or(cfg, "params", "energy", p.energy);
  p.pphi = num_or(cfg, "params", "pphi", 1.0);
  if (!(p.m > 0.0) || !(p.mu > 0.0)) throw ConfigError("params.m and params.mu must be positive");
  if (p.c < 0.0 || p.ell < 0.0) throw ConfigError("params.c and params.ell must be non-negative");
  cfg["params"] = {{"m", p.m}, {"mu", p.mu}, {"c", p.c}, {"ell", p.ell}, {"energy", p.energy}, {"pphi", p.pphi}};
  return p;
}

struct ConfigHandle {
  mpspin_config* h = nullptr;
  ConfigHandle() { check(mpspin_config_new(&h), "config"); }
  ~ConfigHandle() { mpspin_config_free(h); }
};

void read_integrator(json& cfg, mpspin_config* h) {
  static const char* keys[] = {"rtol", "atol", "h_init", "h_max", "h_min", "tau_max", "r_max", "horizon_tol", "max_steps"};
  for (const char* k : keys) {
    if (cfg.contains("integrator") && cfg["integrator"].contains(k)) {
      const double v = num(cfg, "integrator", k);
      if (mpspin_config_set(h, k, v) != MPSPIN_OK) throw ConfigError(std::string("integrator.") + k + ": " + mpspin_last_error());
    }
    double v;
    mpspin_config_get(h, k, &v);
    cfg["integrator"][k] = v;
  }
}

struct WindowCfg {
  double rMin, rMax, prMin, prMax;
};

WindowCfg read_window(json& cfg, const mpspin_integrals& p) {
  WindowCfg w{num(cfg, "window", "r_min"), num(cfg, "window", "r_max"), num(cfg, "window", "pr_min"),
              num(cfg, "window", "pr_max")};
  if (!(w.rMin > 2.0 * p.mu)) throw ConfigError("window.r_min must lie above 2 mu");
  if (!(w.rMax > w.rMin) || !(w.prMax > w.prMin)) throw ConfigError("window bounds are not increasing");
  return w;
}

std::pair<int, int> parse_seed_grid(const std::string& text) {
  int a = 0, b = 0;
  char sep = 0;
  std::istringstream in(text);
  if (!(in >> a >> sep >> b) || (sep != 'x' && sep != ',') || a < 1 || b < 1 || !in.eof())
    throw ConfigError("--seed-grid expects NRxNPR, e.g. 20x10");
  return {a, b};
}

// ---------------------------------------------------------------- output

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& cols) : f_(path) {
    if (!f_) throw std::runtime_error("cannot write " + path.string());
    row_strings(cols);
  }
  void row(std::initializer_list<std::string> cells) { row_strings(std::vector<std::string>(cells)); }
  void row_strings(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
    f_ << "\n";
  }

 private:
  std::ofstream f_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  f << j.dump(2) << "\n";
}

json manifest_base(const std::string& command, const json& cfg) {
  return {{"command", command}, {"version", mpspin_version()}, {"config", cfg}};
}

struct Options {
  std::string config;
  std::string out = ".";
  int jobs = 1;
  std::string seedGrid;
  double rtol = -1.0, atol = -1.0;
  bool verbose = false;
};

json prepare(const Options& o) {
  json cfg = o.config.empty() ? json::object() : load_config(o.config);
  validate_schema(cfg);
  if (o.rtol > 0.0) cfg["integrator"]["rtol"] = o.rtol;
  if (o.atol > 0.0) cfg["integrator"]["atol"] = o.atol;
  if (!o.seedGrid.empty()) {
    const auto [nr, npr] = parse_seed_grid(o.seedGrid);
    cfg["grid"]["nr"] = nr;
    cfg["grid"]["npr"] = npr;
  }
  if (o.jobs < 1) throw ConfigError("--jobs must be at least 1");
  return cfg;
}

fs::path out_dir(const Options& o) {
  fs::create_directories(o.out);
  return fs::path(o.out);
}

const char* kStateCols[] = {"E1", "E2", "E3", "Z1", "Z2", "Z3", "r", "Pr"};
const char* kFullCols[] = {"t", "r", "theta", "phi", "P_t", "P_r", "P_theta", "P_phi", "L1", "L2", "L3", "M1", "M2", "M3"};

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Options& o) {
  json cfg = prepare(o);
  mpspin_integrals p = read_params(cfg);
  ConfigHandle ch;
  read_integrator(cfg, ch.h);
  const std::string system = cfg.contains("simulate") && cfg["simulate"].contains("system")
                                 ? cfg["simulate"]["system"].get<std::string>()
                                 : "reduced";
  if (system != "reduced" && system != "full") throw ConfigError("simulate.system must be reduced or full");
  const double step = num_or(cfg, "simulate", "output_step", 1.0);
  if (!(step > 0.0)) throw ConfigError("simulate.output_step must be positive");
  const int crossings = int_or(cfg, "simulate", "crossings", 0);
  cfg["simulate"]["system"] = system;
  cfg["simulate"]["output_step"] = step;

  double y0[14] = {};
  int dim = 8;
  if (system == "full") {
    dim = 14;
    const auto x = vec(cfg, "simulate", "x", 4), s = vec(cfg, "simulate", "spin", 3), pt = vec(cfg, "simulate", "p_tetrad", 3);
    if (!(x[1] > 2.0 * p.mu)) throw ConfigError("simulate.x radius must lie above 2 mu");
    check(mpspin_tulczyjew_state(x.data(), s.data(), pt.data(), p.m, p.mu, y0), "initial state");
  } else if (cfg.contains("simulate") && cfg["simulate"].contains("state")) {
    const auto s = vec(cfg, "simulate", "state", 8);
    std::copy(s.begin(), s.end(), y0);
  } else {
    const double r = num(cfg, "simulate", "r"), pr = num_or(cfg, "simulate", "pr", 0.0);
    if (!(r > 2.0 * p.mu)) throw ConfigError("simulate.r must lie above 2 mu");
    int admissible = 0, roots = 0;
    check(mpspin_lift(r, pr, &p, &admissible, &roots, y0), "lift");
    if (!admissible) throw ApiError(MPSPIN_LIFT_FAILED, "no admissible lift at (r, Pr)");
  }

  const fs::path dir = out_dir(o);
  mpspin_trajectory* t = nullptr;
  if (dim == 14)
    check(mpspin_simulate_full(y0, p.m, p.mu, ch.h, step, &t), "simulate");
  else
    check(mpspin_simulate_reduced(y0, &p, ch.h, step, &t), "simulate");
  std::unique_ptr<mpspin_trajectory, void (*)(mpspin_trajectory*)> guard(t, mpspin_trajectory_free);

  std::vector<std::string> cols{"tau"};
  for (int k = 0; k < dim; ++k) cols.push_back(dim == 14 ? kFullCols[k] : kStateCols[k]);
  Csv csv(dir / "trajectory.csv", cols);
  const size_t n = mpspin_trajectory_size(t);
  std::vector<double> row(dim), first(dim), last(dim);
  json drift = json::object();
  std::vector<double> inv0, invMax;
  for (size_t i = 0; i < n; ++i) {
    double tau;
    mpspin_trajectory_row(t, i, &tau, row.data());
    std::vector<std::string> cells{fmt(tau)};
    for (double v : row) cells.push_back(fmt(v));
    csv.row_strings(cells);
    std::vector<double> inv(dim == 14 ? 9 : 7);
    if (dim == 14) {
      if (mpspin_full_invariants(row.data(), p.m, p.mu, inv.data()) != MPSPIN_OK) continue;
    } else {
      if (mpspin_reduced_invariants(row.data(), &p, inv.data()) != MPSPIN_OK) continue;
      if (mpspin_reduced_hamiltonian(row.data(), &p, &inv[6]) != MPSPIN_OK) continue;
    }
    if (inv0.empty()) {
      inv0 = inv;
      invMax.assign(inv.size(), 0.0);
    }
    for (size_t k = 0; k < inv.size(); ++k) invMax[k] = std::max(invMax[k], std::abs(inv[k] - inv0[k]));
  }
  const std::vector<std::string> names =
      dim == 14 ? std::vector<std::string>{"H", "m", "casimir_star", "casimir_circ", "energy", "Q1", "Q2", "Q3", "F"}
                : std::vector<std::string>{"casimir_circ", "F", "m2", "f_r", "f_theta", "U", "H"};
  for (size_t k = 0; k < invMax.size(); ++k)
    if (names[k] != "U") drift[names[k]] = invMax[k];

  json man = manifest_base("simulate", cfg);
  man["initial_state"] = std::vector<double>(y0, y0 + dim);
  man["samples"] = n;
  man["termination"] = mpspin_trajectory_termination(t);
  man["invariant_drift"] = drift;

  if (dim == 8 && crossings > 0) {
    // the seed is re-lifted; crossings are only meaningful when it lies on the section
    int admissible = 0;
    double lifted[8];
    check(mpspin_lift(y0[6], y0[7], &p, &admissible, nullptr, lifted), "lift");
    bool onSection = admissible;
    for (int k = 0; k < 8 && onSection; ++k)
      onSection = std::abs(lifted[k] - y0[k]) < 1e-9 * std::max(1.0, std::abs(y0[k]));
    if (onSection) {
      const double seed[2] = {y0[6], y0[7]};
      mpspin_portrait* pt = nullptr;
      check(mpspin_portrait_run(&p, ch.h, seed, 1, crossings, 1, &pt), "crossings");
      Csv cx(dir / "crossings.csv", {"orbit", "iterate", "r", "Pr", "tau", "E1"});
      for (size_t k = 0; k < mpspin_portrait_orbit_size(pt, 0); ++k) {
        double r, pr, tau, e1;
        mpspin_portrait_point(pt, 0, k, &r, &pr, &tau, &e1);
        cx.row({"0", std::to_string(k), fmt(r), fmt(pr), fmt(tau), fmt(e1)});
      }
      man["crossings"] = mpspin_portrait_orbit_size(pt, 0);
      mpspin_portrait_free(pt);
    } else {
      man["warnings"].push_back("initial state is not on the section; crossings.csv not written");
    }
  }
  write_json(dir / "manifest.json", man);
  std::cout << "simulate: " << n << " samples, termination " << mpspin_trajectory_termination(t) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- equilibria

std::vector<double> c_list(json& cfg) {
  std::vector<double> cs;
  if (!cfg.contains("equilibria") || !cfg["equilibria"].contains("c")) {
    cs.push_back(num_or(cfg, "params", "c", 0.0));
  } else {
    const json& v = cfg["equilibria"]["c"];
    if (v.is_number()) cs.push_back(v.get<double>());
    else if (v.is_array())
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("equilibria.c must hold numbers");
        cs.push_back(e.get<double>());
      }
    else throw ConfigError("equilibria.c must be a number or array");
  }
  for (double c : cs)
    if (c < 0.0 || c > 2.0) throw ConfigError("equilibria.c must lie in [0, 2]");
  cfg["equilibria"]["c"] = cs;
  return cs;
}

void eq_row(Csv& csv, const mpspin_equilibrium& e, double c, double mu) {
  csv.row({mpspin_family_name(e.family), fmt(e.r * mu), fmt(e.z), fmt(c), fmt(e.params.ell), fmt(e.params.energy),
           fmt(e.A), fmt(e.B), mpspin_stability_name(e.stability), fmt(e.U)});
}

int cmd_equilibria(const Options& o) {
  json cfg = prepare(o);
  const double mu = num_or(cfg, "params", "mu", 1.0);
  if (!(mu > 0.0)) throw ConfigError("params.mu must be positive");
  const auto cs = c_list(cfg);
  const double rMin = num_or(cfg, "equilibria", "r_min", 2.6), rMax = num_or(cfg, "equilibria", "r_max", 30.0);
  const int rSteps = int_or(cfg, "equilibria", "r_steps", 400);
  const double eMin = num_or(cfg, "equilibria", "energy_min", 0.8), eMax = num_or(cfg, "equilibria", "energy_max", 1.0);
  const int eSteps = int_or(cfg, "equilibria", "energy_steps", 200);
  const double e1Step = num_or(cfg, "equilibria", "e1_step", 0.01), e1Max = num_or(cfg, "equilibria", "e1_max", 10.0);
  if (!(rMin > 2.0) || !(rMax > rMin) || rSteps < 1 || eSteps < 1 || !(eMax > eMin))
    throw ConfigError("equilibria grid is invalid");
  cfg["equilibria"].update({{"r_min", rMin}, {"r_max", rMax}, {"r_steps", rSteps}, {"energy_min", eMin},
                            {"energy_max", eMax}, {"energy_steps", eSteps}, {"e1_step", e1Step}, {"e1_max", e1Max}});

  const fs::path dir = out_dir(o);
  const std::vector<std::string> cols{"family", "r", "z", "c", "ell", "energy", "A", "B", "type", "U"};
  Csv s0p(dir / "sigma0_plus.csv", cols), s0m(dir / "sigma0_minus.csv", cols), s1(dir / "sigma1.csv", cols),
      s2(dir / "sigma2.csv", cols);
  json man = manifest_base("equilibria", cfg);
  man["warnings"] = json::array();
  json special = json::array();
  for (double c : cs) {
    json info{{"c", c}};
    int skipped = 0;
    for (int sign : {1, -1})
      for (int i = 0; i <= rSteps; ++i) {
        const double r = rMin + (rMax - rMin) * i / rSteps;
        mpspin_equilibrium e;
        if (mpspin_sigma0(r, c, sign, &e) != MPSPIN_OK) {
          ++skipped;
          continue;
        }
        eq_row(sign > 0 ? s0p : s0m, e, c, mu);
      }
    if (skipped) man["warnings"].push_back("c=" + label(c) + ": " + std::to_string(skipped) + " Sigma0 radii outside the domain");
    for (int sign : {1, -1}) {
      double r, ell, en;
      if (mpspin_cusp(c, sign, &r, &ell, &en) == MPSPIN_OK)
        info[sign > 0 ? "cusp_plus" : "cusp_minus"] = {{"r", r * mu}, {"ell", ell}, {"energy", en}};
    }
    if (c > 0.0) {
      int s1skip = 0;
      for (int i = 0; i <= eSteps; ++i) {
        mpspin_equilibrium e[2];
        if (mpspin_sigma1(c, eMin + (eMax - eMin) * i / eSteps, e) != MPSPIN_OK) {
          ++s1skip;
          continue;
        }
        eq_row(s1, e[0], c, mu);
        eq_row(s1, e[1], c, mu);
      }
      if (s1skip) man["warnings"].push_back("c=" + label(c) + ": " + std::to_string(s1skip) + " Sigma1 energies outside the domain");
      double es;
      if (mpspin_ell_star(c, &es) == MPSPIN_OK) info["ell_star"] = es;
      mpspin_eq_list* l = nullptr;
      const int st = mpspin_sigma2(c, e1Step, e1Max, &l);
      if (st == MPSPIN_OK) {
        for (size_t i = 0; i < mpspin_eq_list_size(l); ++i) {
          mpspin_equilibrium e;
          if (mpspin_eq_list_get(l, i, &e) == MPSPIN_OK) eq_row(s2, e, c, mu);
        }
        info["sigma2_points"] = mpspin_eq_list_size(l);
        mpspin_eq_list_free(l);
        double rc2;
        if (mpspin_c2_point_radius(c, &rc2) == MPSPIN_OK) info["c2_point_r"] = rc2 * mu;
      } else {
        man["warnings"].push_back("c=" + label(c) + ": Sigma2 continuation failed: " + mpspin_last_error());
      }
    }
    special.push_back(info);
  }
  man["special_points"] = special;
  write_json(dir / "manifest.json", man);
  std::cout << "equilibria: " << cs.size() << " spin value(s) written to " << dir.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- poincare

int cmd_poincare(const Options& o) {
  json cfg = prepare(o);
  mpspin_integrals p = read_params(cfg);
  ConfigHandle ch;
  read_integrator(cfg, ch.h);
  const WindowCfg w = read_window(cfg, p);
  const int nr = int_or(cfg, "grid", "nr", 10), npr = int_or(cfg, "grid", "npr", 1);
  const int gnr = int_or(cfg, "gray", "nr", 100), gnpr = int_or(cfg, "gray", "npr", 100);
  const int iters = int_or(cfg, "poincare", "iterations", 200);
  if (nr < 1 || npr < 1 || gnr < 1 || gnpr < 1) throw ConfigError("grid sizes must be positive");
  cfg["grid"] = {{"nr", nr}, {"npr", npr}};
  cfg["gray"] = {{"nr", gnr}, {"npr", gnpr}};
  cfg["poincare"] = {{"iterations", iters}};

  std::vector<double> seeds;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < npr; ++j) {
      seeds.push_back(nr == 1 ? 0.5 * (w.rMin + w.rMax) : w.rMin + (w.rMax - w.rMin) * i / (nr - 1));
      seeds.push_back(npr == 1 ? 0.5 * (w.prMin + w.prMax) : w.prMin + (w.prMax - w.prMin) * j / (npr - 1));
    }
  const fs::path dir = out_dir(o);
  mpspin_portrait* pt = nullptr;
  check(mpspin_portrait_run(&p, ch.h, seeds.data(), seeds.size() / 2, iters, o.jobs, &pt), "portrait");
  std::unique_ptr<mpspin_portrait, void (*)(mpspin_portrait*)> guard(pt, mpspin_portrait_free);
  Csv csv(dir / "portrait.csv", {"orbit", "iterate", "r", "Pr", "tau", "E1"});
  json orbits = json::array();
  int lifted = 0;
  for (size_t i = 0; i < mpspin_portrait_orbits(pt); ++i) {
    const bool adm = mpspin_portrait_seed_admissible(pt, i);
    lifted += adm;
    for (size_t k = 0; k < mpspin_portrait_orbit_size(pt, i); ++k) {
      double r, pr, tau, e1;
      mpspin_portrait_point(pt, i, k, &r, &pr, &tau, &e1);
      csv.row({std::to_string(i), std::to_string(k), fmt(r), fmt(pr), fmt(tau), fmt(e1)});
    }
    orbits.push_back({{"orbit", i},
                      {"seed", {seeds[2 * i], seeds[2 * i + 1]}},
                      {"admissible", adm},
                      {"points", mpspin_portrait_orbit_size(pt, i)},
                      {"termination", adm ? mpspin_portrait_termination(pt, i) : "LiftFailed"}});
  }
  std::vector<int> mask(static_cast<size_t>(gnr) * gnpr);
  check(mpspin_gray_mask(&p, w.rMin, w.rMax, w.prMin, w.prMax, gnr, gnpr, o.jobs, mask.data()), "gray mask");
  Csv gm(dir / "gray_mask.csv", {"r", "Pr", "admissible"});
  for (int i = 0; i < gnr; ++i)
    for (int j = 0; j < gnpr; ++j) {
      const double r = gnr == 1 ? 0.5 * (w.rMin + w.rMax) : w.rMin + (w.rMax - w.rMin) * i / (gnr - 1);
      const double pr = gnpr == 1 ? 0.5 * (w.prMin + w.prMax) : w.prMin + (w.prMax - w.prMin) * j / (gnpr - 1);
      gm.row({fmt(r), fmt(pr), std::to_string(mask[static_cast<size_t>(i) * gnpr + j])});
    }
  json man = manifest_base("poincare", cfg);
  man["orbits"] = orbits;
  man["admissible_seeds"] = lifted;
  write_json(dir / "manifest.json", man);
  std::cout << "poincare: " << lifted << "/" << orbits.size() << " seeds lifted\n";
  if (lifted == 0) {
    std::cerr << "error: no seed in the window admits a lift\n";
    return kDomainError;
  }
  return kOk;
}

// ---------------------------------------------------------------- separatrix

json fixed_point_json(const mpspin_fixed_point& f) {
  return {{"r", f.r},
          {"Pr", f.pr},
          {"multipliers", {{f.multiplier_re[0], f.multiplier_im[0]}, {f.multiplier_re[1], f.multiplier_im[1]}}},
          {"jacobian", std::vector<double>(f.jacobian, f.jacobian + 4)},
          {"det", f.jacobian[0] * f.jacobian[3] - f.jacobian[1] * f.jacobian[2]},
          {"residual", f.residual},
          {"saddle", f.saddle != 0}};
}

int cmd_separatrix(const Options& o) {
  json cfg = prepare(o);
  mpspin_integrals p = read_params(cfg);
  ConfigHandle ch;
  read_integrator(cfg, ch.h);
  if (!cfg.contains("separatrix") || !cfg["separatrix"].contains("saddles") || !cfg["separatrix"]["saddles"].is_array())
    throw ConfigError("separatrix.saddles must list [r, Pr] guesses");
  std::vector<std::array<double, 2>> guesses;
  for (const auto& g : cfg["separatrix"]["saddles"]) {
    if (!g.is_array() || g.size() != 2 || !g[0].is_number() || !g[1].is_number())
      throw ConfigError("separatrix.saddles entries must be [r, Pr]");
    if (!(g[0].get<double>() > 2.0 * p.mu)) throw ConfigError("saddle guess radius must lie above 2 mu");
    guesses.push_back({g[0].get<double>(), g[1].get<double>()});
  }
  const double arcTol = num_or(cfg, "separatrix", "arc_tol", 0.01);
  const int maxPoints = int_or(cfg, "separatrix", "max_points", 400);
  const double diameter = num_or(cfg, "separatrix", "diameter", 1.0);
  if (!(arcTol > 0.0) || maxPoints < 2 || !(diameter > 0.0)) throw ConfigError("separatrix options are invalid");
  cfg["separatrix"].update({{"arc_tol", arcTol}, {"max_points", maxPoints}, {"diameter", diameter}});

  const fs::path dir = out_dir(o);
  Csv fpc(dir / "fixed_points.csv", {"saddle", "r", "Pr", "mult1_re", "mult1_im", "mult2_re", "mult2_im", "det", "is_saddle"});
  Csv sc(dir / "separatrix.csv", {"saddle", "branch", "index", "r", "Pr"});
  json man = manifest_base("separatrix", cfg);
  man["saddles"] = json::array();
  static const char* branchNames[] = {"unstable+", "unstable-", "stable+", "stable-"};
  std::vector<std::array<std::vector<double>, 4>> branches;
  int exitCode = kOk;
  for (size_t s = 0; s < guesses.size(); ++s) {
    mpspin_fixed_point fp;
    const int st = mpspin_fixed_point_find(guesses[s][0], guesses[s][1], &p, ch.h, &fp);
    if (st != MPSPIN_OK) {
      man["saddles"].push_back({{"guess", guesses[s]}, {"error", mpspin_last_error()}});
      exitCode = std::max(exitCode, exit_for_status(st));
      branches.push_back({});
      continue;
    }
    fpc.row({std::to_string(s), fmt(fp.r), fmt(fp.pr), fmt(fp.multiplier_re[0]), fmt(fp.multiplier_im[0]),
             fmt(fp.multiplier_re[1]), fmt(fp.multiplier_im[1]),
             fmt(fp.jacobian[0] * fp.jacobian[3] - fp.jacobian[1] * fp.jacobian[2]), fp.saddle ? "1" : "0"});
    json entry = fixed_point_json(fp);
    entry["guess"] = guesses[s];
    std::array<std::vector<double>, 4> br;
    if (fp.saddle) {
      mpspin_separatrix* sep = nullptr;
      const int st2 = mpspin_separatrix_run(&fp, &p, ch.h, arcTol, maxPoints, diameter, &sep);
      if (st2 != MPSPIN_OK) {
        entry["error"] = mpspin_last_error();
        exitCode = std::max(exitCode, exit_for_status(st2));
      } else {
        for (int b = 0; b < 4; ++b) {
          const double* xy;
          size_t n;
          int term;
          mpspin_separatrix_branch(sep, b, &xy, &n, &term);
          br[b].assign(xy, xy + 2 * n);
          for (size_t k = 0; k < n; ++k)
            sc.row({std::to_string(s), branchNames[b], std::to_string(k), fmt(xy[2 * k]), fmt(xy[2 * k + 1])});
          entry["branches"][branchNames[b]] = {{"points", n}, {"terminated", term != 0}};
        }
        mpspin_separatrix_free(sep);
      }
    } else {
      entry["warning"] = "fixed point is not a saddle; no separatrices";
    }
    branches.push_back(br);
    man["saddles"].push_back(entry);
  }
  // crossings between branches of distinct saddles
  Csv ic(dir / "intersections.csv", {"saddle_a", "branch_a", "saddle_b", "branch_b", "r", "Pr"});
  size_t total = 0;
  for (size_t a = 0; a < branches.size(); ++a)
    for (size_t b = a + 1; b < branches.size(); ++b)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          const auto &A = branches[a][i], &B = branches[b][j];
          if (A.size() < 4 || B.size() < 4) continue;
          size_t cnt = 0;
          mpspin_polyline_intersections(A.data(), A.size() / 2, B.data(), B.size() / 2, nullptr, 0, &cnt);
          std::vector<double> pts(2 * cnt);
          mpspin_polyline_intersections(A.data(), A.size() / 2, B.data(), B.size() / 2, pts.data(), cnt, &cnt);
          for (size_t k = 0; k < cnt; ++k)
            ic.row({std::to_string(a), branchNames[i], std::to_string(b), branchNames[j], fmt(pts[2 * k]), fmt(pts[2 * k + 1])});
          total += cnt;
        }
  man["intersections"] = total;
  write_json(dir / "manifest.json", man);
  std::cout << "separatrix: " << guesses.size() << " fixed point(s), " << total << " intersection(s)\n";
  return exitCode;
}

// ---------------------------------------------------------------- bifurcation

int cmd_bifurcation(const Options& o) {
  json cfg = prepare(o);
  mpspin_integrals p = read_params(cfg);
  ConfigHandle ch;
  read_integrator(cfg, ch.h);
  const double eMin = num(cfg, "bifurcation", "energy_min"), eMax = num(cfg, "bifurcation", "energy_max");
  const int steps = int_or(cfg, "bifurcation", "steps", 40);
  const double r0 = num(cfg, "bifurcation", "r0"), pr0 = num_or(cfg, "bifurcation", "pr0", 0.0);
  if (!(eMax > eMin) || steps < 1) throw ConfigError("bifurcation energy range is invalid");
  if (!(r0 > 2.0 * p.mu)) throw ConfigError("bifurcation.r0 must lie above 2 mu");
  cfg["bifurcation"].update({{"steps", steps}, {"pr0", pr0}});

  mpspin_bifurcation* b = nullptr;
  const int st = mpspin_bifurcation_run(p.c, p.ell, eMin, eMax, steps, r0, pr0, ch.h, &b);
  if (st != MPSPIN_OK) {
    std::cerr << "error: " << mpspin_last_error() << "\n";
    return exit_for_status(st);
  }
  std::unique_ptr<mpspin_bifurcation, void (*)(mpspin_bifurcation*)> guard(b, mpspin_bifurcation_free);
  const fs::path dir = out_dir(o);
  Csv sc(dir / "bifurcation_scan.csv", {"energy", "count", "r", "Pr", "trace", "det"});
  for (size_t i = 0; i < mpspin_bifurcation_steps(b); ++i) {
    double e;
    int count;
    mpspin_fixed_point fp;
    mpspin_bifurcation_step(b, i, &e, &count, &fp);
    sc.row({fmt(e), std::to_string(count), fmt(fp.r), fmt(fp.pr), fmt(fp.jacobian[0] + fp.jacobian[3]),
            fmt(fp.jacobian[0] * fp.jacobian[3] - fp.jacobian[1] * fp.jacobian[2])});
  }
  Csv ec(dir / "events.csv", {"event", "energy", "kind", "count_before", "count_after"});
  json events = json::array();
  for (size_t i = 0; i < mpspin_bifurcation_events(b); ++i) {
    double e;
    int sup, before, after, np;
    mpspin_fixed_point pair[2];
    mpspin_bifurcation_event(b, i, &e, &sup, &before, &after, pair, &np);
    const char* kind = np == 2 ? (sup ? "supercritical" : "subcritical") : "unresolved";
    ec.row({std::to_string(i), fmt(e), kind, std::to_string(before), std::to_string(after)});
    json ev{{"energy", e}, {"kind", kind}, {"count_before", before}, {"count_after", after}, {"pair", json::array()}};
    for (int k = 0; k < np; ++k) ev["pair"].push_back(fixed_point_json(pair[k]));
    events.push_back(ev);
  }
  json man = manifest_base("bifurcation", cfg);
  man["events"] = events;
  write_json(dir / "manifest.json", man);
  write_json(dir / "events.json", events);
  std::cout << "bifurcation: " << events.size() << " event(s)\n";
  return kOk;
}

// ---------------------------------------------------------------- critical spins

int cmd_critical_spins(const Options& o) {
  json cfg = prepare(o);
  const double tol = num_or(cfg, "critical_spins", "tol", 1e-6);
  if (!(tol > 0.0)) throw ConfigError("critical_spins.tol must be positive");
  cfg["critical_spins"]["tol"] = tol;
  if (o.verbose) {
    std::cerr << "# c  cusp_plus-3  c2_point_r-cusp_plus\n";
    for (double c = 0.8; c <= 1.6 + 1e-12; c += 0.05) {
      double rc = NAN, r2 = NAN;
      mpspin_cusp(c, 1, &rc, nullptr, nullptr);
      mpspin_c2_point_radius(c, &r2);
      std::cerr << fmt(c) << " " << fmt(rc - 3.0) << " " << fmt(r2 - rc) << "\n";
    }
  }
  double c1, c2;
  const int st = mpspin_critical_spins(tol, &c1, &c2);
  if (st != MPSPIN_OK) {
    std::cerr << "error: " << mpspin_last_error() << "\n";
    return exit_for_status(st) == kDomainError ? kSolverError : exit_for_status(st);
  }
  std::cout << "c1* = " << fmt(c1) << "\nc2* = " << fmt(c2) << "\n";
  if (!o.out.empty() && o.out != ".") {
    const fs::path dir = out_dir(o);
    json man = manifest_base("critical-spins", cfg);
    man["c1"] = c1;
    man["c2"] = c2;
    write_json(dir / "manifest.json", man);
  }
  return kOk;
}

// ---------------------------------------------------------------- schema check

const std::map<std::string, std::vector<std::string>> kCsvSchemas = {
    {"portrait", {"orbit", "iterate", "r", "Pr", "tau", "E1"}},
    {"gray_mask", {"r", "Pr", "admissible"}},
    {"equilibria", {"family", "r", "z", "c", "ell", "energy", "A", "B", "type", "U"}},
    {"fixed_points", {"saddle", "r", "Pr", "mult1_re", "mult1_im", "mult2_re", "mult2_im", "det", "is_saddle"}},
    {"separatrix", {"saddle", "branch", "index", "r", "Pr"}},
    {"intersections", {"saddle_a", "branch_a", "saddle_b", "branch_b", "r", "Pr"}},
    {"bifurcation_scan", {"energy", "count", "r", "Pr", "trace", "det"}},
    {"events", {"event", "energy", "kind", "count_before", "count_after"}},
    {"trajectory_reduced", {"tau", "E1", "E2", "E3", "Z1", "Z2", "Z3", "r", "Pr"}},
    {"trajectory_full",
     {"tau", "t", "r", "theta", "phi", "P_t", "P_r", "P_theta", "P_phi", "L1", "L2", "L3", "M1", "M2", "M3"}},
};
const std::set<std::string> kTextColumns = {"family", "type", "branch", "branch_a", "branch_b", "kind"};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end && *end == '\0';
}

int cmd_schema_check(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "error: cannot open " << path << "\n";
    return kConfigError;
  }
  if (fs::path(path).extension() == ".json") {
    json j;
    try {
      f >> j;
    } catch (const std::exception& e) {
      std::cerr << "invalid: " << e.what() << "\n";
      return kConfigError;
    }
    if (j.is_array()) {  // event table
      for (const auto& e : j)
        if (!e.contains("energy") || !e.contains("kind")) {
          std::cerr << "invalid: event entries need energy and kind\n";
          return kConfigError;
        }
      std::cout << "valid: events (" << j.size() << " entries)\n";
      return kOk;
    }
    for (const char* k : {"command", "version", "config"})
      if (!j.contains(k)) {
        std::cerr << "invalid: manifest lacks '" << k << "'\n";
        return kConfigError;
      }
    try {
      validate_schema(j["config"]);
    } catch (const ConfigError& e) {
      std::cerr << "invalid: " << e.what() << "\n";
      return kConfigError;
    }
    std::cout << "valid: manifest (" << j["command"].get<std::string>() << ")\n";
    return kOk;
  }
  std::string line;
  if (!std::getline(f, line)) {
    std::cerr << "invalid: empty file\n";
    return kConfigError;
  }
  const auto header = split(line);
  std::string name;
  for (const auto& [n, cols] : kCsvSchemas)
    if (cols == header) name = n;
  if (name.empty()) {
    std::cerr << "invalid: unknown header '" << line << "'\n";
    return kConfigError;
  }
  size_t rows = 0;
  while (std::getline(f, line)) {
    ++rows;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      std::cerr << "invalid: row " << rows << " has " << cells.size() << " cells\n";
      return kConfigError;
    }
    for (size_t k = 0; k < cells.size(); ++k) {
      if (kTextColumns.count(header[k])) {
        if (cells[k].empty()) {
          std::cerr << "invalid: row " << rows << " empty " << header[k] << "\n";
          return kConfigError;
        }
      } else if (!is_number(cells[k])) {
        std::cerr << "invalid: row " << rows << " column " << header[k] << " is not numeric\n";
        return kConfigError;
      }
    }
  }
  std::cout << "valid: " << name << " (" << rows << " rows)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spinning test bodies in Schwarzschild space-time"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mpspin_version()));
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "TOML-style or JSON config file (a run manifest also works)");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--jobs", o.jobs, "worker threads for grid items")->capture_default_str();
    sub->add_option("--seed-grid", o.seedGrid, "seed grid NRxNPR over the window");
    sub->add_option("--rtol", o.rtol, "relative tolerance");
    sub->add_option("--atol", o.atol, "absolute tolerance");
  };
  auto* sim = app.add_subcommand("simulate", "integrate one orbit of the reduced or full system");
  auto* eq = app.add_subcommand("equilibria", "equilibrium families with stability");
  auto* pc = app.add_subcommand("poincare", "Poincare portrait and gray mask");
  auto* sp = app.add_subcommand("separatrix", "saddle fixed points and their separatrices");
  auto* bf = app.add_subcommand("bifurcation", "pitchfork events of the central fixed point");
  auto* cs = app.add_subcommand("critical-spins", "spins where the family topology changes");
  auto* sc = app.add_subcommand("schema-check", "validate an output CSV or JSON file");
  for (auto* s : {sim, eq, pc, sp, bf, cs}) common(s);
  cs->add_flag("--verbose", o.verbose, "log the gap-function samples");
  std::string file;
  sc->add_option("file", file, "file to check")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  try {
    if (*sim) return cmd_simulate(o);
    if (*eq) return cmd_equilibria(o);
    if (*pc) return cmd_poincare(o);
    if (*sp) return cmd_separatrix(o);
    if (*bf) return cmd_bifurcation(o);
    if (*cs) return cmd_critical_spins(o);
    if (*sc) return cmd_schema_check(file);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for_status(e.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverError;
  }
  return kOk;
}
