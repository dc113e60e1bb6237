#include "varint/experiment.hpp"

#include "varint/bea.hpp"
#include "varint/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace varint {

namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<std::string, std::string>>& default_values() {
  static const std::vector<std::pair<std::string, std::string>> d = {
      {"problem", "kepler"},
      {"e", "0.1"},
      {"k", "1"},
      {"m", "1"},
      {"q0", ""},
      {"p0", ""},
      {"integrator", "epavi"},
      {"h0", "0.001"},
      {"delta_a", ""},
      {"T_final", ""},
      {"periods", ""},
      {"tol", ""},
      {"max_iter", "50"},
      {"fd_step", ""},
      {"condition_warn", "1e12"},
      {"refine", "0"},
      {"digits", "16"},
      {"output", ""},
      {"seed", "0"},
      {"reltol", "1e-12"},
      {"abstol", "1e-14"},
      {"workers", "1"},
      {"profile_c", "0"},
      {"bea_steps", "0.1,0.05,0.025,0.0125"},
      {"bea_window", "4"},
      {"bea_reltol", "1e-13"},
      {"bea_abstol", "1e-15"},
  };
  return d;
}

// Extended runs share the process-wide MPFR default precision.
std::mutex& extended_mutex() {
  static std::mutex m;
  return m;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

long parse_int(const ExperimentConfig& cfg, const std::string& key) {
  const std::string& s = cfg.get(key);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(key + "=" + s + " is not an integer");
  return v;
}

template <class Real>
Real parse_real(const ExperimentConfig& cfg, const std::string& key) {
  const std::string& s = cfg.get(key);
  try {
    const Real v = parse_scalar<Real>(s);
    if (!is_finite(v)) throw ConfigError("");
    return v;
  } catch (const ConfigError&) {
    throw ConfigError(key + "=" + s + " is not a finite number");
  }
}

template <class Real>
std::vector<Real> parse_real_list(const ExperimentConfig& cfg, const std::string& key) {
  std::vector<Real> out;
  for (const std::string& item : split_list(cfg.get(key))) {
    try {
      const Real v = parse_scalar<Real>(item);
      if (!is_finite(v)) throw ConfigError("");
      out.push_back(v);
    } catch (const ConfigError&) {
      throw ConfigError(key + " contains the non-numeric entry '" + item + "'");
    }
  }
  return out;
}

template <class Real>
Vec<Real> to_vec(const std::vector<Real>& v) {
  Vec<Real> out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

bool has(const ExperimentConfig& cfg, const std::string& key) { return !cfg.get(key).empty(); }

int problem_dim(const std::string& problem) { return problem == "kepler" ? 2 : 1; }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

void close_output(std::ofstream& os, const fs::path& path) {
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

fs::path make_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

// Problem and initial state built from the config under the active precision.
template <class Real>
struct Problem {
  LagrangianModel<Real> model;
  ExtendedState<Real> state0;
  Real T_final;
};

template <class Real>
Problem<Real> build_problem(const ExperimentConfig& cfg) {
  const std::string& name = cfg.get("problem");
  const Real m = parse_real<Real>(cfg, "m");
  const Real k = parse_real<Real>(cfg, "k");
  if (name == "kepler") {
    const Real e = parse_real<Real>(cfg, "e");
    Real T = has(cfg, "T_final") ? parse_real<Real>(cfg, "T_final")
                                 : Real((has(cfg, "periods") ? parse_real<Real>(cfg, "periods") : Real(1)) * 2 *
                                        pi<Real>());
    return Problem<Real>{LagrangianModel<Real>::kepler(), kepler_initial_state<Real>(e), T};
  }
  LagrangianModel<Real> model = name == "oscillator" ? LagrangianModel<Real>::oscillator(k, m)
                                : name == "pendulum" ? LagrangianModel<Real>::pendulum(m)
                                                     : LagrangianModel<Real>::free_particle(1, m);
  const Real q_default = name == "pendulum" ? Real(0.5) : Real(1);
  const Vec<Real> q0 = has(cfg, "q0") ? to_vec(parse_real_list<Real>(cfg, "q0")) : Vec<Real>::Constant(1, q_default);
  const Vec<Real> p0 = has(cfg, "p0") ? to_vec(parse_real_list<Real>(cfg, "p0")) : Vec<Real>::Zero(1);
  const Real T = has(cfg, "T_final") ? parse_real<Real>(cfg, "T_final") : Real(10);
  return Problem<Real>{model, make_initial_state(model, q0, p0), T};
}

template <class Real>
SolverConfig<Real> build_solver(const ExperimentConfig& cfg) {
  SolverConfig<Real> s = SolverConfig<Real>::defaults();
  if (has(cfg, "tol")) s.tol = parse_real<Real>(cfg, "tol");
  s.max_iter = static_cast<int>(parse_int(cfg, "max_iter"));
  if (has(cfg, "fd_step")) s.fd_step = parse_real<Real>(cfg, "fd_step");
  s.condition_warn = parse_real<Real>(cfg, "condition_warn");
  s.refine = static_cast<int>(parse_int(cfg, "refine"));
  s.validate();
  return s;
}

template <class Real>
std::string fmt(const Real& x) {
  return format_scalar<Real>(x);
}

template <class Real>
void write_trajectory_csv(const fs::path& dir, const Trajectory<Real>& traj, int n) {
  const fs::path path = dir / "trajectory.csv";
  std::ofstream os = open_output(path);
  os << "k,t";
  for (int i = 1; i <= n; ++i) os << ",q" << i;
  for (int i = 1; i <= n; ++i) os << ",p" << i;
  os << ",E,h,residual,newton_iters\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    os << k << ',' << fmt(s.t);
    for (int i = 0; i < n; ++i) os << ',' << fmt(Real(s.q[i]));
    for (int i = 0; i < n; ++i) os << ',' << fmt(Real(s.p[i]));
    os << ',' << fmt(s.E);
    // Row k carries the step that produced state k.
    if (k > 0 && k - 1 < traj.steps.size()) {
      const auto& r = traj.steps[k - 1];
      os << ',' << fmt(r.h) << ',' << fmt(r.residual) << ',' << r.newton_iters;
    } else {
      os << ",,,";
    }
    os << '\n';
  }
  close_output(os, path);
}

template <class Real>
void write_energy_csv(const fs::path& dir, const ErrorSeries<Real>& energy, const ErrorSeries<Real>& ham) {
  const fs::path path = dir / "energy_error.csv";
  std::ofstream os = open_output(path);
  os << "k,t,energy_error,hamiltonian_error\n";
  for (std::size_t k = 0; k < energy.values.size(); ++k)
    os << k << ',' << fmt(energy.times[k]) << ',' << fmt(energy.values[k]) << ',' << fmt(ham.values[k]) << '\n';
  close_output(os, path);
}

template <class Real>
void write_traj_error_csv(const fs::path& dir, const std::vector<ErrorSeries<Real>>& err) {
  const fs::path path = dir / "traj_error.csv";
  std::ofstream os = open_output(path);
  os << "k,t";
  for (std::size_t i = 1; i <= err.size(); ++i) os << ",q" << i << "_error";
  os << '\n';
  const std::size_t rows = err.empty() ? 0 : err.front().values.size();
  for (std::size_t k = 0; k < rows; ++k) {
    os << k << ',' << fmt(err.front().times[k]);
    for (const auto& e : err) os << ',' << fmt(e.values[k]);
    os << '\n';
  }
  close_output(os, path);
}

template <class Real>
void write_stats_csv(const fs::path& dir, const std::optional<StepStats<Real>>& st, const Real& h0) {
  const fs::path path = dir / "stats.csv";
  std::ofstream os = open_output(path);
  os << "steps,h0,mean_h,max_h,min_h,mean_ratio,max_ratio,min_ratio\n";
  if (st)
    os << st->steps << ',' << fmt(h0) << ',' << fmt(st->mean_h) << ',' << fmt(st->max_h) << ',' << fmt(st->min_h)
       << ',' << fmt(st->mean_ratio) << ',' << fmt(st->max_ratio) << ',' << fmt(st->min_ratio) << '\n';
  close_output(os, path);
}

void write_summary(const fs::path& dir, const Summary& summary) {
  const fs::path path = dir / "summary.txt";
  std::ofstream os = open_output(path);
  for (const auto& [k, v] : summary) os << k << '=' << v << '\n';
  close_output(os, path);
}

void write_plot_script(const fs::path& dir, const std::string& title) {
  const fs::path path = dir / "plot.py";
  std::ofstream os = open_output(path);
  os << R"(#!/usr/bin/env python3
# Four-panel overview of one run; reads the CSVs next to this script.
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def read(name):
    with open(os.path.join(here, name)) as f:
        rows = [r for r in csv.reader(f) if r and not r[0].startswith("#")]
    return rows[0], rows[1:]


def column(header, rows, key):
    i = header.index(key)
    return [float(r[i]) for r in rows if r[i] != ""]


eh, er = read("energy_error.csv")
th, tr = read("trajectory.csv")
xh, xr = read("traj_error.csv")
sh, sr = read("stats.csv")
h0 = float(sr[0][sh.index("h0")]) if sr else 1.0

fig, ax = plt.subplots(2, 2, figsize=(11, 8))
ax[0][0].semilogy(column(eh, er, "t")[1:], [max(v, 1e-40) for v in column(eh, er, "energy_error")[1:]])
ax[0][0].set_xlabel("t")
ax[0][0].set_ylabel("|E_k - E_0|")
if xr:
    ax[0][1].semilogy(column(xh, xr, "t"), [max(v, 1e-40) for v in column(xh, xr, "q1_error")])
ax[0][1].set_xlabel("t")
ax[0][1].set_ylabel("q1 trajectory error")
h = column(th, tr, "h")
ax[1][0].plot(range(1, len(h) + 1), [v / h0 for v in h])
ax[1][0].set_xlabel("k")
ax[1][0].set_ylabel("h_k / h0")
ax[1][1].plot(column(th, tr, "k"), column(th, tr, "t"))
ax[1][1].set_xlabel("k")
ax[1][1].set_ylabel("t_k")
fig.suptitle(")" << title << R"(")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "plot.png"))
)";
  close_output(os, path);
}

template <class Real>
RunOutcome run_typed(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Problem<Real> prob = build_problem<Real>(cfg);
  const SolverConfig<Real> solver = build_solver<Real>(cfg);
  const Real h0 = parse_real<Real>(cfg, "h0");
  const Real reltol = parse_real<Real>(cfg, "reltol");
  const Real abstol = parse_real<Real>(cfg, "abstol");
  const std::string& integrator = cfg.get("integrator");
  const int n = prob.model.dim();

  Summary summary = {{"problem", cfg.get("problem")},   {"integrator", integrator},
                     {"digits", cfg.get("digits")},      {"tol", fmt(solver.tol)},
                     {"h0", fmt(h0)},                    {"T_final", fmt(prob.T_final)},
                     {"seed", cfg.get("seed")}};
  if (cfg.get("problem") == "kepler") summary.emplace_back("e", cfg.get("e"));

  Trajectory<Real> traj;
  std::optional<Real> delta_a;
  try {
    if (integrator == "epavi") {
      traj = epavi_run(prob.model, prob.state0, h0, prob.T_final, solver);
    } else if (integrator == "avi1" || integrator == "avi2") {
      const Monitor<Real> monitor{integrator == "avi1" ? MonitorKind::Arclength : MonitorKind::Kepler,
                                  prob.model.hamiltonian(prob.state0.q, prob.state0.p)};
      delta_a = has(cfg, "delta_a") ? parse_real<Real>(cfg, "delta_a")
                                    : avi_calibrate_delta_a(prob.model, monitor, prob.state0, h0, solver);
      traj = avi_run(prob.model, monitor, prob.state0, *delta_a, prob.T_final, solver);
    } else if (integrator == "midpoint_fixed") {
      traj = midpoint_fixed_run(prob.model, prob.state0, h0, prob.T_final, solver);
    } else {
      traj = reference_solve(prob.model, prob.state0, prob.T_final, reltol, abstol).trajectory(prob.model);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    // Failure before the first step (e.g. Δa calibration): keep the initial state.
    traj = Trajectory<Real>{};
    traj.states.push_back(prob.state0);
    traj.complete = false;
    traj.error = err.code();
    traj.diagnosis = err.what();
  }
  if (delta_a) summary.emplace_back("delta_a", fmt(*delta_a));

  RunOutcome out;
  out.complete = traj.complete;
  out.error = traj.error;
  out.diagnosis = traj.diagnosis;
  out.dim = n;
  Real max_residual(0);
  int max_iters = 0, ill = 0, retried = 0;
  bool within_tol = true;
  for (const auto& r : traj.steps) {
    using std::max;
    max_residual = max(max_residual, r.residual);
    max_iters = std::max(max_iters, r.newton_iters);
    ill += r.ill_conditioned ? 1 : 0;
    retried += r.retried ? 1 : 0;
    if (!(r.residual <= solver.tol)) within_tol = false;
  }
  out.met_tolerance = traj.complete && within_tol;
  for (const auto& s : traj.states) {
    out.t.push_back(to_double(s.t));
    out.E.push_back(to_double(s.E));
    std::vector<double> q(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      q[static_cast<std::size_t>(i)] = to_double(Real(s.q[i]));
      p[static_cast<std::size_t>(i)] = to_double(Real(s.p[i]));
    }
    out.q.push_back(std::move(q));
    out.p.push_back(std::move(p));
  }

  const ErrorSeries<Real> energy = energy_error_series(traj);
  ErrorSeries<Real> ham;
  try {
    ham = hamiltonian_error_series(prob.model, traj);
  } catch (const DomainError&) {
    ham = energy;
  }
  std::optional<StepStats<Real>> stats;
  if (traj.states.size() >= 2) stats = timestep_stats(traj, std::optional<Real>(h0));

  std::vector<ErrorSeries<Real>> traj_err;
  std::string reference_failure;
  if (traj.states.size() >= 2) {
    try {
      if (integrator == "reference") {
        traj_err.assign(static_cast<std::size_t>(n), ErrorSeries<Real>{});
        for (auto& e : traj_err) {
          for (const auto& s : traj.states) {
            e.times.push_back(s.t);
            e.values.push_back(Real(0));
          }
        }
      } else {
        const ReferenceSolution<Real> ref =
            reference_solve(prob.model, prob.state0, traj.states.back().t, reltol, abstol);
        traj_err = trajectory_error(traj, ref);
      }
    } catch (const Error& err) {
      reference_failure = err.what();
    }
  }

  summary.emplace_back("complete", traj.complete ? "1" : "0");
  summary.emplace_back("met_tolerance", out.met_tolerance ? "1" : "0");
  summary.emplace_back("error", traj.error ? to_string(*traj.error) : "none");
  if (!traj.diagnosis.empty()) summary.emplace_back("diagnosis", traj.diagnosis);
  summary.emplace_back("steps", std::to_string(traj.steps.size()));
  summary.emplace_back("t_end", fmt(traj.states.back().t));
  summary.emplace_back("max_energy_error", fmt(series_max(energy)));
  summary.emplace_back("max_hamiltonian_error", fmt(series_max(ham)));
  if (stats) {
    summary.emplace_back("mean_step_ratio", fmt(stats->mean_ratio));
    summary.emplace_back("max_step_ratio", fmt(stats->max_ratio));
    summary.emplace_back("min_step_ratio", fmt(stats->min_ratio));
    const TelescopingCheck<Real> tele = telescoping_bound_check(traj);
    summary.emplace_back("max_energy_defect", fmt(tele.max_defect));
    summary.emplace_back("telescoping_holds", tele.holds ? "1" : "0");
  }
  summary.emplace_back("max_residual", fmt(max_residual));
  summary.emplace_back("max_newton_iters", std::to_string(max_iters));
  summary.emplace_back("ill_conditioned_steps", std::to_string(ill));
  summary.emplace_back("retried_steps", std::to_string(retried));
  if (cfg.get("problem") == "kepler") summary.emplace_back("angular_momentum_drift", fmt(angular_momentum_drift(traj)));
  for (std::size_t i = 0; i < traj_err.size(); ++i)
    summary.emplace_back("max_traj_error_q" + std::to_string(i + 1), fmt(series_max(traj_err[i])));
  if (!reference_failure.empty()) summary.emplace_back("reference_failure", reference_failure);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary.emplace_back("wall_time", format_scalar<double>(wall, 6));
  out.summary = summary;

  if (has(cfg, "output")) {
    const fs::path dir = make_output_dir(cfg.get("output"));
    write_trajectory_csv(dir, traj, n);
    write_energy_csv(dir, energy, ham);
    write_traj_error_csv(dir, traj_err);
    write_stats_csv(dir, stats, h0);
    write_summary(dir, out.summary);
    write_plot_script(dir, cfg.get("problem") + " / " + integrator);
  }
  return out;
}

template <class Fn>
auto with_context(const ExperimentConfig& cfg, Fn&& fn) {
  const PrecisionContext ctx = with_precision(static_cast<int>(parse_int(cfg, "digits")));
  if (!ctx.extended()) return fn(false);
  std::lock_guard<std::mutex> lock(extended_mutex());
  const unsigned saved = Extended::default_precision();
  ctx.apply();
  try {
    auto result = fn(true);
    Extended::default_precision(saved);
    return result;
  } catch (...) {
    Extended::default_precision(saved);
    throw;
  }
}

template <class Real>
BeaOutcome bea_typed(const ExperimentConfig& cfg) {
  const std::string& name = cfg.get("problem");
  const Real m = parse_real<Real>(cfg, "m");
  const LagrangianModel<Real> model =
      name == "oscillator" ? LagrangianModel<Real>::oscillator(parse_real<Real>(cfg, "k"), m)
                           : LagrangianModel<Real>::pendulum(m);
  OrderOptions<Real> opt;
  opt.q0 = has(cfg, "q0") ? parse_real_list<Real>(cfg, "q0").at(0) : Real(name == "pendulum" ? 0.5 : 1.0);
  if (has(cfg, "p0")) opt.dq0 = parse_real_list<Real>(cfg, "p0").at(0) / m;
  opt.window = parse_real<Real>(cfg, "bea_window");
  opt.reltol = parse_real<Real>(cfg, "bea_reltol");
  opt.abstol = parse_real<Real>(cfg, "bea_abstol");
  const std::vector<Real> steps = parse_real_list<Real>(cfg, "bea_steps");
  const TimeProfile<Real> profile = TimeProfile<Real>::sinusoidal(parse_real<Real>(cfg, "profile_c"));

  const OrderEstimate<Real> off = residual_order_estimate(model, profile, false, steps, opt);
  const OrderEstimate<Real> on = residual_order_estimate(model, profile, true, steps, opt);
  BeaOutcome out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out.delta_a.push_back(to_double(steps[i]));
    out.residual_off.push_back(to_double(off.residual_EL[i]));
    out.residual_on.push_back(to_double(on.residual_EL[i]));
  }
  out.slope_off = to_double(off.slope);
  out.slope_on = to_double(on.slope);
  out.slope_E_off = to_double(off.slope_E);
  out.slope_E_on = to_double(on.slope_E);
  out.psi_ratio_off = to_double(off.psi_ratio);

  if (has(cfg, "output")) {
    const fs::path dir = make_output_dir(cfg.get("output"));
    const fs::path path = dir / "bea.csv";
    std::ofstream os = open_output(path);
    os << "delta_a,residual_inf_norm,flag\n";
    for (std::size_t i = 0; i < steps.size(); ++i) os << fmt(steps[i]) << ',' << fmt(off.residual_EL[i]) << ",off\n";
    for (std::size_t i = 0; i < steps.size(); ++i) os << fmt(steps[i]) << ',' << fmt(on.residual_EL[i]) << ",on\n";
    os << "# slope_off=" << fmt(off.slope) << " slope_on=" << fmt(on.slope) << " improvement=" << fmt(Real(on.slope - off.slope))
       << " slope_E_off=" << fmt(off.slope_E) << " slope_E_on=" << fmt(on.slope_E) << " psi_ratio_off=" << fmt(off.psi_ratio)
       << '\n';
    close_output(os, path);
  }
  return out;
}

template <class Real>
void write_frequency_csv(const ExperimentConfig& cfg, const fs::path& path) {
  const FrequencyCheck<Real> fc = modified_frequency_check(parse_real<Real>(cfg, "k"), parse_real<Real>(cfg, "m"),
                                                           parse_real_list<Real>(cfg, "bea_steps"));
  std::ofstream os = open_output(path);
  os << "delta_a,modified,exact,difference\n";
  for (std::size_t i = 0; i < fc.delta_a.size(); ++i)
    os << fmt(fc.delta_a[i]) << ',' << fmt(fc.modified[i]) << ',' << fmt(fc.exact[i]) << ',' << fmt(fc.difference[i])
       << '\n';
  os << "# slope=" << fmt(fc.slope) << '\n';
  close_output(os, path);
}

struct MemberPlan {
  std::string name;
  std::vector<std::string> settings;
  bool bea = false;
};

std::vector<MemberPlan> suite_members(const std::string& name) {
  const std::vector<std::string> algorithms = {"epavi", "avi1", "avi2"};
  std::vector<MemberPlan> out;
  if (name == "fig_e01" || name == "fig_e07") {
    const std::string e = name == "fig_e01" ? "0.1" : "0.7";
    for (const auto& a : algorithms)
      out.push_back({a, {"problem=kepler", "e=" + e, "integrator=" + a, "h0=0.001", "periods=1", "tol=1e-15"}});
  } else if (name == "vpa_study") {
    const std::vector<std::string> base = {"problem=kepler", "e=0.7", "integrator=epavi", "h0=0.01", "periods=1"};
    auto add = [&](const std::string& member, const std::string& digits, const std::string& tol) {
      MemberPlan s{member, base};
      s.settings.push_back("digits=" + digits);
      s.settings.push_back("tol=" + tol);
      out.push_back(std::move(s));
    };
    add("double_tol1e-15", "16", "1e-15");
    add("digits18_tol1e-15", "18", "1e-15");
    add("digits18_tol1e-16", "18", "1e-16");
    add("digits18_tol1e-17", "18", "1e-17");
  } else if (name == "h0_sensitivity") {
    for (const auto& a : algorithms)
      for (const std::string h0 : {"0.001", "0.01"})
        out.push_back({a + "_h0_" + h0, {"problem=kepler", "e=0.7", "integrator=" + a, "h0=" + h0, "periods=1"}});
  } else if (name == "bea_orders") {
    out.push_back({"oscillator", {"problem=oscillator", "k=1", "m=1", "q0=1", "profile_c=0"}, true});
    out.push_back({"pendulum", {"problem=pendulum", "m=1", "q0=0.5", "profile_c=0.1"}, true});
  } else {
    throw ConfigError("unknown suite '" + name + "'");
  }
  return out;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (const auto& [k, v] : default_values()) values_[k] = v;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = trim(value);
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

void ExperimentConfig::assign(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& kv : default_values()) out.push_back(kv.first);
    return out;
  }();
  return k;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      cfg.assign(t);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> n = {"kepler", "oscillator", "pendulum", "free"};
  return n;
}

const std::vector<std::string>& integrator_names() {
  static const std::vector<std::string> n = {"epavi", "avi1", "avi2", "midpoint_fixed", "reference"};
  return n;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = {"fig_e01", "fig_e07", "vpa_study", "bea_orders", "h0_sensitivity"};
  return n;
}

void validate_config(const ExperimentConfig& cfg) {
  auto known = [](const std::vector<std::string>& names, const std::string& v) {
    return std::find(names.begin(), names.end(), v) != names.end();
  };
  const std::string& problem = cfg.get("problem");
  const std::string& integrator = cfg.get("integrator");
  require(known(problem_names(), problem), "unknown problem '" + problem + "'");
  require(known(integrator_names(), integrator), "unknown integrator '" + integrator + "'");

  const long digits = parse_int(cfg, "digits");
  with_precision(static_cast<int>(digits));
  auto positive = [&](const std::string& key) {
    require(parse_real<double>(cfg, key) > 0, key + " must be positive");
  };
  for (const char* key : {"h0", "k", "m", "condition_warn", "reltol", "abstol", "bea_window", "bea_reltol",
                          "bea_abstol"})
    positive(key);
  for (const char* key : {"tol", "fd_step", "delta_a", "T_final", "periods"})
    if (has(cfg, key)) positive(key);
  const double e = parse_real<double>(cfg, "e");
  require(e >= 0 && e < 1, "eccentricity e must lie in [0, 1)");
  require(!(has(cfg, "T_final") && has(cfg, "periods")), "set either T_final or periods, not both");
  require(!has(cfg, "periods") || problem == "kepler", "periods applies to the kepler problem only");
  require(parse_int(cfg, "max_iter") >= 1, "max_iter must be at least 1");
  require(parse_int(cfg, "refine") >= 0, "refine must be non-negative");
  require(parse_int(cfg, "workers") >= 1, "workers must be at least 1");
  require(parse_int(cfg, "seed") >= 0, "seed must be non-negative");
  const double c = parse_real<double>(cfg, "profile_c");
  require(std::abs(c) < 1, "profile_c must satisfy |profile_c| < 1");

  const std::size_t n = static_cast<std::size_t>(problem_dim(problem));
  for (const char* key : {"q0", "p0"}) {
    if (!has(cfg, key)) continue;
    require(problem != "kepler", std::string(key) + " does not apply to kepler (initial state comes from e)");
    require(parse_real_list<double>(cfg, key).size() == n,
            std::string(key) + " needs " + std::to_string(n) + " component(s)");
  }
  if (problem == "pendulum" || problem == "oscillator") {
    const std::vector<double> steps = parse_real_list<double>(cfg, "bea_steps");
    require(steps.size() >= 4, "bea_steps needs at least four step sizes");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      require(steps[i] > 0, "bea_steps must be positive");
      require(i == 0 || steps[i] < steps[i - 1], "bea_steps must be decreasing");
    }
  }
}

std::optional<std::string> RunOutcome::find(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  return std::nullopt;
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  return with_context(cfg, [&](bool extended) {
    return extended ? run_typed<Extended>(cfg) : run_typed<double>(cfg);
  });
}

BeaOutcome run_bea(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const std::string& problem = cfg.get("problem");
  require(problem == "oscillator" || problem == "pendulum", "the order study needs a 1-DOF oscillator or pendulum");
  return with_context(cfg, [&](bool extended) { return extended ? bea_typed<Extended>(cfg) : bea_typed<double>(cfg); });
}

SuiteOutcome run_suite(const std::string& name, const std::string& output_root, int workers,
                       const std::vector<std::string>& overrides) {
  require(workers >= 1, "workers must be at least 1");
  const std::vector<MemberPlan> plans = suite_members(name);
  const fs::path root = make_output_dir(output_root);

  std::vector<ExperimentConfig> configs;
  for (const MemberPlan& plan : plans) {
    ExperimentConfig cfg;
    for (const auto& s : plan.settings) cfg.assign(s);
    for (const auto& s : overrides) cfg.assign(s);
    cfg.set("output", (root / plan.name).string());
    configs.push_back(std::move(cfg));
  }

  SuiteOutcome out;
  out.members.resize(plans.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plans.size(); i = next++) {
      SuiteMember& member = out.members[i];
      member.name = plans[i].name;
      try {
        if (plans[i].bea) {
          const BeaOutcome b = run_bea(configs[i]);
          member.outcome.complete = true;
          member.outcome.met_tolerance = true;
          member.outcome.summary = {{"slope_off", format_scalar<double>(b.slope_off)},
                                    {"slope_on", format_scalar<double>(b.slope_on)},
                                    {"improvement", format_scalar<double>(b.slope_on - b.slope_off)},
                                    {"slope_E_off", format_scalar<double>(b.slope_E_off)},
                                    {"slope_E_on", format_scalar<double>(b.slope_E_on)},
                                    {"psi_ratio_off", format_scalar<double>(b.psi_ratio_off)}};
        } else {
          member.outcome = run_experiment(configs[i]);
        }
      } catch (const Error& e) {
        member.failure = e.what();
        if (e.code() != ErrorCode::Config) member.outcome.error = e.code();
      }
    }
  };
  const int threads = std::min<int>(workers, static_cast<int>(plans.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& m : out.members) out.failed += m.ok() ? 0 : 1;

  if (name == "bea_orders") write_frequency_csv<double>(configs.front(), root / "modified_frequency.csv");

  const std::vector<std::string> columns =
      name == "bea_orders"
          ? std::vector<std::string>{"slope_off", "slope_on", "improvement", "slope_E_off", "slope_E_on",
                                     "psi_ratio_off"}
          : std::vector<std::string>{"integrator", "digits", "tol", "h0", "complete", "met_tolerance", "steps",
                                     "max_energy_error", "max_hamiltonian_error", "mean_step_ratio",
                                     "max_step_ratio", "max_energy_defect", "angular_momentum_drift",
                                     "max_traj_error_q1"};
  const fs::path path = root / "comparison.csv";
  std::ofstream os = open_output(path);
  os << "member";
  for (const auto& c : columns) os << ',' << c;
  os << ",failure\n";
  for (const auto& m : out.members) {
    os << m.name;
    for (const auto& c : columns) os << ',' << m.outcome.find(c).value_or("");
    std::string failure = m.failure.empty() ? m.outcome.diagnosis : m.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    os << ',' << failure << '\n';
  }
  close_output(os, path);
  return out;
}

}  // namespace varint
