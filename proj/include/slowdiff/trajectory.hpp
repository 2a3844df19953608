#pragma once

// Time integration of a configured run, recorded observables, snapshot
// files and the energy dissipation balance.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "slowdiff/config.hpp"
#include "slowdiff/dynamics.hpp"
#include "slowdiff/energy.hpp"
#include "slowdiff/transport.hpp"

namespace slowdiff {

struct ObservableRow {
  double time = 0.0;
  double e_total = 0.0;
  double e_interaction = 0.0;
  double e_entropy = 0.0;
  double sup_density = 0.0;
  double support_diam = 0.0;
  double plateau_measure = 0.0;
  double max_velocity = 0.0;
  double w2_to_prev = 0.0;
};

struct Snapshot {
  double time;
  Ensemble1D ensemble;
};

struct TrajectoryRecord {
  std::vector<ObservableRow> rows;
  std::vector<Snapshot> snapshots;
  std::vector<double> step_dt;
  /// Per step: sum over substeps of dt_sub * sum_i w_i v_i^2.
  std::vector<double> step_dissipation;
  double epsilon = 0.0;
  bool steady = false;

  const Snapshot& final_snapshot() const { return snapshots.back(); }
};

inline ObservableRow observe(const SimulationState& s, double delta, const Ensemble1D* previous) {
  const auto& ev = s.evaluation();
  const auto obs = observables(s.ensemble(), s.mollifier(), delta, 0.0, s.m());
  ObservableRow r;
  r.time = s.time();
  r.e_interaction = ev.interaction;
  r.e_entropy = ev.entropy;
  r.e_total = ev.total();
  r.sup_density = obs.sup_density;
  r.support_diam = obs.support_diam;
  r.plateau_measure = obs.plateau_measure;
  r.max_velocity = ev.max_speed;
  r.w2_to_prev = previous ? wasserstein_1d(*previous, s.ensemble(), 2.0).distance : 0.0;
  return r;
}

/// Integrates from t = 0 to T, or until max|v| < steady_tol when
/// stop_at_steady is set. Snapshots are taken every snapshot_interval
/// (rounded to whole steps) and always at the final state.
inline TrajectoryRecord run(const RunConfig& config) {
  SimulationState state = config.initial_state();
  const auto opt = config.step_options();
  TrajectoryRecord rec;
  rec.epsilon = state.mollifier().epsilon();

  const long total_steps = std::lround(std::ceil(config.t_final / config.dt - 1e-9));
  const long every = config.snapshot_interval > 0.0
                         ? std::max(1L, std::lround(config.snapshot_interval / config.dt))
                         : 0L;

  auto record = [&](const SimulationState& s) {
    const Ensemble1D* prev = rec.snapshots.empty() ? nullptr : &rec.snapshots.back().ensemble;
    rec.rows.push_back(observe(s, config.delta, prev));
    rec.snapshots.push_back({s.time(), s.ensemble()});
  };

  record(state);
  long k = 0;
  while (k < total_steps) {
    if (config.stop_at_steady && detect_steady(state, config.steady_tol)) break;
    const double dt = std::min(config.dt, config.t_final - state.time());
    if (!(dt > 0.0)) break;
    state = step(state, dt, opt);
    ++k;
    rec.step_dt.push_back(dt);
    rec.step_dissipation.push_back(state.last_step().dissipation);
    if (every > 0 && k % every == 0 && k < total_steps) record(state);
  }
  rec.steady = detect_steady(state, config.steady_tol);
  if (rec.snapshots.back().time != state.time()) record(state);
  return rec;
}

struct DissipationReport {
  double energy_drop = 0.0;
  double slope_integral = 0.0;
  double residual = 0.0;
};

/// Balance E(0) - E(T) against the time integral of sum_i w_i |v_i|^2.
inline DissipationReport dissipation_report(const TrajectoryRecord& t) {
  if (t.rows.size() < 2) throw std::invalid_argument("dissipation_report: need at least two snapshots");
  DissipationReport r;
  r.energy_drop = t.rows.front().e_total - t.rows.back().e_total;
  for (double d : t.step_dissipation) r.slope_integral += d;
  r.residual = std::fabs(r.energy_drop - r.slope_integral);
  return r;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline constexpr const char* kObservablesHeader =
    "time,E_total,E_interaction,E_entropy,sup_density,support_diam,plateau_measure,max_velocity,"
    "w2_to_prev";

inline std::string observables_csv(const std::vector<ObservableRow>& rows) {
  using detail::format_real;
  std::string out = std::string(kObservablesHeader) + "\n";
  for (const auto& r : rows) {
    for (double v : {r.time, r.e_total, r.e_interaction, r.e_entropy, r.sup_density, r.support_diam,
                     r.plateau_measure, r.max_velocity})
      out += format_real(v) + ",";
    out += format_real(r.w2_to_prev) + "\n";
  }
  return out;
}

inline std::string snapshot_text(double time, const Ensemble1D& e, double epsilon) {
  using detail::format_real;
  std::string out = "# t=" + format_real(time) + " mass=" + format_real(e.mass()) +
                    " epsilon=" + format_real(epsilon) + "\n";
  for (std::size_t i = 0; i < e.size(); ++i)
    out += format_real(e.positions()[i][0]) + " " + format_real(e.weights()[i]) + "\n";
  return out;
}

struct SnapshotFile {
  double time = 0.0;
  double mass = 0.0;
  double epsilon = 0.0;
  Ensemble1D ensemble;
};

inline SnapshotFile parse_snapshot(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw ConfigError("snapshot", "snapshot: missing '# t=... mass=... epsilon=...' header", 1);
  double t = 0, mass = 0, eps = 0;
  if (std::sscanf(line.c_str(), "# t=%lf mass=%lf epsilon=%lf", &t, &mass, &eps) != 3)
    throw ConfigError("snapshot", "snapshot: malformed header", 1);
  std::vector<Vec<1>> pos;
  std::vector<double> w;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (detail::trim(line).empty()) continue;
    std::istringstream ls(line);
    double x, wi;
    std::string rest;
    if (!(ls >> x >> wi) || (ls >> rest))
      throw ConfigError("snapshot", "snapshot line " + std::to_string(n) + ": expected 'position weight'", n);
    pos.push_back({x});
    w.push_back(wi);
  }
  if (pos.empty()) throw ConfigError("snapshot", "snapshot: no particles");
  try {
    return {t, mass, eps, Ensemble1D(std::move(pos), std::move(w))};
  } catch (const std::invalid_argument& e) {
    throw ConfigError("snapshot", std::string("snapshot: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("path", "cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw ConfigError("output_dir", "cannot write '" + path + "'");
}

}  // namespace slowdiff
