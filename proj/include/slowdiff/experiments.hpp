#pragma once

// Steady-state studies: phase classification, critical-mass bisection,
// m-sweeps and initial-data comparisons.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "slowdiff/config.hpp"
#include "slowdiff/trajectory.hpp"
#include "slowdiff/transport.hpp"

namespace slowdiff {

enum class Phase { liquid, intermediate, solid };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::liquid: return "liquid";
    case Phase::intermediate: return "intermediate";
    case Phase::solid: return "solid";
  }
  return "?";
}

struct PhaseReport {
  Phase phase = Phase::liquid;
  double plateau_fraction = 0.0;  // |{u >= 1 - delta}| / M, clipped to [0, 1]
  double sup_density = 0.0;
};

inline PhaseReport classify_phase(const Ensemble1D& steady, const Mollifier& moll,
                                  double delta = kDefaultPlateauDelta) {
  const auto obs = observables(steady, moll, delta);
  PhaseReport r;
  r.sup_density = obs.sup_density;
  r.plateau_fraction = std::clamp(obs.plateau_measure / steady.mass(), 0.0, 1.0);
  if (r.plateau_fraction >= 1.0 - delta)
    r.phase = Phase::solid;
  else if (r.plateau_fraction <= delta)
    r.phase = Phase::liquid;
  else
    r.phase = Phase::intermediate;
  return r;
}

/// Runs cfg to a steady state; T acts as the time limit.
inline Snapshot run_to_steady(RunConfig cfg) {
  cfg.stop_at_steady = true;
  cfg.snapshot_interval = 0.0;
  const auto rec = run(cfg);
  if (!rec.steady)
    throw NumericalError("not_steady", "no steady state by T = " + detail::format_real(cfg.t_final) +
                                           " (mass " + detail::format_real(cfg.mass()) + ")");
  return rec.final_snapshot();
}

struct BisectionStep {
  double mass;
  PhaseReport report;
};

struct CriticalMassResult {
  double q = 0.0;
  double p = 0.0;
  double m = 0.0;
  double critical_mass = 0.0;
  std::pair<double, double> bracket{};
  int runs = 0;
  std::vector<BisectionStep> history;
};

inline constexpr int kDefaultBisectionDepth = 7;

/// The template with the given exponents, diffusion power and mass.
inline RunConfig with_parameters(RunConfig cfg, double q, double p, double m, double mass) {
  cfg.kernel_terms = cfg.kernel().with_exponents(q, p, cfg.unsafe_params).terms();
  cfg.m = m;
  cfg.set_mass(mass);
  return cfg;
}

/// Bisection on total mass for the onset of solid steady states. tol is
/// the final bracket width; 0 means (hi - lo) / 2^7.
inline CriticalMassResult critical_mass(double q, double p, double m, const RunConfig& solver,
                                        std::pair<double, double> bracket0, double tol = 0.0) {
  auto [lo, hi] = bracket0;
  if (!(lo > 0.0 && lo < hi)) throw std::invalid_argument("critical_mass: need 0 < lo < hi");
  if (tol <= 0.0) tol = (hi - lo) / static_cast<double>(1 << kDefaultBisectionDepth);

  CriticalMassResult res{q, p, m, 0.0, {lo, hi}, 0, {}};
  auto solid_at = [&](double mass) {
    const auto cfg = with_parameters(solver, q, p, m, mass);
    const auto snap = run_to_steady(cfg);
    const auto rep = classify_phase(snap.ensemble, cfg.mollifier(), cfg.delta);
    ++res.runs;
    res.history.push_back({mass, rep});
    return rep.phase == Phase::solid;
  };

  if (solid_at(lo))
    throw NumericalError("bracket", "bracket does not straddle: mass " + detail::format_real(lo) + " is already solid");
  if (!solid_at(hi))
    throw NumericalError("bracket", "bracket does not straddle: mass " + detail::format_real(hi) + " is not solid");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (solid_at(mid) ? hi : lo) = mid;
  }

  // Every solid mass must exceed every non-solid one.
  double max_fluid = 0.0, min_solid = std::numeric_limits<double>::infinity();
  for (const auto& s : res.history) {
    if (s.report.phase == Phase::solid)
      min_solid = std::min(min_solid, s.mass);
    else
      max_fluid = std::max(max_fluid, s.mass);
  }
  if (!(max_fluid < min_solid))
    throw NumericalError("non_monotone", "classification is not monotone in mass (non-solid at " +
                                             detail::format_real(max_fluid) + ", solid at " +
                                             detail::format_real(min_solid) + ")");
  res.bracket = {lo, hi};
  res.critical_mass = 0.5 * (lo + hi);
  return res;
}

struct MSweepRow {
  double m;
  double support_diam;
  double sup_density;
  double e_m;
  double e_interaction;
};

inline constexpr const char* kMSweepHeader = "m,support_diam,sup_density,E_m,E_interaction";

/// One steady-state run per m, all other parameters from the template.
inline std::vector<MSweepRow> m_sweep(const RunConfig& tmpl, const std::vector<double>& m_values) {
  for (double m : m_values)
    if (!(m > 1.0)) throw std::invalid_argument("m_sweep: every m must be > 1");
  std::vector<MSweepRow> rows;
  for (double m : m_values) {
    RunConfig cfg = tmpl;
    cfg.m = m;
    const auto snap = run_to_steady(cfg);
    const auto moll = cfg.mollifier();
    const auto obs = observables(snap.ensemble, moll, cfg.delta, 0.0, m);
    const auto e = total_energy(cfg.kernel(), snap.ensemble, m, moll);
    rows.push_back({m, obs.support_diam, obs.sup_density, e.total, e.interaction});
  }
  return rows;
}

struct InvarianceReport {
  bool agree = false;
  double w2 = 0.0;
  PhaseReport barenblatt;
  PhaseReport patch;
};

/// Steady states from Barenblatt (template shape) and patch data on
/// [-1, 1], both with the template's particle count rule evaluated on the
/// Barenblatt data so the two discretizations carry identical weights.
inline InvarianceReport initial_data_invariance(double q, double p, double m, double mass,
                                                const RunConfig& tmpl) {
  RunConfig b = tmpl;
  b.init_type = InitType::barenblatt;
  b = with_parameters(b, q, p, m, mass);
  b.n = b.particle_count();
  RunConfig c = b;
  c.init_type = InitType::patch;
  c.patch = PatchInit{-1.0, 1.0, mass};

  const auto sb = run_to_steady(b);
  const auto sc = run_to_steady(c);
  const auto moll = b.mollifier();
  InvarianceReport r;
  r.barenblatt = classify_phase(sb.ensemble, moll, b.delta);
  r.patch = classify_phase(sc.ensemble, moll, b.delta);
  r.w2 = wasserstein_1d(sb.ensemble.recentered(), sc.ensemble.recentered(), 2.0).distance;
  r.agree = r.w2 <= 10.0 * b.steady_tol && r.barenblatt.phase == r.patch.phase;
  return r;
}

/// Largest grid value of u^m over {u <= level}; small values mean the
/// pressure vanishes off the saturated set.
inline double pressure_off_plateau(const Ensemble1D& e, const Mollifier& moll, double m,
                                   double level = 0.9) {
  const auto grid = density_grid(e, moll, moll.epsilon() / 4.0);
  double worst = 0.0;
  for (double u : grid.values)
    if (u <= level) worst = std::max(worst, std::exp(m * std::log(u)));
  return worst;
}

}  // namespace slowdiff
