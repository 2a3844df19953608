#pragma once

// Blob-method particle dynamics in one dimension.
//
// The discrete energy
//   E(x) = (1/2) sum_{i != j} w_i w_j K(x_i - x_j) + 1/(m-1) sum_i w_i u_i^{m-1},
//   u_i  = sum_j w_j phi(x_i - x_j),
// is differentiated exactly, giving w_i v_i = -dE/dx_i with
//   v_i = -sum_{j != i} w_j K'(x_i - x_j)
//         - sum_j w_j phi'(x_i - x_j) (u_i^{m-2} + u_j^{m-2}).

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "slowdiff/banded.hpp"
#include "slowdiff/energy.hpp"
#include "slowdiff/ensemble.hpp"
#include "slowdiff/errors.hpp"
#include "slowdiff/kernel.hpp"
#include "slowdiff/mollifier.hpp"
#include "slowdiff/parallel.hpp"

namespace slowdiff {

enum class Scheme { euler, heun, semi_implicit };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::euler: return "euler";
    case Scheme::heun: return "heun";
    case Scheme::semi_implicit: return "semi_implicit";
  }
  return "?";
}

/// Everything known at one particle configuration.
struct Evaluation {
  std::vector<double> density;   // u(x_i)
  std::vector<double> pressure;  // u(x_i)^{m-2}
  std::vector<double> velocity;
  double interaction = 0.0;
  double entropy = 0.0;
  double max_speed = 0.0;
  double slope_sq = 0.0;  // sum_i w_i v_i^2

  double total() const { return interaction + entropy; }
};

/// Physics switches; disabling a term is only meant for tests.
struct FlowTerms {
  bool interaction = true;
  bool diffusion = true;
};

namespace detail {

inline bool strictly_increasing(std::span<const double> x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) return false;
  return true;
}

/// For sorted x: the index range [lo, hi] of particles within radius of x_i.
struct Windows {
  std::vector<std::size_t> lo, hi;
};

inline Windows windows(std::span<const double> x, double radius) {
  const std::size_t n = x.size();
  Windows w{std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
  std::size_t a = 0, b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (x[i] - x[a] > radius) ++a;
    if (b < i) b = i;
    while (b + 1 < n && x[b + 1] - x[i] <= radius) ++b;
    w.lo[i] = a;
    w.hi[i] = b;
  }
  return w;
}

inline std::vector<double> to_scalars(std::span<const Vec<1>> p) {
  std::vector<double> x(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) x[i] = p[i][0];
  return x;
}

inline std::vector<Vec<1>> to_points(std::span<const double> x) {
  std::vector<Vec<1>> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = {x[i]};
  return p;
}

}  // namespace detail

/// Energy, density and velocity at positions x. Each row i is summed in a
/// fixed order by a single worker, so results do not depend on `threads`.
inline Evaluation evaluate(const InteractionKernel& kernel, const Mollifier& moll, double m,
                           std::span<const double> x, std::span<const double> w,
                           FlowTerms terms = {}, unsigned threads = 1) {
  if (!(m > 1.0)) throw std::invalid_argument("dynamics: m must be > 1");
  const std::size_t n = x.size();
  Evaluation ev;
  ev.density.assign(n, 0.0);
  ev.pressure.assign(n, 0.0);
  ev.velocity.assign(n, 0.0);

  // Windowed loops need sorted positions and a finite radius.
  const bool windowed = moll.truncated() && detail::strictly_increasing(x);
  detail::Windows win;
  if (windowed) win = detail::windows(x, moll.cutoff());
  auto lo = [&](std::size_t i) { return windowed ? win.lo[i] : std::size_t{0}; };
  auto hi = [&](std::size_t i) { return windowed ? win.hi[i] : n - 1; };

  const double inv_eps2 = 1.0 / (moll.epsilon() * moll.epsilon());

  if (terms.diffusion) {
    parallel_for(n, threads, [&](std::size_t i) {
      double s = 0.0;
      for (std::size_t j = lo(i); j <= hi(i); ++j) {
        const double z = x[i] - x[j];
        s += w[j] * moll.value_sq(z * z);
      }
      ev.density[i] = s;
    });
    double entropy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = ev.density[i];
      const double up = guarded_power(u, m - 1.0, i);
      ev.pressure[i] = up / u;
      entropy += w[i] * up;
    }
    ev.entropy = entropy / (m - 1.0);
  }

  // Interaction: k'(|x_i - x_j|) for j > i in a triangular table, then rows.
  std::vector<double> slope;
  std::vector<double> row_energy(n, 0.0);
  auto tri = [n](std::size_t i, std::size_t j) { return i * n - i * (i + 1) / 2 + (j - i - 1); };
  if (terms.interaction && n > 1) {
    slope.assign(n * (n - 1) / 2, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
      double e = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double r = std::fabs(x[i] - x[j]);
        if (r == 0.0) continue;  // coincident particles do not interact
        const auto [k, kp] = kernel.radial_and_slope(r);
        slope[tri(i, j)] = kp;
        e += w[j] * k;
      }
      row_energy[i] = e;
    });
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += w[i] * row_energy[i];
    ev.interaction = total;
  }

  parallel_for(n, threads, [&](std::size_t i) {
    double v = 0.0;
    if (terms.interaction) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = x[i] - x[j];
        if (d == 0.0) continue;
        const double kp = slope[j > i ? tri(i, j) : tri(j, i)];
        v -= w[j] * (d > 0.0 ? kp : -kp);
      }
    }
    if (terms.diffusion) {
      const double gi = ev.pressure[i];
      for (std::size_t j = lo(i); j <= hi(i); ++j) {
        const double z = x[i] - x[j];
        const double dphi = -z * inv_eps2 * moll.value_sq(z * z);
        v -= w[j] * dphi * (gi + ev.pressure[j]);
      }
    }
    ev.velocity[i] = v;
  });

  for (std::size_t i = 0; i < n; ++i) {
    ev.max_speed = std::max(ev.max_speed, std::fabs(ev.velocity[i]));
    ev.slope_sq += w[i] * ev.velocity[i] * ev.velocity[i];
  }
  return ev;
}

/// Jacobian radius of the diffusion term, in units of epsilon. Entries
/// beyond it are below exp(-18) relative; translation invariance of the
/// truncated matrix is exact because windows are symmetric.
inline constexpr double kJacobianRadius = 6.0;

/// d v^diff / dx for sorted positions, as a band matrix. v^diff is the
/// diffusion part of the velocity; `ev` must hold density and pressure
/// at x.
inline BandedMatrix diffusion_jacobian(const Mollifier& moll, double m,
                                       std::span<const double> x, std::span<const double> w,
                                       const Evaluation& ev) {
  const std::size_t n = x.size();
  if (!detail::strictly_increasing(x))
    throw std::logic_error("diffusion_jacobian: positions must be strictly increasing");
  const double radius = kJacobianRadius * moll.epsilon();
  const auto win = detail::windows(x, radius);
  const auto wide = detail::windows(x, 2.0 * radius);
  std::size_t band = 0;
  for (std::size_t i = 0; i < n; ++i) band = std::max(band, wide.hi[i] - i);

  const double e2 = moll.epsilon() * moll.epsilon();
  auto dphi = [&](double z) { return -z / e2 * moll.value_sq(z * z); };
  auto ddphi = [&](double z) { return (z * z / (e2 * e2) - 1.0 / e2) * moll.value_sq(z * z); };

  const auto& g = ev.pressure;
  std::vector<double> gp(n), A(n, 0.0), B(n, 0.0), C(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    gp[i] = m == 2.0 ? 0.0 : (m - 2.0) * g[i] / ev.density[i];
    for (std::size_t j = win.lo[i]; j <= win.hi[i]; ++j) {
      if (j == i) continue;
      const double z = x[i] - x[j];
      A[i] += w[j] * dphi(z);
      const double b = ddphi(z);
      B[i] += w[j] * b;
      C[i] += w[j] * b * g[j];
    }
  }

  BandedMatrix J(n, band, band);
  for (std::size_t i = 0; i < n; ++i) {
    J(i, i) += -gp[i] * A[i] * A[i] - g[i] * B[i] - C[i];
    for (std::size_t k = win.lo[i]; k <= win.hi[i]; ++k) {
      if (k == i) continue;
      const double z = x[i] - x[k];
      J(i, k) += w[k] * (dphi(z) * (gp[i] * A[i] - gp[k] * A[k]) + ddphi(z) * (g[i] + g[k]));
    }
  }
  // sum_j w_j g'_j phi'(x_i - x_j) phi'(x_j - x_k), times w_k.
  if (m != 2.0) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c = w[j] * gp[j];
      for (std::size_t i = win.lo[j]; i <= win.hi[j]; ++i) {
        if (i == j) continue;
        const double aij = c * dphi(x[i] - x[j]);
        for (std::size_t k = win.lo[j]; k <= win.hi[j]; ++k) {
          if (k == j) continue;
          J(i, k) += w[k] * aij * dphi(x[j] - x[k]);
        }
      }
    }
  }
  return J;
}

struct StepReport {
  int substeps = 0;
  int rejections = 0;
  double dissipation = 0.0;  // sum over substeps of dt_sub * sum_i w_i v_i^2
};

struct StepOptions {
  Scheme scheme = Scheme::semi_implicit;
  /// Reject substeps that raise the energy by more than 1e-10 |E|.
  bool energy_guard = true;
  unsigned threads = 1;
  FlowTerms terms{};
};

inline constexpr int kMaxSubstepLevel = 10;  // at most 2^10 substeps per step
inline constexpr double kEnergyGuardTolerance = 1e-10;

/// One particle system evolving in time.
class SimulationState {
 public:
  SimulationState(Ensemble1D ensemble, InteractionKernel kernel, Mollifier mollifier, double m,
                  double spacing, double time = 0.0)
      : ensemble_(std::move(ensemble)),
        kernel_(std::move(kernel)),
        mollifier_(mollifier),
        m_(m),
        spacing_(spacing),
        time_(time) {
    if (!(m > 1.0)) throw std::invalid_argument("state: m must be > 1");
    if (!(spacing > 0.0)) throw std::invalid_argument("state: spacing must be positive");
    if (!(time >= 0.0)) throw std::invalid_argument("state: time must be >= 0");
  }

  const Ensemble1D& ensemble() const noexcept { return ensemble_; }
  const InteractionKernel& kernel() const noexcept { return kernel_; }
  const Mollifier& mollifier() const noexcept { return mollifier_; }
  double m() const noexcept { return m_; }
  double spacing() const noexcept { return spacing_; }
  double time() const noexcept { return time_; }
  const StepReport& last_step() const noexcept { return last_step_; }

  /// Cached evaluation at the current positions.
  const Evaluation& evaluation(FlowTerms terms = {}, unsigned threads = 1) const {
    if (!cache_ || cache_terms_.interaction != terms.interaction ||
        cache_terms_.diffusion != terms.diffusion) {
      const auto x = detail::to_scalars(ensemble_.positions());
      cache_ = evaluate(kernel_, mollifier_, m_, x, ensemble_.weights(), terms, threads);
      cache_terms_ = terms;
    }
    return *cache_;
  }

  const std::vector<double>& last_velocities(FlowTerms terms = {}) const {
    return evaluation(terms).velocity;
  }

  /// New state at time() + dt.
  SimulationState advanced(std::vector<double> x, double dt, Evaluation ev, StepReport rep,
                           FlowTerms terms) const {
    SimulationState s(*this);
    s.ensemble_ = ensemble_.with_positions(detail::to_points(x));
    s.time_ = time_ + dt;
    s.cache_ = std::move(ev);
    s.cache_terms_ = terms;
    s.last_step_ = rep;
    return s;
  }

 private:
  Ensemble1D ensemble_;
  InteractionKernel kernel_;
  Mollifier mollifier_;
  double m_;
  double spacing_;
  double time_;
  StepReport last_step_{};
  mutable std::optional<Evaluation> cache_;
  mutable FlowTerms cache_terms_{};
};

/// v_i = -(1/w_i) dE/dx_i at the current state.
inline std::vector<double> velocity(const SimulationState& s, FlowTerms terms = {}) {
  return s.evaluation(terms).velocity;
}

/// True iff max_i |v_i| < tol.
inline bool detect_steady(const SimulationState& s, double tol) {
  return s.evaluation().max_speed < tol;
}

namespace detail {

struct Trial {
  std::vector<double> x;
  double max_displacement = 0.0;
};

inline Trial propose(const SimulationState& s, std::span<const double> x,
                     const Evaluation& ev, double dt, const StepOptions& opt) {
  const auto w = s.ensemble().weights();
  const std::size_t n = x.size();
  std::vector<double> dx(n);
  switch (opt.scheme) {
    case Scheme::euler:
      for (std::size_t i = 0; i < n; ++i) dx[i] = dt * ev.velocity[i];
      break;
    case Scheme::heun: {
      std::vector<double> pred(n);
      for (std::size_t i = 0; i < n; ++i) pred[i] = x[i] + dt * ev.velocity[i];
      const auto ev2 = evaluate(s.kernel(), s.mollifier(), s.m(), pred, w, opt.terms, opt.threads);
      for (std::size_t i = 0; i < n; ++i) dx[i] = 0.5 * dt * (ev.velocity[i] + ev2.velocity[i]);
      break;
    }
    case Scheme::semi_implicit: {
      if (!opt.terms.diffusion || n < 2) {
        for (std::size_t i = 0; i < n; ++i) dx[i] = dt * ev.velocity[i];
        break;
      }
      // (I - dt J_diff) dx = dt v: diffusion implicit, interaction explicit.
      auto M = diffusion_jacobian(s.mollifier(), s.m(), x, w, ev);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i > M.lower() ? i - M.lower() : 0;
        const std::size_t b = std::min(n - 1, i + M.upper());
        for (std::size_t k = a; k <= b; ++k) M(i, k) *= -dt;
        M(i, i) += 1.0;
      }
      std::vector<double> rhs(n);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = dt * ev.velocity[i];
      dx = M.solve(std::move(rhs));
      break;
    }
  }
  Trial t{std::vector<double>(n), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    t.x[i] = x[i] + dx[i];
    t.max_displacement = std::max(t.max_displacement, std::fabs(dx[i]));
  }
  return t;
}

}  // namespace detail

/// Advances by dt. Substeps of dt / 2^k are taken when a trial substep
/// moves a particle further than spacing/2, reorders particles, blows up
/// the density, or (with the guard) increases the energy.
inline SimulationState step(const SimulationState& s, double dt, const StepOptions& opt = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  constexpr long kFull = 1L << kMaxSubstepLevel;
  const auto w = s.ensemble().weights();
  std::vector<double> x = detail::to_scalars(s.ensemble().positions());
  const bool ordered = detail::strictly_increasing(x);
  Evaluation ev = s.evaluation(opt.terms, opt.threads);
  const double cap = 0.5 * s.spacing();

  StepReport rep;
  long left = kFull;
  int level = 0;
  while (left > 0) {
    const long units = std::min(kFull >> level, left);
    const double dt_sub = dt * static_cast<double>(units) / static_cast<double>(kFull);
    bool accept = true;
    detail::Trial trial;
    std::optional<Evaluation> next;
    try {
      trial = detail::propose(s, x, ev, dt_sub, opt);
      accept = trial.max_displacement <= cap;
      if (accept && ordered) accept = detail::strictly_increasing(trial.x);
      if (accept) {
        next = evaluate(s.kernel(), s.mollifier(), s.m(), trial.x, w, opt.terms, opt.threads);
        if (opt.energy_guard)
          accept = next->total() <= ev.total() + kEnergyGuardTolerance * std::fabs(ev.total());
      }
    } catch (const NumericalError& e) {
      if (e.kind() != "density_blowup") throw;
      accept = false;
    } catch (const std::runtime_error&) {
      accept = false;  // singular implicit system
    }
    if (!accept) {
      ++rep.rejections;
      if (++level > kMaxSubstepLevel)
        throw NumericalError("stiff_blowup", "stiff blow-up at t = " + std::to_string(s.time()) +
                                                 ": more than 1024 substeps needed");
      continue;
    }
    rep.dissipation += dt_sub * ev.slope_sq;
    ++rep.substeps;
    x = std::move(trial.x);
    ev = std::move(*next);
    left -= units;
  }
  return s.advanced(std::move(x), dt, std::move(ev), rep, opt.terms);
}

inline SimulationState step(const SimulationState& s, double dt, Scheme scheme) {
  StepOptions opt;
  opt.scheme = scheme;
  return step(s, dt, opt);
}

}  // namespace slowdiff
