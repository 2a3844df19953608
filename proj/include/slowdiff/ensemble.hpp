#pragma once

// Particle ensembles: atomic approximations sum_i w_i delta_{x_i} of a
// density with total mass M, plus the initial-data generators and grid
// observables used throughout the simulator.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "slowdiff/kernel.hpp"
#include "slowdiff/mollifier.hpp"
#include "slowdiff/vec.hpp"

namespace slowdiff {

/// Positions with fixed positive weights. Weights are shared, never copied
/// or modified after construction, so every ensemble derived through
/// with_positions() carries a bit-identical mass.
template <std::size_t Dim>
class ParticleEnsemble {
 public:
  ParticleEnsemble(std::vector<Vec<Dim>> positions, std::vector<double> weights)
      : positions_(std::move(positions)) {
    if (positions_.empty()) throw std::invalid_argument("ensemble: need at least one particle");
    if (weights.size() != positions_.size())
      throw std::invalid_argument("ensemble: positions and weights differ in length");
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("ensemble: weights must be positive");
    check_positions();
    mass_ = std::accumulate(weights.begin(), weights.end(), 0.0);
    weights_ = std::make_shared<const std::vector<double>>(std::move(weights));
  }

  /// Same weights (and mass), new positions.
  ParticleEnsemble with_positions(std::vector<Vec<Dim>> positions) const {
    if (positions.size() != positions_.size())
      throw std::invalid_argument("ensemble: particle count changed");
    ParticleEnsemble e(*this);
    e.positions_ = std::move(positions);
    e.check_positions();
    return e;
  }

  std::size_t size() const noexcept { return positions_.size(); }
  std::span<const Vec<Dim>> positions() const noexcept { return positions_; }
  std::span<const double> weights() const noexcept { return *weights_; }
  double mass() const noexcept { return mass_; }

  Vec<Dim> mean() const {
    Vec<Dim> s{};
    for (std::size_t i = 0; i < size(); ++i) s += (*weights_)[i] * positions_[i];
    return (1.0 / mass_) * s;
  }

  /// sum_i w_i |x_i|^2.
  double second_moment() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += (*weights_)[i] * norm_sq(positions_[i]);
    return s;
  }

  ParticleEnsemble translated(const Vec<Dim>& c) const {
    auto p = positions_;
    for (auto& x : p) x += c;
    return with_positions(std::move(p));
  }

  /// Shifted to zero mean.
  ParticleEnsemble recentered() const { return translated(-1.0 * mean()); }

 private:
  void check_positions() const {
    for (const auto& x : positions_)
      for (double c : x)
        if (!std::isfinite(c)) throw std::invalid_argument("ensemble: non-finite position");
  }

  std::vector<Vec<Dim>> positions_;
  std::shared_ptr<const std::vector<double>> weights_;
  double mass_ = 0.0;
};

using Ensemble1D = ParticleEnsemble<1>;

template <std::size_t Dim>
std::vector<Vec<Dim>> conv_grad(const InteractionKernel& kernel, const ParticleEnsemble<Dim>& ens,
                                std::span<const Vec<Dim>> queries) {
  return conv_grad<Dim>(kernel, ens.positions(), ens.weights(), queries);
}

template <std::size_t Dim>
std::vector<double> mollify_density(const ParticleEnsemble<Dim>& ens, const Mollifier& moll,
                                    std::span<const Vec<Dim>> queries) {
  return mollify_density<Dim>(ens.positions(), ens.weights(), moll, queries);
}

template <std::size_t Dim>
std::vector<Vec<Dim>> mollify_density_grad(const ParticleEnsemble<Dim>& ens, const Mollifier& moll,
                                           std::span<const Vec<Dim>> queries) {
  return mollify_density_grad<Dim>(ens.positions(), ens.weights(), moll, queries);
}

// ---------------------------------------------------------------------------
// Barenblatt profiles
// ---------------------------------------------------------------------------

/// Shape constants of the unit-mass Barenblatt profile
///   rho(x) = tau^{-d beta} (K - kappa tau^{-2 beta} |x|^2)_+^{1/(m*-1)}.
struct BarenblattShape {
  double m_star;
  double tau;
  int dim;
  double beta;
  double kappa;
  double height_constant;  // K, chosen for unit mass

  /// Radius of the positive set at time tau.
  double support_radius() const {
    return std::pow(tau, beta) * std::sqrt(height_constant / kappa);
  }

  /// Unit-mass density at x (1D).
  double density(double x) const {
    const double s = height_constant - kappa * std::pow(tau, -2.0 * beta) * x * x;
    if (s <= 0.0) return 0.0;
    return std::pow(tau, -dim * beta) * std::pow(s, 1.0 / (m_star - 1.0));
  }

  /// Unit-mass cumulative distribution (1D).
  double cdf(double x) const {
    const double a = support_radius();
    if (x <= -a) return 0.0;
    if (x >= a) return 1.0;
    const double t = x / a;
    const double n = 1.0 / (m_star - 1.0);
    const double half = 0.5 * boost::math::ibeta(0.5, n + 1.0, t * t);
    return t >= 0 ? 0.5 + half : 0.5 - half;
  }

  /// Inverse of cdf on (0, 1).
  double quantile(double f) const {
    const double n = 1.0 / (m_star - 1.0);
    const double a = support_radius();
    if (f == 0.5) return 0.0;
    const double z = std::fabs(2.0 * f - 1.0);
    const double t = std::sqrt(boost::math::ibeta_inv(0.5, n + 1.0, z));
    return f > 0.5 ? a * t : -a * t;
  }
};

/// Closed-form 1D shape: with n = 1/(m*-1) and a = sqrt(K/kappa),
/// integral of (K - kappa y^2)_+^n is K^{n+1/2} kappa^{-1/2} B(1/2, n+1).
inline BarenblattShape barenblatt_shape(double m_star, double tau, int dim = 1) {
  if (!(m_star > 1.0)) throw std::invalid_argument("barenblatt: m_star must be > 1");
  if (!(tau > 0.0)) throw std::invalid_argument("barenblatt: tau must be positive");
  if (dim != 1) throw std::invalid_argument("barenblatt: only d = 1 is sampled");
  BarenblattShape s{};
  s.m_star = m_star;
  s.tau = tau;
  s.dim = dim;
  s.beta = 1.0 / (2.0 + dim * (m_star - 1.0));
  s.kappa = 0.5 * s.beta * (m_star - 1.0) / m_star;
  const double n = 1.0 / (m_star - 1.0);
  const double b = boost::math::beta(0.5, n + 1.0);
  s.height_constant = std::pow(std::sqrt(s.kappa) / b, 1.0 / (n + 0.5));
  return s;
}

/// Equal-weight quantile sampling: particle i (1-based) sits at the
/// i/(N+1) mass quantile and carries mass/N.
inline Ensemble1D init_barenblatt(double m_star, double tau, double mass, std::size_t n) {
  if (n < 2) throw std::invalid_argument("barenblatt: need N >= 2");
  if (!(mass > 0.0)) throw std::invalid_argument("barenblatt: mass must be positive");
  const auto shape = barenblatt_shape(m_star, tau, 1);
  std::vector<Vec<1>> pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    pos[i] = {shape.quantile(f)};
  }
  // Mirror to make the sampling exactly symmetric.
  for (std::size_t i = 0; i < n / 2; ++i) pos[n - 1 - i] = {-pos[i][0]};
  if (n % 2 == 1) pos[n / 2] = {0.0};
  return Ensemble1D(std::move(pos), std::vector<double>(n, mass / static_cast<double>(n)));
}

/// N particles at the cell midpoints of [left, right], each of weight mass/N.
inline Ensemble1D init_patch(double left, double right, double mass, std::size_t n) {
  if (!(left < right)) throw std::invalid_argument("patch: need left < right");
  if (n < 1) throw std::invalid_argument("patch: need N >= 1");
  if (!(mass > 0.0)) throw std::invalid_argument("patch: mass must be positive");
  const double center = 0.5 * (left + right);
  const double half = 0.5 * (right - left);
  const double nn = static_cast<double>(n);
  std::vector<Vec<1>> pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Offsets are computed from the center so mirrored particles are exact.
    const double k = 2.0 * static_cast<double>(i) + 1.0 - nn;  // odd integers, symmetric
    pos[i] = {center + half * k / nn};
  }
  return Ensemble1D(std::move(pos), std::vector<double>(n, mass / nn));
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

struct ObservableSet {
  double sup_density = 0.0;
  double support_diam = 0.0;
  double plateau_measure = 0.0;
  double lm_norm = 0.0;
  double second_moment = 0.0;
  Vec<1> mean{};
};

inline constexpr double kSupportThreshold = 1e-3;
inline constexpr double kDefaultPlateauDelta = 0.05;

/// Uniform grid covering the particle hull padded by 8 epsilon.
struct DensityGrid {
  double origin;
  double spacing;
  std::vector<double> values;

  double x(std::size_t k) const { return origin + spacing * static_cast<double>(k); }
};

inline DensityGrid density_grid(const Ensemble1D& ens, const Mollifier& moll, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("observables: grid spacing must be positive");
  double lo = ens.positions()[0][0], hi = lo;
  for (const auto& p : ens.positions()) {
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  const double pad = 8.0 * moll.epsilon();
  lo -= pad;
  hi += pad;
  const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / spacing));
  std::vector<Vec<1>> q(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) q[k] = {lo + spacing * static_cast<double>(k)};
  return {lo, spacing, mollify_density<1>(ens, moll, q)};
}

/// Grid diagnostics of u = phi_eps * rho. m enters only lm_norm.
inline ObservableSet observables(const Ensemble1D& ens, const Mollifier& moll,
                                 double delta = kDefaultPlateauDelta, double grid_spacing = 0.0,
                                 double m = 2.0) {
  if (grid_spacing == 0.0) grid_spacing = moll.epsilon() / 4.0;
  const auto grid = density_grid(ens, moll, grid_spacing);
  ObservableSet o;
  o.sup_density = *std::max_element(grid.values.begin(), grid.values.end());
  const double thr = kSupportThreshold * o.sup_density;
  std::size_t first = grid.values.size(), last = 0, plateau = 0;
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.values.size(); ++k) {
    const double u = grid.values[k];
    if (u >= thr) {
      first = std::min(first, k);
      last = k;
    }
    if (u >= 1.0 - delta) ++plateau;
    if (u > 0) log_max = std::max(log_max, m * std::log(u));
  }
  o.support_diam = first <= last ? grid.x(last) - grid.x(first) : 0.0;
  o.plateau_measure = grid.spacing * static_cast<double>(plateau);
  // (sum u^m cell)^{1/m}, accumulated relative to the largest term.
  double acc = 0.0;
  for (double u : grid.values)
    if (u > 0) acc += std::exp(m * std::log(u) - log_max);
  o.lm_norm = std::exp((log_max + std::log(acc * grid.spacing)) / m);
  o.second_moment = ens.second_moment();
  o.mean = ens.mean();
  return o;
}

}  // namespace slowdiff
