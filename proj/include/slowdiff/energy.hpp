#pragma once

// Discrete energies of a particle ensemble:
//
//   interaction   (1/2) sum_{i != j} w_i w_j K(x_i - x_j)
//   blob entropy  1/(m-1) sum_i w_i u(x_i)^{m-1},  u = phi_eps * rho
//
// Their sum is the energy whose exact gradient drives the particles.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "slowdiff/ensemble.hpp"
#include "slowdiff/errors.hpp"
#include "slowdiff/kernel.hpp"
#include "slowdiff/mollifier.hpp"

namespace slowdiff {

/// Largest admissible (m-1) log u before u^{m-1} is treated as a blow-up.
inline constexpr double kMaxLogPower = 700.0;

/// u^p computed as exp(p log u); throws density_blowup when the exponent
/// would exceed kMaxLogPower.
inline double guarded_power(double u, double p, std::size_t particle) {
  const double e = p * std::log(u);
  if (e > kMaxLogPower)
    throw NumericalError("density_blowup", "density blow-up at particle " + std::to_string(particle) +
                                               " (u = " + std::to_string(u) + ")");
  return std::exp(e);
}

template <std::size_t Dim>
double interaction_energy(const InteractionKernel& kernel, const ParticleEnsemble<Dim>& ens) {
  const auto x = ens.positions();
  const auto w = ens.weights();
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < x.size(); ++j) row += w[j] * kernel.eval(x[i] - x[j]);
    total += w[i] * row;
  }
  return total;  // each unordered pair once == (1/2) sum over ordered pairs
}

template <std::size_t Dim>
double entropy_blob(const ParticleEnsemble<Dim>& ens, double m, const Mollifier& moll) {
  if (!(m > 1.0)) throw std::invalid_argument("entropy: m must be > 1");
  const auto u = mollify_density<Dim>(ens, moll, ens.positions());
  const auto w = ens.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * guarded_power(u[i], m - 1.0, i);
  return s / (m - 1.0);
}

struct EnergyBreakdown {
  double interaction = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  double m = 0.0;
  /// max(0, sup u - 1): how far the state is from the height constraint.
  double constraint_violation = 0.0;
};

inline EnergyBreakdown total_energy(const InteractionKernel& kernel, const Ensemble1D& ens,
                                    double m, const Mollifier& moll) {
  EnergyBreakdown e;
  e.m = m;
  e.interaction = interaction_energy(kernel, ens);
  e.entropy = entropy_blob(ens, m, moll);
  e.total = e.interaction + e.entropy;
  const auto obs = observables(ens, moll, kDefaultPlateauDelta, 0.0, m);
  e.constraint_violation = std::max(0.0, obs.sup_density - 1.0);
  return e;
}

}  // namespace slowdiff
