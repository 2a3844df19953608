#pragma once

// Exact Wasserstein distances between atomic measures on the line.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slowdiff/ensemble.hpp"

namespace slowdiff {

struct TransportResult {
  double distance = 0.0;
  double b = 2.0;
};

inline constexpr double kMassMismatchTolerance = 1e-12;

namespace detail {

inline double cost(double d, double b) {
  d = std::fabs(d);
  if (b == 1.0) return d;
  if (b == 2.0) return d * d;
  return std::pow(d, b);
}

inline void check_transport_args(const Ensemble1D& a, const Ensemble1D& c, double b) {
  if (!(b >= 1.0 && b <= 2.0)) throw std::invalid_argument("wasserstein: b must lie in [1, 2]");
  if (std::fabs(a.mass() - c.mass()) > kMassMismatchTolerance)
    throw std::invalid_argument("wasserstein: total masses differ");
}

inline std::vector<std::pair<double, double>> sorted_atoms(const Ensemble1D& e) {
  std::vector<std::pair<double, double>> atoms(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) atoms[i] = {e.positions()[i][0], e.weights()[i]};
  std::sort(atoms.begin(), atoms.end());
  return atoms;
}

}  // namespace detail

/// (int_0^M |Q1(s) - Q2(s)|^b ds)^{1/b} for the quantile functions Q of the
/// two measures, by a sweep over the merged cumulative weights.
inline TransportResult wasserstein_1d(const Ensemble1D& e1, const Ensemble1D& e2, double b) {
  detail::check_transport_args(e1, e2, b);
  const auto a1 = detail::sorted_atoms(e1);
  const auto a2 = detail::sorted_atoms(e2);
  std::size_t i = 0, j = 0;
  double r1 = a1[0].second, r2 = a2[0].second;
  double total = 0.0;
  while (i < a1.size() && j < a2.size()) {
    const double d = std::min(r1, r2);
    total += d * detail::cost(a1[i].first - a2[j].first, b);
    r1 -= d;
    r2 -= d;
    if (r1 <= 0.0 && ++i < a1.size()) r1 = a1[i].second;
    if (r2 <= 0.0 && ++j < a2.size()) r2 = a2[j].second;
  }
  return {std::pow(total, 1.0 / b), b};
}

inline constexpr std::size_t kOracleMaxAtoms = 8;

/// Brute-force minimum over all assignments of equal atoms. Both ensembles
/// must have the same number of atoms (at most 8), each with equal weights.
inline TransportResult wasserstein_oracle(const Ensemble1D& e1, const Ensemble1D& e2, double b) {
  detail::check_transport_args(e1, e2, b);
  const std::size_t n = e1.size();
  if (n > kOracleMaxAtoms || e2.size() > kOracleMaxAtoms)
    throw std::invalid_argument("wasserstein_oracle: at most 8 atoms per ensemble");
  if (e2.size() != n) throw std::invalid_argument("wasserstein_oracle: atom counts differ");
  for (const auto* e : {&e1, &e2}) {
    const auto w = e->weights();
    for (double wi : w)
      if (wi != w[0]) throw std::invalid_argument("wasserstein_oracle: weights must be equal");
  }
  const double w = e1.mass() / static_cast<double>(n);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += detail::cost(e1.positions()[i][0] - e2.positions()[perm[i]][0], b);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {std::pow(w * best, 1.0 / b), b};
}

}  // namespace slowdiff
