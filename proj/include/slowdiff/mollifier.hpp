#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "slowdiff/vec.hpp"

namespace slowdiff {

inline constexpr double kDefaultEpsilonExponent = 0.999;

/// Blob width tied to the particle spacing: epsilon = h^exponent.
inline double epsilon_from_h(double h, double exponent = kDefaultEpsilonExponent) {
  if (!(h > 0.0)) throw std::invalid_argument("epsilon_from_h: h must be positive");
  return std::pow(h, exponent);
}

/// Gaussian mollifier phi_eps(x) = (2 pi eps^2)^{-d/2} exp(-|x|^2 / (2 eps^2)).
///
/// Sums are exact over all particles unless a truncation radius (in units
/// of epsilon) is set, in which case pairs further apart are skipped.
class Mollifier {
 public:
  static constexpr double kTruncationRadius = 10.0;

  Mollifier(double epsilon, int dim, bool truncate = false)
      : epsilon_(epsilon), dim_(dim), truncate_(truncate) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw std::invalid_argument("mollifier: epsilon must be positive");
    if (dim < 1) throw std::invalid_argument("mollifier: dim must be >= 1");
    inv_two_eps2_ = 0.5 / (epsilon * epsilon);
    norm_ = std::pow(2.0 * std::numbers::pi * epsilon * epsilon, -0.5 * dim);
    cutoff_sq_ = truncate ? std::pow(kTruncationRadius * epsilon, 2)
                          : std::numeric_limits<double>::infinity();
  }

  double epsilon() const noexcept { return epsilon_; }
  int dim() const noexcept { return dim_; }
  bool truncated() const noexcept { return truncate_; }
  double cutoff() const noexcept {
    return truncate_ ? kTruncationRadius * epsilon_ : std::numeric_limits<double>::infinity();
  }
  double peak() const noexcept { return norm_; }

  /// phi as a function of |z|^2; zero beyond the truncation radius.
  double value_sq(double r2) const {
    if (r2 > cutoff_sq_) return 0.0;
    return norm_ * std::exp(-r2 * inv_two_eps2_);
  }

  template <std::size_t Dim>
  double operator()(const Vec<Dim>& z) const {
    return value_sq(norm_sq(z));
  }

  /// grad phi(z) = -z / eps^2 * phi(z).
  template <std::size_t Dim>
  Vec<Dim> grad(const Vec<Dim>& z) const {
    const double f = value_sq(norm_sq(z)) * (-2.0 * inv_two_eps2_);
    return f * z;
  }

  /// Second derivative in 1D: (z^2/eps^4 - 1/eps^2) phi(z).
  double second_1d(double z) const {
    const double e2 = epsilon_ * epsilon_;
    return (z * z / (e2 * e2) - 1.0 / e2) * value_sq(z * z);
  }

 private:
  double epsilon_;
  int dim_;
  bool truncate_;
  double inv_two_eps2_;
  double norm_;
  double cutoff_sq_;
};

/// u(x) = sum_j w_j phi(x - x_j), self term included.
template <std::size_t Dim>
std::vector<double> mollify_density(std::span<const Vec<Dim>> positions,
                                    std::span<const double> weights,
                                    const Mollifier& moll,
                                    std::span<const Vec<Dim>> queries) {
  std::vector<double> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    double s = 0.0;
    for (std::size_t j = 0; j < positions.size(); ++j)
      s += weights[j] * moll(queries[q] - positions[j]);
    out[q] = s;
  }
  return out;
}

template <std::size_t Dim>
std::vector<Vec<Dim>> mollify_density_grad(std::span<const Vec<Dim>> positions,
                                           std::span<const double> weights,
                                           const Mollifier& moll,
                                           std::span<const Vec<Dim>> queries) {
  std::vector<Vec<Dim>> out(queries.size(), Vec<Dim>{});
  for (std::size_t q = 0; q < queries.size(); ++q) {
    Vec<Dim> s{};
    for (std::size_t j = 0; j < positions.size(); ++j)
      s += weights[j] * moll.grad(queries[q] - positions[j]);
    out[q] = s;
  }
  return out;
}

}  // namespace slowdiff
