#pragma once

// Power-law interaction potentials
//
//   K(x) = sum_t c_t |x|^{e_t} / e_t,   with |x|^0/0 read as log|x|,
//
// either purely attractive (one term) or repulsive-attractive
// (|x|^q/q - |x|^p/p with 2-d <= p < q <= 2).

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slowdiff/vec.hpp"

namespace slowdiff {

struct KernelTerm {
  double coeff;     // normalized: contributes coeff * |x|^exponent / exponent
  double exponent;

  /// Term contributing raw * |x|^exponent (exponent != 0), so that e.g.
  /// 2|x|^2 is stored exactly as {coeff = 4, exponent = 2}.
  static KernelTerm from_raw(double raw, double exponent) {
    if (exponent == 0.0) return {raw, 0.0};
    return {raw * exponent, exponent};
  }

  /// Multiplier of |x|^exponent (or of log|x| when exponent == 0).
  double raw() const { return exponent == 0.0 ? coeff : coeff / exponent; }

  bool operator==(const KernelTerm&) const = default;
};

class InteractionKernel {
 public:
  /// Validates and builds a kernel. With allow_unsafe, exponents outside
  /// [2-d, 2] and unusual term patterns are accepted but the kernel is
  /// marked non-conforming. p >= q in a repulsive-attractive pair and zero
  /// coefficients are always rejected.
  static InteractionKernel validate(std::vector<KernelTerm> terms, int dim,
                                    bool allow_unsafe = false) {
    if (dim < 1) throw std::invalid_argument("kernel: dim must be >= 1");
    if (terms.empty()) throw std::invalid_argument("kernel: no terms");
    bool conforming = true;
    const double lo = 2.0 - dim;
    for (const auto& t : terms) {
      if (!std::isfinite(t.coeff) || !std::isfinite(t.exponent))
        throw std::invalid_argument("kernel: non-finite term");
      if (t.coeff == 0.0) throw std::invalid_argument("kernel: zero coefficient");
      if (t.exponent < lo || t.exponent > 2.0) {
        if (!allow_unsafe)
          throw std::invalid_argument("kernel: exponent " + std::to_string(t.exponent) +
                                      " outside [" + std::to_string(lo) + ", 2]");
        conforming = false;
      }
    }
    if (terms.size() == 1) {
      if (terms[0].coeff < 0.0) {
        if (!allow_unsafe) throw std::invalid_argument("kernel: single term must be attractive");
        conforming = false;
      }
    } else if (terms.size() == 2) {
      const KernelTerm* att = terms[0].coeff > 0 ? &terms[0] : &terms[1];
      const KernelTerm* rep = terms[0].coeff > 0 ? &terms[1] : &terms[0];
      if (att->coeff > 0 && rep->coeff < 0) {
        if (!(rep->exponent < att->exponent))
          throw std::invalid_argument("kernel: repulsion exponent p must be < attraction exponent q");
        if (att->exponent <= 0.0) {
          if (!allow_unsafe) throw std::invalid_argument("kernel: attraction exponent q must be > 0");
          conforming = false;
        }
      } else {
        if (!allow_unsafe)
          throw std::invalid_argument("kernel: two terms must be one attractive, one repulsive");
        conforming = false;
      }
    } else {
      if (!allow_unsafe) throw std::invalid_argument("kernel: at most two terms");
      conforming = false;
    }
    return InteractionKernel(std::move(terms), dim, conforming);
  }

  /// |x|^q/q - |x|^p/p scaled by the given coefficients.
  static InteractionKernel repulsive_attractive(double q, double p, int dim,
                                                double attraction = 1.0,
                                                double repulsion = 1.0,
                                                bool allow_unsafe = false) {
    return validate({{attraction, q}, {-repulsion, p}}, dim, allow_unsafe);
  }

  const std::vector<KernelTerm>& terms() const noexcept { return terms_; }
  int dim() const noexcept { return dim_; }
  bool conforming() const noexcept { return conforming_; }

  /// Exponent of the attractive term, if any (NaN otherwise).
  double attraction_exponent() const {
    for (const auto& t : terms_)
      if (t.coeff > 0) return t.exponent;
    return std::numeric_limits<double>::quiet_NaN();
  }
  double repulsion_exponent() const {
    for (const auto& t : terms_)
      if (t.coeff < 0) return t.exponent;
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// Same kernel with the attractive / repulsive exponents replaced.
  InteractionKernel with_exponents(double q, double p, bool allow_unsafe = false) const {
    auto terms = terms_;
    for (auto& t : terms) t.exponent = t.coeff > 0 ? q : p;
    return validate(std::move(terms), dim_, allow_unsafe || !conforming_);
  }

  /// Radial profile k(r), r >= 0. Returns -inf at r = 0 for singular terms.
  double eval_radial(double r) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.exponent == 0.0) {
        s += t.coeff * std::log(r);
      } else if (t.exponent == 2.0) {
        s += t.coeff * 0.5 * r * r;
      } else if (t.exponent == 1.0) {
        s += t.coeff * r;
      } else {
        if (r == 0.0 && t.exponent < 0.0) return -std::numeric_limits<double>::infinity();
        s += t.coeff * std::pow(r, t.exponent) / t.exponent;
      }
    }
    return s;
  }

  /// k(r) and k'(r) together for r > 0, one pow per term.
  std::pair<double, double> radial_and_slope(double r) const {
    double k = 0.0, kp = 0.0;
    for (const auto& t : terms_) {
      if (t.exponent == 2.0) {
        k += t.coeff * 0.5 * r * r;
        kp += t.coeff * r;
      } else if (t.exponent == 1.0) {
        k += t.coeff * r;
        kp += t.coeff;
      } else if (t.exponent == 0.0) {
        k += t.coeff * std::log(r);
        kp += t.coeff / r;
      } else {
        const double p = std::pow(r, t.exponent - 1.0);
        k += t.coeff * r * p / t.exponent;
        kp += t.coeff * p;
      }
    }
    return {k, kp};
  }

  template <std::size_t Dim>
  double eval(const Vec<Dim>& x) const {
    return eval_radial(norm(x));
  }

  /// k'(r)/r, the factor with grad K(x) = (k'(r)/r) x. Only for r > 0.
  double grad_factor(double r) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.exponent == 2.0)
        s += t.coeff;
      else if (t.exponent == 1.0)
        s += t.coeff / r;
      else if (t.exponent == 0.0)
        s += t.coeff / (r * r);
      else
        s += t.coeff * std::pow(r, t.exponent - 2.0);
    }
    return s;
  }

  /// grad K(x), with grad K(0) := 0.
  template <std::size_t Dim>
  Vec<Dim> grad(const Vec<Dim>& x) const {
    if constexpr (Dim == 1) {
      const double r = std::fabs(x[0]);
      if (r == 0.0) return {0.0};
      // k'(r) carries the sign of x exactly.
      double kp = 0.0;
      for (const auto& t : terms_) {
        if (t.exponent == 2.0)
          kp += t.coeff * r;
        else if (t.exponent == 1.0)
          kp += t.coeff;
        else if (t.exponent == 0.0)
          kp += t.coeff / r;
        else
          kp += t.coeff * std::pow(r, t.exponent - 1.0);
      }
      return {x[0] < 0.0 ? -kp : kp};
    } else {
      const double r = norm(x);
      if (r == 0.0) return Vec<Dim>{};
      return grad_factor(r) * x;
    }
  }

 private:
  InteractionKernel(std::vector<KernelTerm> terms, int dim, bool conforming)
      : terms_(std::move(terms)), dim_(dim), conforming_(conforming) {}

  std::vector<KernelTerm> terms_;
  int dim_;
  bool conforming_;
};

/// sum_j w_j grad K(x - x_j) at each query, skipping x_j == x exactly.
template <std::size_t Dim>
std::vector<Vec<Dim>> conv_grad(const InteractionKernel& kernel,
                                std::span<const Vec<Dim>> positions,
                                std::span<const double> weights,
                                std::span<const Vec<Dim>> queries) {
  std::vector<Vec<Dim>> out(queries.size(), Vec<Dim>{});
  for (std::size_t q = 0; q < queries.size(); ++q) {
    Vec<Dim> acc{};
    for (std::size_t j = 0; j < positions.size(); ++j) {
      if (positions[j] == queries[q]) continue;
      acc += weights[j] * kernel.grad(queries[q] - positions[j]);
    }
    out[q] = acc;
  }
  return out;
}

}  // namespace slowdiff
