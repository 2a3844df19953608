#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

extern "C" void dgbsv_(const int* n, const int* kl, const int* ku, const int* nrhs, double* ab,
                       const int* ldab, int* ipiv, double* b, const int* ldb, int* info);

namespace slowdiff {

/// Square band matrix in LAPACK general-band layout, solved by dgbsv
/// (LU with partial pivoting).
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(ld_ * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t lower() const noexcept { return kl_; }
  std::size_t upper() const noexcept { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const noexcept {
    return j + kl_ >= i && i + ku_ >= j;
  }

  double& operator()(std::size_t i, std::size_t j) { return ab_[j * ld_ + kl_ + ku_ + i - j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? ab_[j * ld_ + kl_ + ku_ + i - j] : 0.0;
  }

  /// Solves A x = rhs. The matrix is left untouched.
  std::vector<double> solve(std::vector<double> rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("banded solve: size mismatch");
    auto lu = ab_;
    std::vector<int> ipiv(n_);
    const int n = static_cast<int>(n_), kl = static_cast<int>(kl_), ku = static_cast<int>(ku_);
    const int ld = static_cast<int>(ld_), nrhs = 1;
    int info = 0;
    dgbsv_(&n, &kl, &ku, &nrhs, lu.data(), &ld, ipiv.data(), rhs.data(), &n, &info);
    if (info != 0) throw std::runtime_error("banded solve: dgbsv info " + std::to_string(info));
    return rhs;
  }

 private:
  std::size_t n_, kl_, ku_, ld_;
  std::vector<double> ab_;
};

}  // namespace slowdiff
