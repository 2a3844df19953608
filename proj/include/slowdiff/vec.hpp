#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace slowdiff {

template <std::size_t Dim>
using Vec = std::array<double, Dim>;

template <std::size_t Dim>
constexpr Vec<Dim> operator-(const Vec<Dim>& a, const Vec<Dim>& b) {
  Vec<Dim> r{};
  for (std::size_t k = 0; k < Dim; ++k) r[k] = a[k] - b[k];
  return r;
}

template <std::size_t Dim>
constexpr Vec<Dim> operator+(const Vec<Dim>& a, const Vec<Dim>& b) {
  Vec<Dim> r{};
  for (std::size_t k = 0; k < Dim; ++k) r[k] = a[k] + b[k];
  return r;
}

template <std::size_t Dim>
constexpr Vec<Dim> operator*(double s, const Vec<Dim>& a) {
  Vec<Dim> r{};
  for (std::size_t k = 0; k < Dim; ++k) r[k] = s * a[k];
  return r;
}

template <std::size_t Dim>
constexpr Vec<Dim>& operator+=(Vec<Dim>& a, const Vec<Dim>& b) {
  for (std::size_t k = 0; k < Dim; ++k) a[k] += b[k];
  return a;
}

template <std::size_t Dim>
constexpr Vec<Dim>& operator-=(Vec<Dim>& a, const Vec<Dim>& b) {
  for (std::size_t k = 0; k < Dim; ++k) a[k] -= b[k];
  return a;
}

template <std::size_t Dim>
constexpr double norm_sq(const Vec<Dim>& a) {
  double s = 0.0;
  for (std::size_t k = 0; k < Dim; ++k) s += a[k] * a[k];
  return s;
}

template <std::size_t Dim>
inline double norm(const Vec<Dim>& a) {
  if constexpr (Dim == 1) return std::fabs(a[0]);
  return std::sqrt(norm_sq(a));
}

}  // namespace slowdiff
