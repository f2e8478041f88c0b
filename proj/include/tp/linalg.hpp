#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tp/error.hpp"

namespace tp {

using Vec = std::vector<double>;

// Dense row-major matrix.
template <class Real>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<Real> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Real> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<Real> data() { return data_; }
  std::span<const Real> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

template <class A, class B>
double dot(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

inline double dot(const Vec& a, const Vec& b) {
  return dot(std::span<const double>(a), std::span<const double>(b));
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// dst += scale * src
template <class D, class S>
void axpy(std::span<D> dst, std::span<const S> src, double scale) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += static_cast<D>(scale * src[i]);
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline bool all_finite(std::span<const float> v) {
  for (float x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace tp
