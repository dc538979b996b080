#ifndef CDRKIT_LINALG_HPP
#define CDRKIT_LINALG_HPP

#include <cstddef>
#include <vector>

#include "cdrkit/types.hpp"

namespace cdrkit {

using Vec = std::vector<double>;

/// Dense row-major matrix. Just enough linear algebra for small recurrent nets.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// out += m * x
inline void matvec_add(const Mat& m, const Vec& x, Vec& out) {
  if (x.size() != m.cols || out.size() != m.rows) throw Error("matvec_add: shape mismatch");
  const double* row = m.a.data();
  for (std::size_t i = 0; i < m.rows; ++i, row += m.cols) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += row[j] * x[j];
    out[i] += acc;
  }
}

// out += m^T * y
inline void matvec_tadd(const Mat& m, const Vec& y, Vec& out) {
  if (y.size() != m.rows || out.size() != m.cols) throw Error("matvec_tadd: shape mismatch");
  const double* row = m.a.data();
  for (std::size_t i = 0; i < m.rows; ++i, row += m.cols) {
    const double yi = y[i];
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += row[j] * yi;
  }
}

// m += y * x^T
inline void outer_add(Mat& m, const Vec& y, const Vec& x) {
  if (y.size() != m.rows || x.size() != m.cols) throw Error("outer_add: shape mismatch");
  double* row = m.a.data();
  for (std::size_t i = 0; i < m.rows; ++i, row += m.cols) {
    const double yi = y[i];
    for (std::size_t j = 0; j < m.cols; ++j) row[j] += yi * x[j];
  }
}

// y += a * x
inline void axpy(double a, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw Error("axpy: shape mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace cdrkit

#endif  // CDRKIT_LINALG_HPP
