#include "cliquewalk/kernels.hpp"

#include <cmath>

// Scalar reference kernels. These mirror the AVX2 accumulation order exactly:
// every output element is accumulated in strict k-order via fused
// multiply-add, block reductions pair lanes as (0+2)+(1+3), and truncation
// uses the same floor/scale sequence. Keeping the orders identical makes the
// backends bit-comparable, not merely approximately equal.

namespace cliquewalk::kern {
namespace {

inline double trunc_entry(double y, double scale, double inv_scale, double margin) {
  y -= margin;
  if (y <= 0.0) return 0.0;
  return std::floor(y * scale) * inv_scale;
}

void matmul_trunc_scalar(const double* a, std::size_t sa,
                         const double* b, std::size_t sb,
                         double* c, std::size_t sc,
                         std::size_t m, std::size_t k, std::size_t n,
                         double scale, double inv_scale, double margin) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * sc;
    for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    const double* arow = a + i * sa;
    for (std::size_t t = 0; t < k; ++t) {
      const double aik = arow[t];
      const double* brow = b + t * sb;
      for (std::size_t j = 0; j < n; ++j) {
        crow[j] = std::fma(aik, brow[j], crow[j]);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      crow[j] = trunc_entry(crow[j], scale, inv_scale, margin);
    }
  }
}

double dot_scalar(const double* a, const double* b, std::size_t len) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t blocks = len / 4;
  for (std::size_t i = 0; i < blocks; ++i) {
    for (int l = 0; l < 4; ++l) {
      acc[l] = std::fma(a[4 * i + l], b[4 * i + l], acc[l]);
    }
  }
  double r = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (std::size_t i = blocks * 4; i < len; ++i) r = std::fma(a[i], b[i], r);
  return r;
}

void vec_add_scalar(double* acc, const double* x, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) acc[i] += x[i];
}

void vec_sub_scalar(double* acc, const double* x, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) acc[i] -= x[i];
}

double prod_scalar(const double* v, std::size_t len) {
  double acc[4] = {1.0, 1.0, 1.0, 1.0};
  std::size_t blocks = len / 4;
  for (std::size_t i = 0; i < blocks; ++i) {
    for (int l = 0; l < 4; ++l) acc[l] *= v[4 * i + l];
  }
  double r = (acc[0] * acc[2]) * (acc[1] * acc[3]);
  for (std::size_t i = blocks * 4; i < len; ++i) r *= v[i];
  return r;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend{
      "scalar", matmul_trunc_scalar, dot_scalar, vec_add_scalar, vec_sub_scalar,
      prod_scalar};
  return backend;
}

}  // namespace cliquewalk::kern
