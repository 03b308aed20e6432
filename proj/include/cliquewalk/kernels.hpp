#pragma once

#include <cstddef>

// Data-parallel inner loops used by the numeric lanes: dense matrix product
// with subtractive truncation, and the add/sub/product primitives of the
// inclusion-exclusion permanent. Each kernel has a scalar reference
// implementation and an AVX2 variant; the two are bit-identical on the same
// inputs (the scalar code mirrors the vector accumulation order), which the
// test suite asserts. The active backend is selected once at runtime.

namespace cliquewalk::kern {

/// c = trunc(a * b), where trunc(y) = floor(max(0, y - margin) * scale) * inv_scale.
/// a is m x k (row stride sa), b is k x n (row stride sb), c is m x n (row
/// stride sc). scale must be a power of two with inv_scale = 1/scale so the
/// scaling steps are exact. margin >= 0 is subtracted before truncation to
/// keep results below the exact product under accumulated rounding.
using matmul_trunc_fn = void (*)(const double* a, std::size_t sa,
                                 const double* b, std::size_t sb,
                                 double* c, std::size_t sc,
                                 std::size_t m, std::size_t k, std::size_t n,
                                 double scale, double inv_scale, double margin);

/// Dot product with four-lane blocked accumulation.
using dot_fn = double (*)(const double* a, const double* b, std::size_t len);

/// acc[i] += x[i]  /  acc[i] -= x[i]
using vec_axpy_fn = void (*)(double* acc, const double* x, std::size_t len);

/// Product reduction with four-lane blocking.
using prod_fn = double (*)(const double* v, std::size_t len);

struct Backend {
  const char* name;
  matmul_trunc_fn matmul_trunc;
  dot_fn dot;
  vec_axpy_fn vec_add;
  vec_axpy_fn vec_sub;
  prod_fn prod;
};

const Backend& scalar_backend();

/// AVX2+FMA backend, or nullptr when the host CPU lacks the features.
const Backend* avx2_backend();

/// The backend used by the rest of the project (AVX2 when available).
const Backend& active_backend();

}  // namespace cliquewalk::kern
