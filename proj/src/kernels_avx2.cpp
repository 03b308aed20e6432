#include "cliquewalk/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <cmath>
#include <immintrin.h>

// AVX2+FMA kernels. Per-element accumulation chains match the scalar
// reference (strict k-order fma, lane reductions paired (0+2)+(1+3)), so
// both backends produce bit-identical results.

namespace cliquewalk::kern {
namespace {

inline double reduce_add(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);   // lanes 0,1
  __m128d hi = _mm256_extractf128_pd(v, 1); // lanes 2,3
  __m128d s = _mm_add_pd(lo, hi);           // [0+2, 1+3]
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

inline double reduce_mul(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_mul_pd(lo, hi);           // [0*2, 1*3]
  return _mm_cvtsd_f64(s) * _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

void matmul_trunc_avx2(const double* a, std::size_t sa,
                       const double* b, std::size_t sb,
                       double* c, std::size_t sc,
                       std::size_t m, std::size_t k, std::size_t n,
                       double scale, double inv_scale, double margin) {
  const std::size_t n4 = n - n % 4;
  const __m256d vmargin = _mm256_set1_pd(margin);
  const __m256d vscale = _mm256_set1_pd(scale);
  const __m256d vinv = _mm256_set1_pd(inv_scale);
  const __m256d vzero = _mm256_setzero_pd();
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * sc;
    for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    const double* arow = a + i * sa;
    for (std::size_t t = 0; t < k; ++t) {
      const __m256d aik = _mm256_set1_pd(arow[t]);
      const double* brow = b + t * sb;
      for (std::size_t j = 0; j < n4; j += 4) {
        __m256d acc = _mm256_loadu_pd(crow + j);
        acc = _mm256_fmadd_pd(aik, _mm256_loadu_pd(brow + j), acc);
        _mm256_storeu_pd(crow + j, acc);
      }
      for (std::size_t j = n4; j < n; ++j) {
        crow[j] = std::fma(arow[t], brow[j], crow[j]);
      }
    }
    for (std::size_t j = 0; j < n4; j += 4) {
      __m256d y = _mm256_sub_pd(_mm256_loadu_pd(crow + j), vmargin);
      y = _mm256_max_pd(y, vzero);
      y = _mm256_mul_pd(_mm256_floor_pd(_mm256_mul_pd(y, vscale)), vinv);
      _mm256_storeu_pd(crow + j, y);
    }
    for (std::size_t j = n4; j < n; ++j) {
      double y = crow[j] - margin;
      crow[j] = y <= 0.0 ? 0.0 : std::floor(y * scale) * inv_scale;
    }
  }
}

double dot_avx2(const double* a, const double* b, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t blocks = len / 4;
  for (std::size_t i = 0; i < blocks; ++i) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + 4 * i), _mm256_loadu_pd(b + 4 * i), acc);
  }
  double r = reduce_add(acc);
  for (std::size_t i = blocks * 4; i < len; ++i) r = std::fma(a[i], b[i], r);
  return r;
}

void vec_add_avx2(double* acc, const double* x, std::size_t len) {
  std::size_t len4 = len - len % 4;
  for (std::size_t i = 0; i < len4; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
  }
  for (std::size_t i = len4; i < len; ++i) acc[i] += x[i];
}

void vec_sub_avx2(double* acc, const double* x, std::size_t len) {
  std::size_t len4 = len - len % 4;
  for (std::size_t i = 0; i < len4; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_sub_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
  }
  for (std::size_t i = len4; i < len; ++i) acc[i] -= x[i];
}

double prod_avx2(const double* v, std::size_t len) {
  __m256d acc = _mm256_set1_pd(1.0);
  std::size_t blocks = len / 4;
  for (std::size_t i = 0; i < blocks; ++i) {
    acc = _mm256_mul_pd(acc, _mm256_loadu_pd(v + 4 * i));
  }
  double r = reduce_mul(acc);
  for (std::size_t i = blocks * 4; i < len; ++i) r *= v[i];
  return r;
}

const Backend kAvx2Backend{
    "avx2", matmul_trunc_avx2, dot_avx2, vec_add_avx2, vec_sub_avx2, prod_avx2};

}  // namespace

const Backend* avx2_backend() {
  static const Backend* backend = []() -> const Backend* {
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
      return &kAvx2Backend;
    }
    return nullptr;
  }();
  return backend;
}

}  // namespace cliquewalk::kern

#else  // non-x86 hosts fall back to the scalar backend

namespace cliquewalk::kern {
const Backend* avx2_backend() { return nullptr; }
}  // namespace cliquewalk::kern

#endif

namespace cliquewalk::kern {

const Backend& active_backend() {
  static const Backend& backend = avx2_backend() ? *avx2_backend() : scalar_backend();
  return backend;
}

}  // namespace cliquewalk::kern
