// Compiled with -mavx2 only; callers reach it through the dispatch table
// after a CPUID check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace streamscreen::simd::avx2 {
namespace {

void affine(double* y, double a, const double* x, double b, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    vy = _mm256_add_pd(_mm256_mul_pd(va, vy), _mm256_mul_pd(vb, vx));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) {
    y[i] = a * y[i] + b * x[i];
  }
}

void affine_sq(double* y, double a, const double* x, double b, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d sq = _mm256_mul_pd(vx, vx);
    vy = _mm256_add_pd(_mm256_mul_pd(va, vy), _mm256_mul_pd(vb, sq));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) {
    y[i] = a * y[i] + b * (x[i] * x[i]);
  }
}

void scale(double* y, double f, std::size_t n) {
  const __m256d vf = _mm256_set1_pd(f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), vf));
  }
  for (; i < n; ++i) {
    y[i] *= f;
  }
}

void scale_tail3(double* data, double f, std::size_t records) {
  // Lane 0 holds the tuple value and is multiplied by exactly 1.0.
  const __m256d vf = _mm256_set_pd(f, f, f, 1.0);
  for (std::size_t r = 0; r < records; ++r) {
    double* rec = data + 4 * r;
    _mm256_storeu_pd(rec, _mm256_mul_pd(_mm256_loadu_pd(rec), vf));
  }
}

std::pair<double, double> sum_sumsq(const double* x, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  __m256d q = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    s = _mm256_add_pd(s, v);
    q = _mm256_add_pd(q, _mm256_mul_pd(v, v));
  }
  alignas(32) double sl[4];
  alignas(32) double ql[4];
  _mm256_store_pd(sl, s);
  _mm256_store_pd(ql, q);
  double sum = (sl[0] + sl[1]) + (sl[2] + sl[3]);
  double sq = (ql[0] + ql[1]) + (ql[2] + ql[3]);
  for (; i < n; ++i) {
    sum += x[i];
    sq += x[i] * x[i];
  }
  return {sum, sq};
}

constexpr KernelTable kTable{affine, affine_sq, scale, scale_tail3, sum_sumsq};

}  // namespace

const KernelTable& table() noexcept { return kTable; }

}  // namespace streamscreen::simd::avx2
