#include "kernels_impl.hpp"

#if defined(STREAMSCREEN_HAVE_NEON)

#include <arm_neon.h>

namespace streamscreen::simd::neon {
namespace {

void affine(double* y, double a, const double* x, double b, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    float64x2_t vx = vld1q_f64(x + i);
    vst1q_f64(y + i, vaddq_f64(vmulq_f64(va, vy), vmulq_f64(vb, vx)));
  }
  for (; i < n; ++i) {
    y[i] = a * y[i] + b * x[i];
  }
}

void affine_sq(double* y, double a, const double* x, double b, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    float64x2_t vx = vld1q_f64(x + i);
    float64x2_t sq = vmulq_f64(vx, vx);
    vst1q_f64(y + i, vaddq_f64(vmulq_f64(va, vy), vmulq_f64(vb, sq)));
  }
  for (; i < n; ++i) {
    y[i] = a * y[i] + b * (x[i] * x[i]);
  }
}

void scale(double* y, double f, std::size_t n) {
  const float64x2_t vf = vdupq_n_f64(f);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vmulq_f64(vld1q_f64(y + i), vf));
  }
  for (; i < n; ++i) {
    y[i] *= f;
  }
}

void scale_tail3(double* data, double f, std::size_t records) {
  const double lo[2] = {1.0, f};
  const float64x2_t vlo = vld1q_f64(lo);
  const float64x2_t vf = vdupq_n_f64(f);
  for (std::size_t r = 0; r < records; ++r) {
    double* rec = data + 4 * r;
    vst1q_f64(rec, vmulq_f64(vld1q_f64(rec), vlo));
    vst1q_f64(rec + 2, vmulq_f64(vld1q_f64(rec + 2), vf));
  }
}

// Two 2-lane accumulators emulate the 4-lane association of the scalar path.
std::pair<double, double> sum_sumsq(const double* x, std::size_t n) {
  float64x2_t s01 = vdupq_n_f64(0.0);
  float64x2_t s23 = vdupq_n_f64(0.0);
  float64x2_t q01 = vdupq_n_f64(0.0);
  float64x2_t q23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t a = vld1q_f64(x + i);
    float64x2_t b = vld1q_f64(x + i + 2);
    s01 = vaddq_f64(s01, a);
    s23 = vaddq_f64(s23, b);
    q01 = vaddq_f64(q01, vmulq_f64(a, a));
    q23 = vaddq_f64(q23, vmulq_f64(b, b));
  }
  double sum = (vgetq_lane_f64(s01, 0) + vgetq_lane_f64(s01, 1)) +
               (vgetq_lane_f64(s23, 0) + vgetq_lane_f64(s23, 1));
  double sq = (vgetq_lane_f64(q01, 0) + vgetq_lane_f64(q01, 1)) +
              (vgetq_lane_f64(q23, 0) + vgetq_lane_f64(q23, 1));
  for (; i < n; ++i) {
    sum += x[i];
    sq += x[i] * x[i];
  }
  return {sum, sq};
}

constexpr KernelTable kTable{affine, affine_sq, scale, scale_tail3, sum_sumsq};

}  // namespace

const KernelTable& table() noexcept { return kTable; }

}  // namespace streamscreen::simd::neon

#endif
