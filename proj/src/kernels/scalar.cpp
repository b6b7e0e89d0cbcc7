#include "kernels_impl.hpp"

namespace streamscreen::simd::scalar {
namespace {

void affine(double* y, double a, const double* x, double b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = a * y[i] + b * x[i];
  }
}

void affine_sq(double* y, double a, const double* x, double b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = a * y[i] + b * (x[i] * x[i]);
  }
}

void scale(double* y, double f, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] *= f;
  }
}

void scale_tail3(double* data, double f, std::size_t records) {
  for (std::size_t r = 0; r < records; ++r) {
    double* rec = data + 4 * r;
    rec[1] *= f;
    rec[2] *= f;
    rec[3] *= f;
  }
}

// Four interleaved accumulators, the same association the vector variants use.
std::pair<double, double> sum_sumsq(const double* x, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  double q[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int k = 0; k < 4; ++k) {
      s[k] += x[i + k];
      q[k] += x[i + k] * x[i + k];
    }
  }
  double sum = (s[0] + s[1]) + (s[2] + s[3]);
  double sq = (q[0] + q[1]) + (q[2] + q[3]);
  for (; i < n; ++i) {
    sum += x[i];
    sq += x[i] * x[i];
  }
  return {sum, sq};
}

constexpr KernelTable kTable{affine, affine_sq, scale, scale_tail3, sum_sumsq};

}  // namespace

const KernelTable& table() noexcept { return kTable; }

}  // namespace streamscreen::simd::scalar
