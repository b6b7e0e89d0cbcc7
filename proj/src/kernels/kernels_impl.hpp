#pragma once

#include <cstddef>
#include <utility>

namespace streamscreen::simd {

struct KernelTable {
  void (*affine)(double* y, double a, const double* x, double b, std::size_t n);
  void (*affine_sq)(double* y, double a, const double* x, double b, std::size_t n);
  void (*scale)(double* y, double f, std::size_t n);
  void (*scale_tail3)(double* data, double f, std::size_t records);
  std::pair<double, double> (*sum_sumsq)(const double* x, std::size_t n);
};

namespace scalar {
const KernelTable& table() noexcept;
}

#if defined(STREAMSCREEN_HAVE_AVX2)
namespace avx2 {
const KernelTable& table() noexcept;
}
#endif

#if defined(STREAMSCREEN_HAVE_NEON)
namespace neon {
const KernelTable& table() noexcept;
}
#endif

}  // namespace streamscreen::simd
