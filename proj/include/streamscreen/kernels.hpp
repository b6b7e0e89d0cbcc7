#pragma once

// Data-parallel inner loops used by the screening engine.
//
// Every kernel has a portable scalar reference and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// picked once at startup from the CPU features; STREAMSCREEN_SIMD=scalar|avx2|neon
// overrides the choice. Element-wise kernels perform exactly the same
// IEEE operations in every variant (no fused multiply-add), so their results
// are bit-identical. Only sum_sumsq reassociates and is equal up to rounding.

#include <cstddef>
#include <span>
#include <utility>

namespace streamscreen::simd {

enum class Level { kScalar, kAvx2, kNeon };

const char* level_name(Level level) noexcept;

// True when the running CPU (and the build) can execute the given level.
bool level_supported(Level level) noexcept;

Level active_level() noexcept;

// Overrides the dispatch. Throws InvalidArgument if the level is unsupported.
void set_level(Level level);

// y[i] = a * y[i] + b * x[i]
void affine(std::span<double> y, double a, std::span<const double> x, double b);

// y[i] = a * y[i] + b * (x[i] * x[i])
void affine_sq(std::span<double> y, double a, std::span<const double> x, double b);

// y[i] *= f
void scale(std::span<double> y, double f);

// Records of four doubles {v, r0, r1, r2}: multiplies r0..r2 by f, leaves v.
// `data.size()` must be a multiple of 4.
void scale_tail3(std::span<double> data, double f);

// Returns {sum x[i], sum x[i]^2}.
std::pair<double, double> sum_sumsq(std::span<const double> x);

}  // namespace streamscreen::simd
