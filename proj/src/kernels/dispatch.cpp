#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"
#include "streamscreen/errors.hpp"
#include "streamscreen/kernels.hpp"

namespace streamscreen::simd {
namespace {

const KernelTable& table_for(Level level) noexcept {
  switch (level) {
#if defined(STREAMSCREEN_HAVE_AVX2)
    case Level::kAvx2:
      return avx2::table();
#endif
#if defined(STREAMSCREEN_HAVE_NEON)
    case Level::kNeon:
      return neon::table();
#endif
    default:
      return scalar::table();
  }
}

Level detect() noexcept {
  if (const char* env = std::getenv("STREAMSCREEN_SIMD")) {
    std::string_view want(env);
    for (Level l : {Level::kScalar, Level::kAvx2, Level::kNeon}) {
      if (want == level_name(l) && level_supported(l)) {
        return l;
      }
    }
  }
  if (level_supported(Level::kAvx2)) {
    return Level::kAvx2;
  }
  if (level_supported(Level::kNeon)) {
    return Level::kNeon;
  }
  return Level::kScalar;
}

struct State {
  std::atomic<Level> level{detect()};
  std::atomic<const KernelTable*> table{&table_for(level.load())};
};

State& state() noexcept {
  static State s;
  return s;
}

const KernelTable& active() noexcept {
  return *state().table.load(std::memory_order_relaxed);
}

}  // namespace

const char* level_name(Level level) noexcept {
  switch (level) {
    case Level::kAvx2:
      return "avx2";
    case Level::kNeon:
      return "neon";
    default:
      return "scalar";
  }
}

bool level_supported(Level level) noexcept {
  switch (level) {
    case Level::kScalar:
      return true;
    case Level::kAvx2:
#if defined(STREAMSCREEN_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Level::kNeon:
#if defined(STREAMSCREEN_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Level active_level() noexcept { return state().level.load(); }

void set_level(Level level) {
  if (!level_supported(level)) {
    throw InvalidArgument(std::string("SIMD level not supported here: ") +
                          level_name(level));
  }
  state().level.store(level);
  state().table.store(&table_for(level));
}

void affine(std::span<double> y, double a, std::span<const double> x, double b) {
  if (x.size() != y.size()) {
    throw InvalidArgument("affine: length mismatch");
  }
  active().affine(y.data(), a, x.data(), b, y.size());
}

void affine_sq(std::span<double> y, double a, std::span<const double> x, double b) {
  if (x.size() != y.size()) {
    throw InvalidArgument("affine_sq: length mismatch");
  }
  active().affine_sq(y.data(), a, x.data(), b, y.size());
}

void scale(std::span<double> y, double f) { active().scale(y.data(), f, y.size()); }

void scale_tail3(std::span<double> data, double f) {
  if (data.size() % 4 != 0) {
    throw InvalidArgument("scale_tail3: size must be a multiple of 4");
  }
  active().scale_tail3(data.data(), f, data.size() / 4);
}

std::pair<double, double> sum_sumsq(std::span<const double> x) {
  return active().sum_sumsq(x.data(), x.size());
}

}  // namespace streamscreen::simd
