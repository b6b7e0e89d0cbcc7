#include "streamscreen/meanvar.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "streamscreen/errors.hpp"

namespace streamscreen {
namespace {

// Relative size below which a difference of two accumulated quantities is
// indistinguishable from rounding.
constexpr double kCancellation = 64.0 * DBL_EPSILON;

void check_alpha(std::optional<double> alpha) {
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) {
    throw ConfigError("fading factor must lie in (0, 1)");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

UniversalWeightMap::UniversalWeightMap(std::optional<double> alpha) : alpha_(alpha) {
  check_alpha(alpha);
}

void UniversalWeightMap::ensure_classes(std::size_t count) {
  if (totals_.size() < count) {
    totals_.resize(count, 0.0);
  }
}

void UniversalWeightMap::observe(std::size_t cls) {
  ensure_classes(cls + 1);
  ++time_;
  if (alpha_) {
    const double a = *alpha_;
    for (double& m : totals_) {
      m *= a;
    }
  }
  totals_[cls] += 1.0;
}

double UniversalWeightMap::decay(std::uint64_t steps) const {
  if (!alpha_ || steps == 0) {
    return 1.0;
  }
  return std::pow(*alpha_, static_cast<double>(steps));
}

double UniversalWeightMap::recovered_since(std::size_t cls, double anchor_total,
                                           std::uint64_t anchor_time) const {
  const double now = total(cls);
  const double r = now - anchor_total * decay(time_ - anchor_time);
  if (r <= 1e-12 * now) {
    return 0.0;
  }
  return r;
}

void UniversalWeightMap::restore(std::uint64_t time, std::vector<double> totals) {
  time_ = time;
  totals_ = std::move(totals);
}

// ---------------------------------------------------------------------------

double ClassMoments::variance() const noexcept {
  double v = mean_sq - mean * mean;
  if (v <= kCancellation * std::abs(mean_sq)) {
    return 0.0;
  }
  return v;
}

bool is_adaptive(StatsMode mode) noexcept {
  return mode == StatsMode::kAdaptive || mode == StatsMode::kSparseAdaptive;
}

UpdateCoefficients plain_coefficients() noexcept { return {1.0, 1.0}; }

UpdateCoefficients fading_coefficients(double alpha, std::uint64_t gap) {
  return {gap == 1 ? alpha : std::pow(alpha, static_cast<double>(gap)), 1.0};
}

ClassStats::ClassStats(StatsMode mode, std::optional<double> alpha) : mode_(mode), alpha_(alpha) {
  if (is_adaptive(mode) && !alpha) {
    throw ConfigError("adaptive statistics need a fading factor");
  }
  if (!is_adaptive(mode)) {
    alpha_.reset();
  }
  check_alpha(alpha_);
}

void ClassStats::grow(std::size_t cls) {
  if (cls >= mean_.size()) {
    mean_.resize(cls + 1, 0.0);
    mean_sq_.resize(cls + 1, 0.0);
    seen_.resize(cls + 1, 0.0);
    last_.resize(cls + 1, 0);
  }
}

void ClassStats::update(std::size_t cls, double x, std::uint64_t now) {
  grow(cls);
  UpdateCoefficients k{};
  if (alpha_) {
    if (now <= last_[cls] && seen_[cls] > 0.0) {
      throw InvalidArgument("class statistics updated twice at one time step");
    }
    k = fading_coefficients(*alpha_, now - last_[cls]);
  } else {
    k = plain_coefficients();
  }
  mean_[cls] = k.a * mean_[cls] + k.b * x;
  mean_sq_[cls] = k.a * mean_sq_[cls] + k.b * (x * x);
  seen_[cls] += 1.0;
  last_[cls] = now;
}

void ClassStats::restore(std::vector<double> mean, std::vector<double> mean_sq,
                         std::vector<double> seen, std::vector<std::uint64_t> last) {
  const std::size_t n = mean.size();
  if (mean_sq.size() != n || seen.size() != n || last.size() != n) {
    throw InputError("snapshot corrupt: class statistics");
  }
  mean_ = std::move(mean);
  mean_sq_ = std::move(mean_sq);
  seen_ = std::move(seen);
  last_ = std::move(last);
}

ClassMoments ClassStats::moments(std::size_t cls, const UniversalWeightMap& totals) const {
  if (cls >= mean_.size()) {
    return ClassMoments{totals.total(cls), 0.0, 0.0};
  }
  return slot_moments(mean_[cls], mean_sq_[cls], seen_[cls], last_[cls], alpha_.has_value(), totals,
                      cls);
}

ClassMoments slot_moments(double raw_mean, double raw_mean_sq, double seen, std::uint64_t last,
                          bool fading, const UniversalWeightMap& totals, std::size_t cls) {
  ClassMoments m;
  m.count = totals.total(cls);
  if (!(m.count > 0.0) || !(seen > 0.0)) {
    return m;
  }
  if (fading) {
    const double g = totals.decay(totals.time() - last);
    m.mean = raw_mean * g / m.count;
    m.mean_sq = raw_mean_sq * g / m.count;
  } else {
    m.mean = raw_mean / m.count;
    m.mean_sq = raw_mean_sq / m.count;
  }
  return m;
}

// ---------------------------------------------------------------------------

double t_score(const ClassMoments& c1, const ClassMoments& c2) {
  if (!(c1.count > 0.0) || !(c2.count > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double diff = std::abs(c1.mean - c2.mean);
  if (diff <= kCancellation * std::max(std::abs(c1.mean), std::abs(c2.mean))) {
    diff = 0.0;
  }
  const double den = c1.variance() / c1.count + c2.variance() / c2.count;
  if (den <= 0.0) {
    return diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return diff / std::sqrt(den);
}

double fisher_score(std::span<const ClassMoments> classes) {
  if (classes.size() < 2) {
    throw DegenerateScore("Fisher score needs at least two classes");
  }
  double n = 0.0;
  double weighted = 0.0;
  double scale = 0.0;
  for (const auto& c : classes) {
    n += c.count;
    weighted += c.count * c.mean;
    scale = std::max(scale, std::abs(c.mean));
  }
  if (!(n > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double pooled = weighted / n;
  double num = 0.0;
  double den = 0.0;
  bool separated = false;
  for (const auto& c : classes) {
    double d = c.mean - pooled;
    if (c.count > 0.0 && std::abs(d) > kCancellation * scale) {
      separated = true;
    }
    num += c.count * d * d;
    den += c.count * c.variance();
  }
  if (!separated) {
    num = 0.0;
  }
  if (den <= 0.0) {
    return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return num / den;
}

}  // namespace streamscreen
