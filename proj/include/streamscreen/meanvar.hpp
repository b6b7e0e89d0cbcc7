#pragma once

// Running class-conditional moments and the two mean-variance criteria.
//
// Without fading, each class keeps the running mean and running mean of
// squares of the values it has seen. With fading factor alpha, the same
// slots hold the discounted sums  mu <- alpha * mu + x  and
// MS <- alpha * MS + x^2; time anchors let a slot skip the steps in which it
// was not touched and catch up with one alpha^gap factor. Class sample totals
// (plain counts or discounted counts) are shared by every feature.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace streamscreen {

// Per-class totals M_{t,c} = a * M_{t-1,c} + [label_t == c], with a = alpha
// under fading and a = 1 otherwise (plain counts). Classes are discovered as
// labels arrive.
class UniversalWeightMap {
 public:
  explicit UniversalWeightMap(std::optional<double> alpha = std::nullopt);

  void observe(std::size_t cls);
  void ensure_classes(std::size_t count);

  std::uint64_t time() const noexcept { return time_; }
  std::size_t classes() const noexcept { return totals_.size(); }
  std::optional<double> alpha() const noexcept { return alpha_; }
  double total(std::size_t cls) const { return cls < totals_.size() ? totals_[cls] : 0.0; }
  const std::vector<double>& totals() const noexcept { return totals_; }

  // alpha^steps, or 1 without fading.
  double decay(std::uint64_t steps) const;

  // Discounted weight of class-cls arrivals in (anchor_time, time()]:
  // M_{t,c} - M_{a,c} * alpha^(t - a). Residue below rounding noise is 0.
  double recovered_since(std::size_t cls, double anchor_total, std::uint64_t anchor_time) const;

  void restore(std::uint64_t time, std::vector<double> totals);

 private:
  std::optional<double> alpha_;
  std::uint64_t time_ = 0;
  std::vector<double> totals_;
};

struct ClassMoments {
  double count = 0.0;
  double mean = 0.0;
  double mean_sq = 0.0;

  // Population variance mean_sq - mean^2; cancellation residue is clamped to 0.
  double variance() const noexcept;
};

enum class StatsMode { kPlain, kSparse, kAdaptive, kSparseAdaptive };

bool is_adaptive(StatsMode mode) noexcept;

// Moments of one feature, per class.
//
// kPlain/kSparse: slots hold running sums of x and x^2; moments divide by
//   the class total n_c at query time, so a sparse feature's implicit zeros
//   count without being visited.
// kAdaptive/kSparseAdaptive: mean <- alpha^(now - last) mean + x, i.e. the
//   catch-up penalty alpha^(now - last - 1) followed by one fading step.
class ClassStats {
 public:
  ClassStats(StatsMode mode, std::optional<double> alpha = std::nullopt);

  // Folds an explicit value for class cls at sample time `now` (1-based; the
  // time of the sample carrying x).
  void update(std::size_t cls, double x, std::uint64_t now);

  // Moments at the totals' current time.
  ClassMoments moments(std::size_t cls, const UniversalWeightMap& totals) const;

  StatsMode mode() const noexcept { return mode_; }
  std::size_t classes() const noexcept { return mean_.size(); }
  double raw_mean(std::size_t cls) const { return mean_.at(cls); }
  double raw_mean_sq(std::size_t cls) const { return mean_sq_.at(cls); }
  double explicit_count(std::size_t cls) const { return seen_.at(cls); }
  std::uint64_t last_seen(std::size_t cls) const { return last_.at(cls); }

  // Snapshot support: raw per-class slots.
  void restore(std::vector<double> mean, std::vector<double> mean_sq, std::vector<double> seen,
               std::vector<std::uint64_t> last);

 private:
  void grow(std::size_t cls);

  StatsMode mode_;
  std::optional<double> alpha_;
  std::vector<double> mean_;
  std::vector<double> mean_sq_;
  std::vector<double> seen_;
  std::vector<std::uint64_t> last_;
};

// Coefficients (a, b) of the update slot <- a * slot + b * x used by both
// ClassStats and the vectorized dense path. `gap` is the steps since the
// slot was last touched.
struct UpdateCoefficients {
  double a;
  double b;
};
UpdateCoefficients plain_coefficients() noexcept;
UpdateCoefficients fading_coefficients(double alpha, std::uint64_t gap);

// Query-time moments from raw slots (shared by ClassStats and the dense path).
// `seen` is the explicit count, `last` the time of the last update.
ClassMoments slot_moments(double raw_mean, double raw_mean_sq, double seen, std::uint64_t last,
                          bool fading, const UniversalWeightMap& totals, std::size_t cls);

// |mu1 - mu2| / sqrt(var1/n1 + var2/n2). Zero denominator: +inf when the
// means differ, 0 when they agree.
double t_score(const ClassMoments& c1, const ClassMoments& c2);

// sum_c n_c (mu_c - mu)^2 / sum_c n_c var_c with mu the pooled mean. Same
// zero-denominator convention as t_score. Requires at least two classes.
double fisher_score(std::span<const ClassMoments> classes);

}  // namespace streamscreen
