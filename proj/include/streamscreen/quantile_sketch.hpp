#pragma once

// Weighted epsilon-approximate quantile summary with exact tuple weights.
//
// A SubSummary is a value-sorted run of tuples (v, rmin, rmax, w). Pruning
// reassigns the weight of every dropped tuple to the next kept one, so each
// kept tuple is a tight mini-bin: rmax - rmin == w, and the weights of all
// tuples always add up to the weight that entered the summary. Bin counts are
// then read straight off the tuple weights.
//
// StreamSketch maintains one such summary over an unbounded stream: a buffer
// of recent points, a multi-level set of pruned sub-summaries, and the closed
// summaries of finished sub-streams (sub-stream i holds 2^i / eps points).
// Optional exponential fading discounts older weight by alpha per step.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace streamscreen {

class BinaryWriter;
class BinaryReader;

struct SummaryTuple {
  double value = 0.0;
  double rmin = 0.0;
  double rmax = 0.0;
  double weight = 0.0;

  double mid_rank() const noexcept { return 0.5 * (rmin + rmax); }
  // Lowest rank a value strictly above this tuple can have.
  double rmin_next() const noexcept { return rmin + weight; }
  // Highest rank a value strictly below this tuple can have.
  double rmax_prev() const noexcept { return rmax - weight; }

  friend bool operator==(const SummaryTuple&, const SummaryTuple&) = default;
};

static_assert(sizeof(SummaryTuple) == 4 * sizeof(double));

struct WeightedPoint {
  double value = 0.0;
  double weight = 1.0;
};

class SubSummary {
 public:
  SubSummary() = default;

  // 0-approximate summary of the given points. Equal values are stacked into
  // one tuple. Throws InputError on NaN values or non-positive weights.
  static SubSummary exact(std::span<const WeightedPoint> points);

  // Adopts tuples as-is. Throws InvalidArgument when values are not strictly
  // increasing or a tuple has rmin > rmax or weight <= 0.
  static SubSummary from_tuples(std::vector<SummaryTuple> tuples, double precision);

  const std::vector<SummaryTuple>& tuples() const noexcept { return tuples_; }
  std::size_t size() const noexcept { return tuples_.size(); }
  bool empty() const noexcept { return tuples_.empty(); }
  double precision() const noexcept { return precision_; }
  double total_weight() const noexcept { return total_weight_; }

  // Rank functions extended to every real: estimated weight strictly below v
  // and at-or-below v.
  double rank_below(double v) const noexcept;
  double rank_at_or_below(double v) const noexcept;

  // Multiplies every rank and weight by f (> 0). Used by fading.
  void scale_weights(double f);

  // Largest |rmax - rmin - weight| over all tuples.
  double max_slack() const noexcept;

  friend bool operator==(const SubSummary&, const SubSummary&) = default;

 private:
  friend SubSummary merge(const SubSummary& a, const SubSummary& b);
  friend SubSummary prune(const SubSummary& sub, std::size_t target);
  friend class StreamSketch;

  // Removes tuples whose weight underflowed to zero under fading.
  void drop_vanished();

  std::vector<SummaryTuple> tuples_;
  double precision_ = 0.0;
  double total_weight_ = 0.0;
};

// Index of the tuple the query function selects for position d.
// Requires 0 <= d <= total_weight; throws InvalidArgument otherwise or on an
// empty summary.
std::size_t query_index(const SubSummary& sub, double d);
double query(const SubSummary& sub, double d);

// Keeps at most target + 1 tuples chosen at positions (i-1)/target * w(s),
// i = 1..target+1, and folds the weight of skipped tuples into the next kept
// tuple. A summary that already fits is returned unchanged. target >= 2.
SubSummary prune(const SubSummary& sub, std::size_t target);

// Union of two summaries; precision is the max of the inputs.
SubSummary merge(const SubSummary& a, const SubSummary& b);
SubSummary merge_all(std::span<const SubSummary> parts);

// One tuple per line: value, rmin, rmax, weight (tab-separated).
void dump(std::ostream& out, const SubSummary& sub);

// Layout of the multi-level structure for one sub-stream.
struct SubstreamPlan {
  std::uint64_t index = 0;
  std::uint64_t begin = 0;       // first point (0-based) of this sub-stream
  std::uint64_t end = 0;         // one past its last point
  std::size_t block_size = 0;    // buffer capacity b
  std::size_t level_count = 0;   // L
};

SubstreamPlan plan_substream(double epsilon, std::uint64_t index);

class StreamSketch {
 public:
  // epsilon in (0, 1). alpha, when present, must lie in (0, 1).
  explicit StreamSketch(double epsilon, std::optional<double> alpha = std::nullopt);

  // One arrival: with fading enabled, everything already held decays by one
  // step first. weight > 0; value must not be NaN.
  void insert(double value, double weight = 1.0);

  // Adds a single point (0, zero_weight) without a fading step. The weight is
  // taken as already discounted to the current clock.
  void inject_zeros(double zero_weight);

  // Moves the fading clock forward without an arrival. No-op without fading.
  void advance(std::uint64_t steps);
  void advance_to(std::uint64_t clock);

  // Applies the deferred penalty alpha^k to every level and closed summary.
  // Runs automatically on every buffer flush. No-op without fading.
  void decay_flush();

  // Summary of everything seen so far, discounted to the current clock.
  // Does not modify the sketch.
  SubSummary finalize() const;

  double epsilon() const noexcept { return epsilon_; }
  std::optional<double> alpha() const noexcept { return alpha_; }
  std::uint64_t points_seen() const noexcept { return points_seen_; }
  std::uint64_t clock() const noexcept { return clock_; }
  std::uint64_t pending_decay_count() const noexcept { return clock_ - penalized_at_; }
  std::size_t buffer_size() const noexcept { return buffer_.size(); }
  std::size_t block_size() const noexcept { return plan_.block_size; }
  const SubstreamPlan& plan() const noexcept { return plan_; }
  const std::vector<std::optional<SubSummary>>& levels() const noexcept { return levels_; }
  const std::vector<SubSummary>& closed_summaries() const noexcept { return closed_; }

  // Sections for the buffer, each level and each closed summary, separated by
  // blank lines.
  void dump(std::ostream& out) const;

  void write(BinaryWriter& w) const;
  static StreamSketch read(BinaryReader& r);

 private:
  void add_point(double value, double weight);
  void flush();
  void close_substream();
  void start_substream(std::uint64_t index);
  SubSummary buffer_summary() const;
  SubSummary current_substream_summary() const;
  double buffer_scale() const;
  static SubSummary read_summary(BinaryReader& r);

  double epsilon_;
  std::optional<double> alpha_;
  std::uint64_t points_seen_ = 0;
  SubstreamPlan plan_;

  // Buffered weights are stored multiplied by alpha^-(clock - buffer_base_)
  // at insertion so later arrivals need no per-entry decay.
  std::unordered_map<double, double> buffer_;
  std::uint64_t buffer_base_ = 0;

  std::vector<std::optional<SubSummary>> levels_;
  std::vector<SubSummary> closed_;

  std::uint64_t clock_ = 0;
  std::uint64_t penalized_at_ = 0;
};

}  // namespace streamscreen
