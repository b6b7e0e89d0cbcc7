#pragma once

// One-pass feature screening over a labeled stream.
//
//   ScreenerConfig cfg;
//   cfg.method = Method::kMutualInfo;
//   Engine engine(cfg);
//   engine.observe_batch(samples);      // any number of times
//   ScoreVector s = engine.scores();    // on demand, non-destructive
//   Ranking r = rank(s);
//
// Mean-variance methods keep per-class running moments per feature;
// bin-count methods keep one quantile sketch per feature and class. Sparse
// mode touches only explicit entries and reconstructs the implicit zeros at
// scoring time (plain zero counts, or faded weights recovered from the
// universal weight map when adapting).

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamscreen/discretizer.hpp"
#include "streamscreen/meanvar.hpp"

namespace streamscreen {

enum class Method { kTScore, kFisher, kGini, kChiSquare, kMutualInfo };

const char* method_name(Method m) noexcept;
// Accepts the canonical names plus the aliases t, mi, chi2.
Method parse_method(std::string_view name);
bool is_bincount(Method m) noexcept;
bool higher_is_better(Method m) noexcept;

struct ScreenerConfig {
  Method method = Method::kMutualInfo;
  double epsilon = 0.001;          // bin-count methods only
  std::size_t k_bins = 5;          // bin-count methods only
  std::optional<double> alpha;     // fading factor; set to enable adaptation
  std::size_t minibatch = 250;
  bool sparse = false;
  std::size_t feature_count = 0;   // 0: learn from the data (sparse streams may grow)
  std::size_t threads = 1;         // feature-sharded workers for batches and scoring

  // Throws ConfigError on out-of-range settings.
  void validate() const;
};

struct SparseEntry {
  std::size_t index = 0;  // 0-based
  double value = 0.0;
};

struct Sample {
  std::size_t label = 0;
  bool is_sparse = false;
  std::vector<double> dense;
  std::vector<SparseEntry> sparse;  // strictly increasing indices

  static Sample make_dense(std::size_t label, std::vector<double> values);
  static Sample make_sparse(std::size_t label, std::vector<SparseEntry> entries);
};

struct ScoreVector {
  std::vector<double> scores;
  Method method = Method::kMutualInfo;
  bool higher_is_better = true;
};

struct Ranking {
  std::vector<std::size_t> order;    // feature indices, most important first
  std::vector<std::size_t> rank_of;  // 1-based rank per feature
  std::vector<std::size_t> nan_features;
};

// Stable: ties keep the lower feature index first. NaN scores go last.
Ranking rank(const ScoreVector& scores);

// First k entries of the ranking order. 1 <= k <= p.
std::vector<std::size_t> select_top_k(const Ranking& ranking, std::size_t k);

class Engine {
 public:
  explicit Engine(ScreenerConfig config);
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  void observe(const Sample& sample);

  // Same result, bit for bit, as observing each sample in order.
  // samples.size() must not exceed config().minibatch.
  void observe_batch(std::span<const Sample> samples);

  // Throws DegenerateScore before any sample or with fewer than two classes
  // (T-score: other than exactly two).
  ScoreVector scores() const;

  const ScreenerConfig& config() const noexcept { return config_; }
  std::size_t feature_count() const noexcept;
  std::uint64_t samples_seen() const noexcept { return totals_.time(); }
  std::size_t classes() const noexcept { return totals_.classes(); }
  const UniversalWeightMap& class_totals() const noexcept { return totals_; }

  // Per class, the sample weight the feature's state accounts for, implicit
  // zeros included.
  std::vector<double> feature_class_weights(std::size_t feature) const;
  // Bins x classes table of a feature at the current time (bin-count methods).
  BinTable feature_table(std::size_t feature) const;

  // Per class, the number of values explicitly folded into the feature's state.
  std::vector<double> explicit_points(std::size_t feature) const;

  void save(std::ostream& out) const;
  static Engine load(std::istream& in);

  struct Backend;

 private:
  void prepare(const Sample& sample);

  ScreenerConfig config_;
  UniversalWeightMap totals_;
  std::unique_ptr<Backend> backend_;
};

}  // namespace streamscreen
