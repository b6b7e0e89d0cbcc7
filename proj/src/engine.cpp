#include "streamscreen/engine.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "streamscreen/bincount_criteria.hpp"
#include "streamscreen/binary_io.hpp"
#include "streamscreen/discretizer.hpp"
#include "streamscreen/errors.hpp"
#include "streamscreen/kernels.hpp"
#include "streamscreen/quantile_sketch.hpp"

namespace streamscreen {
namespace {

constexpr std::uint64_t kMagic = 0x31564e5243535353ULL;  // "SSSCRNV1"
constexpr std::uint64_t kVersion = 1;

// Runs fn(begin, end) over contiguous shards of [0, n).
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 1; t < threads; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  fn(0, std::min(n, chunk));
  for (auto& th : pool) th.join();
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// Faded weight of class-cls arrivals in (anchor_time, now] given the totals
// at `now`. Residue below rounding noise is 0.
double recovered(double now_total, double anchor_total, double decay) {
  const double r = now_total - anchor_total * decay;
  return r <= 1e-12 * now_total ? 0.0 : r;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::kTScore: return "t_score";
    case Method::kFisher: return "fisher";
    case Method::kGini: return "gini";
    case Method::kChiSquare: return "chi_square";
    case Method::kMutualInfo: return "mutual_info";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "t_score" || name == "t") return Method::kTScore;
  if (name == "fisher") return Method::kFisher;
  if (name == "gini") return Method::kGini;
  if (name == "chi_square" || name == "chi2") return Method::kChiSquare;
  if (name == "mutual_info" || name == "mi") return Method::kMutualInfo;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

bool is_bincount(Method m) noexcept {
  return m == Method::kGini || m == Method::kChiSquare || m == Method::kMutualInfo;
}

bool higher_is_better(Method m) noexcept { return m != Method::kGini; }

void ScreenerConfig::validate() const {
  if (is_bincount(method) && !(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
  if (is_bincount(method) && k_bins < 2) {
    throw ConfigError("at least two bins are needed");
  }
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) {
    throw ConfigError("fading factor must lie in (0, 1)");
  }
  if (minibatch == 0) {
    throw ConfigError("minibatch size must be positive");
  }
  if (threads == 0) {
    throw ConfigError("thread count must be positive");
  }
}

Sample Sample::make_dense(std::size_t label, std::vector<double> values) {
  Sample s;
  s.label = label;
  s.dense = std::move(values);
  return s;
}

Sample Sample::make_sparse(std::size_t label, std::vector<SparseEntry> entries) {
  Sample s;
  s.label = label;
  s.is_sparse = true;
  s.sparse = std::move(entries);
  return s;
}

Ranking rank(const ScoreVector& sv) {
  const std::size_t p = sv.scores.size();
  Ranking r;
  r.order.resize(p);
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  const auto& s = sv.scores;
  const bool desc = sv.higher_is_better;
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
    const bool na = std::isnan(s[a]);
    const bool nb = std::isnan(s[b]);
    if (na || nb) return !na && nb;
    return desc ? s[a] > s[b] : s[a] < s[b];
  });
  r.rank_of.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    r.rank_of[r.order[i]] = i + 1;
    if (std::isnan(s[r.order[i]])) r.nan_features.push_back(r.order[i]);
  }
  return r;
}

std::vector<std::size_t> select_top_k(const Ranking& ranking, std::size_t k) {
  if (k == 0 || k > ranking.order.size()) {
    throw InvalidArgument("top-k must lie in [1, p]");
  }
  return {ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(k)};
}

// ---------------------------------------------------------------------------
// Backends. Each sees samples after the engine has validated them, grown the
// feature space and advanced the class totals to the sample's time.

struct Engine::Backend {
  virtual ~Backend() = default;

  virtual void grow_features(std::size_t p, const UniversalWeightMap& totals) = 0;
  virtual void grow_classes(std::size_t classes) = 0;
  // `before` holds the class totals just before this sample.
  virtual void observe(const Sample& s, const std::vector<double>& before,
                       const UniversalWeightMap& totals) = 0;
  virtual bool feature_major() const { return false; }
  // Only for feature_major backends: samples observed at times t0+1, t0+2, ...
  virtual void observe_block(std::span<const Sample>, std::uint64_t, std::size_t) {}
  virtual double score(std::size_t j, Method m, const UniversalWeightMap& totals,
                       std::size_t k_bins) const = 0;
  virtual std::vector<double> weights(std::size_t j, const UniversalWeightMap& totals) const = 0;
  virtual BinTable table(std::size_t, const UniversalWeightMap&, std::size_t) const {
    throw InvalidArgument("bin tables exist only for bin-count methods");
  }
  virtual std::vector<double> explicit_points(std::size_t j) const = 0;
  virtual void write(BinaryWriter& w) const = 0;
  virtual void read(BinaryReader& r) = 0;

  std::size_t p = 0;
};

namespace {

double meanvar_score(Method m, std::span<const ClassMoments> moments) {
  if (m == Method::kTScore) {
    return t_score(moments[0], moments[1]);
  }
  return fisher_score(moments);
}

double bincount_score(Method m, const BinTable& table) {
  switch (m) {
    case Method::kGini: return gini_index(table);
    case Method::kChiSquare: return chi_square(table);
    default: return mutual_information(table);
  }
}

// Dense vectors in, structure-of-arrays slots per class, SIMD updates.
struct MeanVarDense final : Engine::Backend {
  explicit MeanVarDense(std::optional<double> alpha) : alpha(alpha) {}

  void grow_features(std::size_t np, const UniversalWeightMap&) override {
    for (auto& v : mean) v.resize(np, 0.0);
    for (auto& v : mean_sq) v.resize(np, 0.0);
    p = np;
  }

  void grow_classes(std::size_t classes) override {
    while (mean.size() < classes) {
      mean.emplace_back(p, 0.0);
      mean_sq.emplace_back(p, 0.0);
      seen.push_back(0.0);
      last.push_back(0);
    }
  }

  void observe(const Sample& s, const std::vector<double>&,
               const UniversalWeightMap& totals) override {
    const std::size_t c = s.label;
    const std::uint64_t now = totals.time();
    const UpdateCoefficients k =
        alpha ? fading_coefficients(*alpha, now - last[c]) : plain_coefficients();
    std::span<const double> x;
    if (s.is_sparse) {
      scratch.assign(p, 0.0);
      for (const auto& e : s.sparse) scratch[e.index] = e.value;
      x = scratch;
    } else {
      x = s.dense;
    }
    simd::affine(mean[c], k.a, x, k.b);
    simd::affine_sq(mean_sq[c], k.a, x, k.b);
    seen[c] += 1.0;
    last[c] = now;
  }

  double score(std::size_t j, Method m, const UniversalWeightMap& totals,
               std::size_t) const override {
    std::vector<ClassMoments> mom(totals.classes());
    for (std::size_t c = 0; c < mom.size(); ++c) {
      if (c < mean.size()) {
        mom[c] = slot_moments(mean[c][j], mean_sq[c][j], seen[c], last[c], alpha.has_value(),
                              totals, c);
      } else {
        mom[c].count = totals.total(c);
      }
    }
    return meanvar_score(m, mom);
  }

  std::vector<double> weights(std::size_t, const UniversalWeightMap& totals) const override {
    return totals.totals();
  }

  std::vector<double> explicit_points(std::size_t) const override { return seen; }

  void write(BinaryWriter& w) const override {
    w.u64(mean.size());
    for (std::size_t c = 0; c < mean.size(); ++c) {
      w.doubles(mean[c]);
      w.doubles(mean_sq[c]);
    }
    w.doubles(seen);
    w.u64s(last);
  }

  void read(BinaryReader& r) override {
    const std::size_t classes = r.u64();
    mean.assign(classes, {});
    mean_sq.assign(classes, {});
    for (std::size_t c = 0; c < classes; ++c) {
      mean[c] = r.doubles();
      mean_sq[c] = r.doubles();
      if (mean[c].size() != p || mean_sq[c].size() != p) {
        throw InputError("snapshot corrupt: moment arrays");
      }
    }
    seen = r.doubles();
    last = r.u64s();
    if (seen.size() != classes || last.size() != classes) {
      throw InputError("snapshot corrupt: class slots");
    }
  }

  std::optional<double> alpha;
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> mean_sq;
  std::vector<double> seen;
  std::vector<std::uint64_t> last;
  std::vector<double> scratch;
};

// One ClassStats per feature; only explicit entries are touched.
struct MeanVarSparse final : Engine::Backend {
  explicit MeanVarSparse(std::optional<double> alpha)
      : alpha(alpha), mode(alpha ? StatsMode::kSparseAdaptive : StatsMode::kSparse) {}

  void grow_features(std::size_t np, const UniversalWeightMap&) override {
    while (stats.size() < np) stats.emplace_back(mode, alpha);
    p = np;
  }

  void grow_classes(std::size_t) override {}

  void observe(const Sample& s, const std::vector<double>&,
               const UniversalWeightMap& totals) override {
    const std::uint64_t now = totals.time();
    if (s.is_sparse) {
      for (const auto& e : s.sparse) stats[e.index].update(s.label, e.value, now);
    } else {
      for (std::size_t j = 0; j < s.dense.size(); ++j) {
        if (s.dense[j] != 0.0) stats[j].update(s.label, s.dense[j], now);
      }
    }
  }

  double score(std::size_t j, Method m, const UniversalWeightMap& totals,
               std::size_t) const override {
    std::vector<ClassMoments> mom(totals.classes());
    for (std::size_t c = 0; c < mom.size(); ++c) mom[c] = stats[j].moments(c, totals);
    return meanvar_score(m, mom);
  }

  std::vector<double> weights(std::size_t, const UniversalWeightMap& totals) const override {
    return totals.totals();
  }

  std::vector<double> explicit_points(std::size_t j) const override {
    std::vector<double> out(stats[j].classes());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = stats[j].explicit_count(c);
    return out;
  }

  void write(BinaryWriter& w) const override {
    for (const auto& st : stats) {
      const std::size_t classes = st.classes();
      std::vector<double> m(classes), q(classes), n(classes);
      std::vector<std::uint64_t> l(classes);
      for (std::size_t c = 0; c < classes; ++c) {
        m[c] = st.raw_mean(c);
        q[c] = st.raw_mean_sq(c);
        n[c] = st.explicit_count(c);
        l[c] = st.last_seen(c);
      }
      w.doubles(m);
      w.doubles(q);
      w.doubles(n);
      w.u64s(l);
    }
  }

  void read(BinaryReader& r) override {
    stats.clear();
    stats.reserve(p);
    for (std::size_t j = 0; j < p; ++j) {
      ClassStats st(mode, alpha);
      auto m = r.doubles();
      auto q = r.doubles();
      auto n = r.doubles();
      auto l = r.u64s();
      st.restore(std::move(m), std::move(q), std::move(n), std::move(l));
      stats.push_back(std::move(st));
    }
  }

  std::optional<double> alpha;
  StatsMode mode;
  std::vector<ClassStats> stats;
};

// One quantile sketch per feature and class.
struct BinCount final : Engine::Backend {
  BinCount(double eps, std::optional<double> alpha, bool sparse)
      : eps(eps), alpha(alpha), sparse(sparse) {}

  StreamSketch fresh() const { return StreamSketch(eps, alpha); }

  void grow_features(std::size_t np, const UniversalWeightMap& totals) override {
    const std::size_t classes = totals.classes();
    while (sketch.size() < np) {
      std::vector<StreamSketch> row;
      row.reserve(classes);
      for (std::size_t c = 0; c < classes; ++c) {
        row.push_back(fresh());
        // Dense features appearing late carry the zeros of every earlier sample.
        if (!sparse && totals.total(c) > 0.0) {
          row.back().advance_to(totals.time());
          row.back().inject_zeros(totals.total(c));
        }
      }
      sketch.push_back(std::move(row));
      explicit_n.emplace_back(classes, 0.0);
      anchor_time.push_back(0);
      anchor_total.emplace_back(classes, 0.0);
    }
    p = np;
  }

  void grow_classes(std::size_t classes) override {
    for (std::size_t j = 0; j < sketch.size(); ++j) {
      while (sketch[j].size() < classes) sketch[j].push_back(fresh());
      explicit_n[j].resize(classes, 0.0);
      anchor_total[j].resize(classes, 0.0);
    }
  }

  void insert_at(std::size_t j, std::size_t c, double x, std::uint64_t now) {
    StreamSketch& sk = sketch[j][c];
    if (alpha) sk.advance_to(now - 1);
    sk.insert(x);
    explicit_n[j][c] += 1.0;
  }

  void observe(const Sample& s, const std::vector<double>& before,
               const UniversalWeightMap& totals) override {
    const std::uint64_t now = totals.time();
    if (!sparse) {
      if (s.is_sparse) {
        std::size_t e = 0;
        for (std::size_t j = 0; j < p; ++j) {
          double x = 0.0;
          if (e < s.sparse.size() && s.sparse[e].index == j) x = s.sparse[e++].value;
          insert_at(j, s.label, x, now);
        }
      } else {
        for (std::size_t j = 0; j < p; ++j) insert_at(j, s.label, s.dense[j], now);
      }
      return;
    }
    auto touch = [&](std::size_t j, double x) {
      if (alpha) catch_up(j, before, now - 1);
      insert_at(j, s.label, x, now);
      if (alpha) {
        anchor_time[j] = now;
        anchor_total[j] = totals.totals();
      }
    };
    if (s.is_sparse) {
      for (const auto& e : s.sparse) touch(e.index, e.value);
    } else {
      for (std::size_t j = 0; j < s.dense.size(); ++j) {
        if (s.dense[j] != 0.0) touch(j, s.dense[j]);
      }
    }
  }

  // Injects the faded zero weight each class accumulated on feature j between
  // its anchor and time `at`, where `at_totals` are the class totals at `at`.
  void catch_up(std::size_t j, const std::vector<double>& at_totals, std::uint64_t at) {
    const double d = std::pow(*alpha, static_cast<double>(at - anchor_time[j]));
    for (std::size_t c = 0; c < sketch[j].size(); ++c) {
      const double now_total = c < at_totals.size() ? at_totals[c] : 0.0;
      const double w = recovered(now_total, anchor_total[j][c], d);
      if (w > 0.0) {
        sketch[j][c].advance_to(at);
        sketch[j][c].inject_zeros(w);
      }
    }
  }

  bool feature_major() const override { return !sparse; }

  void observe_block(std::span<const Sample> block, std::uint64_t t0,
                     std::size_t threads) override {
    parallel_for(p, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        for (std::size_t i = 0; i < block.size(); ++i) {
          const Sample& s = block[i];
          double x = 0.0;
          if (s.is_sparse) {
            auto it = std::lower_bound(
                s.sparse.begin(), s.sparse.end(), j,
                [](const SparseEntry& en, std::size_t idx) { return en.index < idx; });
            if (it != s.sparse.end() && it->index == j) x = it->value;
          } else {
            x = s.dense[j];
          }
          insert_at(j, s.label, x, t0 + i + 1);
        }
      }
    });
  }

  // Summary of class c on feature j at the totals' current time, zeros included.
  SubSummary class_summary(std::size_t j, std::size_t c, const UniversalWeightMap& totals) const {
    const StreamSketch& sk = sketch[j][c];
    SubSummary sum = sk.finalize();
    const std::uint64_t now = totals.time();
    if (alpha && now > sk.clock() && !sum.empty()) {
      sum.scale_weights(totals.decay(now - sk.clock()));
    }
    double zeros = 0.0;
    if (sparse) {
      if (alpha) {
        zeros = totals.recovered_since(c, anchor_total[j][c], anchor_time[j]);
      } else {
        zeros = totals.total(c) - explicit_n[j][c];
      }
    }
    if (zeros > 0.0) {
      const WeightedPoint z{0.0, zeros};
      sum = merge(sum, SubSummary::exact(std::span(&z, 1)));
    }
    return sum;
  }

  BinTable table(std::size_t j, const UniversalWeightMap& totals,
                 std::size_t k_bins) const override {
    std::vector<SubSummary> per_class(totals.classes());
    for (std::size_t c = 0; c < per_class.size() && c < sketch[j].size(); ++c) {
      per_class[c] = class_summary(j, c, totals);
    }
    return build_table(per_class, k_bins);
  }

  double score(std::size_t j, Method m, const UniversalWeightMap& totals,
               std::size_t k_bins) const override {
    return bincount_score(m, table(j, totals, k_bins));
  }

  std::vector<double> weights(std::size_t j, const UniversalWeightMap& totals) const override {
    std::vector<double> out(sketch[j].size());
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] = class_summary(j, c, totals).total_weight();
    }
    return out;
  }

  std::vector<double> explicit_points(std::size_t j) const override { return explicit_n[j]; }

  void write(BinaryWriter& w) const override {
    w.u64(sketch.empty() ? 0 : sketch[0].size());
    for (std::size_t j = 0; j < p; ++j) {
      for (const auto& sk : sketch[j]) sk.write(w);
      w.doubles(explicit_n[j]);
      w.u64(anchor_time[j]);
      w.doubles(anchor_total[j]);
    }
  }

  void read(BinaryReader& r) override {
    const std::size_t classes = r.u64();
    sketch.assign(p, {});
    explicit_n.assign(p, {});
    anchor_time.assign(p, 0);
    anchor_total.assign(p, {});
    for (std::size_t j = 0; j < p; ++j) {
      sketch[j].reserve(classes);
      for (std::size_t c = 0; c < classes; ++c) sketch[j].push_back(StreamSketch::read(r));
      explicit_n[j] = r.doubles();
      anchor_time[j] = r.u64();
      anchor_total[j] = r.doubles();
      if (explicit_n[j].size() != classes || anchor_total[j].size() != classes) {
        throw InputError("snapshot corrupt: feature anchors");
      }
    }
  }

  double eps;
  std::optional<double> alpha;
  bool sparse;
  std::vector<std::vector<StreamSketch>> sketch;  // [feature][class]
  std::vector<std::vector<double>> explicit_n;
  // Sparse fading: time of the last explicit entry and the class totals then.
  std::vector<std::uint64_t> anchor_time;
  std::vector<std::vector<double>> anchor_total;
};

std::unique_ptr<Engine::Backend> make_backend(const ScreenerConfig& cfg) {
  if (is_bincount(cfg.method)) {
    return std::make_unique<BinCount>(cfg.epsilon, cfg.alpha, cfg.sparse);
  }
  if (cfg.sparse) {
    return std::make_unique<MeanVarSparse>(cfg.alpha);
  }
  return std::make_unique<MeanVarDense>(cfg.alpha);
}

}  // namespace

// ---------------------------------------------------------------------------

Engine::Engine(ScreenerConfig config) : config_(config), totals_(config.alpha) {
  config_.validate();
  backend_ = make_backend(config_);
  if (config_.feature_count > 0) {
    backend_->grow_features(config_.feature_count, totals_);
  }
}

Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

std::size_t Engine::feature_count() const noexcept { return backend_->p; }

void Engine::prepare(const Sample& s) {
  if (config_.method == Method::kTScore && s.label >= 2) {
    throw InputError("t-score supports exactly two classes; got a third label");
  }
  std::size_t needed = 0;
  if (s.is_sparse) {
    std::size_t prev = 0;
    for (std::size_t i = 0; i < s.sparse.size(); ++i) {
      const auto& e = s.sparse[i];
      if (i > 0 && e.index <= prev) {
        throw InputError("sparse indices must be strictly increasing");
      }
      if (!std::isfinite(e.value)) {
        throw InputError("non-finite feature value");
      }
      prev = e.index;
    }
    if (!s.sparse.empty()) needed = s.sparse.back().index + 1;
    if (config_.feature_count > 0 && needed > config_.feature_count) {
      throw InputError("feature index " + std::to_string(needed) + " exceeds feature count " +
                       std::to_string(config_.feature_count));
    }
  } else {
    for (double v : s.dense) {
      if (!std::isfinite(v)) throw InputError("non-finite feature value");
    }
    needed = s.dense.size();
    const std::size_t p = backend_->p;
    if (p > 0 && needed != p) {
      throw InputError("dense sample has " + std::to_string(needed) + " features, expected " +
                       std::to_string(p));
    }
  }
  if (s.label >= totals_.classes()) {
    totals_.ensure_classes(s.label + 1);
    backend_->grow_classes(totals_.classes());
  }
  if (needed > backend_->p) {
    backend_->grow_features(needed, totals_);
  }
}

void Engine::observe(const Sample& sample) {
  prepare(sample);
  std::vector<double> before = totals_.totals();
  totals_.observe(sample.label);
  backend_->observe(sample, before, totals_);
}

void Engine::observe_batch(std::span<const Sample> samples) {
  if (samples.size() > config_.minibatch) {
    throw InvalidArgument("batch of " + std::to_string(samples.size()) +
                          " exceeds the minibatch size " + std::to_string(config_.minibatch));
  }
  if (!backend_->feature_major()) {
    for (const auto& s : samples) observe(s);
    return;
  }
  // Validate and grow first so feature-major processing sees final shapes.
  // A dense sample of the wrong width must not leave earlier ones applied.
  for (const auto& s : samples) prepare(s);
  const std::uint64_t t0 = totals_.time();
  for (const auto& s : samples) totals_.observe(s.label);
  backend_->observe_block(samples, t0, config_.threads);
}

ScoreVector Engine::scores() const {
  if (totals_.time() == 0) {
    throw DegenerateScore("no samples observed");
  }
  const std::size_t classes = totals_.classes();
  if (config_.method == Method::kTScore && classes != 2) {
    throw DegenerateScore("t-score needs exactly two classes");
  }
  if (classes < 2) {
    throw DegenerateScore(std::string(method_name(config_.method)) +
                          " needs at least two classes; the stream has " + std::to_string(classes));
  }
  ScoreVector out;
  out.method = config_.method;
  out.higher_is_better = higher_is_better(config_.method);
  out.scores.assign(backend_->p, nan());
  parallel_for(backend_->p, config_.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      out.scores[j] = backend_->score(j, config_.method, totals_, config_.k_bins);
    }
  });
  return out;
}

std::vector<double> Engine::feature_class_weights(std::size_t feature) const {
  if (feature >= backend_->p) throw InvalidArgument("feature index out of range");
  return backend_->weights(feature, totals_);
}

BinTable Engine::feature_table(std::size_t feature) const {
  if (feature >= backend_->p) throw InvalidArgument("feature index out of range");
  if (totals_.time() == 0) throw DegenerateScore("no samples observed");
  return backend_->table(feature, totals_, config_.k_bins);
}

std::vector<double> Engine::explicit_points(std::size_t feature) const {
  if (feature >= backend_->p) throw InvalidArgument("feature index out of range");
  auto out = backend_->explicit_points(feature);
  if (out.size() < classes()) out.resize(classes(), 0.0);
  return out;
}

void Engine::save(std::ostream& out) const {
  BinaryWriter w(out);
  w.u64(kMagic);
  w.u64(kVersion);
  w.u64(static_cast<std::uint64_t>(config_.method));
  w.f64(config_.epsilon);
  w.u64(config_.k_bins);
  w.boolean(config_.alpha.has_value());
  w.f64(config_.alpha.value_or(0.0));
  w.u64(config_.minibatch);
  w.boolean(config_.sparse);
  w.u64(config_.feature_count);
  w.u64(config_.threads);
  w.u64(totals_.time());
  w.doubles(totals_.totals());
  w.u64(backend_->p);
  backend_->write(w);
  if (!out) throw Error("snapshot write failed");
}

Engine Engine::load(std::istream& in) {
  BinaryReader r(in);
  if (r.u64() != kMagic) throw InputError("not a screener snapshot");
  if (r.u64() != kVersion) throw InputError("unsupported snapshot version");
  ScreenerConfig cfg;
  const auto m = r.u64();
  if (m > static_cast<std::uint64_t>(Method::kMutualInfo)) {
    throw InputError("snapshot corrupt: method");
  }
  cfg.method = static_cast<Method>(m);
  cfg.epsilon = r.f64();
  cfg.k_bins = r.u64();
  const bool has_alpha = r.boolean();
  const double alpha = r.f64();
  if (has_alpha) cfg.alpha = alpha;
  cfg.minibatch = r.u64();
  cfg.sparse = r.boolean();
  cfg.feature_count = r.u64();
  cfg.threads = r.u64();
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw InputError(std::string("snapshot corrupt: ") + e.what());
  }
  const std::uint64_t time = r.u64();
  auto totals = r.doubles();
  const std::size_t p = r.u64();
  ScreenerConfig shell = cfg;
  shell.feature_count = 0;
  Engine engine(shell);
  engine.config_ = cfg;
  engine.totals_.restore(time, std::move(totals));
  engine.backend_->p = p;
  engine.backend_->read(r);
  return engine;
}

}  // namespace streamscreen
