#include "streamscreen/quantile_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "streamscreen/binary_io.hpp"
#include "streamscreen/errors.hpp"
#include "streamscreen/kernels.hpp"

namespace streamscreen {
namespace {

// ceil(q) that tolerates representation error in q = x / eps
// (1 / 0.001 is 1000.0000000000001).
std::uint64_t robust_ceil(double q) {
  double r = std::round(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q))) {
    return static_cast<std::uint64_t>(r);
  }
  return static_cast<std::uint64_t>(std::ceil(q));
}

void check_point(double value, double weight) {
  if (std::isnan(value)) {
    throw InputError("quantile sketch: NaN value");
  }
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InputError("quantile sketch: weight must be positive and finite");
  }
}

void write_summary(BinaryWriter& w, const SubSummary& s) {
  w.f64(s.precision());
  w.f64(s.total_weight());
  w.u64(s.size());
  for (const auto& t : s.tuples()) {
    w.pod(t);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SubSummary

SubSummary SubSummary::exact(std::span<const WeightedPoint> points) {
  std::vector<WeightedPoint> sorted(points.begin(), points.end());
  for (const auto& p : sorted) {
    check_point(p.value, p.weight);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const WeightedPoint& a, const WeightedPoint& b) { return a.value < b.value; });

  SubSummary out;
  out.tuples_.reserve(sorted.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    double v = sorted[i].value;
    double w = 0.0;
    for (; i < sorted.size() && sorted[i].value == v; ++i) {
      w += sorted[i].weight;
    }
    out.tuples_.push_back({v, cum, cum + w, w});
    cum += w;
  }
  out.total_weight_ = cum;
  return out;
}

SubSummary SubSummary::from_tuples(std::vector<SummaryTuple> tuples, double precision) {
  double total = 0.0;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& t = tuples[i];
    if (std::isnan(t.value) || !(t.weight > 0.0) || !(t.rmin <= t.rmax)) {
      throw InvalidArgument("summary tuple " + std::to_string(i) + " is malformed");
    }
    if (i > 0 && !(tuples[i - 1].value < t.value)) {
      throw InvalidArgument("summary values must be strictly increasing");
    }
    total += t.weight;
  }
  SubSummary out;
  out.tuples_ = std::move(tuples);
  out.precision_ = precision;
  out.total_weight_ = total;
  return out;
}

double SubSummary::rank_below(double v) const noexcept {
  auto it = std::lower_bound(tuples_.begin(), tuples_.end(), v,
                             [](const SummaryTuple& t, double x) { return t.value < x; });
  if (it != tuples_.end() && it->value == v) {
    return it->rmin;
  }
  if (it == tuples_.begin()) {
    return 0.0;
  }
  return std::prev(it)->rmin_next();
}

double SubSummary::rank_at_or_below(double v) const noexcept {
  auto it = std::lower_bound(tuples_.begin(), tuples_.end(), v,
                             [](const SummaryTuple& t, double x) { return t.value < x; });
  if (it != tuples_.end() && it->value == v) {
    return it->rmax;
  }
  if (it == tuples_.end()) {
    return tuples_.empty() ? 0.0 : tuples_.back().rmax;
  }
  return it->rmax_prev();
}

void SubSummary::scale_weights(double f) {
  if (f == 1.0) {
    return;
  }
  std::span<double> flat(reinterpret_cast<double*>(tuples_.data()), tuples_.size() * 4);
  simd::scale_tail3(flat, f);
  total_weight_ *= f;
}

void SubSummary::drop_vanished() {
  std::erase_if(tuples_, [](const SummaryTuple& t) { return !(t.weight > 0.0); });
  if (tuples_.empty()) {
    total_weight_ = 0.0;
  }
}

double SubSummary::max_slack() const noexcept {
  double worst = 0.0;
  for (const auto& t : tuples_) {
    worst = std::max(worst, std::abs(t.rmax - t.rmin - t.weight));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Query / prune / merge

std::size_t query_index(const SubSummary& sub, double d) {
  const auto& t = sub.tuples();
  if (t.empty()) {
    throw InvalidArgument("query on an empty summary");
  }
  if (!(d >= 0.0) || d > sub.total_weight()) {
    throw InvalidArgument("query position outside [0, total_weight]");
  }
  const std::size_t k = t.size();
  if (d < t.front().mid_rank()) {
    return 0;
  }
  if (d >= t.back().mid_rank()) {
    return k - 1;
  }
  // First tuple whose mid-rank exceeds d is x_{i+1}.
  auto it = std::upper_bound(t.begin(), t.end(), d,
                             [](double x, const SummaryTuple& u) { return x < u.mid_rank(); });
  std::size_t next = static_cast<std::size_t>(it - t.begin());
  std::size_t i = next - 1;
  if (2.0 * d < t[i].rmin + t[i].weight + t[next].rmax - t[next].weight) {
    return i;
  }
  return next;
}

double query(const SubSummary& sub, double d) { return sub.tuples()[query_index(sub, d)].value; }

SubSummary prune(const SubSummary& sub, std::size_t target) {
  if (target < 2) {
    throw InvalidArgument("prune target must be at least 2");
  }
  const auto& in = sub.tuples();
  if (in.size() <= target + 1) {
    return sub;
  }
  SubSummary out;
  out.tuples_.reserve(target + 1);
  const double total = sub.total_weight();
  const std::size_t k = in.size();
  std::size_t last = 0;
  bool any = false;

  auto emit = [&](std::size_t j) {
    std::size_t from = any ? last + 1 : 0;
    double w = 0.0;
    for (std::size_t m = from; m <= j; ++m) {
      w += in[m].weight;
    }
    out.tuples_.push_back({in[j].value, in[from].rmin, in[j].rmax, w});
    last = j;
    any = true;
  };

  for (std::size_t i = 0; i <= target; ++i) {
    double d = total * static_cast<double>(i) / static_cast<double>(target);
    if (d > total) d = total;
    std::size_t j = query_index(sub, d);
    if (any && j <= last) {
      continue;
    }
    emit(j);
  }
  // The last position always lands on the final tuple; guard anyway so no
  // weight is ever dropped.
  if (last != k - 1) {
    emit(k - 1);
  }
  out.total_weight_ = total;
  out.precision_ = sub.precision() + 1.0 / static_cast<double>(k);
  return out;
}

SubSummary merge(const SubSummary& a, const SubSummary& b) {
  if (a.empty()) {
    SubSummary r = b;
    r.precision_ = std::max(a.precision(), b.precision());
    return r;
  }
  if (b.empty()) {
    SubSummary r = a;
    r.precision_ = std::max(a.precision(), b.precision());
    return r;
  }
  const auto& x = a.tuples();
  const auto& y = b.tuples();
  SubSummary out;
  out.tuples_.reserve(x.size() + y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double x_next = 0.0;  // rank of a just above the last consumed a tuple
  double y_next = 0.0;
  while (i < x.size() && j < y.size()) {
    if (x[i].value == y[j].value) {
      out.tuples_.push_back({x[i].value, x[i].rmin + y[j].rmin, x[i].rmax + y[j].rmax,
                             x[i].weight + y[j].weight});
      x_next = x[i].rmin_next();
      y_next = y[j].rmin_next();
      ++i;
      ++j;
    } else if (x[i].value < y[j].value) {
      out.tuples_.push_back(
          {x[i].value, x[i].rmin + y_next, x[i].rmax + y[j].rmax_prev(), x[i].weight});
      x_next = x[i].rmin_next();
      ++i;
    } else {
      out.tuples_.push_back(
          {y[j].value, y[j].rmin + x_next, y[j].rmax + x[i].rmax_prev(), y[j].weight});
      y_next = y[j].rmin_next();
      ++j;
    }
  }
  const double y_last = y.back().rmax;
  for (; i < x.size(); ++i) {
    out.tuples_.push_back({x[i].value, x[i].rmin + y_next, x[i].rmax + y_last, x[i].weight});
  }
  const double x_last = x.back().rmax;
  for (; j < y.size(); ++j) {
    out.tuples_.push_back({y[j].value, y[j].rmin + x_next, y[j].rmax + x_last, y[j].weight});
  }
  out.total_weight_ = a.total_weight() + b.total_weight();
  out.precision_ = std::max(a.precision(), b.precision());
  return out;
}

SubSummary merge_all(std::span<const SubSummary> parts) {
  SubSummary acc;
  for (const auto& p : parts) {
    acc = merge(acc, p);
  }
  return acc;
}

void dump(std::ostream& out, const SubSummary& sub) {
  char line[160];
  for (const auto& t : sub.tuples()) {
    std::snprintf(line, sizeof line, "%.17g\t%.17g\t%.17g\t%.17g\n", t.value, t.rmin, t.rmax,
                  t.weight);
    out << line;
  }
}

// ---------------------------------------------------------------------------
// StreamSketch

SubstreamPlan plan_substream(double epsilon, std::uint64_t index) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidArgument("epsilon must lie in (0, 1)");
  }
  if (index > 40) {
    throw InvalidArgument("sub-stream index out of range");
  }
  const std::uint64_t base = robust_ceil(1.0 / epsilon);
  SubstreamPlan p;
  p.index = index;
  p.begin = base * ((std::uint64_t{1} << index) - 1);
  const std::uint64_t size = base << index;
  p.end = p.begin + size;

  // Working precision eps/2 inside a sub-stream; L is the largest level count
  // with ceil(L / eps') * 2^(L-1) <= size.
  const double working = epsilon / 2.0;
  for (std::size_t l = 1; l < 64; ++l) {
    std::uint64_t b = robust_ceil(static_cast<double>(l) / working);
    if (b * (std::uint64_t{1} << (l - 1)) > size) {
      break;
    }
    p.level_count = l;
    p.block_size = b;
  }
  if (p.level_count == 0) {
    // Too short for even one level: the buffer holds the whole sub-stream.
    p.block_size = size + 1;
  }
  return p;
}

StreamSketch::StreamSketch(double epsilon, std::optional<double> alpha)
    : epsilon_(epsilon), alpha_(alpha) {
  if (alpha_ && !(*alpha_ > 0.0 && *alpha_ < 1.0)) {
    throw InvalidArgument("fading factor must lie in (0, 1)");
  }
  start_substream(0);
}

void StreamSketch::start_substream(std::uint64_t index) {
  plan_ = plan_substream(epsilon_, index);
  levels_.assign(plan_.level_count, std::nullopt);
}

double StreamSketch::buffer_scale() const {
  if (!alpha_ || clock_ == buffer_base_) {
    return 1.0;
  }
  return std::pow(*alpha_, static_cast<double>(clock_ - buffer_base_));
}

void StreamSketch::add_point(double value, double weight) {
  double stored = weight;
  if (alpha_ && clock_ != buffer_base_) {
    double inv = std::pow(*alpha_, -static_cast<double>(clock_ - buffer_base_));
    if (inv > 1e200) {
      double f = buffer_scale();
      for (auto& [v, w] : buffer_) {
        w *= f;
      }
      buffer_base_ = clock_;
      inv = 1.0;
    }
    stored = weight * inv;
  }
  // +0.0 and -0.0 share one tuple.
  buffer_[value == 0.0 ? 0.0 : value] += stored;
  ++points_seen_;
  if (buffer_.size() >= plan_.block_size) {
    flush();
  }
  if (points_seen_ == plan_.end) {
    close_substream();
  }
}

void StreamSketch::insert(double value, double weight) {
  check_point(value, weight);
  if (alpha_) {
    ++clock_;
  }
  add_point(value, weight);
}

void StreamSketch::inject_zeros(double zero_weight) {
  if (!(zero_weight >= 0.0) || !std::isfinite(zero_weight)) {
    throw InvalidArgument("zero weight must be finite and non-negative");
  }
  if (zero_weight == 0.0) {
    return;
  }
  add_point(0.0, zero_weight);
}

void StreamSketch::advance(std::uint64_t steps) {
  if (alpha_) {
    clock_ += steps;
  }
}

void StreamSketch::advance_to(std::uint64_t clock) {
  if (!alpha_) {
    return;
  }
  if (clock < clock_) {
    throw InvalidArgument("sketch clock cannot move backwards");
  }
  clock_ = clock;
}

void StreamSketch::decay_flush() {
  if (!alpha_ || clock_ == penalized_at_) {
    return;
  }
  const double f = std::pow(*alpha_, static_cast<double>(clock_ - penalized_at_));
  for (auto& level : levels_) {
    if (!level) continue;
    level->scale_weights(f);
    level->drop_vanished();
    if (level->empty()) level.reset();
  }
  for (auto& s : closed_) {
    s.scale_weights(f);
    s.drop_vanished();
  }
  std::erase_if(closed_, [](const SubSummary& s) { return s.empty(); });
  penalized_at_ = clock_;
}

SubSummary StreamSketch::buffer_summary() const {
  std::vector<WeightedPoint> pts;
  pts.reserve(buffer_.size());
  const double f = buffer_scale();
  for (const auto& [v, w] : buffer_) {
    double actual = w * f;
    if (actual > 0.0) pts.push_back({v, actual});
  }
  return SubSummary::exact(pts);
}

void StreamSketch::flush() {
  decay_flush();
  SubSummary temp = buffer_summary();
  buffer_.clear();
  buffer_base_ = clock_;
  temp = prune(temp, std::max<std::size_t>(2, temp.size() / 2));
  for (auto& level : levels_) {
    if (!level) {
      level = std::move(temp);
      return;
    }
    temp = merge(temp, *level);
    temp = prune(temp, std::max<std::size_t>(2, temp.size() / 2));
    if (temp.size() < plan_.block_size) {
      level = std::move(temp);
      return;
    }
    level.reset();
  }
  levels_.emplace_back(std::move(temp));
}

SubSummary StreamSketch::current_substream_summary() const {
  SubSummary acc = buffer_summary();
  for (const auto& level : levels_) {
    if (level) acc = merge(acc, *level);
  }
  return acc;
}

void StreamSketch::close_substream() {
  decay_flush();
  SubSummary s = current_substream_summary();
  const std::size_t cap = static_cast<std::size_t>(robust_ceil(2.0 / epsilon_));
  if (s.size() > cap + 1) {
    s = prune(s, cap);
  }
  if (!s.empty()) {
    closed_.push_back(std::move(s));
  }
  buffer_.clear();
  buffer_base_ = clock_;
  start_substream(plan_.index + 1);
}

SubSummary StreamSketch::finalize() const {
  const double f = (alpha_ && clock_ != penalized_at_)
                       ? std::pow(*alpha_, static_cast<double>(clock_ - penalized_at_))
                       : 1.0;
  SubSummary acc = buffer_summary();
  for (const auto& level : levels_) {
    if (!level) continue;
    if (f == 1.0) {
      acc = merge(acc, *level);
    } else {
      SubSummary scaled = *level;
      scaled.scale_weights(f);
      scaled.drop_vanished();
      acc = merge(acc, scaled);
    }
  }
  for (const auto& s : closed_) {
    if (f == 1.0) {
      acc = merge(acc, s);
    } else {
      SubSummary scaled = s;
      scaled.scale_weights(f);
      scaled.drop_vanished();
      acc = merge(acc, scaled);
    }
  }
  return acc;
}

void StreamSketch::dump(std::ostream& out) const {
  streamscreen::dump(out, buffer_summary());
  for (const auto& level : levels_) {
    out << '\n';
    if (level) streamscreen::dump(out, *level);
  }
  for (const auto& s : closed_) {
    out << '\n';
    streamscreen::dump(out, s);
  }
}

void StreamSketch::write(BinaryWriter& w) const {
  w.f64(epsilon_);
  w.boolean(alpha_.has_value());
  w.f64(alpha_.value_or(0.0));
  w.u64(points_seen_);
  w.u64(plan_.index);
  std::vector<std::pair<double, double>> buf(buffer_.begin(), buffer_.end());
  std::sort(buf.begin(), buf.end());
  w.u64(buf.size());
  for (const auto& [v, x] : buf) {
    w.f64(v);
    w.f64(x);
  }
  w.u64(buffer_base_);
  w.u64(levels_.size());
  for (const auto& level : levels_) {
    w.boolean(level.has_value());
    if (level) write_summary(w, *level);
  }
  w.u64(closed_.size());
  for (const auto& s : closed_) {
    write_summary(w, s);
  }
  w.u64(clock_);
  w.u64(penalized_at_);
}

SubSummary StreamSketch::read_summary(BinaryReader& r) {
  SubSummary s;
  s.precision_ = r.f64();
  s.total_weight_ = r.f64();
  auto n = r.u64();
  if (n > (std::uint64_t{1} << 32)) throw InputError("snapshot corrupt: summary size");
  s.tuples_.resize(n);
  for (auto& t : s.tuples_) {
    t = r.pod<SummaryTuple>();
  }
  return s;
}

StreamSketch StreamSketch::read(BinaryReader& r) {
  double eps = r.f64();
  bool has_alpha = r.boolean();
  double alpha = r.f64();
  StreamSketch s(eps, has_alpha ? std::optional<double>(alpha) : std::nullopt);
  s.points_seen_ = r.u64();
  s.start_substream(r.u64());
  auto nbuf = r.u64();
  s.buffer_.reserve(nbuf);
  for (std::uint64_t i = 0; i < nbuf; ++i) {
    double v = r.f64();
    double x = r.f64();
    s.buffer_[v] = x;
  }
  s.buffer_base_ = r.u64();
  auto nlevels = r.u64();
  s.levels_.assign(nlevels, std::nullopt);
  for (auto& level : s.levels_) {
    if (r.boolean()) level = read_summary(r);
  }
  auto nclosed = r.u64();
  for (std::uint64_t i = 0; i < nclosed; ++i) {
    s.closed_.push_back(read_summary(r));
  }
  s.clock_ = r.u64();
  s.penalized_at_ = r.u64();
  return s;
}

}  // namespace streamscreen
