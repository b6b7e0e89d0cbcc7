#include "streamscreen/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "streamscreen/bincount_criteria.hpp"
#include "streamscreen/errors.hpp"
#include "streamscreen/meanvar.hpp"

namespace streamscreen {
namespace {

// Bin index per equal-value run of the sorted column: the run lands in the
// bin open when the run starts, then the cutoffs it crossed are consumed.
std::vector<std::size_t> run_bins(const std::vector<double>& sorted,
                                  const std::vector<double>& weights, std::size_t k_bins,
                                  std::vector<std::size_t>& run_ends) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double step = cutoff_interval(total, k_bins);
  std::vector<std::size_t> bins;
  run_ends.clear();
  std::size_t h = 0;
  std::size_t i = 0;
  double cum = 0.0;
  while (i < sorted.size()) {
    std::size_t e = i;
    while (e < sorted.size() && sorted[e] == sorted[i]) cum += weights[e++];
    bins.push_back(h);
    run_ends.push_back(e);
    while (h + 1 < k_bins && cum >= static_cast<double>(h + 1) * step) ++h;
    i = e;
  }
  return bins;
}

BinTable sorted_table(std::span<const double> column, std::span<const std::size_t> labels,
                      std::span<const double> weights, std::size_t classes,
                      std::size_t k_bins) {
  if (column.size() != labels.size() || column.size() != weights.size()) {
    throw InvalidArgument("column, labels and weights differ in size");
  }
  if (k_bins < 2) throw InvalidArgument("at least two bins are required");
  std::vector<std::size_t> order(column.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
  std::vector<double> sorted(order.size()), w(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted[i] = column[order[i]];
    w[i] = weights[order[i]];
  }
  std::vector<std::size_t> ends;
  const auto bins = run_bins(sorted, w, k_bins, ends);

  std::vector<double> joint(k_bins * classes, 0.0);
  std::size_t start = 0;
  for (std::size_t r = 0; r < bins.size(); ++r) {
    for (std::size_t i = start; i < ends[r]; ++i) {
      joint[bins[r] * classes + labels[order[i]]] += w[i];
    }
    start = ends[r];
  }
  return BinTable::from_joint(k_bins, classes, std::move(joint));
}

ClassMoments moments_of(double count, double sum, double sum_sq) {
  ClassMoments m;
  m.count = count;
  if (count > 0.0) {
    m.mean = sum / count;
    m.mean_sq = sum_sq / count;
  }
  return m;
}

double bincount_of(Method method, const BinTable& t) {
  return method == Method::kGini        ? gini_index(t)
         : method == Method::kChiSquare ? chi_square(t)
                                        : mutual_information(t);
}

}  // namespace

std::vector<double> DenseDataset::column(std::size_t j) const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(i, j);
  return out;
}

std::size_t DenseDataset::classes() const {
  std::size_t c = 0;
  for (auto l : labels) c = std::max(c, l + 1);
  return c;
}

Sample DenseDataset::sample(std::size_t i) const {
  return Sample::make_dense(labels[i], std::vector<double>(values.begin() + i * p,
                                                           values.begin() + (i + 1) * p));
}

void DenseDataset::validate() const {
  if (values.size() != n * p || labels.size() != n) {
    throw InvalidArgument("dataset dimensions are inconsistent");
  }
}

BinCounts offline_bins(std::span<const double> column, std::size_t k_bins) {
  if (k_bins < 2) throw InvalidArgument("at least two bins are required");
  if (column.size() < k_bins) throw InvalidArgument("fewer values than bins");
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> ends;
  const auto bins = run_bins(sorted, std::vector<double>(sorted.size(), 1.0), k_bins, ends);

  BinCounts out;
  out.counts.assign(k_bins, 0.0);
  out.cutoff_values.assign(k_bins - 1, std::numeric_limits<double>::infinity());
  out.n_total = static_cast<double>(sorted.size());
  std::size_t start = 0;
  for (std::size_t r = 0; r < bins.size(); ++r) {
    out.counts[bins[r]] += static_cast<double>(ends[r] - start);
    const std::size_t next_bin = r + 1 < bins.size() ? bins[r + 1] : k_bins - 1;
    for (std::size_t h = bins[r]; h < next_bin; ++h) out.cutoff_values[h] = sorted[start];
    start = ends[r];
  }
  return out;
}

BinTable offline_table(std::span<const double> column, std::span<const std::size_t> labels,
                       std::size_t classes, std::size_t k_bins) {
  const std::vector<double> ones(column.size(), 1.0);
  return sorted_table(column, labels, ones, classes, k_bins);
}

BinTable offline_weighted_table(std::span<const double> column,
                                std::span<const std::size_t> labels,
                                std::span<const double> weights, std::size_t classes,
                                std::size_t k_bins) {
  return sorted_table(column, labels, weights, classes, k_bins);
}

ScoreVector offline_score(const DenseDataset& data, Method method, std::size_t k_bins) {
  data.validate();
  const std::size_t classes = data.classes();
  if (classes < 2) throw DegenerateScore("scores need at least two classes");
  if (method == Method::kTScore && classes != 2) {
    throw DegenerateScore("t-score needs exactly two classes");
  }
  ScoreVector out;
  out.method = method;
  out.higher_is_better = higher_is_better(method);
  out.scores.resize(data.p);

  std::vector<double> count(classes, 0.0);
  for (auto l : data.labels) count[l] += 1.0;

  for (std::size_t j = 0; j < data.p; ++j) {
    const auto col = data.column(j);
    if (is_bincount(method)) {
      const BinTable t = offline_table(col, data.labels, classes, k_bins);
      out.scores[j] = bincount_of(method, t);
      continue;
    }
    // Two-pass batch moments: sums first, then divide.
    std::vector<double> sum(classes, 0.0), sq(classes, 0.0);
    for (std::size_t i = 0; i < data.n; ++i) {
      sum[data.labels[i]] += col[i];
      sq[data.labels[i]] += col[i] * col[i];
    }
    std::vector<ClassMoments> mom(classes);
    for (std::size_t c = 0; c < classes; ++c) mom[c] = moments_of(count[c], sum[c], sq[c]);
    out.scores[j] = method == Method::kTScore ? t_score(mom[0], mom[1]) : fisher_score(mom);
  }
  return out;
}

ScoreVector eager_decay_score(const DenseDataset& data, Method method, double alpha,
                              std::size_t k_bins) {
  data.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const std::size_t classes = data.classes();
  if (classes < 2) throw DegenerateScore("scores need at least two classes");
  if (method == Method::kTScore && classes != 2) {
    throw DegenerateScore("t-score needs exactly two classes");
  }
  ScoreVector out;
  out.method = method;
  out.higher_is_better = higher_is_better(method);
  out.scores.resize(data.p);

  // Every row's weight is decayed once per later arrival.
  std::vector<double> w(data.n, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t r = 0; r < i; ++r) w[r] *= alpha;
    w[i] = 1.0;
  }

  if (is_bincount(method)) {
    for (std::size_t j = 0; j < data.p; ++j) {
      const auto col = data.column(j);
      out.scores[j] = bincount_of(method, offline_weighted_table(col, data.labels, w, classes, k_bins));
    }
    return out;
  }

  // Slot recursion applied at every step to every class.
  std::vector<double> count(classes, 0.0);
  std::vector<double> sum(classes * data.p, 0.0), sq(classes * data.p, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    for (auto& v : count) v *= alpha;
    for (auto& v : sum) v *= alpha;
    for (auto& v : sq) v *= alpha;
    const std::size_t c = data.labels[i];
    count[c] += 1.0;
    for (std::size_t j = 0; j < data.p; ++j) {
      const double x = data.at(i, j);
      sum[c * data.p + j] += x;
      sq[c * data.p + j] += x * x;
    }
  }
  std::vector<ClassMoments> mom(classes);
  for (std::size_t j = 0; j < data.p; ++j) {
    for (std::size_t c = 0; c < classes; ++c) {
      mom[c] = moments_of(count[c], sum[c * data.p + j], sq[c * data.p + j]);
    }
    out.scores[j] = method == Method::kTScore ? t_score(mom[0], mom[1]) : fisher_score(mom);
  }
  return out;
}

double score_diff_ratio(const ScoreVector& online, const ScoreVector& offline) {
  const auto& on = online.scores;
  const auto& off = offline.scores;
  if (on.size() != off.size() || off.empty()) {
    throw InvalidArgument("score vectors must be non-empty and of equal length");
  }
  const auto [lo, hi] = std::minmax_element(off.begin(), off.end());
  const double range = *hi - *lo;
  if (!(range > 0.0) || !std::isfinite(range)) {
    throw InvalidArgument("offline scores have no usable range");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < on.size(); ++j) acc += std::abs(on[j] - off[j]) / range;
  return acc / static_cast<double>(on.size());
}

double misrank_ratio(const Ranking& online, const Ranking& offline, double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
    throw InvalidArgument("top fraction must lie in (0, 1]");
  }
  const std::size_t p = offline.order.size();
  if (online.rank_of.size() != p || p == 0) {
    throw InvalidArgument("rankings must be non-empty and of equal length");
  }
  const auto top = static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(p)));
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < top; ++i) {
    const std::size_t f = offline.order[i];
    if (online.rank_of[f] != offline.rank_of[f]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(top);
}

double count_difference(std::span<const BinTable> online, std::span<const BinTable> offline) {
  if (online.size() != offline.size() || online.empty()) {
    throw InvalidArgument("table lists must be non-empty and of equal length");
  }
  double acc = 0.0;
  std::size_t cells = 0;
  for (std::size_t j = 0; j < online.size(); ++j) {
    const BinTable& a = online[j];
    const BinTable& b = offline[j];
    if (a.bins() != b.bins()) throw InvalidArgument("tables differ in bin count");
    const std::size_t classes = std::max(a.classes(), b.classes());
    for (std::size_t h = 0; h < a.bins(); ++h) {
      for (std::size_t c = 0; c < classes; ++c) {
        const double x = c < a.classes() ? a.joint(h, c) : 0.0;
        const double y = c < b.classes() ? b.joint(h, c) : 0.0;
        acc += std::abs(x - y);
      }
      ++cells;
    }
  }
  return acc / static_cast<double>(cells);
}

}  // namespace streamscreen
