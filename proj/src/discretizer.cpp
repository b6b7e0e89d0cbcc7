#include "streamscreen/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "streamscreen/errors.hpp"

namespace streamscreen {

double cutoff_interval(double n_total, std::size_t k_bins) {
  const double k = static_cast<double>(k_bins);
  if (n_total == std::floor(n_total)) {
    return std::floor(n_total / k);
  }
  return n_total / k;
}

BinCounts aggregate_bins(const SubSummary& summary, double n_total, std::size_t k_bins) {
  if (k_bins < 2) {
    throw InvalidArgument("at least two bins are required");
  }
  BinCounts out;
  out.counts.assign(k_bins, 0.0);
  out.cutoff_values.assign(k_bins - 1, std::numeric_limits<double>::infinity());
  out.n_total = n_total;

  const double step = cutoff_interval(n_total, k_bins);
  std::size_t h = 0;
  double running = 0.0;
  for (const auto& t : summary.tuples()) {
    out.counts[h] += t.weight;
    running += t.weight;
    while (h + 1 < k_bins && running >= static_cast<double>(h + 1) * step) {
      out.cutoff_values[h] = t.value;
      ++h;
    }
  }
  return out;
}

BinTable::BinTable(std::size_t bins, std::size_t classes)
    : bins_(bins),
      classes_(classes),
      joint_(bins * classes, 0.0),
      row_totals_(bins, 0.0),
      col_totals_(classes, 0.0) {}

BinTable BinTable::from_joint(std::size_t bins, std::size_t classes, std::vector<double> joint) {
  if (joint.size() != bins * classes) {
    throw InvalidArgument("joint table has the wrong number of cells");
  }
  BinTable t(bins, classes);
  t.joint_ = std::move(joint);
  for (std::size_t b = 0; b < bins; ++b) {
    for (std::size_t c = 0; c < classes; ++c) {
      double v = t.joint_[b * classes + c];
      if (v < 0.0 || std::isnan(v)) {
        throw InvalidArgument("joint cells must be non-negative");
      }
      t.row_totals_[b] += v;
      t.col_totals_[c] += v;
    }
  }
  for (double r : t.row_totals_) {
    t.n_ += r;
  }
  return t;
}

BinTable build_table(std::span<const SubSummary> per_class, std::size_t k_bins) {
  if (per_class.size() < 2) {
    throw DegenerateScore("bin-count criteria need at least two classes");
  }
  SubSummary merged = merge_all(per_class);
  if (merged.empty()) {
    throw InvalidArgument("all class summaries are empty");
  }
  BinCounts bins = aggregate_bins(merged, merged.total_weight(), k_bins);

  const std::size_t classes = per_class.size();
  std::vector<double> joint(k_bins * classes, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    const SubSummary& s = per_class[c];
    double below = 0.0;
    for (std::size_t b = 0; b < k_bins; ++b) {
      double upto = (b + 1 < k_bins && std::isfinite(bins.cutoff_values[b]))
                        ? s.rank_at_or_below(bins.cutoff_values[b])
                        : s.total_weight();
      joint[b * classes + c] = std::max(0.0, upto - below);
      below = std::max(below, upto);
    }
  }
  return BinTable::from_joint(k_bins, classes, std::move(joint));
}

}  // namespace streamscreen
