#pragma once

// Offline reference computations over an in-memory dataset: exact
// equal-frequency binning, batch criteria, and the online-vs-offline
// comparison metrics.

#include <cstddef>
#include <span>
#include <vector>

#include "streamscreen/discretizer.hpp"
#include "streamscreen/engine.hpp"

namespace streamscreen {

// Row-major n x p matrix with one class id per row.
struct DenseDataset {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> values;
  std::vector<std::size_t> labels;

  double at(std::size_t i, std::size_t j) const { return values[i * p + j]; }
  std::vector<double> column(std::size_t j) const;
  std::size_t classes() const;
  Sample sample(std::size_t i) const;
  // Throws InvalidArgument on inconsistent dimensions.
  void validate() const;
};

// Equal-frequency binning of a raw column. Equal values are never split.
// Requires column.size() >= k_bins.
BinCounts offline_bins(std::span<const double> column, std::size_t k_bins);

// Bins x classes table of one column under the same cutoff rule.
BinTable offline_table(std::span<const double> column, std::span<const std::size_t> labels,
                       std::size_t classes, std::size_t k_bins);

// Same rule over weighted rows; the cutoff step comes from the total weight.
BinTable offline_weighted_table(std::span<const double> column,
                                std::span<const std::size_t> labels,
                                std::span<const double> weights, std::size_t classes,
                                std::size_t k_bins);

ScoreVector offline_score(const DenseDataset& data, Method method, std::size_t k_bins = 5);

// Scores with every stored weight and running sum multiplied by alpha at each
// arrival, zeros included. O(n^2) in the row weights; meant for small data.
ScoreVector eager_decay_score(const DenseDataset& data, Method method, double alpha,
                              std::size_t k_bins = 5);

// (1/p) sum_j |on_j - off_j| / (max(off) - min(off)). Throws InvalidArgument
// when the offline range is zero or not finite.
double score_diff_ratio(const ScoreVector& online, const ScoreVector& offline);

// Over the top ceil(fraction * p) features by offline rank, the share whose
// online rank differs.
double misrank_ratio(const Ranking& online, const Ranking& offline, double top_fraction);

// Mean over features and bins of sum_c |online cell - offline cell|.
double count_difference(std::span<const BinTable> online, std::span<const BinTable> offline);

}  // namespace streamscreen
