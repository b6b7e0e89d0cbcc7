#pragma once

// Near-equal-frequency binning over a finalized summary, and the per-class
// contingency tables the bin-count criteria consume.

#include <cstddef>
#include <span>
#include <vector>

#include "streamscreen/quantile_sketch.hpp"

namespace streamscreen {

struct BinCounts {
  std::vector<double> counts;         // K bin weights
  std::vector<double> cutoff_values;  // K-1 values; +inf for cutoffs never reached
  double n_total = 0.0;
};

// Interval length between cutoffs: floor(N/K) for whole-number totals, N/K
// for fractional (faded) totals.
double cutoff_interval(double n_total, std::size_t k_bins);

// Sweeps the tuples in value order, adding each tuple's whole weight to the
// current bin and advancing (possibly over several bins) once the running
// weight reaches i * cutoff_interval. k_bins >= 2.
BinCounts aggregate_bins(const SubSummary& summary, double n_total, std::size_t k_bins);

class BinTable {
 public:
  BinTable() = default;
  BinTable(std::size_t bins, std::size_t classes);

  // Builds row/column totals and n from the joint cells.
  static BinTable from_joint(std::size_t bins, std::size_t classes, std::vector<double> joint);

  std::size_t bins() const noexcept { return bins_; }
  std::size_t classes() const noexcept { return classes_; }
  double joint(std::size_t bin, std::size_t cls) const { return joint_[bin * classes_ + cls]; }
  double row_total(std::size_t bin) const { return row_totals_[bin]; }
  double col_total(std::size_t cls) const { return col_totals_[cls]; }
  double n() const noexcept { return n_; }
  const std::vector<double>& joint_cells() const noexcept { return joint_; }

 private:
  std::size_t bins_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> joint_;
  std::vector<double> row_totals_;
  std::vector<double> col_totals_;
  double n_ = 0.0;
};

// Global cutoffs come from binning the merge of all class summaries; each
// class's cell counts are differences of its own rank function at those
// cutoffs. Throws DegenerateScore for fewer than two classes and
// InvalidArgument when every summary is empty.
BinTable build_table(std::span<const SubSummary> per_class, std::size_t k_bins);

}  // namespace streamscreen
