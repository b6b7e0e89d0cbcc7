#pragma once

#include "streamscreen/discretizer.hpp"

namespace streamscreen {

// Natural-log mutual information between bin membership and class. Empty
// cells contribute nothing.
double mutual_information(const BinTable& table);

// Pearson chi-square against the independence table; cells with zero
// expected count are skipped.
double chi_square(const BinTable& table);

// Minimum two-way Gini impurity over the K-1 bin boundaries. An empty side
// of a split contributes zero.
double gini_index(const BinTable& table);

}  // namespace streamscreen
