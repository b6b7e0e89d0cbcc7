#include "streamscreen/bincount_criteria.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "streamscreen/errors.hpp"

namespace streamscreen {
namespace {

void require_nonempty(const BinTable& table, const char* what) {
  if (!(table.n() > 0.0)) {
    throw DegenerateScore(std::string(what) + " is undefined on an empty table");
  }
}

// Weighted impurity P(side) * (1 - sum_c P(c | side)^2).
double side_impurity(const std::vector<double>& counts, double side_total, double n) {
  if (side_total <= 0.0) {
    return 0.0;
  }
  double sq = 0.0;
  for (double v : counts) {
    double p = v / side_total;
    sq += p * p;
  }
  return (side_total / n) * (1.0 - sq);
}

}  // namespace

double mutual_information(const BinTable& table) {
  require_nonempty(table, "mutual information");
  const double n = table.n();
  double mi = 0.0;
  for (std::size_t b = 0; b < table.bins(); ++b) {
    for (std::size_t c = 0; c < table.classes(); ++c) {
      double joint = table.joint(b, c);
      if (joint <= 0.0) continue;
      // log(P(b,c) / (P(b) P(c))) == log(n_bc * n / (n_b * n_c))
      mi += (joint / n) * std::log(joint * n / (table.row_total(b) * table.col_total(c)));
    }
  }
  return mi;
}

double chi_square(const BinTable& table) {
  require_nonempty(table, "chi-square");
  const double n = table.n();
  double chi = 0.0;
  for (std::size_t b = 0; b < table.bins(); ++b) {
    for (std::size_t c = 0; c < table.classes(); ++c) {
      double expected = table.row_total(b) * table.col_total(c) / n;
      if (expected <= 0.0) continue;
      double diff = table.joint(b, c) - expected;
      chi += diff * diff / expected;
    }
  }
  return chi;
}

double gini_index(const BinTable& table) {
  require_nonempty(table, "Gini index");
  if (table.bins() < 2) {
    throw InvalidArgument("Gini index needs at least two bins");
  }
  const double n = table.n();
  const std::size_t classes = table.classes();
  std::vector<double> left(classes, 0.0);
  std::vector<double> right(classes, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t split = 0; split + 1 < table.bins(); ++split) {
    double left_total = 0.0;
    double right_total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      double l = 0.0;
      double r = 0.0;
      for (std::size_t b = 0; b < table.bins(); ++b) {
        (b <= split ? l : r) += table.joint(b, c);
      }
      left[c] = l;
      right[c] = r;
      left_total += l;
      right_total += r;
    }
    double g = side_impurity(left, left_total, n) + side_impurity(right, right_total, n);
    best = std::min(best, g);
  }
  return best;
}

}  // namespace streamscreen
