#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "streamscreen/errors.hpp"
#include "streamscreen/oracle.hpp"
#include "streamscreen/synth_bench.hpp"

using namespace streamscreen;

namespace {

double pair_correlation(double nu) {
  DriftStreamSpec s;
  s.p = 40;
  s.k_true = 5;
  s.nu = nu;
  s.n_samples = 10000;
  s.shift_interval = 10000;
  s.seed = 17;
  DriftGenerator g(s);
  Sample x;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  while (g.next(x)) {
    const double a = x.dense[3], b = x.dense[31];
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }
  const double n = 10000;
  const double cov = sab / n - sa / n * sb / n;
  return cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
}

}  // namespace

TEST_CASE("feature correlation") {
  CHECK(std::abs(pair_correlation(0.0)) < 0.05);
  CHECK(std::abs(pair_correlation(0.5) - 1.0 / 3.0) < 0.05);
}

TEST_CASE("detection rate") {
  std::vector<std::size_t> truth{1, 2, 3, 4};
  std::vector<std::size_t> sup{0, 1, 2, 3, 4, 5};
  std::vector<std::size_t> dis{7, 8};
  CHECK(detection_rate(sup, truth) == 1.0);
  CHECK(detection_rate(dis, truth) == 0.0);
  std::vector<std::size_t> t100(100), half(50);
  for (std::size_t i = 0; i < 100; ++i) t100[i] = i;
  for (std::size_t i = 0; i < 50; ++i) half[i] = 2 * i;
  CHECK(detection_rate(half, t100) == 0.5);
  CHECK_THROWS_AS(detection_rate(sup, std::vector<std::size_t>{}), InvalidArgument);
}

TEST_CASE("window bounds") {
  DriftStreamSpec s;
  s.p = 30;
  s.k_true = 20;
  s.n_samples = 20000;
  s.shift_interval = 1000;
  CHECK_THROWS_AS(DriftGenerator{s}, InvalidArgument);
  s.shift_interval = 2000;
  CHECK_NOTHROW(DriftGenerator{s});
  DriftGenerator g(s);
  CHECK(g.true_set(0).front() == 0);
  CHECK(g.true_set(3999).front() == 1);
  CHECK(g.true_set(4000).front() == 2);
  CHECK(g.true_set(4000).size() == 20);
}

TEST_CASE("streams and reports are reproducible") {
  DriftStreamSpec s;
  s.n_samples = 50;
  DriftGenerator a(s), b(s);
  Sample x, y;
  while (a.next(x)) {
    REQUIRE(b.next(y));
    CHECK(x.dense == y.dense);
    CHECK(x.label == y.label);
  }
  GridConfig g;
  g.base.p = 40;
  g.base.k_true = 5;
  g.base.n_samples = 1000;
  g.shift_intervals = {200};
  g.methods = {Method::kFisher, Method::kMutualInfo};
  g.selected_counts = {10, 20};
  g.checkpoint_every = 250;
  std::ostringstream o1, o2;
  run_grid(g).write_csv(o1);
  run_grid(g).write_csv(o2);
  CHECK(o1.str() == o2.str());
  CHECK(o1.str().rfind("method,l,alpha,sample_index,selected_k,detection_rate\n", 0) == 0);
  // 2 methods x 2 alphas x 4 checkpoints x 2 counts.
  CHECK(run_grid(g).rows.size() == 32);
}

TEST_CASE("without drift the true features rank first") {
  DriftStreamSpec s;
  s.p = 50;
  s.k_true = 10;
  s.signal = 5.0;
  s.n_samples = 10000;
  s.shift_interval = 10000;
  s.seed = 3;
  DriftGenerator g(s);
  DenseDataset d;
  d.n = s.n_samples;
  d.p = s.p;
  Sample x;
  while (g.next(x)) {
    d.values.insert(d.values.end(), x.dense.begin(), x.dense.end());
    d.labels.push_back(x.label);
  }
  for (Method m : {Method::kTScore, Method::kFisher, Method::kGini, Method::kChiSquare,
                   Method::kMutualInfo}) {
    auto r = rank(offline_score(d, m));
    auto top = select_top_k(r, 10);
    CHECK(detection_rate(top, g.true_set(0)) == 1.0);
  }

  GridConfig grid;
  grid.base = s;
  grid.shift_intervals = {s.shift_interval};
  grid.checkpoint_every = 5000;
  grid.selected_counts = {10};
  grid.alphas = {std::nullopt, 0.999};
  const auto rep = run_grid(grid);
  for (const auto& row : rep.rows) {
    if (row.sample_index == s.n_samples) CHECK(row.detection_rate == 1.0);
  }
}

TEST_CASE("grid validation") {
  GridConfig g;
  g.checkpoint_every = 0;
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  GridConfig h;
  h.selected_counts = {1000};
  CHECK_THROWS_AS(h.validate(), InvalidArgument);
}
