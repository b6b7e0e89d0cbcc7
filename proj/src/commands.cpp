#include "streamscreen/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "streamscreen/errors.hpp"
#include "streamscreen/kernels.hpp"
#include "streamscreen/oracle.hpp"

namespace streamscreen {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

void describe_config(Manifest& m, const ScreenerConfig& c) {
  m.set("method", method_name(c.method));
  m.set("epsilon", num(c.epsilon));
  m.set("bins", std::to_string(c.k_bins));
  m.set("minibatch", std::to_string(c.minibatch));
  m.set("alpha", c.alpha ? num(*c.alpha) : "none");
  m.set("sparse", c.sparse ? "true" : "false");
  m.set("threads", std::to_string(c.threads));
  m.set("simd", simd::level_name(simd::active_level()));
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + v[i];
  return out;
}

// Whole input as a dense dataset; sparse rows are zero-padded.
DenseDataset load_dataset(std::istream& in, InputFormat format, std::size_t label_column,
                          std::vector<std::string>& tokens) {
  SampleReader reader(in, format, label_column);
  std::vector<Sample> rows;
  Sample s;
  std::size_t p = 0;
  while (reader.next(s)) {
    p = std::max(p, s.is_sparse ? (s.sparse.empty() ? 0 : s.sparse.back().index + 1)
                                : s.dense.size());
    rows.push_back(std::move(s));
  }
  if (rows.empty()) throw InputError("input holds no samples");
  DenseDataset d;
  d.n = rows.size();
  d.p = p;
  d.values.assign(d.n * p, 0.0);
  d.labels.resize(d.n);
  for (std::size_t i = 0; i < d.n; ++i) {
    d.labels[i] = rows[i].label;
    if (rows[i].is_sparse) {
      for (const auto& e : rows[i].sparse) d.values[i * p + e.index] = e.value;
    } else {
      std::copy(rows[i].dense.begin(), rows[i].dense.end(), d.values.begin() + i * p);
    }
  }
  tokens = reader.labels().tokens();
  return d;
}

Engine run_engine(const std::vector<Sample>& samples, std::size_t p, ScreenerConfig cfg) {
  cfg.feature_count = p;
  Engine e(cfg);
  for (std::size_t i = 0; i < samples.size(); i += cfg.minibatch) {
    const std::size_t n = std::min(cfg.minibatch, samples.size() - i);
    e.observe_batch(std::span<const Sample>(samples.data() + i, n));
  }
  return e;
}

double safe_ratio(const ScoreVector& on, const ScoreVector& off) {
  try {
    return score_diff_ratio(on, off);
  } catch (const InvalidArgument&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

ScreenResult screen_stream(std::istream& in, const ScreenOptions& opt) {
  Engine engine(opt.config);
  SampleReader reader(in, opt.format, opt.label_column);
  std::vector<Sample> batch(opt.config.minibatch);
  ScreenResult res;
  while (true) {
    std::size_t fill = 0;
    while (fill < batch.size() && reader.next(batch[fill])) ++fill;
    if (fill == 0) break;
    engine.observe_batch(std::span<const Sample>(batch.data(), fill));
    res.samples += fill;
    if (fill < batch.size()) break;
  }
  if (res.samples == 0) throw InputError("input holds no samples");
  res.scores = engine.scores();
  res.ranking = rank(res.scores);
  res.label_tokens = reader.labels().tokens();
  return res;
}

ScreenResult cmd_screen(std::istream& in, const ScreenOptions& opt) {
  const auto t0 = Clock::now();
  ScreenResult res = screen_stream(in, opt);
  const double wall = seconds_since(t0);
  {
    auto f = open_out(opt.out_dir, "scores.csv");
    write_scores_csv(f, res.scores, res.ranking);
  }
  if (opt.top_k > 0) {
    auto f = open_out(opt.out_dir, "selected.csv");
    f << "feature_index\n";
    for (auto j : select_top_k(res.ranking, opt.top_k)) f << (j + 1) << '\n';
  }
  Manifest m;
  m.set("command", "screen");
  m.set("input", opt.input_name);
  m.set("format", format_name(opt.format));
  describe_config(m, opt.config);
  m.set("seed", std::to_string(opt.seed));
  m.set("samples", std::to_string(res.samples));
  m.set("features", std::to_string(res.scores.scores.size()));
  m.set("labels", join(res.label_tokens));
  m.set("nan_features", std::to_string(res.ranking.nan_features.size()));
  m.set("wall_time_seconds", num(wall));
  auto f = open_out(opt.out_dir, "manifest.txt");
  m.write(f);
  return res;
}

void cmd_compare(std::istream& in, const CompareOptions& opt) {
  const auto t0 = Clock::now();
  std::vector<std::string> tokens;
  const DenseDataset data = load_dataset(in, opt.format, opt.label_column, tokens);
  std::vector<Sample> samples(data.n);
  for (std::size_t i = 0; i < data.n; ++i) samples[i] = data.sample(i);

  auto rt_mb = open_out(opt.out_dir, "runtime_minibatch.csv");
  auto rt_eps = open_out(opt.out_dir, "runtime_epsilon.csv");
  auto counts = open_out(opt.out_dir, "count_difference.csv");
  auto dr = open_out(opt.out_dir, "score_diff_ratio.csv");
  auto mis = open_out(opt.out_dir, "misrank.csv");
  rt_mb << "method,minibatch,seconds\n";
  rt_eps << "method,epsilon,seconds\n";
  counts << "epsilon,count_difference\n";
  dr << "method,epsilon,score_diff_ratio\n";
  mis << "method,epsilon,misrank_ratio\n";

  if (opt.timing) {
    for (Method m : opt.methods) {
      for (auto mb : opt.minibatches) {
        ScreenerConfig cfg = opt.config;
        cfg.method = m;
        cfg.minibatch = mb;
        const auto t = Clock::now();
        Engine e = run_engine(samples, data.p, cfg);
        (void)e.scores();
        rt_mb << method_name(m) << ',' << mb << ',' << num(seconds_since(t)) << '\n';
      }
    }
  }

  // Offline tables are shared by all bin-count methods.
  std::vector<BinTable> offline_tables;
  for (std::size_t j = 0; j < data.p; ++j) {
    const auto col = data.column(j);
    offline_tables.push_back(offline_table(col, data.labels, data.classes(), opt.config.k_bins));
  }

  for (double eps : opt.epsilons) {
    bool counted = false;
    for (Method m : opt.methods) {
      if (!is_bincount(m)) continue;
      ScreenerConfig cfg = opt.config;
      cfg.method = m;
      cfg.epsilon = eps;
      const auto t = Clock::now();
      Engine e = run_engine(samples, data.p, cfg);
      const ScoreVector on = e.scores();
      const double secs = seconds_since(t);
      if (opt.timing) rt_eps << method_name(m) << ',' << num(eps) << ',' << num(secs) << '\n';
      const ScoreVector off = offline_score(data, m, cfg.k_bins);
      dr << method_name(m) << ',' << num(eps) << ',' << format_double(safe_ratio(on, off)) << '\n';
      mis << method_name(m) << ',' << num(eps) << ','
          << format_double(misrank_ratio(rank(on), rank(off), opt.top_fraction)) << '\n';
      if (!counted) {
        std::vector<BinTable> online;
        for (std::size_t j = 0; j < data.p; ++j) online.push_back(e.feature_table(j));
        counts << num(eps) << ',' << format_double(count_difference(online, offline_tables))
               << '\n';
        counted = true;
      }
    }
  }

  Manifest man;
  man.set("command", "compare");
  man.set("input", opt.input_name);
  man.set("format", format_name(opt.format));
  describe_config(man, opt.config);
  man.set("samples", std::to_string(data.n));
  man.set("features", std::to_string(data.p));
  man.set("labels", join(tokens));
  man.set("top_fraction", num(opt.top_fraction));
  man.set("wall_time_seconds", num(seconds_since(t0)));
  auto f = open_out(opt.out_dir, "manifest.txt");
  man.write(f);
}

DetectionReport cmd_bench(const BenchOptions& opt) {
  const auto t0 = Clock::now();
  DetectionReport report = run_grid(opt.grid);
  {
    auto f = open_out(opt.out_dir, "detection.csv");
    report.write_csv(f);
  }
  const auto& g = opt.grid;
  Manifest m;
  m.set("command", "bench");
  m.set("p", std::to_string(g.base.p));
  m.set("k_true", std::to_string(g.base.k_true));
  m.set("signal", num(g.base.signal));
  m.set("nu", num(g.base.nu));
  m.set("n_samples", std::to_string(g.base.n_samples));
  m.set("intercept", num(g.base.intercept));
  std::string seeds, shifts, alphas, methods;
  for (auto s : g.seeds) seeds += (seeds.empty() ? "" : " ") + std::to_string(s);
  for (auto l : g.shift_intervals) shifts += (shifts.empty() ? "" : " ") + std::to_string(l);
  for (auto a : g.alphas) alphas += (alphas.empty() ? "" : " ") + (a ? num(*a) : "none");
  for (auto x : g.methods) methods += (methods.empty() ? "" : " ") + std::string(method_name(x));
  m.set("seeds", seeds);
  m.set("shift_intervals", shifts);
  m.set("alphas", alphas);
  m.set("methods", methods);
  m.set("fade_period", std::to_string(g.fade_period));
  m.set("checkpoint_every", std::to_string(g.checkpoint_every));
  m.set("epsilon", num(g.epsilon));
  m.set("bins", std::to_string(g.k_bins));
  m.set("minibatch", std::to_string(g.minibatch));
  m.set("rows", std::to_string(report.rows.size()));
  m.set("wall_time_seconds", num(seconds_since(t0)));
  auto f = open_out(opt.out_dir, "manifest.txt");
  m.write(f);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<double> parse_alpha(const std::string& s) {
  if (s.empty() || s == "none" || s == "off") return std::nullopt;
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ConfigError("bad fading factor '" + s + "'");
  }
  return v;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) {
    if (n == "all") {
      out = {Method::kTScore, Method::kFisher, Method::kGini, Method::kChiSquare,
             Method::kMutualInfo};
      continue;
    }
    out.push_back(parse_method(n));
  }
  return out;
}

// Opens the named input, or stdin for "-".
template <typename Fn>
void with_input(const std::string& name, Fn&& fn) {
  if (name == "-") {
    fn(std::cin);
    return;
  }
  std::ifstream f(name, std::ios::binary);
  if (!f) throw InputError("cannot open " + name);
  fn(f);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"streamscreen: one-pass feature screening for labeled streams"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // screen
  ScreenOptions so;
  std::string screen_method = "mutual_info", screen_format = "svmlight", screen_alpha;
  auto* screen = app.add_subcommand("screen", "score and rank the features of a dataset");
  screen->add_option("input", so.input_name, "input file, - for stdin")->required();
  screen->add_option("--method", screen_method, "t_score|fisher|gini|chi_square|mutual_info")
      ->envname("STREAMSCREEN_METHOD")
      ->capture_default_str();
  screen->add_option("--epsilon", so.config.epsilon, "sketch precision")
      ->envname("STREAMSCREEN_EPSILON")
      ->capture_default_str();
  screen->add_option("--bins", so.config.k_bins, "quantile bins")
      ->envname("STREAMSCREEN_BINS")
      ->capture_default_str();
  screen->add_option("--minibatch", so.config.minibatch, "samples per batch")
      ->envname("STREAMSCREEN_MINIBATCH")
      ->capture_default_str();
  screen->add_option("--alpha", screen_alpha, "fading factor in (0,1); none disables")
      ->envname("STREAMSCREEN_ALPHA");
  screen->add_flag("--sparse", so.config.sparse, "sparse ingestion")->envname("STREAMSCREEN_SPARSE");
  screen->add_option("--format", screen_format, "svmlight|csv")
      ->envname("STREAMSCREEN_FORMAT")
      ->capture_default_str();
  screen->add_option("--label-column", so.label_column, "csv label column (0-based)")
      ->capture_default_str();
  screen->add_option("--top-k", so.top_k, "also write the k best features");
  screen->add_option("--seed", so.seed, "recorded in the manifest");
  screen->add_option("--threads", so.config.threads, "feature-sharded workers")
      ->envname("STREAMSCREEN_THREADS")
      ->capture_default_str();
  screen->add_option("--out-dir", so.out_dir, "output directory")
      ->envname("STREAMSCREEN_OUT_DIR")
      ->capture_default_str();

  // compare
  CompareOptions co;
  std::string cmp_format = "svmlight";
  std::vector<std::string> cmp_methods;
  bool no_timing = false;
  auto* compare = app.add_subcommand("compare", "online vs offline comparison tables");
  compare->add_option("input", co.input_name, "input file, - for stdin")->required();
  compare->add_option("--method", cmp_methods, "methods (repeat or comma-separate); default all")
      ->delimiter(',');
  compare->add_option("--epsilon", co.config.epsilon, "fixed precision for minibatch timing")
      ->envname("STREAMSCREEN_EPSILON")
      ->capture_default_str();
  compare->add_option("--epsilon-grid", co.epsilons, "precision grid")->delimiter(',');
  compare->add_option("--minibatch", co.config.minibatch, "fixed minibatch for epsilon runs")
      ->envname("STREAMSCREEN_MINIBATCH")
      ->capture_default_str();
  compare->add_option("--minibatch-grid", co.minibatches, "minibatch grid")->delimiter(',');
  compare->add_option("--bins", co.config.k_bins, "quantile bins")
      ->envname("STREAMSCREEN_BINS")
      ->capture_default_str();
  compare->add_option("--format", cmp_format, "svmlight|csv")
      ->envname("STREAMSCREEN_FORMAT")
      ->capture_default_str();
  compare->add_option("--label-column", co.label_column, "csv label column (0-based)");
  compare->add_option("--top-fraction", co.top_fraction, "mis-rank window")->capture_default_str();
  compare->add_flag("--no-timing", no_timing, "skip the runtime tables");
  compare->add_option("--out-dir", co.out_dir, "output directory")
      ->envname("STREAMSCREEN_OUT_DIR")
      ->capture_default_str();

  // bench
  BenchOptions bo;
  GridConfig& g = bo.grid;
  std::vector<std::string> bench_methods, bench_alphas;
  std::uint64_t seed = 1, seed_count = 1;
  auto* bench = app.add_subcommand("bench", "synthetic drift detection benchmark");
  bench->add_option("--method", bench_methods, "methods; default all")->delimiter(',');
  bench->add_option("--shift", g.shift_intervals, "shift intervals l")->delimiter(',')
      ->capture_default_str();
  bench->add_option("--alpha", bench_alphas, "fading factors; none = no adaptation")
      ->delimiter(',');
  bench->add_option("--fade-period", g.fade_period, "samples per fading step")
      ->capture_default_str();
  bench->add_option("--seed", seed, "first seed")->capture_default_str();
  bench->add_option("--seeds", seed_count, "number of consecutive seeds to average")
      ->capture_default_str();
  bench->add_option("--samples", g.base.n_samples, "stream length")->capture_default_str();
  bench->add_option("--features", g.base.p, "feature count")->capture_default_str();
  bench->add_option("--k-true", g.base.k_true, "true features")->capture_default_str();
  bench->add_option("--signal", g.base.signal, "coefficient value")->capture_default_str();
  bench->add_option("--nu", g.base.nu, "correlation parameter")->capture_default_str();
  bench->add_option("--intercept", g.base.intercept, "constant term")->capture_default_str();
  bench->add_option("--checkpoint", g.checkpoint_every, "samples between checkpoints")
      ->capture_default_str();
  bench->add_option("--top-k", g.selected_counts, "selected counts")->delimiter(',')
      ->capture_default_str();
  bench->add_option("--epsilon", g.epsilon, "sketch precision")
      ->envname("STREAMSCREEN_EPSILON")
      ->capture_default_str();
  bench->add_option("--bins", g.k_bins, "quantile bins")
      ->envname("STREAMSCREEN_BINS")
      ->capture_default_str();
  bench->add_option("--minibatch", g.minibatch, "samples per batch")
      ->envname("STREAMSCREEN_MINIBATCH")
      ->capture_default_str();
  bench->add_option("--out-dir", bo.out_dir, "output directory")
      ->envname("STREAMSCREEN_OUT_DIR")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*screen) {
      so.config.method = parse_method(screen_method);
      so.config.alpha = parse_alpha(screen_alpha);
      so.format = parse_format(screen_format);
      so.config.validate();
      with_input(so.input_name, [&](std::istream& in) { cmd_screen(in, so); });
    } else if (*compare) {
      co.format = parse_format(cmp_format);
      if (!cmp_methods.empty()) co.methods = parse_methods(cmp_methods);
      co.timing = !no_timing;
      co.config.validate();
      with_input(co.input_name, [&](std::istream& in) { cmd_compare(in, co); });
    } else if (*bench) {
      if (!bench_methods.empty()) g.methods = parse_methods(bench_methods);
      if (!bench_alphas.empty()) {
        g.alphas.clear();
        for (const auto& a : bench_alphas) g.alphas.push_back(parse_alpha(a));
      }
      g.seeds.clear();
      for (std::uint64_t s = 0; s < seed_count; ++s) g.seeds.push_back(seed + s);
      cmd_bench(bo);
    }
  } catch (const DegenerateScore& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace streamscreen
