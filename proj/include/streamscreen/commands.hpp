#pragma once

// Command-line surface: screen, compare, bench.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "streamscreen/engine.hpp"
#include "streamscreen/io.hpp"
#include "streamscreen/synth_bench.hpp"

namespace streamscreen {

struct ScreenOptions {
  ScreenerConfig config;
  InputFormat format = InputFormat::kSvmlight;
  std::size_t label_column = 0;
  std::size_t top_k = 0;  // 0: no selection file
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string input_name = "-";
};

struct ScreenResult {
  ScoreVector scores;
  Ranking ranking;
  std::uint64_t samples = 0;
  std::vector<std::string> label_tokens;
};

// Streams `in` once through an engine in minibatches.
ScreenResult screen_stream(std::istream& in, const ScreenOptions& opt);

// screen_stream plus scores.csv, optional selected.csv, and manifest.txt.
ScreenResult cmd_screen(std::istream& in, const ScreenOptions& opt);

struct CompareOptions {
  ScreenerConfig config;  // fixed epsilon and minibatch
  std::vector<Method> methods{Method::kTScore, Method::kFisher, Method::kGini, Method::kChiSquare,
                              Method::kMutualInfo};
  std::vector<double> epsilons{1.0 / 5, 1.0 / 50, 1.0 / 100, 1.0 / 500,
                               1.0 / 1000, 1.0 / 1500, 1.0 / 2000};
  std::vector<std::size_t> minibatches{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048};
  double top_fraction = 0.1;
  bool timing = true;
  InputFormat format = InputFormat::kSvmlight;
  std::size_t label_column = 0;
  std::string out_dir = ".";
  std::string input_name = "-";
};

// Writes runtime_minibatch.csv, runtime_epsilon.csv, count_difference.csv,
// score_diff_ratio.csv, misrank.csv and manifest.txt.
void cmd_compare(std::istream& in, const CompareOptions& opt);

struct BenchOptions {
  GridConfig grid;
  std::string out_dir = ".";
};

// Writes detection.csv and manifest.txt.
DetectionReport cmd_bench(const BenchOptions& opt);

// Full CLI. Returns the process exit code; errors go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace streamscreen
