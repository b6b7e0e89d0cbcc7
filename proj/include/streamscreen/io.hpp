#pragma once

// Text stream readers and report writers.
//
// svmlight: "<label> <i>:<v> <i>:<v> ..." with 1-based, strictly increasing
// indices; anything after '#' is ignored. csv: headerless comma-separated
// reals with one label column (default the first).

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "streamscreen/engine.hpp"

namespace streamscreen {

enum class InputFormat { kSvmlight, kCsv };

InputFormat parse_format(std::string_view name);
const char* format_name(InputFormat f) noexcept;

struct SampleRecord {
  std::string label;
  bool sparse = false;
  std::vector<double> dense;
  std::vector<SparseEntry> entries;  // 1-based indices, as in the file
};

// Throws ParseError carrying `line_no` on malformed input.
SampleRecord parse_sample(std::string_view line, InputFormat format, std::size_t line_no = 1,
                          std::size_t label_column = 0);

// Opaque label tokens to class ids, in first-seen order.
class LabelMap {
 public:
  std::size_t id(const std::string& token);
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::map<std::string, std::size_t> ids_;
  std::vector<std::string> tokens_;
};

Sample to_sample(SampleRecord record, LabelMap& labels);

// Reads samples one line at a time; blank and '#' lines are skipped. Dense
// rows must keep the arity of the first row.
class SampleReader {
 public:
  SampleReader(std::istream& in, InputFormat format, std::size_t label_column = 0);

  bool next(Sample& out);
  std::size_t line() const noexcept { return line_; }
  LabelMap& labels() noexcept { return labels_; }

 private:
  std::istream& in_;
  InputFormat format_;
  std::size_t label_column_;
  std::size_t line_ = 0;
  std::size_t arity_ = 0;
  std::string buf_;
  LabelMap labels_;
};

// feature_index (1-based), score, rank
void write_scores_csv(std::ostream& out, const ScoreVector& scores, const Ranking& ranking);

// %.17g, with nan / inf / -inf spelled out.
std::string format_double(double v);

// Ordered "key: value" lines.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void write(std::ostream& out) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace streamscreen
