#include "streamscreen/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "streamscreen/errors.hpp"

namespace streamscreen {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view tok, std::size_t line_no, const char* what) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line_no, std::string("bad ") + what + " '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError(line_no, std::string("non-finite ") + what);
  }
  return v;
}

std::size_t parse_index(std::string_view tok, std::size_t line_no) {
  std::size_t v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line_no, "bad feature index '" + std::string(tok) + "'");
  }
  if (v == 0) {
    throw ParseError(line_no, "feature indices are 1-based");
  }
  return v;
}

}  // namespace

InputFormat parse_format(std::string_view name) {
  if (name == "svmlight" || name == "libsvm") return InputFormat::kSvmlight;
  if (name == "csv") return InputFormat::kCsv;
  throw ConfigError("unknown input format '" + std::string(name) + "'");
}

const char* format_name(InputFormat f) noexcept {
  return f == InputFormat::kCsv ? "csv" : "svmlight";
}

SampleRecord parse_sample(std::string_view line, InputFormat format, std::size_t line_no,
                          std::size_t label_column) {
  SampleRecord rec;
  if (format == InputFormat::kSvmlight) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) throw ParseError(line_no, "empty record");
    rec.sparse = true;
    std::size_t pos = 0;
    bool first = true;
    while (pos < line.size()) {
      while (pos < line.size() && is_space(line[pos])) ++pos;
      std::size_t end = pos;
      while (end < line.size() && !is_space(line[end])) ++end;
      const std::string_view tok = line.substr(pos, end - pos);
      pos = end;
      if (tok.empty()) continue;
      if (first) {
        rec.label = std::string(tok);
        first = false;
        continue;
      }
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "malformed pair '" + std::string(tok) + "'");
      }
      SparseEntry e;
      e.index = parse_index(tok.substr(0, colon), line_no);
      e.value = parse_real(tok.substr(colon + 1), line_no, "value");
      if (!rec.entries.empty() && e.index <= rec.entries.back().index) {
        throw ParseError(line_no, "feature indices must be strictly increasing");
      }
      rec.entries.push_back(e);
    }
    return rec;
  }

  line = trim(line);
  if (line.empty()) throw ParseError(line_no, "empty record");
  std::size_t col = 0;
  std::size_t pos = 0;
  bool have_label = false;
  while (true) {
    const auto comma = line.find(',', pos);
    const std::string_view field =
        trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (col == label_column) {
      if (field.empty()) throw ParseError(line_no, "empty label");
      rec.label = std::string(field);
      have_label = true;
    } else {
      rec.dense.push_back(parse_real(field, line_no, "value"));
    }
    ++col;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (!have_label) throw ParseError(line_no, "missing label column");
  return rec;
}

std::size_t LabelMap::id(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

Sample to_sample(SampleRecord record, LabelMap& labels) {
  const std::size_t label = labels.id(record.label);
  if (!record.sparse) return Sample::make_dense(label, std::move(record.dense));
  for (auto& e : record.entries) e.index -= 1;
  return Sample::make_sparse(label, std::move(record.entries));
}

SampleReader::SampleReader(std::istream& in, InputFormat format, std::size_t label_column)
    : in_(in), format_(format), label_column_(label_column) {}

bool SampleReader::next(Sample& out) {
  while (std::getline(in_, buf_)) {
    ++line_;
    const std::string_view t = trim(buf_);
    if (t.empty() || t.front() == '#') continue;
    SampleRecord rec = parse_sample(t, format_, line_, label_column_);
    if (!rec.sparse) {
      if (arity_ == 0) {
        arity_ = rec.dense.size();
      } else if (rec.dense.size() != arity_) {
        throw ParseError(line_, "expected " + std::to_string(arity_) + " values, got " +
                                    std::to_string(rec.dense.size()));
      }
    }
    out = to_sample(std::move(rec), labels_);
    return true;
  }
  if (in_.bad()) throw InputError("read error");
  return false;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_scores_csv(std::ostream& out, const ScoreVector& scores, const Ranking& ranking) {
  out << "feature_index,score,rank\n";
  for (std::size_t j = 0; j < scores.scores.size(); ++j) {
    out << (j + 1) << ',' << format_double(scores.scores[j]) << ',' << ranking.rank_of[j] << '\n';
  }
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << ": " << v << '\n';
}

}  // namespace streamscreen
