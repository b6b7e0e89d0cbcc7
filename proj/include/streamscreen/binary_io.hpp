#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "streamscreen/errors.hpp"

namespace streamscreen {

// Native-endian raw writer for engine checkpoints. Snapshots are
// read back on the same platform that wrote them.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  template <typename T>
  void pod(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }

  void u64(std::uint64_t v) { pod(v); }
  void f64(double v) { pod(v); }
  void boolean(bool v) { pod(static_cast<std::uint8_t>(v ? 1 : 0)); }

  void doubles(const std::vector<double>& v) {
    u64(v.size());
    if (!v.empty()) {
      out_.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
  }

  void u64s(const std::vector<std::uint64_t>& v) {
    u64(v.size());
    for (auto x : v) u64(x);
  }

  void str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  template <typename T>
  T pod() {
    static_assert(std::is_trivially_copyable_v<T>);
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw InputError("snapshot truncated");
    return v;
  }

  std::uint64_t u64() { return pod<std::uint64_t>(); }
  double f64() { return pod<double>(); }
  bool boolean() { return pod<std::uint8_t>() != 0; }

  std::vector<double> doubles() {
    std::vector<double> v(checked_len());
    if (!v.empty()) {
      in_.read(reinterpret_cast<char*>(v.data()),
               static_cast<std::streamsize>(v.size() * sizeof(double)));
      if (!in_) throw InputError("snapshot truncated");
    }
    return v;
  }

  std::vector<std::uint64_t> u64s() {
    std::vector<std::uint64_t> v(checked_len());
    for (auto& x : v) x = u64();
    return v;
  }

  std::string str() {
    std::string s(checked_len(), '\0');
    in_.read(s.data(), static_cast<std::streamsize>(s.size()));
    if (!in_) throw InputError("snapshot truncated");
    return s;
  }

 private:
  std::size_t checked_len() {
    auto n = u64();
    if (n > (std::uint64_t{1} << 40)) throw InputError("snapshot corrupt: length");
    return static_cast<std::size_t>(n);
  }

  std::istream& in_;
};

}  // namespace streamscreen
