#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmis {

inline constexpr const char* kArtifactVersion = "qmis 0.1.0";

// Error hierarchy. Everything thrown by the library derives from qmis::error.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument or inconsistent configuration.
class parameter_error : public error {
 public:
  explicit parameter_error(const std::string& what) : error(what) {}
};

// A computation would exceed a configured size cap (qubits, memory, branches).
class size_limit_error : public error {
 public:
  size_limit_error(const std::string& what, std::size_t requested, std::size_t limit)
      : error(what), requested_(requested), limit_(limit) {}
  std::size_t requested() const { return requested_; }
  std::size_t limit() const { return limit_; }

 private:
  std::size_t requested_;
  std::size_t limit_;
};

// File parse/write failures, message carries file:line context.
class io_error : public error {
 public:
  explicit io_error(const std::string& what) : error(what) {}
};

// Enumeration exceeded its output cap; partial count is preserved.
class enumeration_cap_error : public error {
 public:
  enumeration_cap_error(const std::string& what, std::uint64_t partial_count)
      : error(what), partial_count_(partial_count) {}
  std::uint64_t partial_count() const { return partial_count_; }

 private:
  std::uint64_t partial_count_;
};

// Config validation failure; collects every offending key, not just the first.
class validation_error : public error {
 public:
  explicit validation_error(std::vector<std::string> issues)
      : error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "config validation failed:";
    for (const auto& s : issues) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> issues_;
};

// Pairwise (tree) summation; bounds float drift for long reductions.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Kahan-compensated accumulator for single-pass sums.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace qmis
