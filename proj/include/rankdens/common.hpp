#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankdens {

using Item = std::uint32_t;

/// Malformed or inconsistent input data (files, rankings read from text).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  [[nodiscard]] double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// log(k!) for k = 0..n.
class LogFactorials {
 public:
  LogFactorials() = default;
  explicit LogFactorials(std::size_t n) : table_(n + 1, 0.0) {
    for (std::size_t k = 2; k <= n; ++k) {
      table_[k] = table_[k - 1] + std::log(static_cast<double>(k));
    }
  }
  [[nodiscard]] double operator()(std::size_t k) const {
    return k < table_.size() ? table_[k] : std::lgamma(static_cast<double>(k) + 1.0);
  }
  [[nodiscard]] std::size_t size() const { return table_.size(); }

 private:
  std::vector<double> table_;
};

/// Number of unordered item pairs, n(n-1)/2: the maximal Kendall distance.
constexpr std::uint64_t max_distance(std::uint64_t n) { return n * (n - 1) / 2; }

}  // namespace rankdens
