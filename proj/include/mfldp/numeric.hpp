#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace mfldp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Streaming log-sum-exp accumulator. Terms equal to -inf contribute nothing;
/// a +inf term makes the result +inf.
class LogSumExp {
 public:
  void add(double log_term);
  void add(const LogSumExp& other);
  double value() const;
  bool empty() const { return max_ == kNegInf; }

 private:
  double max_ = kNegInf;
  double scaled_ = 0.0;  // sum of exp(term - max_)
};

double log_sum_exp(std::span<const double> terms);
double compensated_sum(std::span<const double> terms);

double log_factorial(std::uint64_t n);
double log_binomial(std::uint64_t n, std::uint64_t k);
double log_multinomial(std::span<const std::uint64_t> counts);

/// n (n-1) ... (n-m+1), as a double. Zero when m > n.
double falling_factorial(std::uint64_t n, std::uint64_t m);

/// |I_n^k| = n!/(n-k)!
double ordered_tuple_count(std::uint64_t n, std::uint64_t k);

/// x log x with the convention 0 log 0 = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Iterates all compositions of `total` into `parts` nonnegative integers,
/// in lexicographic order of the count vector (first part largest first).
class CompositionIterator {
 public:
  CompositionIterator(std::uint64_t total, std::size_t parts);
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  bool next();

 private:
  std::vector<std::uint64_t> counts_;
};

/// Number of compositions of `total` into `parts` parts, saturating at 2^63.
double composition_count(std::uint64_t total, std::size_t parts);

}  // namespace mfldp
