#include "mfldp/numeric.hpp"

#include <algorithm>

namespace mfldp {

void LogSumExp::add(double log_term) {
  if (std::isnan(log_term)) {
    max_ = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  if (log_term == kNegInf) return;
  if (log_term == kInf) {
    max_ = kInf;
    scaled_ = 1.0;
    return;
  }
  if (max_ == kInf) return;
  if (log_term <= max_) {
    scaled_ += std::exp(log_term - max_);
  } else {
    scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
    max_ = log_term;
  }
}

void LogSumExp::add(const LogSumExp& other) {
  if (other.max_ == kNegInf) return;
  if (std::isnan(other.max_) || std::isnan(max_)) {
    max_ = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  if (other.max_ == kInf || max_ == kInf) {
    max_ = kInf;
    scaled_ = 1.0;
    return;
  }
  if (max_ == kNegInf) {
    *this = other;
    return;
  }
  if (other.max_ <= max_) {
    scaled_ += other.scaled_ * std::exp(other.max_ - max_);
  } else {
    scaled_ = scaled_ * std::exp(max_ - other.max_) + other.scaled_;
    max_ = other.max_;
  }
}

double LogSumExp::value() const {
  if (max_ == kNegInf || max_ == kInf || std::isnan(max_)) return max_;
  return max_ + std::log(scaled_);
}

double log_sum_exp(std::span<const double> terms) {
  LogSumExp acc;
  for (double t : terms) acc.add(t);
  return acc.value();
}

double compensated_sum(std::span<const double> terms) {
  CompensatedSum s;
  for (double t : terms) s.add(t);
  return s.value();
}

double log_factorial(std::uint64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return kNegInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_multinomial(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  double r = 0.0;
  for (auto c : counts) {
    total += c;
    r -= log_factorial(c);
  }
  return r + log_factorial(total);
}

double falling_factorial(std::uint64_t n, std::uint64_t m) {
  if (m > n) return 0.0;
  double r = 1.0;
  for (std::uint64_t j = 0; j < m; ++j) r *= static_cast<double>(n - j);
  return r;
}

double ordered_tuple_count(std::uint64_t n, std::uint64_t k) { return falling_factorial(n, k); }

CompositionIterator::CompositionIterator(std::uint64_t total, std::size_t parts)
    : counts_(parts, 0) {
  if (parts > 0) counts_[0] = total;
}

bool CompositionIterator::next() {
  // Reverse-lexicographic successor: take one unit from the rightmost nonzero
  // part left of the last, and move it together with the last part's mass
  // into the slot just right of it.
  const std::size_t p = counts_.size();
  if (p <= 1) return false;
  std::size_t j = p - 1;
  do {
    if (j == 0) return false;
    --j;
  } while (counts_[j] == 0);
  const std::uint64_t tail = counts_[p - 1];
  counts_[p - 1] = 0;
  counts_[j] -= 1;
  counts_[j + 1] = tail + 1;
  return true;
}

double composition_count(std::uint64_t total, std::size_t parts) {
  if (parts == 0) return total == 0 ? 1.0 : 0.0;
  const double lc = log_binomial(total + parts - 1, parts - 1);
  return std::min(std::exp(lc), 9.2e18);
}

}  // namespace mfldp
