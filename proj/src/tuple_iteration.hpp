#pragma once

#include <cstddef>
#include <vector>

namespace mfldp::detail {

/// Calls fn(idx) for every ordered tuple of `len` distinct indices from
/// [0, n) avoiding the first `fixed` entries already stored in idx.
template <typename F>
void for_each_distinct(std::size_t n, std::vector<std::size_t>& idx, std::size_t fixed, F&& fn) {
  if (fixed == idx.size()) {
    fn(idx);
    return;
  }
  for (std::size_t j = 0; j < n; ++j) {
    bool used = false;
    for (std::size_t t = 0; t < fixed; ++t) used = used || idx[t] == j;
    if (used) continue;
    idx[fixed] = j;
    for_each_distinct(n, idx, fixed + 1, fn);
  }
}

/// Mixed-radix decoding of a configuration number (first digit slowest).
inline void decode_digits(std::size_t code, std::size_t s, std::vector<std::size_t>& digits) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    digits[i] = code % s;
    code /= s;
  }
}

/// Increments a mixed-radix counter; returns false on wrap-around.
inline bool next_digits(std::size_t s, std::vector<std::size_t>& digits) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < s) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace mfldp::detail
