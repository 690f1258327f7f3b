#pragma once

#include <cstddef>
#include <vector>

#include "mfldp/numeric.hpp"

namespace mfldp {

/// Worker count: MFLDP_THREADS if set and positive, else the OpenMP default.
int worker_count();

/// Applies MFLDP_THREADS to the OpenMP runtime. Called once by the CLI.
void configure_threads_from_env();

/// Splits [0, count) into fixed blocks of `block` items. Block boundaries
/// depend only on (count, block), never on the thread count, so reductions
/// merged in block order are reproducible.
struct BlockRange {
  std::size_t begin;
  std::size_t end;
};
std::vector<BlockRange> make_blocks(std::size_t count, std::size_t block);

/// Deterministic parallel sum: partial sums per block, merged serially in
/// block order with compensated summation.
template <typename F>
double block_sum(std::size_t count, std::size_t block, F&& term) {
  const auto blocks = make_blocks(count, block);
  std::vector<double> partial(blocks.size(), 0.0);
  const long nb = static_cast<long>(blocks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long b = 0; b < nb; ++b) {
    CompensatedSum s;
    for (std::size_t i = blocks[b].begin; i < blocks[b].end; ++i) s.add(term(i));
    partial[static_cast<std::size_t>(b)] = s.value();
  }
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

}  // namespace mfldp
