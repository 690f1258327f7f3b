#include "mfldp/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace mfldp {

namespace {

int env_threads() {
  const char* v = std::getenv("MFLDP_THREADS");
  if (v == nullptr) return 0;
  try {
    const int t = std::stoi(v);
    return t > 0 ? t : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace

int worker_count() {
  const int cap = env_threads();
  const int def = omp_get_max_threads();
  return cap > 0 && cap < def ? cap : def;
}

void configure_threads_from_env() {
  const int cap = env_threads();
  if (cap > 0) omp_set_num_threads(cap);
}

std::vector<BlockRange> make_blocks(std::size_t count, std::size_t block) {
  if (block == 0) block = 1;
  std::vector<BlockRange> out;
  out.reserve(count / block + 1);
  for (std::size_t b = 0; b < count; b += block) out.push_back({b, std::min(count, b + block)});
  return out;
}

}  // namespace mfldp
