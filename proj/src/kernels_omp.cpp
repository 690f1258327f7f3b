#include <cmath>

#include "mfldp/kernels.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/parallel.hpp"
#include "tuple_iteration.hpp"

namespace mfldp::kernels::omp {

namespace {

constexpr std::size_t kRowBlock = 16;
constexpr std::size_t kCodeBlock = 4096;

struct PartialTotal {
  CompensatedSum finite;
  std::uint64_t infinite = 0;

  void add(double v) {
    if (v == kInf) {
      ++infinite;
    } else {
      finite.add(v);
    }
  }
};

TupleTotal merge(const std::vector<PartialTotal>& parts, double factor) {
  CompensatedSum finite;
  std::uint64_t infinite = 0;
  for (const auto& p : parts) {
    finite.add(p.finite.value());
    infinite += p.infinite;
  }
  return {factor * finite.value(), static_cast<std::uint64_t>(factor) * infinite};
}

// Sum over ordered k-tuples of distinct indices; get(j, i) is the point used
// at tuple position j for particle index i.
template <typename Get>
TupleTotal distinct_tuple_sum(const InteractionPotential& w, std::size_t n, Get&& get) {
  const std::size_t k = static_cast<std::size_t>(w.order());
  const auto blocks = make_blocks(n, kRowBlock);
  std::vector<PartialTotal> parts(blocks.size());
  const long nb = static_cast<long>(blocks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long b = 0; b < nb; ++b) {
    std::vector<std::size_t> idx(k);
    std::vector<Point> tuple(k);
    auto& part = parts[static_cast<std::size_t>(b)];
    for (std::size_t i = blocks[b].begin; i < blocks[b].end; ++i) {
      idx[0] = i;
      detail::for_each_distinct(n, idx, 1, [&](const std::vector<std::size_t>& t) {
        for (std::size_t j = 0; j < k; ++j) tuple[j] = get(j, t[j]);
        part.add(w.value(tuple));
      });
    }
  }
  return merge(parts, 1.0);
}

}  // namespace

TupleTotal tuple_total(const InteractionPotential& w, const Configuration& x) {
  const std::size_t n = x.size();
  if (w.order() != 2) return distinct_tuple_sum(w, n, [&x](std::size_t, std::size_t i) { return x[i]; });
  // symmetric pair potential: unordered pairs, doubled
  const auto blocks = make_blocks(n, kRowBlock);
  std::vector<PartialTotal> parts(blocks.size());
  const long nb = static_cast<long>(blocks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long b = 0; b < nb; ++b) {
    auto& part = parts[static_cast<std::size_t>(b)];
    for (std::size_t i = blocks[b].begin; i < blocks[b].end; ++i)
      for (std::size_t j = i + 1; j < n; ++j) part.add(w.pair(x[i], x[j]));
  }
  return merge(parts, 2.0);
}

TupleTotal decoupled_total(const InteractionPotential& w, std::span<const Configuration> replicas) {
  return distinct_tuple_sum(w, replicas[0].size(),
                            [replicas](std::size_t j, std::size_t i) { return replicas[j][i]; });
}

EnergyParts atom_energy(const InteractionPotential& w, const DiscreteMeasure& nu) {
  const std::size_t k = static_cast<std::size_t>(w.order());
  const std::size_t s = nu.size();
  const auto blocks = make_blocks(s, kRowBlock);
  std::vector<CompensatedSum> pos(blocks.size()), neg(blocks.size());
  std::vector<char> pos_inf(blocks.size(), 0);
  const long nb = static_cast<long>(blocks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long b = 0; b < nb; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    std::vector<std::size_t> rest(k - 1, 0);
    std::vector<Point> tuple(k);
    for (std::size_t i = blocks[b].begin; i < blocks[b].end; ++i) {
      if (nu.weight(i) == 0.0) continue;
      tuple[0] = nu.point(i);
      std::fill(rest.begin(), rest.end(), 0);
      do {
        double weight = nu.weight(i);
        for (std::size_t j = 1; j < k; ++j) {
          weight *= nu.weight(rest[j - 1]);
          tuple[j] = nu.point(rest[j - 1]);
        }
        if (weight == 0.0) continue;
        const double v = w.value(tuple);
        if (v == kInf) {
          pos_inf[ub] = 1;
        } else if (v > 0.0) {
          pos[ub].add(weight * v);
        } else {
          neg[ub].add(-weight * v);
        }
      } while (detail::next_digits(s, rest));
    }
  }
  CompensatedSum p, q;
  bool any_inf = false;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    p.add(pos[b].value());
    q.add(neg[b].value());
    any_inf = any_inf || pos_inf[b];
  }
  return {any_inf ? kInf : p.value(), q.value()};
}

std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  const auto& space = *mu.space();
  const std::size_t rows = mu.size(), cols = nu.size();
  std::vector<double> cost(rows * cols);
  const long nr = static_cast<long>(rows);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long i = 0; i < nr; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < cols; ++j) {
      const double r = space.distance(mu.point(ui), nu.point(j));
      cost[ui * cols + j] = p == 1.0 ? r : std::pow(r, p);
    }
  }
  return cost;
}

double enumerate_log_sum(std::size_t s, std::size_t n, const LogTerm& log_term) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= s;
  const auto blocks = make_blocks(total, kCodeBlock);
  std::vector<LogSumExp> parts(blocks.size());
  const long nb = static_cast<long>(blocks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long b = 0; b < nb; ++b) {
    std::vector<std::size_t> digits(n);
    detail::decode_digits(blocks[b].begin, s, digits);
    auto& acc = parts[static_cast<std::size_t>(b)];
    for (std::size_t code = blocks[b].begin; code < blocks[b].end; ++code) {
      acc.add(log_term(digits));
      detail::next_digits(s, digits);
    }
  }
  LogSumExp total_acc;
  for (const auto& p : parts) total_acc.add(p);
  return total_acc.value();
}

}  // namespace mfldp::kernels::omp
