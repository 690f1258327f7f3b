#include <cmath>

#include "mfldp/error.hpp"
#include "mfldp/kernels.hpp"
#include "mfldp/numeric.hpp"
#include "tuple_iteration.hpp"

namespace mfldp::kernels {

namespace serial {

TupleTotal tuple_total(const InteractionPotential& w, const Configuration& x) {
  const std::size_t k = static_cast<std::size_t>(w.order());
  TupleTotal total;
  CompensatedSum finite;
  std::vector<std::size_t> idx(k);
  std::vector<Point> tuple(k);
  detail::for_each_distinct(x.size(), idx, 0, [&](const std::vector<std::size_t>& t) {
    for (std::size_t j = 0; j < k; ++j) tuple[j] = x[t[j]];
    const double v = w.value(tuple);
    if (v == kInf) {
      ++total.infinite;
    } else {
      finite.add(v);
    }
  });
  total.finite = finite.value();
  return total;
}

TupleTotal decoupled_total(const InteractionPotential& w, std::span<const Configuration> replicas) {
  const std::size_t k = static_cast<std::size_t>(w.order());
  TupleTotal total;
  CompensatedSum finite;
  std::vector<std::size_t> idx(k);
  std::vector<Point> tuple(k);
  detail::for_each_distinct(replicas[0].size(), idx, 0, [&](const std::vector<std::size_t>& t) {
    for (std::size_t j = 0; j < k; ++j) tuple[j] = replicas[j][t[j]];
    const double v = w.value(tuple);
    if (v == kInf) {
      ++total.infinite;
    } else {
      finite.add(v);
    }
  });
  total.finite = finite.value();
  return total;
}

EnergyParts atom_energy(const InteractionPotential& w, const DiscreteMeasure& nu) {
  const std::size_t k = static_cast<std::size_t>(w.order());
  const std::size_t s = nu.size();
  CompensatedSum pos, neg;
  bool pos_inf = false;
  std::vector<std::size_t> idx(k, 0);
  std::vector<Point> tuple(k);
  do {
    double weight = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      weight *= nu.weight(idx[j]);
      tuple[j] = nu.point(idx[j]);
    }
    if (weight == 0.0) continue;
    const double v = w.value(tuple);
    if (v == kInf) {
      pos_inf = true;
    } else if (v > 0.0) {
      pos.add(weight * v);
    } else {
      neg.add(-weight * v);
    }
  } while (detail::next_digits(s, idx));
  return {pos_inf ? kInf : pos.value(), neg.value()};
}

std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  const auto& space = *mu.space();
  std::vector<double> cost(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double r = space.distance(mu.point(i), nu.point(j));
      cost[i * nu.size() + j] = p == 1.0 ? r : std::pow(r, p);
    }
  return cost;
}

double enumerate_log_sum(std::size_t s, std::size_t n, const LogTerm& log_term) {
  LogSumExp acc;
  std::vector<std::size_t> digits(n, 0);
  do {
    acc.add(log_term(digits));
  } while (detail::next_digits(s, digits));
  return acc.value();
}

}  // namespace serial

TupleTotal partial_total(const InteractionPotential& w, const Configuration& x, std::size_t skip, Point p) {
  const std::size_t k = static_cast<std::size_t>(w.order());
  const std::size_t n = x.size();
  TupleTotal total;
  if (k == 1) {
    const double v = w.value(std::span<const Point>(&p, 1));
    if (v == kInf) {
      total.infinite = 1;
    } else {
      total.finite = v;
    }
    return total;
  }
  if (k == 2) {
    CompensatedSum finite;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == skip) continue;
      const double v = w.pair(p, x[j]);
      if (v == kInf) {
        ++total.infinite;
      } else {
        finite.add(v);
      }
    }
    total.finite = finite.value();
    return total;
  }
  CompensatedSum finite;
  std::vector<std::size_t> idx(k);
  std::vector<Point> tuple(k);
  tuple[0] = p;
  idx[0] = skip;
  detail::for_each_distinct(n, idx, 1, [&](const std::vector<std::size_t>& t) {
    for (std::size_t j = 1; j < k; ++j) tuple[j] = x[t[j]];
    const double v = w.value(tuple);
    if (v == kInf) {
      ++total.infinite;
    } else {
      finite.add(v);
    }
  });
  total.finite = finite.value();
  return total;
}

}  // namespace mfldp::kernels
