#include "mfldp/wasserstein.hpp"

#include <algorithm>
#include <cmath>

#include "mfldp/error.hpp"
#include "mfldp/integrability.hpp"
#include "mfldp/kernels.hpp"
#include "mfldp/numeric.hpp"

namespace mfldp {

namespace {

constexpr double kMassEps = 1e-15;

double powp(double r, double p) { return p == 1.0 ? r : std::pow(r, p); }

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::invalid_argument, "p must be >= 1");
}

double quantile_cost(std::span<const double> x, std::span<const double> a, std::span<const double> y,
                     std::span<const double> b, double p) {
  CompensatedSum cost;
  std::size_t i = 0, j = 0;
  double ra = a.empty() ? 0.0 : a[0], rb = b.empty() ? 0.0 : b[0];
  while (i < a.size() && j < b.size()) {
    if (ra <= kMassEps) {
      if (++i < a.size()) ra = a[i];
      continue;
    }
    if (rb <= kMassEps) {
      if (++j < b.size()) rb = b[j];
      continue;
    }
    const double step = std::min(ra, rb);
    cost.add(step * powp(std::abs(x[i] - y[j]), p));
    ra -= step;
    rb -= step;
  }
  return std::max(0.0, cost.value());
}

}  // namespace

double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  check_p(p);
  for (const auto* m : {&mu, &nu})
    if (!m->space() || m->space()->is_finite() || m->space()->dim() != 1)
      throw Error(ErrorCode::dimension_mismatch, "the quantile formula needs measures on the real line");
  // atoms are kept sorted, so the coordinate arrays are the quantile breakpoints
  return std::pow(quantile_cost(mu.coords(), mu.weights(), nu.coords(), nu.weights(), p), 1.0 / p);
}

double wasserstein_1d(std::span<const double> positions, std::span<const double> a, std::span<const double> b,
                      double p) {
  check_p(p);
  if (a.size() != positions.size() || b.size() != positions.size())
    throw Error(ErrorCode::dimension_mismatch, "weights must be aligned with the positions");
  return std::pow(quantile_cost(positions, a, positions, b, p), 1.0 / p);
}

std::vector<double> transport_cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  return kernels::omp::cost_matrix(mu, nu, p);
}

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost) {
  const std::size_t m = supply.size(), n = demand.size(), v = m + n;
  if (cost.size() != m * n) throw Error(ErrorCode::dimension_mismatch, "cost matrix must be |mu| x |nu|");
  std::vector<double> rs(supply.begin(), supply.end()), rd(demand.begin(), demand.end());
  std::vector<double> flow(m * n, 0.0);
  std::vector<double> pot(v, 0.0), dist(v);
  std::vector<long> parent(v);
  std::vector<char> done(v);

  while (true) {
    bool any_supply = false, any_demand = false;
    for (double s : rs) any_supply = any_supply || s > kMassEps;
    for (double d : rd) any_demand = any_demand || d > kMassEps;
    if (!any_supply || !any_demand) break;

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < m; ++i)
      if (rs[i] > kMassEps) dist[i] = 0.0;
    long target = -1;
    while (true) {
      long u = -1;
      for (std::size_t w = 0; w < v; ++w)
        if (!done[w] && dist[w] < kInf && (u < 0 || dist[w] < dist[static_cast<std::size_t>(u)])) u = static_cast<long>(w);
      if (u < 0) break;
      const auto uu = static_cast<std::size_t>(u);
      done[uu] = 1;
      if (uu >= m && rd[uu - m] > kMassEps) {
        target = u;
        break;
      }
      if (uu < m) {
        for (std::size_t j = 0; j < n; ++j) {
          const double nd = dist[uu] + std::max(0.0, cost[uu * n + j] + pot[uu] - pot[m + j]);
          if (nd < dist[m + j]) {
            dist[m + j] = nd;
            parent[m + j] = u;
          }
        }
      } else {
        const std::size_t j = uu - m;
        for (std::size_t i = 0; i < m; ++i) {
          if (flow[i * n + j] <= kMassEps) continue;
          const double nd = dist[uu] + std::max(0.0, -cost[i * n + j] + pot[uu] - pot[i]);
          if (nd < dist[i]) {
            dist[i] = nd;
            parent[i] = u;
          }
        }
      }
    }
    if (target < 0) break;
    const double dt = dist[static_cast<std::size_t>(target)];
    for (std::size_t w = 0; w < v; ++w) pot[w] += std::min(dist[w], dt);

    // bottleneck along the path
    double delta = rd[static_cast<std::size_t>(target) - m];
    long w = target;
    while (parent[static_cast<std::size_t>(w)] >= 0) {
      const auto child = static_cast<std::size_t>(w);
      const auto par = static_cast<std::size_t>(parent[child]);
      if (par >= m) delta = std::min(delta, flow[child * n + (par - m)]);
      w = parent[child];
    }
    delta = std::min(delta, rs[static_cast<std::size_t>(w)]);
    const auto source = static_cast<std::size_t>(w);

    w = target;
    while (parent[static_cast<std::size_t>(w)] >= 0) {
      const auto child = static_cast<std::size_t>(w);
      const auto par = static_cast<std::size_t>(parent[child]);
      if (par < m) {
        flow[par * n + (child - m)] += delta;
      } else {
        flow[child * n + (par - m)] -= delta;
      }
      w = parent[child];
    }
    rs[source] -= delta;
    rd[static_cast<std::size_t>(target) - m] -= delta;
  }

  TransportPlan plan;
  CompensatedSum total;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double f = flow[i * n + j];
      if (f <= kMassEps) continue;
      plan.entries.push_back({i, j, f});
      total.add(f * cost[i * n + j]);
    }
  plan.cost = std::max(0.0, total.value());
  return plan;
}

WassersteinResult wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  check_p(p);
  if (!mu.space() || !nu.space() || !mu.space()->compatible(*nu.space()))
    throw Error(ErrorCode::space_mismatch, "measures live on different spaces");
  if (mu.size() > kMaxTransportSupport || nu.size() > kMaxTransportSupport)
    throw Error(ErrorCode::support_too_large, "supports are limited to 2000 atoms each");
  const auto cost = transport_cost_matrix(mu, nu, p);
  WassersteinResult out;
  out.plan = solve_transport(mu.weights(), nu.weights(), cost);
  out.distance = std::pow(out.plan.cost, 1.0 / p);
  return out;
}

std::vector<TailEstimate> tail_condition_check(const SpacePtr& space, std::span<const double> alpha, double p,
                                               std::span<const double> lambdas, std::span<const double> x0,
                                               std::size_t sample_budget, std::uint64_t seed) {
  check_p(p);
  if (x0.size() != space->dim()) throw Error(ErrorCode::dimension_mismatch, "base point has the wrong dimension");
  std::vector<TailEstimate> out;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double lambda = lambdas[l];
    if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be > 0");
    TailEstimate t;
    t.lambda = lambda;
    if (space->is_finite()) {
      LogSumExp acc;
      for (std::size_t i = 0; i < space->size(); ++i)
        if (alpha[i] > 0.0) acc.add(std::log(alpha[i]) + lambda * powp(space->distance(space->point(i), x0), p));
      t.log_estimate = acc.value();
      t.estimate = std::exp(t.log_estimate);
      t.exact = true;
    } else {
      const TupleFunction f = [&](std::span<const Point> pt) { return powp(space->distance(pt[0], x0), p); };
      const auto est = check_exp_integrability(f, 1, space, alpha, lambda, sample_budget, derive_seed(seed, l));
      t.estimate = est.estimate;
      t.std_error = est.std_error;
      t.log_estimate = est.log_estimate;
      t.unstable = est.unstable;
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace mfldp
