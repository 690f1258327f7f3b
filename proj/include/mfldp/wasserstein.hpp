#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfldp/measure.hpp"

namespace mfldp {

struct TransportEntry {
  std::size_t i;
  std::size_t j;
  double mass;
};

/// Sparse coupling of mu (rows) and nu (columns) with its cost sum xi rho^p.
struct TransportPlan {
  std::vector<TransportEntry> entries;
  double cost = 0.0;
};

struct WassersteinResult {
  double distance = 0.0;
  TransportPlan plan;
};

inline constexpr std::size_t kMaxTransportSupport = 2000;

/// Quantile formula on the real line: (int_0^1 |F_mu^{-1} - F_nu^{-1}|^p)^{1/p}.
double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p = 1.0);

/// Same formula for two weight vectors on common sorted positions.
double wasserstein_1d(std::span<const double> positions, std::span<const double> a, std::span<const double> b,
                      double p = 1.0);

/// Exact transport by successive shortest paths on the bipartite support
/// graph (Dijkstra with potentials). Among equally short augmenting paths the
/// one ending at the lowest column index, reached from the lowest row index,
/// is taken, which fixes the returned plan.
WassersteinResult wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p = 1.0);

/// Serial and parallel cost matrices agree; this picks the parallel one.
std::vector<double> transport_cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Solves the transportation problem for a given cost matrix.
TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost);

struct TailEstimate {
  double lambda = 0.0;
  double estimate = 0.0;      // int exp(lambda rho^p(x, x0)) alpha(dx)
  double std_error = 0.0;
  double log_estimate = 0.0;
  bool exact = false;
  bool unstable = false;
};

/// Exact on finite spaces, Monte Carlo (with the heavy-tail flag) on grids.
std::vector<TailEstimate> tail_condition_check(const SpacePtr& space, std::span<const double> alpha, double p,
                                               std::span<const double> lambdas, std::span<const double> x0,
                                               std::size_t sample_budget, std::uint64_t seed);

}  // namespace mfldp
