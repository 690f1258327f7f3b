#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "mfldp/measure.hpp"
#include "mfldp/potentials.hpp"

namespace mfldp {

using TupleFunction = std::function<double(std::span<const Point>)>;

/// Monte Carlo estimate of E[exp(lambda f(X_1, ..., X_k))], X_i i.i.d. alpha.
struct IntegrabilityEstimate {
  double estimate = 1.0;
  double std_error = 0.0;      // jackknife (equals sd / sqrt(N) for a plain mean)
  double log_estimate = 0.0;   // log of estimate, computed in log-domain
  double log_std_error = 0.0;  // delta-method error of log_estimate
  bool unstable = false;       // top 0.1% of summands carry > 50% of the mass
  std::size_t samples = 0;
};

/// `alpha` holds weights on the labels / grid cells of `space`.
IntegrabilityEstimate check_exp_integrability(const TupleFunction& f, int order, const SpacePtr& space,
                                              std::span<const double> alpha, double lambda,
                                              std::size_t sample_budget, std::uint64_t seed);

/// Same estimator from already evaluated exponents lambda f(X^(j)).
IntegrabilityEstimate exp_mean_estimate(std::span<const double> exponents);

/// Draws `count` k-tuples from alpha^{(x)k} and evaluates f on each; block
/// seeds are derived from `seed` so the result is independent of threads.
std::vector<double> sample_tuple_values(const TupleFunction& f, int order, const SpacePtr& space,
                                        std::span<const double> alpha, std::size_t count, std::uint64_t seed);

struct TruncationLevel {
  double level = 0.0;
  double estimate = 0.0;   // log E exp(m |W - W^L|)
  double std_error = 0.0;
  int doublings = 0;       // level = 2^doublings
};

/// Smallest L in {1, 2, 4, ..., 2^60} with estimate + 2 stderr <= 1/m and
/// no heavy-tail flag.
/// The same sample of tuples is reused for every L (and for every m given
/// the same seed), so levels are comparable across m.
TruncationLevel select_truncation_level(const InteractionPotential& w, int m, std::span<const double> alpha,
                                        std::size_t sample_budget, std::uint64_t seed);

}  // namespace mfldp
