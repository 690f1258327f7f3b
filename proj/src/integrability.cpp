#include "mfldp/integrability.hpp"

#include <algorithm>
#include <cmath>

#include "mfldp/error.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/parallel.hpp"
#include "mfldp/rng.hpp"

namespace mfldp {

namespace {
constexpr std::size_t kSampleBlock = 4096;
}

std::vector<double> sample_tuple_values(const TupleFunction& f, int order, const SpacePtr& space,
                                        std::span<const double> alpha, std::size_t count, std::uint64_t seed) {
  if (order < 1) throw Error(ErrorCode::invalid_argument, "order must be >= 1");
  const ReferenceSampler sampler(space, alpha);
  const std::size_t k = static_cast<std::size_t>(order);
  const std::size_t d = space->dim();
  std::vector<double> values(count);
  const auto blocks = make_blocks(count, kSampleBlock);
  const long nb = static_cast<long>(blocks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long b = 0; b < nb; ++b) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(b));
    std::vector<double> buf(k * d);
    std::vector<Point> tuple(k);
    for (std::size_t i = 0; i < k; ++i) tuple[i] = Point(buf.data() + i * d, d);
    for (std::size_t s = blocks[b].begin; s < blocks[b].end; ++s) {
      for (std::size_t i = 0; i < k; ++i) sampler.draw(rng, std::span<double>(buf.data() + i * d, d));
      values[s] = f(tuple);
    }
  }
  return values;
}

IntegrabilityEstimate exp_mean_estimate(std::span<const double> exponents) {
  IntegrabilityEstimate out;
  const std::size_t n = exponents.size();
  out.samples = n;
  if (n == 0) return out;
  double top = kNegInf;
  for (double v : exponents) {
    if (std::isnan(v)) throw Error(ErrorCode::invalid_argument, "NaN exponent");
    top = std::max(top, v);
  }
  if (top == kInf) {
    out.estimate = out.log_estimate = kInf;
    out.std_error = out.log_std_error = kInf;
    out.unstable = true;
    return out;
  }
  if (top == kNegInf) {
    out.estimate = 0.0;
    out.log_estimate = kNegInf;
    return out;
  }
  // sums of e^{v - top} and e^{2(v - top)}
  CompensatedSum s1, s2;
  for (double v : exponents) {
    const double e = std::exp(v - top);
    s1.add(e);
    s2.add(e * e);
  }
  const double nd = static_cast<double>(n);
  const double mean_scaled = s1.value() / nd;
  out.log_estimate = top + std::log(mean_scaled);
  out.estimate = std::exp(out.log_estimate);
  if (n > 1) {
    const double var_scaled = std::max(0.0, (s2.value() / nd - mean_scaled * mean_scaled) * nd / (nd - 1.0));
    const double se_scaled = std::sqrt(var_scaled / nd);
    out.log_std_error = se_scaled / mean_scaled;
    out.std_error = out.log_std_error * out.estimate;
  }
  // heavy-tail check: share of the largest 0.1% of summands
  const std::size_t head = std::max<std::size_t>(1, n / 1000);
  if (head < n) {
    std::vector<double> sorted(exponents.begin(), exponents.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(head), sorted.end(), std::greater<>());
    CompensatedSum head_sum;
    for (std::size_t i = 0; i < head; ++i) head_sum.add(std::exp(sorted[i] - top));
    out.unstable = head_sum.value() > 0.5 * s1.value();
  }
  return out;
}

IntegrabilityEstimate check_exp_integrability(const TupleFunction& f, int order, const SpacePtr& space,
                                              std::span<const double> alpha, double lambda,
                                              std::size_t sample_budget, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be > 0");
  auto values = sample_tuple_values(f, order, space, alpha, sample_budget, seed);
  for (double& v : values) v *= lambda;
  return exp_mean_estimate(values);
}

TruncationLevel select_truncation_level(const InteractionPotential& w, int m, std::span<const double> alpha,
                                        std::size_t sample_budget, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::invalid_argument, "m must be a positive integer");
  if (sample_budget < 2) throw Error(ErrorCode::invalid_argument, "sample budget too small");
  const TupleFunction f = [&w](std::span<const Point> t) { return w.value(t); };
  const auto raw = sample_tuple_values(f, w.order(), w.space(), alpha, sample_budget, seed);
  const double md = static_cast<double>(m);
  const double threshold = 1.0 / md;
  std::vector<double> exponents(raw.size());
  for (int j = 0; j <= 60; ++j) {
    const double level = std::ldexp(1.0, j);
    // |W - W^L| = (|W| - L)^+
    for (std::size_t s = 0; s < raw.size(); ++s) {
      const double excess = std::abs(raw[s]) - level;
      exponents[s] = excess > 0.0 ? md * excess : 0.0;
    }
    const auto est = exp_mean_estimate(exponents);
    if (std::isfinite(est.log_estimate) && !est.unstable && est.log_estimate + 2.0 * est.log_std_error <= threshold)
      return {level, est.log_estimate, est.log_std_error, j};
  }
  throw Error(ErrorCode::budget_exhausted, "no truncation level up to 2^60 certifies log E exp(m|W - W^L|) <= 1/m");
}

}  // namespace mfldp
