#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "mfldp/model.hpp"
#include "mfldp/rng.hpp"
#include "mfldp/ustats.hpp"

namespace mfldp {

struct McmcOptions {
  std::size_t n = 100;
  std::size_t burn_in = 0;    // single-site steps before the first emitted sample
  std::size_t steps = 0;      // single-site steps after burn-in
  std::size_t thinning = 1;   // emit every `thinning` steps
  double sigma = 0.5;         // Gaussian proposal width (euclidean spaces)
  bool tune = true;           // adapt sigma during burn-in towards acceptance 0.3-0.5
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;   // chain index, mixed into the seed
  std::size_t audit_every = 10000;
  std::size_t max_initializations = 100000;
  std::optional<Configuration> initial;
};

struct McmcStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  std::size_t emitted = 0;
  std::size_t initializations = 0;
  std::size_t audits = 0;
  double max_audit_drift = 0.0;
  double sigma = 0.0;
  double acceptance_rate() const {
    return proposals ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
  }
};

/// Single-site Metropolis-Hastings chain targeting P_n. On finite spaces the
/// proposal resamples one coordinate uniformly over the labels; on euclidean
/// spaces it adds a Gaussian step of width sigma (moves leaving the box are
/// rejected). Acceptance uses the cached U-statistic delta only.
class McmcChain {
 public:
  McmcChain(const GibbsModel& model, const McmcOptions& options);

  /// One proposal; returns true if accepted.
  bool step();
  void sweep() {
    for (std::size_t i = 0; i < cache_.n(); ++i) step();
  }

  const Configuration& state() const { return cache_.configuration(); }
  const UStatCache& cache() const { return cache_; }
  double sigma() const { return sigma_; }
  void set_sigma(double s) { sigma_ = s; }
  const McmcStats& stats() const { return stats_; }
  Rng& rng() { return rng_; }

  /// Compares the cache with a fresh recomputation, records the drift and
  /// resynchronizes.
  void audit();

 private:
  const GibbsModel& model_;
  Rng rng_;
  std::size_t init_tries_ = 0;
  UStatCache cache_;
  double sigma_;
  std::size_t audit_every_;
  std::size_t since_audit_ = 0;
  McmcStats stats_;
  std::vector<double> proposal_;
};

using SampleSink = std::function<void(const Configuration&)>;

/// Burn-in: `steps` proposals; on euclidean spaces with `tune` set, sigma is
/// adapted every 200 proposals towards acceptance 0.3-0.5 and left frozen.
void run_burn_in(McmcChain& chain, std::size_t steps, bool tune);

/// Runs burn-in (tuning sigma if requested, then freezing it) and emits
/// every `thinning`-th state of the measurement phase to `sink`.
McmcStats sample_mcmc(const GibbsModel& model, const McmcOptions& options, const SampleSink& sink);

/// Draws an initial configuration from alpha with finite H_n.
Configuration finite_start(const GibbsModel& model, std::size_t n, Rng& rng, std::size_t max_tries,
                           std::size_t* tries = nullptr);

}  // namespace mfldp
