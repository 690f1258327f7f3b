#include "mfldp/sampler.hpp"

#include <cmath>

#include "mfldp/error.hpp"
#include "mfldp/numeric.hpp"

namespace mfldp {

namespace {

std::vector<InteractionPotential> checked_interactions(const GibbsModel& model, std::size_t n) {
  if (n < static_cast<std::size_t>(model.max_order()))
    throw Error(ErrorCode::too_few_particles, "need at least N particles");
  return model.interactions();
}

bool finite_state(const GibbsModel& model, const Configuration& x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (model.log_reference_density(x[i]) == kNegInf) return false;
  for (const auto& w : model.interactions())
    if (kernels::omp::tuple_total(w, x).infinite > 0) return false;
  return true;
}

}  // namespace

Configuration finite_start(const GibbsModel& model, std::size_t n, Rng& rng, std::size_t max_tries,
                           std::size_t* tries) {
  const ReferenceSampler sampler(model.space(), model.alpha());
  for (std::size_t t = 1; t <= max_tries; ++t) {
    Configuration x = sampler.draw_configuration(rng, n);
    if (finite_state(model, x)) {
      if (tries) *tries = t;
      return x;
    }
  }
  throw Error(ErrorCode::no_finite_starting_point,
              std::to_string(max_tries) + " initializations drawn from alpha all have H_n = +inf");
}

McmcChain::McmcChain(const GibbsModel& model, const McmcOptions& options)
    : model_(model),
      rng_(make_rng(options.seed, options.stream)),
      cache_(checked_interactions(model, options.n),
             options.initial ? *options.initial
                             : finite_start(model, options.n, rng_, options.max_initializations, &init_tries_)),
      sigma_(options.sigma),
      audit_every_(options.audit_every),
      proposal_(model.space()->dim()) {
  if (options.initial) {
    if (options.initial->size() != options.n || options.initial->dim() != model.space()->dim())
      throw Error(ErrorCode::dimension_mismatch, "initial configuration has the wrong shape");
    if (!finite_state(model, *options.initial))
      throw Error(ErrorCode::no_finite_starting_point, "initial configuration has H_n = +inf");
  }
  stats_.sigma = sigma_;
  stats_.initializations = init_tries_;
}

bool McmcChain::step() {
  const auto& space = *model_.space();
  const std::size_t n = cache_.n();
  const std::size_t i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  const Point current = cache_.configuration()[i];
  if (space.is_finite()) {
    proposal_[0] = static_cast<double>(std::uniform_int_distribution<std::size_t>(0, space.size() - 1)(rng_));
  } else {
    std::normal_distribution<double> gauss(0.0, sigma_);
    for (std::size_t c = 0; c < proposal_.size(); ++c) proposal_[c] = current[c] + gauss(rng_);
  }
  ++stats_.proposals;
  const double u = uniform01(rng_);

  bool accept = false;
  const double log_ref_new = model_.log_reference_density(proposal_);
  if (log_ref_new != kNegInf) {
    const auto move = cache_.propose(i, proposal_);
    const double du = cache_.delta_u_sum(move);
    if (du != kInf) {
      const double log_ratio = log_ref_new - model_.log_reference_density(current) - static_cast<double>(n) * du;
      accept = log_ratio >= 0.0 || u < std::exp(log_ratio);
      if (accept) cache_.apply(move);
    }
  }
  if (accept) ++stats_.accepted;
  if (audit_every_ > 0 && ++since_audit_ >= audit_every_) audit();
  return accept;
}

void McmcChain::audit() {
  since_audit_ = 0;
  ++stats_.audits;
  stats_.max_audit_drift = std::max(stats_.max_audit_drift, cache_.drift());
  cache_.recompute();
}

void run_burn_in(McmcChain& chain, std::size_t steps, bool tune) {
  constexpr std::size_t kWindow = 200;
  std::size_t window_accepted = 0;
  for (std::size_t s = 1; s <= steps; ++s) {
    if (chain.step()) ++window_accepted;
    if (tune && s % kWindow == 0) {
      const double rate = static_cast<double>(window_accepted) / kWindow;
      if (rate < 0.3) chain.set_sigma(chain.sigma() * 0.8);
      if (rate > 0.5) chain.set_sigma(chain.sigma() * 1.25);
      window_accepted = 0;
    }
  }
}

McmcStats sample_mcmc(const GibbsModel& model, const McmcOptions& options, const SampleSink& sink) {
  if (options.thinning == 0) throw Error(ErrorCode::invalid_argument, "thinning must be >= 1");
  McmcChain chain(model, options);
  run_burn_in(chain, options.burn_in, options.tune && !model.space()->is_finite());
  // sigma is frozen from here on
  McmcStats burn = chain.stats();
  std::size_t emitted = 0;
  for (std::size_t s = 1; s <= options.steps; ++s) {
    chain.step();
    if (s % options.thinning == 0) {
      if (sink) sink(chain.state());
      ++emitted;
    }
  }
  McmcStats out = chain.stats();
  // acceptance statistics refer to the measurement phase
  out.proposals -= burn.proposals;
  out.accepted -= burn.accepted;
  out.emitted = emitted;
  out.sigma = chain.sigma();
  return out;
}

}  // namespace mfldp
