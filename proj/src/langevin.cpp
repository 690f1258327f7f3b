#include "mfldp/langevin.hpp"

#include <cmath>
#include <sstream>

#include "mfldp/error.hpp"
#include "mfldp/rng.hpp"
#include "mfldp/sampler.hpp"

namespace mfldp {

LangevinStats simulate_sde(const GibbsModel& model, std::size_t n, const LangevinConfig& config, std::uint64_t seed,
                           const FrameSink& sink, std::optional<Configuration> initial) {
  if (!(config.dt > 0.0)) throw Error(ErrorCode::invalid_argument, "time step must be > 0");
  if (!(config.horizon >= config.dt)) throw Error(ErrorCode::invalid_argument, "horizon must be >= time step");
  if (config.record_every == 0) throw Error(ErrorCode::invalid_argument, "record_every must be >= 1");
  if (model.space()->is_finite())
    throw Error(ErrorCode::non_differentiable_family, "Langevin dynamics need a euclidean space");
  if (model.singular() && !config.force)
    throw Error(ErrorCode::singular_family,
                "singular interaction families use the Metropolis sampler; pass force to override");
  if (!model.confinement().differentiable())
    throw Error(ErrorCode::non_differentiable_family, "confinement has no gradient");
  for (const auto& w : model.interactions())
    if (!w.differentiable() && !w.product_coupling())
      throw Error(ErrorCode::non_differentiable_family, "interaction '" + w.name() + "' has no gradient");

  Rng rng = make_rng(seed, 0);
  Configuration x = initial ? std::move(*initial) : finite_start(model, n, rng, 100000);
  if (x.size() != n || x.dim() != model.space()->dim())
    throw Error(ErrorCode::dimension_mismatch, "initial configuration has the wrong shape");

  const auto steps = static_cast<std::size_t>(std::llround(config.horizon / config.dt));
  const double noise_scale = config.noise ? std::sqrt(2.0 * config.dt) : 0.0;
  std::normal_distribution<double> gauss(0.0, 1.0);
  LangevinStats stats;
  if (sink) {
    sink(0.0, x);
    ++stats.frames;
  }
  auto& coords = x.coords();
  for (std::size_t s = 1; s <= steps; ++s) {
    const auto grad = model.grad_hamiltonian(x);
    for (std::size_t c = 0; c < coords.size(); ++c) {
      coords[c] -= grad[c] * config.dt;
      if (config.noise) coords[c] += noise_scale * gauss(rng);
      if (!(std::abs(coords[c]) <= 1e6)) {
        std::ostringstream msg;
        msg << "coordinate " << c << " reached " << coords[c] << " at step " << s << " (t = " << s * config.dt
            << "); try a smaller time step";
        throw Error(ErrorCode::diverged, msg.str());
      }
    }
    stats.steps = s;
    if (sink && s % config.record_every == 0) {
      sink(static_cast<double>(s) * config.dt, x);
      ++stats.frames;
    }
  }
  stats.final_state = std::move(x);
  return stats;
}

}  // namespace mfldp
