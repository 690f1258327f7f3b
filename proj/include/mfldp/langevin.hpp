#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mfldp/model.hpp"

namespace mfldp {

struct LangevinConfig {
  double dt = 1e-3;
  double horizon = 50.0;
  bool noise = true;              // false: deterministic gradient flow
  std::size_t record_every = 100;  // frames are passed to the sink every this many steps
  bool force = false;             // allow singular interaction families
};

struct LangevinStats {
  std::size_t steps = 0;
  std::size_t frames = 0;
  Configuration final_state;
};

/// Receives (time, configuration) for the initial state and every recorded step.
using FrameSink = std::function<void(double, const Configuration&)>;

/// Euler-Maruyama for dX = -grad H_n(X) dt + sqrt(2) dB:
/// X <- X - grad H_n(X) dt + sqrt(2 dt) xi. Aborts with Diverged once a
/// coordinate leaves [-1e6, 1e6] or becomes non-finite.
LangevinStats simulate_sde(const GibbsModel& model, std::size_t n, const LangevinConfig& config, std::uint64_t seed,
                           const FrameSink& sink, std::optional<Configuration> initial = std::nullopt);

}  // namespace mfldp
