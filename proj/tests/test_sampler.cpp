#include <doctest.h>

#include <cmath>
#include <map>

#include "gen.hpp"
#include "mfldp/error.hpp"
#include "mfldp/langevin.hpp"
#include "mfldp/model.hpp"
#include "mfldp/sampler.hpp"

using namespace mfldp;

namespace {

// Exact P_n on {0,1}^n for a two-label model with one pair table, by direct
// enumeration with the table and alpha (no library energy code involved).
std::vector<double> exact_law(const std::vector<double>& alpha, const std::vector<double>& table, std::size_t n) {
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> p(states);
  double z = 0.0;
  for (std::size_t c = 0; c < states; ++c) {
    double w = 1.0, pair_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = (c >> i) & 1u;
      w *= alpha[xi];
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) pair_sum += table[xi * 2 + ((c >> j) & 1u)];
    }
    // n U_n = n / (n (n - 1)) * sum over ordered pairs
    p[c] = w * std::exp(-pair_sum / static_cast<double>(n - 1));
    z += p[c];
  }
  for (auto& v : p) v /= z;
  return p;
}

std::size_t code(const Configuration& x) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < x.size(); ++i) c |= static_cast<std::size_t>(x[i][0]) << i;
  return c;
}

}  // namespace

TEST_CASE("MCMC: stationary law of a small enumerable model") {
  const auto space = gen::discrete_space(2);
  const std::vector<double> alpha{0.3, 0.7};
  const std::vector<double> table{1.0, -0.5, -0.5, 0.75};
  const auto model = GibbsModel::from_alpha(space, alpha, {InteractionPotential::table(space, 2, table)});
  const std::size_t n = 4;
  const auto exact = exact_law(alpha, table, n);
  McmcOptions opt;
  opt.n = n;
  opt.burn_in = 1000;
  opt.steps = 300000;
  opt.seed = 11;
  std::vector<double> freq(exact.size(), 0.0);
  const auto stats = sample_mcmc(model, opt, [&](const Configuration& x) { freq[code(x)] += 1.0; });
  CHECK(stats.emitted == opt.steps);
  double tv = 0.0;
  for (std::size_t c = 0; c < exact.size(); ++c) tv += std::abs(freq[c] / static_cast<double>(stats.emitted) - exact[c]);
  CHECK(0.5 * tv <= 0.02);
  CHECK(stats.max_audit_drift <= 1e-9);
}

TEST_CASE("MCMC: chains are reproducible from seed and stream") {
  const auto model = GibbsModel::quadratic_product(0.25, -5, 5, 101);
  auto run = [&](std::uint64_t stream) {
    McmcOptions opt;
    opt.n = 20;
    opt.burn_in = 500;
    opt.steps = 200;
    opt.seed = 5;
    opt.stream = stream;
    std::vector<double> out;
    sample_mcmc(model, opt, [&](const Configuration& x) { out.insert(out.end(), x.coords().begin(), x.coords().end()); });
    return out;
  };
  CHECK(run(0) == run(0));
  CHECK(run(0) != run(1));
}

TEST_CASE("MCMC: proposals stay inside the box and tuning hits the target band") {
  const auto model = GibbsModel::quadratic_product(0.25, -2, 2, 101);
  McmcOptions opt;
  opt.n = 50;
  opt.burn_in = 20000;
  opt.steps = 5000;
  opt.seed = 3;
  bool inside = true;
  const auto stats = sample_mcmc(model, opt, [&](const Configuration& x) {
    for (double c : x.coords()) inside = inside && c >= -2.0 && c <= 2.0;
  });
  CHECK(inside);
  CHECK(stats.acceptance_rate() >= 0.2);
  CHECK(stats.acceptance_rate() <= 0.6);
}

TEST_CASE("MCMC: finite starting points avoid hard-core overlaps") {
  const auto line = StateSpace::euclidean(1, 0, 10, 1000);
  const GibbsModel model(line, ConfinementPotential::zero(), {InteractionPotential::hard_core(line, 0.2)});
  Rng rng(8);
  const auto x = finite_start(model, 10, rng, 100000);
  CHECK(std::isfinite(model.hamiltonian(x)));
  const GibbsModel packed(line, ConfinementPotential::zero(), {InteractionPotential::hard_core(line, 5.0)});
  CHECK_THROWS_AS(finite_start(packed, 10, rng, 100), Error);
}

TEST_CASE("property: gradient of H_n matches central differences") {
  Rng rng(12);
  const auto plane = StateSpace::euclidean(2, -3, 3, 20);
  for (int trial = 0; trial < 20; ++trial) {
    const GibbsModel model(plane, ConfinementPotential::quadratic(gen::real_in(rng, 0.5, 2.0)),
                           {InteractionPotential::power_law(plane, gen::real_in(rng, 0.1, 1.0), 1.0),
                            InteractionPotential::quadratic_product(plane, gen::real_in(rng, -0.5, 0.5), 3)});
    Configuration x(6, 2);
    for (auto& c : x.coords()) c = gen::real_in(rng, -2.5, 2.5);
    const auto g = model.grad_hamiltonian(x);
    const double h = 1e-6;
    for (std::size_t c = 0; c < g.size(); ++c) {
      auto xp = x, xm = x;
      xp.coords()[c] += h;
      xm.coords()[c] -= h;
      const double fd = (model.hamiltonian(xp) - model.hamiltonian(xm)) / (2 * h);
      CHECK(std::abs(g[c] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("Langevin: noiseless flow decays geometrically without interactions") {
  const auto line = StateSpace::euclidean(1, -5, 5, 101);
  const GibbsModel model(line, ConfinementPotential::quadratic(), {});
  LangevinConfig cfg;
  cfg.dt = 0.01;
  cfg.horizon = 1.0;
  cfg.noise = false;
  Configuration start(1, std::vector<double>{1.0, -2.0});
  const auto stats = simulate_sde(model, 2, cfg, 0, {}, start);
  CHECK(stats.steps == 100);
  const double factor = std::pow(0.99, 100);
  CHECK(stats.final_state[0][0] == doctest::Approx(factor));
  CHECK(stats.final_state[1][0] == doctest::Approx(-2.0 * factor));
}

TEST_CASE("Langevin: Ornstein-Uhlenbeck variance relaxes to one") {
  const auto line = StateSpace::euclidean(1, -8, 8, 101);
  const GibbsModel model(line, ConfinementPotential::quadratic(), {});
  LangevinConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 5.0;
  cfg.record_every = 1000;
  std::size_t frames = 0;
  const auto stats = simulate_sde(model, 4000, cfg, 4, [&](double, const Configuration&) { ++frames; });
  double m2 = 0.0;
  for (double c : stats.final_state.coords()) m2 += c * c;
  m2 /= 4000.0;
  CHECK(std::abs(m2 - 1.0) <= 0.1);
  CHECK(frames == 6);
}

TEST_CASE("Langevin: singular families need an explicit override") {
  const auto line = StateSpace::euclidean(1, -5, 5, 101);
  const GibbsModel model(line, ConfinementPotential::quadratic(), {InteractionPotential::logarithmic(line, 1.0)});
  LangevinConfig cfg;
  cfg.horizon = 0.01;
  CHECK_THROWS_AS(simulate_sde(model, 5, cfg, 0, {}), Error);
}
