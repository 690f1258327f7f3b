#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gen.hpp"
#include "mfldp/error.hpp"
#include "mfldp/free_energy.hpp"
#include "mfldp/model.hpp"
#include "mfldp/numeric.hpp"
#include "oracles.hpp"

using namespace mfldp;

namespace {

// H_W for the spin model in closed form: binary entropy against uniform
// plus -(beta/2) m^2.
double spin_free_energy(double beta, double m) {
  const double p = 0.5 * (1 + m), q = 0.5 * (1 - m);
  auto t = [](double x) { return x > 0 ? x * std::log(2 * x) : 0.0; };
  return t(p) + t(q) - 0.5 * beta * m * m;
}

double magnetization(const DiscreteMeasure& nu) { return nu.mean(); }

std::vector<double> gaussian_weights(const SpacePtr& line) {
  std::vector<double> w(line->size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += w[i] = std::exp(-0.5 * std::pow(line->point(i)[0], 2));
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

TEST_CASE("free energy: spin model closed form") {
  const auto model = GibbsModel::spin(1.5);
  for (double m : {-0.9, -0.3, 0.0, 0.5, 1.0}) {
    const auto nu = DiscreteMeasure::on_space(model.space(), {0.5 * (1 - m), 0.5 * (1 + m)});
    const auto fe = free_energy(model, nu, oracle::kSpinInf15);
    CHECK(fe.total == doctest::Approx(spin_free_energy(1.5, m)).epsilon(1e-13));
    CHECK(*fe.normalized_rate >= -1e-12);
  }
}

TEST_CASE("free energy: infinite entropy and infinite interaction") {
  const auto space = gen::discrete_space(2);
  const auto model = GibbsModel::from_alpha(space, std::vector<double>{1.0, 0.0}, {});
  const auto nu = DiscreteMeasure::on_space(space, {0.5, 0.5});
  const auto fe = free_energy(model, nu);
  CHECK(fe.entropy_infinite);
  CHECK(fe.total == kInf);
  const auto line = StateSpace::euclidean(1, 0, 1, 10);
  const auto atom = DiscreteMeasure::on_space(line, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  CHECK(interaction_energy(InteractionPotential::logarithmic(line, 1.0), atom).value == kInf);
}

TEST_CASE("fixed points of the Curie-Weiss map") {
  const auto low = fixed_point(GibbsModel::spin(0.5), DiscreteMeasure::on_space(StateSpace::spins(), {0.3, 0.7}),
                               {.damping = 0.5, .tol = 1e-12});
  CHECK(low.converged);
  CHECK(std::abs(magnetization(low.minimizer)) <= 1e-9);
  CHECK(low.map_label == "CE");
  const auto model = GibbsModel::spin(1.5);
  const auto high = fixed_point(model, DiscreteMeasure::on_space(model.space(), {0.3, 0.7}), {.damping = 0.5, .tol = 1e-12});
  CHECK(magnetization(high.minimizer) == doctest::Approx(oracle::kCurieWeissM15).epsilon(1e-9));
  CHECK(high.inf_value == doctest::Approx(oracle::kSpinInf15).epsilon(1e-9));
  const auto image = critical_map(model, high.minimizer.dense_weights());
  CHECK(image[1] == doctest::Approx(high.minimizer.dense_weights()[1]).epsilon(1e-10));
}

TEST_CASE("minimizers: scan methods agree with the oracle") {
  const auto model = GibbsModel::spin(1.5);
  SearchSpec grid;
  grid.method = SearchMethod::grid_scan;
  const auto g = minimize(model, grid);
  CHECK(g.inf_value == doctest::Approx(oracle::kSpinInf15).epsilon(1e-9));
  const auto p = minimize(model);
  CHECK(p.method == "parametric-1d");
  CHECK(p.inf_value == doctest::Approx(oracle::kSpinInf15).epsilon(1e-11));
  // the two symmetric minimizers are both reported
  REQUIRE(p.alternates.size() == 1);
  CHECK(magnetization(p.alternates[0]) == doctest::Approx(-magnetization(p.minimizer)).epsilon(1e-6));
}

TEST_CASE("minimizers: three-label scan and restricted search") {
  const auto space = gen::discrete_space(3);
  const std::vector<double> alpha{0.2, 0.3, 0.5};
  const auto free = GibbsModel::from_alpha(space, alpha, {});
  const auto r = minimize(free);
  CHECK(std::abs(r.inf_value) <= 1e-12);
  const auto nothing = minimize_on_event(free, [](std::span<const double> w) { return w[0] > 1.5; });
  CHECK_FALSE(nothing.has_value());
  // inf of H(nu | alpha) over nu(0) >= 0.5: nu = (0.5, 0.1875, 0.3125)
  const auto restricted = minimize_on_event(free, [](std::span<const double> w) { return w[0] >= 0.5 - 1e-12; });
  REQUIRE(restricted.has_value());
  const double exact = 0.5 * std::log(0.5 / 0.2) + 0.5 * std::log(0.5 / 0.8);
  CHECK(restricted->inf_value == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("critical map labels") {
  const auto space = gen::discrete_space(2);
  const auto pair = GibbsModel::from_alpha(space, std::vector<double>{0.5, 0.5},
                                           {InteractionPotential::table(space, 2, {1, 0, 0, 1})});
  CHECK(critical_map_label(pair) == "CE");
  const auto triple = GibbsModel::from_alpha(space, std::vector<double>{0.5, 0.5},
                                             {InteractionPotential::table(space, 3, {1, 0, 0, 0, 0, 0, 0, 1})});
  CHECK(critical_map_label(triple) == "extended-CE");
}

TEST_CASE("property: directional derivatives match finite differences") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = gen::size_in(rng, 2, 4);
    const auto space = gen::discrete_space(s);
    const auto model = GibbsModel::from_alpha(space, gen::simplex_point(rng, s),
                                              {InteractionPotential::table(space, 2, gen::symmetric_table(rng, s, 2)),
                                               InteractionPotential::table(space, 3, gen::symmetric_table(rng, s, 3))});
    const auto nu = gen::simplex_point(rng, s);
    const auto d = directional_derivatives(model, nu);
    const double eps = 1e-6;
    for (std::size_t x = 0; x < s; ++x) {
      auto plus = nu, minus = nu;
      for (std::size_t i = 0; i < s; ++i) {
        const double dir = (i == x ? 1.0 : 0.0) - nu[i];
        plus[i] += eps * dir;
        minus[i] -= eps * dir;
      }
      const double fd = (free_energy_dense(model, plus) - free_energy_dense(model, minus)) / (2 * eps);
      CHECK(d[x] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("stationary residual: second-order decay for the Gaussian solution") {
  std::vector<double> r;
  for (std::size_t cells : {251, 501, 1001}) {
    const auto model = GibbsModel::quadratic_product(0.25, -8, 8, cells);
    r.push_back(stationary_residual(model, gaussian_weights(model.space())));
  }
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double order = std::log2(r[i - 1] / r[i]);
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
  }
  const auto model = GibbsModel::quadratic_product(0.25, -8, 8, 101);
  auto shifted = gaussian_weights(model.space());
  std::rotate(shifted.begin(), shifted.begin() + 10, shifted.end());
  CHECK(stationary_residual(model, shifted) > 100 * r.front());
  CHECK_THROWS_AS(stationary_residual(GibbsModel::spin(1.0), std::vector<double>{0.5, 0.5}), Error);
}

TEST_CASE("rate identification at finite n") {
  const auto model = GibbsModel::spin(1.5);
  const auto nu = DiscreteMeasure::on_space(model.space(), {0.25, 0.75});
  CHECK(rate_identification(model, nu, 400) == doctest::Approx(oracle::kRateIdentification400).epsilon(1e-12));
  const auto fe = free_energy(model, nu, oracle::kSpinInf15);
  CHECK(*fe.normalized_rate == doctest::Approx(oracle::kRateFunction).epsilon(1e-12));
}
