#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "mfldp/error.hpp"
#include "mfldp/wasserstein.hpp"

using namespace mfldp;

namespace {

double exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p = 1.0) {
  return wasserstein_exact(mu, nu, p).distance;
}

}  // namespace

TEST_CASE("Wasserstein: point masses and a two-point example") {
  const auto line = StateSpace::euclidean(1, -5, 5, 100);
  const double a = 0.0, b = 1.5;
  const auto da = DiscreteMeasure::dirac(line, Point(&a, 1));
  const auto db = DiscreteMeasure::dirac(line, Point(&b, 1));
  CHECK(exact(da, db) == doctest::Approx(1.5));
  CHECK(exact(da, db, 2.0) == doctest::Approx(1.5));
  CHECK(wasserstein_1d(da, db, 3.0) == doctest::Approx(1.5));
  // (1/2)(delta_0 + delta_1) vs delta_0: W_p = (1/2)^{1/p}
  const DiscreteMeasure two(line, {0.0, 1.0}, {0.5, 0.5});
  CHECK(exact(two, da, 2.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(exact(two, two) == 0.0);
}

TEST_CASE("property: quantile formula and LP agree on the line") {
  Rng rng(10);
  const auto line = StateSpace::euclidean(1, -5, 5, 100);
  for (int trial = 0; trial < 60; ++trial) {
    const auto mu = gen::line_measure(rng, line, gen::size_in(rng, 1, 30));
    const auto nu = gen::line_measure(rng, line, gen::size_in(rng, 1, 30));
    const double p = trial % 3 == 0 ? 1.0 : (trial % 3 == 1 ? 2.0 : 1.5);
    CHECK(std::abs(wasserstein_1d(mu, nu, p) - exact(mu, nu, p)) <= 1e-9);
  }
}

TEST_CASE("property: metric axioms and monotonicity in p") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const auto space = gen::line_space(rng, gen::size_in(rng, 2, 6));
    auto measure = [&] { return DiscreteMeasure::on_space(space, gen::sparse_simplex_point(rng, space->size())); };
    const auto mu = measure(), nu = measure(), xi = measure();
    const double mn = exact(mu, nu);
    CHECK(mn == doctest::Approx(exact(nu, mu)).epsilon(1e-12));
    CHECK(mn <= exact(mu, xi) + exact(xi, nu) + 1e-9);
    CHECK(mn <= exact(mu, nu, 2.0) + 1e-12);
    CHECK(exact(mu, nu, 2.0) <= exact(mu, nu, 3.0) + 1e-12);
  }
}

TEST_CASE("property: transport plans have the right marginals and cost") {
  Rng rng(12);
  const auto plane = StateSpace::euclidean(2, -1, 1, 10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = gen::size_in(rng, 1, 12), k = gen::size_in(rng, 1, 12);
    auto coords = [&](std::size_t atoms) {
      std::vector<double> c(2 * atoms);
      for (auto& v : c) v = gen::real_in(rng, -1, 1);
      return c;
    };
    const DiscreteMeasure mu(plane, coords(m), gen::simplex_point(rng, m));
    const DiscreteMeasure nu(plane, coords(k), gen::simplex_point(rng, k));
    const auto r = wasserstein_exact(mu, nu, 2.0);
    std::vector<double> rows(mu.size(), 0.0), cols(nu.size(), 0.0);
    double cost = 0.0;
    for (const auto& e : r.plan.entries) {
      CHECK(e.mass >= 0.0);
      rows[e.i] += e.mass;
      cols[e.j] += e.mass;
      cost += e.mass * std::pow(plane->distance(mu.point(e.i), nu.point(e.j)), 2.0);
    }
    for (std::size_t i = 0; i < mu.size(); ++i) CHECK(rows[i] == doctest::Approx(mu.weight(i)).epsilon(1e-12));
    for (std::size_t j = 0; j < nu.size(); ++j) CHECK(cols[j] == doctest::Approx(nu.weight(j)).epsilon(1e-12));
    CHECK(cost == doctest::Approx(r.plan.cost).epsilon(1e-10));
    CHECK(r.distance == doctest::Approx(std::sqrt(cost)).epsilon(1e-10));
  }
}

TEST_CASE("transport solver: hand example and input validation") {
  const std::vector<double> supply{0.5, 0.5}, demand{0.5, 0.5}, cost{0, 1, 1, 0};
  CHECK(solve_transport(supply, demand, cost).cost == 0.0);
  const std::vector<double> skewed_supply{0.7, 0.3}, skewed_demand{0.3, 0.7};
  CHECK(solve_transport(skewed_supply, skewed_demand, cost).cost == doctest::Approx(0.4));
  const auto line = StateSpace::euclidean(1, 0, 1, 10);
  CHECK_THROWS_AS(wasserstein_exact(DiscreteMeasure::on_space(line, std::vector<double>(10, 0.1)),
                                    DiscreteMeasure::on_space(line, std::vector<double>(10, 0.1)), 0.5),
                  Error);
  std::vector<double> many(kMaxTransportSupport + 1);
  for (std::size_t i = 0; i < many.size(); ++i) many[i] = static_cast<double>(i) / static_cast<double>(many.size());
  const DiscreteMeasure big(line, many, std::vector<double>(many.size(), 1.0 / static_cast<double>(many.size())));
  CHECK_THROWS_AS(wasserstein_exact(big, big), Error);
  CHECK(wasserstein_1d(big, big) == 0.0);
}

TEST_CASE("tail condition: exact on finite spaces") {
  const auto spins = StateSpace::spins();
  const std::vector<double> alpha{0.25, 0.75}, lambdas{0.5, 1.0}, x0{0.0};
  const auto t = tail_condition_check(spins, alpha, 1.0, lambdas, x0, 1000, 0);
  REQUIRE(t.size() == 2);
  CHECK(t[0].exact);
  CHECK(t[0].estimate == doctest::Approx(0.25 + 0.75 * std::exp(1.0)));
  CHECK(t[1].estimate == doctest::Approx(0.25 + 0.75 * std::exp(2.0)));
}
