#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "mfldp/error.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/ustats.hpp"
#include "oracles.hpp"
#include "tuple_iteration.hpp"

using namespace mfldp;

namespace {

// Independent oracle: plain nested loops over ordered distinct tuples.
double brute_u(const InteractionPotential& w, const Configuration& x) {
  const std::size_t n = x.size(), k = static_cast<std::size_t>(w.order());
  std::vector<std::size_t> idx(k, 0);
  CompensatedSum s;
  double count = 0.0;
  do {
    bool distinct = true;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) distinct = distinct && idx[a] != idx[b];
    if (!distinct) continue;
    std::vector<Point> t;
    for (auto i : idx) t.push_back(x[i]);
    const double v = w(t);
    if (std::isinf(v)) return kInf;
    s.add(v);
    count += 1.0;
  } while (detail::next_digits(n, idx));
  return s.value() / count;
}

Configuration random_labels(Rng& rng, std::size_t n, std::size_t s) {
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = gen::size_in(rng, 0, s - 1);
  return Configuration::from_indices(idx);
}

Configuration random_points(Rng& rng, std::size_t n, std::size_t d, double lo, double hi) {
  Configuration x(n, d);
  for (auto& c : x.coords()) c = gen::real_in(rng, lo, hi);
  return x;
}

}  // namespace

TEST_CASE("decoupling constants") {
  CHECK(decoupling_constant(2) == 8u);
  CHECK(decoupling_constant(3) == 624u);
  CHECK(decoupling_constant(4) == 318240u);
  CHECK_THROWS_AS(decoupling_constant(1), Error);
}

TEST_CASE("U-statistic examples") {
  const auto line = StateSpace::euclidean(1, -10, 10, 100);
  const auto c = InteractionPotential::constant(line, 2, 3.5);
  Configuration x(1, {0.0, 1.0, 2.0});
  CHECK(u_statistic(c, x) == doctest::Approx(3.5));
  const auto q = InteractionPotential::quadratic_product(line, 1.0);
  // sum_{i != j} x_i x_j / 6 = ((sum)^2 - sum x^2) / 6 = (9 - 5) / 6
  CHECK(u_statistic(q, x) == doctest::Approx(4.0 / 6.0));
  Configuration one(1, std::vector<double>{0.0});
  CHECK_THROWS_AS(u_statistic(q, one), Error);
}

TEST_CASE("property: U-statistics match the brute-force oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = gen::size_in(rng, 2, 4);
    const auto k = gen::size_in(rng, 2, 3);
    const auto n = gen::size_in(rng, k, 7);
    const auto space = gen::discrete_space(s);
    const auto w = InteractionPotential::table(space, static_cast<int>(k), gen::symmetric_table(rng, s, k));
    const auto x = random_labels(rng, n, s);
    CHECK(u_statistic(w, x) == doctest::Approx(brute_u(w, x)).epsilon(1e-12));
    std::vector<std::uint64_t> counts(s, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(x[i][0])];
    const double from_counts = tuple_total_from_counts(w, counts).value() / ordered_tuple_count(n, k);
    CHECK(from_counts == doctest::Approx(brute_u(w, x)).epsilon(1e-12));
  }
}

TEST_CASE("infinite tuples are counted, not summed") {
  const auto line = StateSpace::euclidean(1, -10, 10, 100);
  const auto hc = InteractionPotential::hard_core(line, 0.5);
  Configuration x(1, {0.0, 0.1, 3.0});
  CHECK(u_statistic(hc, x) == kInf);
  std::vector<std::uint64_t> counts{2, 1};
  const auto space = gen::discrete_space(2);
  const auto t = InteractionPotential::table(space, 2, {kInf, 0.0, 0.0, 1.0});
  const auto total = tuple_total_from_counts(t, counts);
  CHECK(total.infinite == doctest::Approx(2.0));
  CHECK(total.value() == kInf);
}

TEST_CASE("log-MGF: spin model oracle") {
  const auto spins = StateSpace::spins();
  const auto w = InteractionPotential::spin_product(spins, 1.0);
  const std::vector<double> alpha{0.5, 0.5};
  CHECK(log_mgf_exact(w, alpha, 3, 1.0) == doctest::Approx(oracle::kSpinMgfBeta1N3).epsilon(1e-13));
}

TEST_CASE("key bound: exact value") {
  const auto space = gen::discrete_space(2);
  const auto w = InteractionPotential::table(space, 2, {1.0, -2.0, -2.0, 0.0});
  const std::vector<double> alpha{0.25, 0.75};
  const double lambda = 0.5;
  // (1/2) log E exp(2 * 8 * lambda |W|)
  const double e = 0.0625 * std::exp(8.0) + 2 * 0.1875 * std::exp(16.0) + 0.5625;
  const auto kb = log_mgf_keybound(w, alpha, lambda);
  CHECK(kb.exact);
  CHECK(kb.value == doctest::Approx(0.5 * std::log(e)).epsilon(1e-13));
}

TEST_CASE("key bound: Monte Carlo on grids") {
  const auto unit = StateSpace::euclidean(1, 0, 1, 100);
  const auto w = InteractionPotential::constant(unit, 2, -0.25);
  const std::vector<double> alpha(100, 0.01);
  const auto kb = log_mgf_keybound(w, alpha, 1.0, 10000, 1);
  CHECK_FALSE(kb.exact);
  CHECK(kb.value == doctest::Approx(0.5 * 2 * 8 * 0.25));
}

TEST_CASE("decoupled sums: validation and a hand example") {
  const auto line = StateSpace::euclidean(1, -10, 10, 100);
  const auto q = InteractionPotential::quadratic_product(line, 1.0);
  Configuration a(1, {1.0, 2.0}), b(1, {3.0, 4.0});
  const std::vector<Configuration> reps{a, b};
  // Phi(a_0, b_1) + Phi(a_1, b_0) = 1*4 + 2*3
  CHECK(decoupled_u_sum(q, reps) == doctest::Approx(10.0));
  const std::vector<Configuration> one{a};
  CHECK_THROWS_AS(decoupled_u_sum(q, one), Error);
  Configuration c(1, std::vector<double>{1.0});
  const std::vector<Configuration> uneven{a, c};
  CHECK_THROWS_AS(decoupled_u_sum(q, uneven), Error);
}

TEST_CASE("iterated log-MGF: equality for k = 1, inequality for k = 2") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    DecoupledInstance inst;
    inst.alphabet = gen::size_in(rng, 2, 3);
    inst.n = gen::size_in(rng, 2, 4);
    inst.k = 1 + static_cast<std::size_t>(trial % 2);
    for (std::size_t j = 0; j < inst.k * inst.n; ++j) inst.laws.push_back(gen::simplex_point(rng, inst.alphabet));
    const auto tuples = ordered_tuples(inst.n, inst.k);
    std::size_t cells = inst.k == 1 ? inst.alphabet : inst.alphabet * inst.alphabet;
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      std::vector<double> phi(cells);
      for (auto& v : phi) v = gen::real_in(rng, -2, 2);
      inst.phi.push_back(phi);
    }
    const double lhs = iterated_log_mgf_lhs(inst), rhs = iterated_log_mgf_bound(inst);
    if (inst.k == 1) {
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    } else {
      CHECK(lhs <= rhs + 1e-12);
    }
  }
  CHECK(ordered_tuples(4, 2).size() == 12);
}

TEST_CASE("property: cached U-statistics track single-site moves") {
  Rng rng(33);
  const auto line = StateSpace::euclidean(1, -3, 3, 64);
  const auto plane = StateSpace::euclidean(2, -3, 3, 16);
  struct Case {
    SpacePtr space;
    std::vector<InteractionPotential> ws;
  };
  std::vector<Case> cases{
      {line, {InteractionPotential::quadratic_product(line, 0.4), InteractionPotential::constant(line, 3, 1.0)}},
      {line, {InteractionPotential::logarithmic(line, 1.0)}},
      {plane, {InteractionPotential::power_law(plane, 1.0, 1.0), InteractionPotential::quadratic_product(plane, -0.3, 3)}},
      {plane, {InteractionPotential::hard_core(plane, 0.8)}},
  };
  for (const auto& c : cases) {
    const std::size_t n = 7, d = c.space->dim();
    UStatCache cache(c.ws, random_points(rng, n, d, -3, 3));
    for (int step = 0; step < 200; ++step) {
      const auto i = gen::size_in(rng, 0, n - 1);
      std::vector<double> p(d);
      for (auto& v : p) v = gen::real_in(rng, -3, 3);
      const double before = cache.u_sum();
      const auto move = cache.propose(i, p);
      const double delta = cache.delta_u_sum(move);
      cache.apply(move);
      double fresh = 0.0;
      for (const auto& w : c.ws) fresh += brute_u(w, cache.configuration());
      if (std::isinf(fresh)) {
        CHECK(cache.u_sum() == kInf);
        if (std::isfinite(before)) CHECK(delta == kInf);
      } else {
        CHECK(cache.u_sum() == doctest::Approx(fresh).epsilon(1e-9));
        if (std::isfinite(before)) CHECK(before + delta == doctest::Approx(fresh).epsilon(1e-9));
      }
    }
    CHECK(cache.drift() <= 1e-9);
  }
}

TEST_CASE("u_statistic_update returns the refreshed values") {
  const auto line = StateSpace::euclidean(1, -3, 3, 64);
  UStatCache cache({InteractionPotential::quadratic_product(line, 1.0)}, Configuration(1, {1.0, 2.0, 3.0}));
  const double p = -1.0;
  const auto u = u_statistic_update(cache, 0, Point(&p, 1));
  // (-1*2 + -1*3 + 2*3) * 2 / 6
  CHECK(u[0] == doctest::Approx(1.0 / 3.0));
}
