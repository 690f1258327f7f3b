#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "mfldp/error.hpp"
#include "mfldp/measure.hpp"
#include "mfldp/numeric.hpp"

using namespace mfldp;

TEST_CASE("log_sum_exp handles infinities and large terms") {
  const std::vector<double> t{1000.0, 1000.0};
  CHECK(log_sum_exp(t) == doctest::Approx(1000.0 + std::log(2.0)));
  const std::vector<double> empty{kNegInf, kNegInf};
  CHECK(log_sum_exp(empty) == kNegInf);
  const std::vector<double> inf{0.0, kInf};
  CHECK(log_sum_exp(inf) == kInf);
}

TEST_CASE("compensated sum recovers cancelled mass") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
}

TEST_CASE("combinatorics") {
  CHECK(log_binomial(10, 3) == doctest::Approx(std::log(120.0)));
  const std::vector<std::uint64_t> c{2, 1, 1};
  CHECK(log_multinomial(c) == doctest::Approx(std::log(12.0)));
  CHECK(falling_factorial(5, 2) == 20.0);
  CHECK(falling_factorial(2, 3) == 0.0);
  CHECK(ordered_tuple_count(6, 3) == 120.0);
  CHECK(composition_count(4, 3) == doctest::Approx(15.0));
}

TEST_CASE("composition iterator visits every composition once") {
  for (std::size_t parts = 1; parts <= 4; ++parts) {
    for (std::uint64_t total = 0; total <= 6; ++total) {
      std::size_t visited = 0;
      CompositionIterator it(total, parts);
      do {
        std::uint64_t sum = 0;
        for (auto x : it.counts()) sum += x;
        CHECK(sum == total);
        ++visited;
      } while (it.next());
      CHECK(static_cast<double>(visited) == doctest::Approx(composition_count(total, parts)));
    }
  }
}

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 7) == derive_seed(5, 7));
}

TEST_CASE("grid spaces: cells, centers and lookup") {
  const auto s = StateSpace::euclidean(1, -1.0, 1.0, 4);
  CHECK(s->size() == 4);
  CHECK(s->point(0)[0] == doctest::Approx(-0.75));
  const double x = 0.3;
  CHECK(s->index_of(Point(&x, 1)) == 2);
  const double out = 1.5;
  CHECK_FALSE(s->contains(Point(&out, 1)));
  const auto s2 = StateSpace::euclidean(2, 0.0, 1.0, 3);
  CHECK(s2->size() == 9);
  CHECK(s2->cell_volume() == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("discrete measures merge duplicate atoms and validate mass") {
  const auto s = StateSpace::euclidean(1, 0.0, 4.0, 4);
  DiscreteMeasure m(s, {1.0, 1.0, 2.0}, {0.25, 0.25, 0.5});
  CHECK(m.size() == 2);
  CHECK(m.weight(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(DiscreteMeasure(s, {1.0}, {0.5}), Error);
  CHECK_THROWS_AS(DiscreteMeasure(s, {1.0, 2.0}, {1.5, -0.5}), Error);
}

TEST_CASE("reference measure: alpha = e^{-V} m / C") {
  const auto s = StateSpace::finite({"a", "b", "c"}, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const std::vector<double> m{1.0, 1.0, 2.0};
  const std::vector<double> v{0.0, std::log(2.0), kInf};
  const auto ref = build_reference(s, m, v);
  CHECK(ref.normalizer() == doctest::Approx(1.5));
  CHECK(ref.weights()[0] == doctest::Approx(2.0 / 3.0));
  CHECK(ref.weights()[1] == doctest::Approx(1.0 / 3.0));
  CHECK(ref.weights()[2] == 0.0);
  const std::vector<double> bad{kInf, kInf, kInf};
  CHECK_THROWS_AS(build_reference(s, m, bad), Error);
}

TEST_CASE("relative entropy: examples") {
  const std::vector<double> a{0.5, 0.5}, b{0.2, 0.8}, c{1.0, 0.0};
  CHECK(relative_entropy(a, a) == 0.0);
  CHECK(relative_entropy(b, a) == doctest::Approx(0.2 * std::log(0.4) + 0.8 * std::log(1.6)));
  CHECK(relative_entropy(a, c) == kInf);
  CHECK(relative_entropy(c, a) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("property: relative entropy is nonnegative and zero only on the diagonal") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = gen::size_in(rng, 2, 6);
    const auto mu = gen::simplex_point(rng, s);
    const auto nu = gen::sparse_simplex_point(rng, s);
    const double h = relative_entropy(nu, mu);
    CHECK(h >= -1e-15);
    CHECK(relative_entropy(mu, mu) == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("property: chain rule for product measures") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = gen::size_in(rng, 2, 4);
    const auto mu = gen::simplex_point(rng, s);
    const auto nu = gen::simplex_point(rng, s);
    const auto nu2 = product_weights(nu, 2);
    const auto mu2 = product_weights(mu, 2);
    CHECK(relative_entropy(nu2, mu2) == doctest::Approx(2.0 * relative_entropy(nu, mu)).epsilon(1e-12));
  }
}

TEST_CASE("reference sampler frequencies match alpha") {
  const auto s = StateSpace::finite({"a", "b", "c"}, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const std::vector<double> alpha{0.2, 0.3, 0.5};
  ReferenceSampler sampler(s, alpha);
  Rng rng(3);
  std::vector<double> freq(3, 0.0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) freq[sampler.draw_index(rng)] += 1.0 / draws;
  for (int i = 0; i < 3; ++i) CHECK(freq[i] == doctest::Approx(alpha[i]).epsilon(0.02));
}

TEST_CASE("empirical measure puts mass 1/n per particle") {
  const auto s = StateSpace::spins();
  const std::vector<std::size_t> idx{0, 1, 1, 1};
  const auto x = Configuration::from_indices(idx);
  const auto ln = empirical_measure(s, x);
  CHECK(ln.measure().dense_weights()[0] == doctest::Approx(0.25));
  CHECK(ln.measure().mean() == doctest::Approx(0.5));
}
