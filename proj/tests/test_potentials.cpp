#include <doctest.h>

#include <array>
#include <cmath>

#include "gen.hpp"
#include "mfldp/error.hpp"
#include "mfldp/integrability.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/potentials.hpp"

using namespace mfldp;

namespace {

double pair(const InteractionPotential& w, double x, double y) {
  const std::array<Point, 2> t{Point(&x, 1), Point(&y, 1)};
  return w(t);
}

std::vector<double> uniform_alpha(std::size_t cells) { return std::vector<double>(cells, 1.0 / cells); }

}  // namespace

TEST_CASE("built-in families: values") {
  const auto line = StateSpace::euclidean(1, -5, 5, 100);
  CHECK(pair(InteractionPotential::power_law(line, 2.0, 0.5), 0.0, 0.25) == doctest::Approx(4.0));
  CHECK(pair(InteractionPotential::power_law(line, 2.0, 0.5), 1.0, 1.0) == kInf);
  CHECK(pair(InteractionPotential::logarithmic(line, 1.0), 0.0, std::exp(1.0)) == doctest::Approx(-1.0));
  CHECK(pair(InteractionPotential::logarithmic(line, 1.0), 0.3, 0.3) == kInf);
  CHECK(pair(InteractionPotential::quadratic_product(line, 0.25), 2.0, -3.0) == doctest::Approx(-1.5));
  CHECK(pair(InteractionPotential::hard_core(line, 0.5), 0.0, 0.4) == kInf);
  CHECK(pair(InteractionPotential::hard_core(line, 0.5), 0.0, 0.6) == 0.0);
  const auto spins = StateSpace::spins();
  const double a = 0, b = 1;  // label indices of -1 and +1
  const std::array<Point, 2> t{Point(&a, 1), Point(&b, 1)};
  CHECK(InteractionPotential::spin_product(spins, 1.5)(t) == doctest::Approx(0.75));
}

TEST_CASE("arity is checked") {
  const auto line = StateSpace::euclidean(1, -5, 5, 100);
  const auto w = InteractionPotential::constant(line, 3, 1.0);
  double x = 0.0;
  const std::array<Point, 2> t{Point(&x, 1), Point(&x, 1)};
  CHECK_THROWS_AS(w(t), Error);
}

TEST_CASE("positive and negative parts recombine") {
  const auto line = StateSpace::euclidean(1, -5, 5, 100);
  const auto w = InteractionPotential::logarithmic(line, 1.0);
  for (double y : {0.1, 0.9, 2.0, 4.0}) {
    const double v = pair(w, 0.0, y);
    CHECK(pair(w.positive_part(), 0.0, y) - pair(w.negative_part(), 0.0, y) == doctest::Approx(v));
    CHECK(pair(w.negative_part(), 0.0, y) >= 0.0);
  }
}

TEST_CASE("property: every built-in family is symmetric") {
  const auto line = StateSpace::euclidean(1, -3, 3, 64);
  const auto plane = StateSpace::euclidean(2, -3, 3, 16);
  std::vector<InteractionPotential> ws{
      InteractionPotential::power_law(line, 1.0, 0.5), InteractionPotential::logarithmic(line, 0.7),
      InteractionPotential::quadratic_product(line, 0.3), InteractionPotential::quadratic_product(plane, -0.2, 3),
      InteractionPotential::hard_core(plane, 0.4), InteractionPotential::constant(line, 4, 2.0),
      truncate(InteractionPotential::logarithmic(line, 1.0), 2.0)};
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = gen::size_in(rng, 2, 4);
    const auto space = gen::discrete_space(s);
    ws.push_back(InteractionPotential::table(space, 3, gen::symmetric_table(rng, s, 3)));
  }
  for (const auto& w : ws) CHECK(symmetry_defect(w, 500, 9) <= 1e-12);
}

TEST_CASE("asymmetric tables are rejected") {
  const auto space = gen::discrete_space(2);
  CHECK_THROWS_AS(InteractionPotential::table(space, 2, {0.0, 1.0, 2.0, 0.0}), Error);
}

TEST_CASE("truncation: clipping and idempotence") {
  const auto line = StateSpace::euclidean(1, -5, 5, 100);
  const auto w = InteractionPotential::logarithmic(line, 1.0);
  const auto t = truncate(w, 2.0);
  const auto tt = truncate(t, 2.0);
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const double x = gen::real_in(rng, -5, 5), y = gen::real_in(rng, -5, 5);
    const double v = pair(t, x, y);
    CHECK(std::abs(v) <= 2.0);
    CHECK(pair(tt, x, y) == v);
    CHECK(v == std::max(-2.0, std::min(pair(w, x, y), 2.0)));
  }
  CHECK(pair(t, 1.0, 1.0) == 2.0);
  CHECK_THROWS_AS(truncate(w, 0.0), Error);
}

TEST_CASE("exp integrability: trivial cases are exact") {
  const auto unit = StateSpace::euclidean(1, 0, 1, 100);
  const auto alpha = uniform_alpha(100);
  const TupleFunction zero = [](std::span<const Point>) { return 0.0; };
  const auto e0 = check_exp_integrability(zero, 2, unit, alpha, 3.0, 10000, 1);
  CHECK(e0.estimate == 1.0);
  CHECK(e0.std_error == 0.0);
  // (-log|x - y|)^- = max(log|x - y|, 0) vanishes on [0, 1]^2
  const auto neg = InteractionPotential::logarithmic(unit, 1.0).negative_part();
  const TupleFunction f = [&neg](std::span<const Point> t) { return neg.value(t); };
  CHECK(check_exp_integrability(f, 2, unit, alpha, 5.0, 10000, 2).estimate == 1.0);
  const auto pw = InteractionPotential::power_law(unit, 1.0, 0.5).negative_part();
  const TupleFunction g = [&pw](std::span<const Point> t) { return pw.value(t); };
  CHECK(check_exp_integrability(g, 2, unit, alpha, 5.0, 10000, 3).estimate == 1.0);
}

TEST_CASE("exp integrability: closed form for a sum of uniforms") {
  // X, Y uniform on [0, 1]: E exp(lambda (x + y)) = ((e^lambda - 1) / lambda)^2
  const auto unit = StateSpace::euclidean(1, 0, 1, 200);
  const TupleFunction f = [](std::span<const Point> t) { return t[0][0] + t[1][0]; };
  const auto e = check_exp_integrability(f, 2, unit, uniform_alpha(200), 1.0, 200000, 4);
  const double exact = std::pow(std::exp(1.0) - 1.0, 2);
  CHECK(std::abs(e.estimate - exact) <= 4.0 * e.std_error);
  CHECK_FALSE(e.unstable);
}

TEST_CASE("exp integrability flags heavy tails") {
  // exp(|x|^2) against a Gaussian-like weight exp(-x^2/2) on a wide box
  const std::size_t cells = 2001;
  const auto line = StateSpace::euclidean(1, -20, 20, cells);
  std::vector<double> alpha(cells);
  double total = 0.0;
  for (std::size_t i = 0; i < cells; ++i) total += alpha[i] = std::exp(-0.5 * std::pow(line->point(i)[0], 2));
  for (auto& a : alpha) a /= total;
  const TupleFunction f = [](std::span<const Point> t) { return t[0][0] * t[0][0]; };
  CHECK(check_exp_integrability(f, 1, line, alpha, 1.0, 100000, 5).unstable);
}

TEST_CASE("exp integrability is independent of the thread count") {
  const auto unit = StateSpace::euclidean(1, 0, 1, 50);
  const TupleFunction f = [](std::span<const Point> t) { return t[0][0] * t[1][0]; };
  const auto a = sample_tuple_values(f, 2, unit, uniform_alpha(50), 20000, 9);
  const auto b = sample_tuple_values(f, 2, unit, uniform_alpha(50), 20000, 9);
  CHECK(a == b);
}

TEST_CASE("truncation level: first certifying power of two") {
  const auto space = gen::discrete_space(3);
  const auto w = InteractionPotential::table(space, 2, {3, -1, 2, -1, 0, 1, 2, 1, -3});
  const std::vector<double> alpha{0.2, 0.3, 0.5};
  // exact: log E exp(m (|W| - 2)^+) = log(0.29 e^m + 0.71), 0.40 for m = 1, 1.05 for m = 2
  const auto l1 = select_truncation_level(w, 1, alpha, 10000, 3);
  CHECK(l1.level == 2.0);
  CHECK(l1.estimate == doctest::Approx(std::log(0.29 * std::exp(1.0) + 0.71)).epsilon(0.1));
  for (int m : {2, 5, 10}) {
    const auto l = select_truncation_level(w, m, alpha, 10000, 3);
    CHECK(l.level == 4.0);
    CHECK(l.estimate == 0.0);
  }
}

TEST_CASE("truncation level: infinite potentials exhaust the budget") {
  const auto space = gen::discrete_space(2);
  const auto w = InteractionPotential::constant(space, 2, kInf);
  const std::vector<double> alpha{0.5, 0.5};
  CHECK_THROWS_AS(select_truncation_level(w, 1, alpha, 10000, 1), Error);
}

TEST_CASE("truncation level: log potential, levels grow with m") {
  const std::size_t cells = 1000;
  const auto unit = StateSpace::euclidean(1, 0, 1, cells);
  const auto w = InteractionPotential::logarithmic(unit, 0.1);
  double prev = 0.0;
  for (int m : {1, 2, 4, 8}) {
    const auto l = select_truncation_level(w, m, uniform_alpha(cells), 200000, 17);
    CHECK(l.estimate + 2.0 * l.std_error <= 1.0 / m);
    CHECK(l.level >= prev);
    prev = l.level;
  }
}

TEST_CASE("potentials from JSON") {
  const auto line = StateSpace::euclidean(1, -5, 5, 100);
  const auto w = interaction_from_json(line, {{"family", "power_law"}, {"b", 1.0}, {"beta", 0.5}});
  CHECK(pair(w, 0.0, 4.0) == doctest::Approx(0.5));
  const auto t = interaction_from_json(line, {{"family", "log"}, {"b", 1.0}, {"truncate", 3.0}});
  CHECK(pair(t, 0.0, 0.0) == 3.0);
  CHECK_THROWS_AS(interaction_from_json(line, {{"b", 1.0}}), Error);
  CHECK_THROWS_AS(interaction_from_json(line, {{"family", "nope"}}), Error);
  const auto v = confinement_from_json({{"family", "quadratic"}, {"stiffness", 2.0}});
  const double x = 3.0;
  CHECK(v(*line, Point(&x, 1)) == doctest::Approx(9.0));
}

TEST_CASE("gradients: analytic vs central differences") {
  const auto line = StateSpace::euclidean(1, -5, 5, 100);
  for (const auto& w : {InteractionPotential::power_law(line, 1.0, 0.5), InteractionPotential::logarithmic(line, 0.7),
                        InteractionPotential::quadratic_product(line, 0.3)}) {
    for (double y : {-1.3, 0.4, 2.2}) {
      const double x = 0.25;
      const std::array<Point, 2> t{Point(&x, 1), Point(&y, 1)};
      double g = 0.0;
      w.grad_first(t, std::span<double>(&g, 1));
      const double h = 1e-6;
      const double fd = (pair(w, x + h, y) - pair(w, x - h, y)) / (2 * h);
      CHECK(g == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  const auto hc = InteractionPotential::hard_core(line, 0.5);
  double x = 0.0, y = 1.0, g = 0.0;
  const std::array<Point, 2> t{Point(&x, 1), Point(&y, 1)};
  CHECK_THROWS_AS(hc.grad_first(t, std::span<double>(&g, 1)), Error);
}
