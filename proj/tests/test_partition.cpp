#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "mfldp/error.hpp"
#include "mfldp/model.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/partition.hpp"
#include "oracles.hpp"

using namespace mfldp;

TEST_CASE("exact partition: oracle values for the spin model") {
  const auto model = GibbsModel::spin(1.5);
  for (const auto& row : oracle::kSpinZn15) {
    const auto v = log_partition_exact(model, static_cast<std::size_t>(row[0]));
    CHECK(v.value == doctest::Approx(row[1]).epsilon(1e-12));
  }
}

TEST_CASE("exact partition: the three reductions agree") {
  const auto model = GibbsModel::spin(0.8);
  for (std::size_t n : {2, 5, 12}) {
    const double a = log_partition_exact(model, n, PartitionMethod::enumeration).value;
    const double b = log_partition_exact(model, n, PartitionMethod::type_classes).value;
    const double c = log_partition_exact(model, n, PartitionMethod::magnetization_classes).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(a == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("property: type classes match enumeration for random table models") {
  Rng rng(6);
  for (int trial = 0; trial < 15; ++trial) {
    const auto s = gen::size_in(rng, 2, 3);
    const auto space = gen::discrete_space(s);
    std::vector<InteractionPotential> ws{InteractionPotential::table(space, 2, gen::symmetric_table(rng, s, 2))};
    if (trial % 2) ws.push_back(InteractionPotential::table(space, 3, gen::symmetric_table(rng, s, 3)));
    const auto model = GibbsModel::from_alpha(space, gen::simplex_point(rng, s), ws);
    const auto n = gen::size_in(rng, 3, 7);
    const double a = log_partition_exact(model, n, PartitionMethod::enumeration).value;
    const double b = log_partition_exact(model, n, PartitionMethod::type_classes).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-11));
    // type-class weights sum to Z~_n
    LogSumExp acc;
    for (std::uint64_t c0 = 0; c0 <= n; ++c0) {
      if (s == 2) {
        const std::vector<std::uint64_t> counts{c0, n - c0};
        acc.add(log_type_class_weight(model, counts));
      } else {
        for (std::uint64_t c1 = 0; c0 + c1 <= n; ++c1) {
          const std::vector<std::uint64_t> counts{c0, c1, n - c0 - c1};
          acc.add(log_type_class_weight(model, counts));
        }
      }
    }
    CHECK(acc.value() / static_cast<double>(n) == doctest::Approx(a).epsilon(1e-11));
  }
}

TEST_CASE("exact partition: no interactions gives zero, oversized requests fail") {
  const auto space = gen::discrete_space(3);
  const std::vector<double> alpha{0.2, 0.3, 0.5};
  const auto free = GibbsModel::from_alpha(space, alpha, {});
  CHECK(std::abs(log_partition_exact(free, 10).value) <= 1e-14);
  const auto model = GibbsModel::from_alpha(space, alpha, {InteractionPotential::constant(space, 2, 1.0)});
  CHECK(log_partition_exact(model, 9).value == doctest::Approx(-1.0));
  CHECK_THROWS_AS(log_partition_exact(model, 40, PartitionMethod::enumeration), Error);
  CHECK_THROWS_AS(log_partition_exact(model, 10, PartitionMethod::magnetization_classes), Error);
  const auto line = GibbsModel::quadratic_product(0.25, -5, 5, 11);
  CHECK_THROWS_AS(log_partition_exact(line, 3), Error);
}

TEST_CASE("thermodynamic integration: small spin model against the exact value") {
  const auto model = GibbsModel::spin(1.5);
  ThermodynamicOptions opt;
  opt.points = 21;
  opt.burn_in_sweeps = 500;
  opt.sweeps = 5000;
  opt.seed = 2;
  const auto est = log_partition_estimate(model, 20, opt);
  const double exact = log_partition_exact(model, 20).value;
  CHECK(est.schedule.size() == 21);
  CHECK(est.schedule.front().t == 0.0);
  CHECK(std::abs(est.value - exact) <= 4.0 * est.std_error + est.quadrature_resolution);
  const auto again = log_partition_estimate(model, 20, opt);
  CHECK(again.value == est.value);
}
