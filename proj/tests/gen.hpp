#pragma once

// Hand-rolled generators for property tests. Every generator takes the
// test's Rng so a failing case is reproduced by its seed.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mfldp/measure.hpp"
#include "mfldp/potentials.hpp"
#include "mfldp/rng.hpp"
#include "mfldp/space.hpp"

namespace gen {

inline std::size_t size_in(mfldp::Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double real_in(mfldp::Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Probability vector with strictly positive entries.
inline std::vector<double> simplex_point(mfldp::Rng& rng, std::size_t s) {
  std::vector<double> w(s);
  double total = 0.0;
  for (auto& x : w) total += x = real_in(rng, 0.05, 1.0);
  for (auto& x : w) x /= total;
  return w;
}

/// Probability vector that may vanish on some labels.
inline std::vector<double> sparse_simplex_point(mfldp::Rng& rng, std::size_t s) {
  auto w = simplex_point(rng, s);
  for (std::size_t i = 0; i + 1 < s; ++i)
    if (real_in(rng, 0, 1) < 0.3) w[i] = 0.0;
  double total = 0.0;
  for (double x : w) total += x;
  if (total == 0.0) {
    w.back() = 1.0;
    return w;
  }
  for (auto& x : w) x /= total;
  return w;
}

/// Finite space of s points on the real line at random positions, with the
/// induced metric.
inline mfldp::SpacePtr line_space(mfldp::Rng& rng, std::size_t s) {
  std::vector<double> pos(s);
  for (auto& p : pos) p = real_in(rng, -3.0, 3.0);
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rho(s, std::vector<double>(s));
  for (std::size_t i = 0; i < s; ++i) {
    labels.push_back("p" + std::to_string(i));
    for (std::size_t j = 0; j < s; ++j) rho[i][j] = std::abs(pos[i] - pos[j]);
  }
  return mfldp::StateSpace::finite(labels, rho, pos);
}

inline mfldp::SpacePtr discrete_space(std::size_t s) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rho(s, std::vector<double>(s, 1.0));
  for (std::size_t i = 0; i < s; ++i) {
    labels.push_back("s" + std::to_string(i));
    rho[i][i] = 0.0;
  }
  return mfldp::StateSpace::finite(labels, rho);
}

/// Symmetric table of order k on s labels with entries in multiples of 1/4.
inline std::vector<double> symmetric_table(mfldp::Rng& rng, std::size_t s, std::size_t k) {
  std::size_t cells = 1;
  for (std::size_t i = 0; i < k; ++i) cells *= s;
  std::vector<double> t(cells, 0.0);
  std::vector<std::size_t> digits(k);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t r = c;
    for (std::size_t i = k; i-- > 0;) {
      digits[i] = r % s;
      r /= s;
    }
    auto sorted = digits;
    std::sort(sorted.begin(), sorted.end());
    std::size_t rep = 0;
    for (auto d : sorted) rep = rep * s + d;
    if (rep == c) {
      t[c] = static_cast<double>(std::uniform_int_distribution<int>(-8, 8)(rng)) / 4.0;
    } else {
      t[c] = t[rep];
    }
  }
  return t;
}

/// Empirical-like discrete measure on the real line.
inline mfldp::DiscreteMeasure line_measure(mfldp::Rng& rng, const mfldp::SpacePtr& space, std::size_t atoms) {
  std::vector<double> coords(atoms);
  for (auto& c : coords) c = real_in(rng, space->lo(), space->hi());
  return mfldp::DiscreteMeasure(space, coords, simplex_point(rng, atoms));
}

}  // namespace gen
