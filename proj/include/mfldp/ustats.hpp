#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mfldp/kernels.hpp"
#include "mfldp/potentials.hpp"

namespace mfldp {

/// Largest number of configurations the exact enumerators will visit.
inline constexpr double kEnumerationLimit = 1e7;

/// U_n(W) = |I_n^k|^{-1} sum over ordered k-tuples of distinct indices.
double u_statistic(const InteractionPotential& w, const Configuration& x);

/// Ordered tuple sum on a finite space from label counts:
/// sum over label tuples of W * prod_l c_l (c_l - 1) ... (c_l - m_l + 1).
TupleTotal tuple_total_from_counts(const InteractionPotential& w, std::span<const std::uint64_t> counts);

/// Sum (not average) over I_n^k with coordinate j from replica j.
double decoupled_u_sum(const InteractionPotential& w, std::span<const Configuration> replicas);

/// C_2 = 8, C_k = 2^k prod_{j=2}^k (j^j - 1).
std::uint64_t decoupling_constant(int k);

/// (1/n) log E exp(lambda n U_n(W)) under alpha^{(x)n}, by enumerating all
/// |S|^n configurations. `trace` receives one CSV row per configuration.
double log_mgf_exact(const InteractionPotential& w, std::span<const double> alpha, std::size_t n, double lambda,
                     std::ostream* trace = nullptr);

struct KeyBound {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
  bool unstable = false;
};

/// (1/k) log E exp(k C_k lambda |W(X_1, ..., X_k)|), X_i i.i.d. alpha. Exact
/// on finite spaces, Monte Carlo otherwise.
KeyBound log_mgf_keybound(const InteractionPotential& w, std::span<const double> alpha, double lambda,
                          std::size_t sample_budget = 1000000, std::uint64_t seed = 0);

/// Independent X_i^j (replica j, index i) on a finite alphabet with one
/// function Phi_I per ordered tuple I.
struct DecoupledInstance {
  std::size_t alphabet = 2;
  std::size_t n = 2;
  std::size_t k = 2;
  std::vector<std::vector<double>> laws;  // laws[j * n + i], each of size alphabet
  std::vector<std::vector<double>> phi;   // one table of size alphabet^k per tuple, tuples in lexicographic order
};

/// Ordered k-tuples of distinct indices in lexicographic order.
std::vector<std::vector<std::size_t>> ordered_tuples(std::size_t n, std::size_t k);

/// log E exp((n-k)!/n! sum_I Phi_I(X^1_{i_1}, ..., X^k_{i_k})), exact.
double iterated_log_mgf_lhs(const DecoupledInstance& inst);
/// ((n-k+1)!/n!) sum_I log E exp(Phi_I(...) / (n-k+1)), exact.
double iterated_log_mgf_bound(const DecoupledInstance& inst);

/// Running ordered tuple sums for one configuration and several potentials.
/// Single-site moves cost O(k n^{k-1}) per potential, O(d) for pair
/// potentials of product form. Infinite tuple values are counted, so moves
/// that remove them stay exact without a full recomputation.
class UStatCache {
 public:
  struct Move {
    std::size_t index = 0;
    std::vector<double> point;
    std::vector<TupleTotal> removed;  // tuples through the old position (one side)
    std::vector<TupleTotal> added;    // tuples through the new position (one side)
  };

  UStatCache(std::vector<InteractionPotential> potentials, Configuration x);

  std::size_t n() const { return x_.size(); }
  std::size_t potential_count() const { return potentials_.size(); }
  const Configuration& configuration() const { return x_; }
  const InteractionPotential& potential(std::size_t r) const { return potentials_[r]; }
  const TupleTotal& total(std::size_t r) const { return totals_[r]; }
  double tuple_count(std::size_t r) const { return counts_[r]; }

  double u(std::size_t r) const;
  std::vector<double> u_values() const;
  bool has_infinite() const;
  /// sum_r U_n(W_r); +inf when any tuple is infinite.
  double u_sum() const;

  Move propose(std::size_t i, Point p) const;
  /// Change of u_sum() under the move: +inf if the new state has an infinite
  /// tuple, -inf if it leaves an infinite state for a finite one.
  double delta_u_sum(const Move& move) const;
  void apply(const Move& move);

  void recompute();
  /// Largest relative difference between cached and freshly computed totals.
  double drift() const;

 private:
  std::vector<double> embed(Point p) const;

  std::vector<InteractionPotential> potentials_;
  Configuration x_;
  std::vector<TupleTotal> totals_;
  std::vector<double> counts_;
  std::vector<std::optional<double>> coupling_;  // product-form pair potentials
  std::vector<double> embedding_sum_;            // sum of embedded coordinates
};

/// Moves particle i and returns the new U_n values of every potential.
std::vector<double> u_statistic_update(UStatCache& cache, std::size_t i, Point p);

}  // namespace mfldp
