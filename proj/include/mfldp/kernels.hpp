#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mfldp/measure.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/potentials.hpp"

namespace mfldp {

/// Extended-real sum that keeps the finite part exact-ish and counts +inf
/// terms separately, so an infinite term can later be removed again.
struct TupleTotal {
  double finite = 0.0;
  std::uint64_t infinite = 0;

  double value() const { return infinite > 0 ? kInf : finite; }
};

/// Integral of W^+ and W^- against nu^{(x)k}.
struct EnergyParts {
  double positive = 0.0;  // may be +inf
  double negative = 0.0;  // may be +inf
};

using LogTerm = std::function<double(std::span<const std::size_t>)>;

/// Hot loops. Each kernel exists twice: `serial` is the straightforward
/// reference, `omp` the parallel version used by the library. Parallel
/// reductions use fixed blocks merged in block order, so results do not
/// depend on the thread count.
namespace kernels {

namespace serial {
/// Sum of W over ordered k-tuples of distinct indices.
TupleTotal tuple_total(const InteractionPotential& w, const Configuration& x);
/// Sum over I_n^k with coordinate j taken from replica j.
TupleTotal decoupled_total(const InteractionPotential& w, std::span<const Configuration> replicas);
EnergyParts atom_energy(const InteractionPotential& w, const DiscreteMeasure& nu);
/// rho(x_i, y_j)^p, row-major |mu| x |nu|.
std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);
/// log sum over all s^n index vectors of exp(log_term(indices)).
double enumerate_log_sum(std::size_t s, std::size_t n, const LogTerm& log_term);
}  // namespace serial

namespace omp {
TupleTotal tuple_total(const InteractionPotential& w, const Configuration& x);
TupleTotal decoupled_total(const InteractionPotential& w, std::span<const Configuration> replicas);
EnergyParts atom_energy(const InteractionPotential& w, const DiscreteMeasure& nu);
std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);
double enumerate_log_sum(std::size_t s, std::size_t n, const LogTerm& log_term);
}  // namespace omp

/// Sum of W(p, x_{j_1}, ..., x_{j_{k-1}}) over ordered (k-1)-tuples of
/// distinct indices different from `skip`. Used for single-site moves.
TupleTotal partial_total(const InteractionPotential& w, const Configuration& x, std::size_t skip, Point p);

}  // namespace kernels
}  // namespace mfldp
