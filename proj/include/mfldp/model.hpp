#pragma once

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfldp/measure.hpp"
#include "mfldp/potentials.hpp"

namespace mfldp {

/// State space, reference measure alpha = e^{-V} m / C and interactions
/// W^(k), k = 2..N, with pairwise distinct orders.
class GibbsModel {
 public:
  /// `base_weights` is m per label / grid cell (empty: 1 per label, cell
  /// volume per grid cell). V is evaluated on the labels / cell centers.
  GibbsModel(SpacePtr space, ConfinementPotential confinement, std::vector<InteractionPotential> interactions,
             std::vector<double> base_weights = {});

  /// Finite model given directly by alpha (V = -log alpha, m = 1).
  static GibbsModel from_alpha(SpacePtr space, std::span<const double> alpha,
                               std::vector<InteractionPotential> interactions);

  /// Curie-Weiss: S = {-1, +1}, alpha uniform, W = -(beta/2) x y.
  static GibbsModel spin(double beta);
  /// S = [lo, hi] grid, V = x^2/2, W = theta x y.
  static GibbsModel quadratic_product(double theta, double lo = -5.0, double hi = 5.0, std::size_t cells = 1001);

  const SpacePtr& space() const { return space_; }
  const ConfinementPotential& confinement() const { return confinement_; }
  const ReferenceMeasure& reference() const { return reference_; }
  const std::vector<double>& alpha() const { return reference_.weights(); }
  const std::vector<InteractionPotential>& interactions() const { return interactions_; }
  bool has_interactions() const { return !interactions_.empty(); }
  /// Largest interaction order N (1 without interactions).
  int max_order() const;

  /// Same model with every interaction multiplied by t >= 0.
  GibbsModel scaled(double t) const;

  /// log of the alpha density at x against m (finite) or Lebesgue (grids);
  /// -inf outside the box or where alpha vanishes. Defined up to the
  /// constant log C, which cancels in acceptance ratios.
  double log_reference_density(Point x) const;

  /// H_n = sum V(x_i) + n sum_k U_n(W^(k)).
  double hamiltonian(const Configuration& x) const;
  /// Interaction part n sum_k U_n(W^(k)).
  double interaction_energy(const Configuration& x) const;

  /// Gradient of H_n, flat n x d.
  std::vector<double> grad_hamiltonian(const Configuration& x) const;
  bool differentiable() const;
  bool singular() const;

  nlohmann::json to_json() const;

 private:
  SpacePtr space_;
  ConfinementPotential confinement_;
  std::vector<InteractionPotential> interactions_;
  ReferenceMeasure reference_;
  std::vector<double> log_base_density_;  // log(m / cell volume) per grid cell
};

}  // namespace mfldp
