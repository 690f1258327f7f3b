#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfldp/rng.hpp"
#include "mfldp/space.hpp"

namespace mfldp {

/// Probability measure with finitely many atoms. Atoms are kept sorted
/// lexicographically by coordinates; duplicate atoms are merged on
/// construction, so two equal measures compare equal atom by atom.
class DiscreteMeasure {
 public:
  static constexpr double kMassTolerance = 1e-12;

  DiscreteMeasure() = default;
  DiscreteMeasure(SpacePtr space, std::vector<double> coords, std::vector<double> weights);

  /// Measure putting weights[i] on label / grid cell i. Zero weights are kept
  /// as atoms so that the result is aligned with the space's points.
  static DiscreteMeasure on_space(SpacePtr space, std::vector<double> weights);

  static DiscreteMeasure dirac(SpacePtr space, Point p);

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return space_ ? space_->dim() : 1; }
  Point point(std::size_t i) const { return {coords_.data() + i * dim(), dim()}; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& coords() const { return coords_; }

  /// Weights aggregated onto the space's labels / grid cells.
  std::vector<double> dense_weights() const;

  /// Same measure with atoms moved to their label / grid-cell representative.
  DiscreteMeasure projected() const;

  /// Mean of coordinate c of the numeric embedding (finite: label values).
  double mean(std::size_t c = 0) const;

  nlohmann::json to_json() const;
  static DiscreteMeasure from_json(SpacePtr space, const nlohmann::json& j);

 private:
  void canonicalize();

  SpacePtr space_;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

/// L_n(x^n) = (1/n) sum delta_{x_i}; keeps the ordered configuration.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(SpacePtr space, Configuration points);

  std::size_t n() const { return points_.size(); }
  const Configuration& points() const { return points_; }
  const DiscreteMeasure& measure() const { return measure_; }

 private:
  Configuration points_;
  DiscreteMeasure measure_;
};

EmpiricalMeasure empirical_measure(SpacePtr space, const Configuration& x);

/// alpha = exp(-V) m / C on the labels / grid cells of a space.
struct ReferenceMeasure {
  std::vector<double> base_weights;  // m per point
  std::vector<double> confinement;   // V per point, +inf allowed
  double log_normalizer = 0.0;       // log C
  std::vector<double> log_alpha;     // per point, -inf where alpha vanishes
  DiscreteMeasure alpha;

  double normalizer() const;
  const std::vector<double>& weights() const { return alpha.weights(); }
};

/// Fails with NormalizationDiverged if sum exp(-V) m is zero or not finite.
ReferenceMeasure build_reference(SpacePtr space, std::span<const double> base_weights,
                                 std::span<const double> confinement);

/// Finite-space reference given directly as alpha (m = 1, V = -log alpha, C = 1).
ReferenceMeasure reference_from_alpha(SpacePtr space, std::span<const double> alpha);

/// H(nu | mu); +inf unless nu << mu. Both measures must live on compatible spaces.
double relative_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu);

/// Dense form over aligned weight vectors.
double relative_entropy(std::span<const double> nu, std::span<const double> mu);

/// Weights of nu^{(x)k} on S^k, first factor slowest.
std::vector<double> product_weights(std::span<const double> w, std::size_t k);

/// Draws i.i.d. points from a reference measure. On grids a cell is drawn
/// from alpha and the point is uniform inside the cell.
class ReferenceSampler {
 public:
  ReferenceSampler(SpacePtr space, std::span<const double> weights);

  std::size_t draw_index(Rng& rng) const;
  void draw(Rng& rng, std::span<double> out) const;
  Configuration draw_configuration(Rng& rng, std::size_t n) const;

 private:
  SpacePtr space_;
  std::vector<double> cumulative_;
};

}  // namespace mfldp
