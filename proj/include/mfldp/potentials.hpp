#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfldp/space.hpp"

namespace mfldp {

/// V : S -> (-inf, +inf].
class ConfinementPotential {
 public:
  enum class Family { zero, quadratic, table, custom };
  using Evaluator = std::function<double(Point)>;
  using Gradient = std::function<void(Point, std::span<double>)>;

  ConfinementPotential() = default;

  static ConfinementPotential zero();
  /// V(x) = stiffness |x - center|^2 / 2 (euclidean).
  static ConfinementPotential quadratic(double stiffness = 1.0, double center = 0.0);
  /// One value per label / grid cell.
  static ConfinementPotential table(std::vector<double> values);
  static ConfinementPotential custom(Evaluator value, Gradient gradient = {});

  Family family() const { return family_; }
  std::string name() const;

  double operator()(const StateSpace& space, Point x) const;
  bool differentiable() const;
  void gradient(const StateSpace& space, Point x, std::span<double> out) const;

  /// Values on every label / grid cell of the space.
  std::vector<double> tabulate(const StateSpace& space) const;

  nlohmann::json to_json() const;

 private:
  Family family_ = Family::zero;
  double stiffness_ = 0.0;
  double center_ = 0.0;
  std::vector<double> table_;
  Evaluator custom_;
  Gradient custom_gradient_;
};

/// Symmetric k-body interaction W^(k) : S^k -> (-inf, +inf].
///
/// Built-in families:
///   power_law          b / rho^beta            (order 2, +inf on the diagonal)
///   logarithmic        -b log rho              (order 2, +inf on the diagonal)
///   quadratic_product  theta sum_c prod_i x_i[c]   (any order; theta x.y for k = 2)
///   spin_product       -(beta/2) x y           (order 2, on label values)
///   hard_core          +inf if rho < r else 0  (order 2)
///   constant           c                       (any order)
///   table              values on S^k           (finite spaces)
///   truncated          (-L) v (W ^ L) of a base potential
///   custom             user callable, caller guarantees symmetry
///
/// A potential may additionally carry a scale factor and be restricted to its
/// positive or negative part; both are applied after the family value.
class InteractionPotential {
 public:
  enum class Family {
    constant,
    power_law,
    logarithmic,
    quadratic_product,
    spin_product,
    hard_core,
    table,
    truncated,
    custom
  };
  enum class Part { full, positive, negative };
  using Evaluator = std::function<double(std::span<const Point>)>;

  static InteractionPotential constant(SpacePtr space, int order, double c);
  static InteractionPotential power_law(SpacePtr space, double b, double beta);
  static InteractionPotential logarithmic(SpacePtr space, double b);
  static InteractionPotential quadratic_product(SpacePtr space, double theta, int order = 2);
  static InteractionPotential spin_product(SpacePtr space, double beta);
  static InteractionPotential hard_core(SpacePtr space, double radius);
  /// Flat table over S^k, first argument slowest. Must be symmetric.
  static InteractionPotential table(SpacePtr space, int order, std::vector<double> values);
  static InteractionPotential custom(SpacePtr space, int order, Evaluator fn, std::string tag = "custom");

  int order() const { return order_; }
  Family family() const { return family_; }
  Part part() const { return part_; }
  double scale() const { return scale_; }
  const SpacePtr& space() const { return space_; }
  std::string name() const;

  /// Checks the arity, then evaluates.
  double operator()(std::span<const Point> tuple) const;
  double evaluate(std::span<const Point> tuple) const { return (*this)(tuple); }

  /// Unchecked evaluation for kernels; `tuple.size()` must equal order().
  double value(std::span<const Point> tuple) const;
  /// Unchecked order-2 evaluation.
  double pair(Point a, Point b) const;

  /// True when the family is +inf on the diagonal (or near it).
  bool singular() const;
  bool differentiable() const;

  /// Gradient in the first argument; NonDifferentiableFamily /
  /// SingularConfiguration on failure.
  void grad_first(std::span<const Point> tuple, std::span<double> out) const;

  /// For order-2 potentials of the form W(x, y) = c <x, y> (on euclidean
  /// coordinates or label values) returns c.
  std::optional<double> product_coupling() const;

  /// sup |W| when known to be finite.
  std::optional<double> bound() const;

  InteractionPotential scaled(double factor) const;
  InteractionPotential positive_part() const;
  InteractionPotential negative_part() const;

  /// Level of a truncated potential.
  double truncation_level() const { return level_; }
  const InteractionPotential* base() const { return base_.get(); }

  nlohmann::json to_json() const;

 private:
  InteractionPotential() = default;
  double raw(std::span<const Point> tuple) const;
  double raw_pair(Point a, Point b) const;
  double finish(double v) const;

  friend InteractionPotential truncate(const InteractionPotential& w, double level);

  SpacePtr space_;
  Family family_ = Family::constant;
  int order_ = 2;
  double b_ = 0.0;      // amplitude: c, b, theta, beta, radius depending on family
  double beta_ = 0.0;   // power-law exponent
  double level_ = 0.0;  // truncation level
  double scale_ = 1.0;
  Part part_ = Part::full;
  std::vector<double> table_;
  std::shared_ptr<const InteractionPotential> base_;
  std::shared_ptr<const Evaluator> custom_;
  std::string tag_;
};

/// W^L = (-L) v (W ^ L). Requires L > 0.
InteractionPotential truncate(const InteractionPotential& w, double level);

/// Checks W(x_sigma) = W(x) on `trials` random tuples drawn from the space's
/// grid / labels; returns the largest absolute discrepancy (+inf mismatches
/// count as infinite discrepancy).
double symmetry_defect(const InteractionPotential& w, std::size_t trials, std::uint64_t seed);

InteractionPotential interaction_from_json(SpacePtr space, const nlohmann::json& j);
ConfinementPotential confinement_from_json(const nlohmann::json& j);

}  // namespace mfldp
