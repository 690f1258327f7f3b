#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mfldp {

/// A point is a view of its coordinates. On finite spaces a point has one
/// coordinate holding the label index; on euclidean spaces it has `dim`
/// coordinates.
using Point = std::span<const double>;

class StateSpace;
using SpacePtr = std::shared_ptr<const StateSpace>;

/// Either a finite metric space (labels + distance table) or a euclidean box
/// [lo, hi]^d carrying a uniform grid of `cells` cells per axis. Samplers use
/// continuous euclidean coordinates; measure-level computations use the grid.
class StateSpace {
 public:
  enum class Kind { finite, euclidean };

  /// `values` is the numeric embedding of each label used by product
  /// potentials (for spins: -1, +1). Defaults to labels parsed as numbers,
  /// falling back to label indices.
  static SpacePtr finite(std::vector<std::string> labels, std::vector<std::vector<double>> rho,
                         std::vector<double> values = {}, std::size_t base_label = 0);

  static SpacePtr euclidean(std::size_t dim, double lo, double hi, std::size_t cells,
                            std::vector<double> base_point = {});

  /// Two-point space {-1, +1} with rho(-1, +1) = 2.
  static SpacePtr spins();

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite; }

  /// Coordinates per point (1 on finite spaces).
  std::size_t dim() const { return dim_; }

  /// Number of labels (finite) or grid cells (euclidean, cells^dim).
  std::size_t size() const { return size_; }

  /// Coordinates of label / grid cell `i`.
  Point point(std::size_t i) const;

  /// Index of the label or grid cell containing `p`.
  std::size_t index_of(Point p) const;

  bool contains(Point p) const;

  double distance(Point a, Point b) const;

  /// Numeric embedding coordinate `c` of a point (finite: label value).
  double value(Point p, std::size_t c = 0) const;

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<double>>& rho() const { return rho_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t label_index(const std::string& label) const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t cells() const { return cells_; }
  double cell_width() const { return (hi_ - lo_) / static_cast<double>(cells_); }
  double cell_volume() const;

  /// Base point x0 used by tail conditions.
  Point base_point() const { return base_point_; }

  /// Same kind; for finite spaces equal labels and distances, for euclidean
  /// spaces equal dimension.
  bool compatible(const StateSpace& other) const;

  nlohmann::json to_json() const;
  static SpacePtr from_json(const nlohmann::json& j);

 private:
  StateSpace() = default;
  void build_grid();

  Kind kind_ = Kind::finite;
  std::size_t dim_ = 1;
  std::size_t size_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> rho_;
  std::vector<double> values_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::size_t cells_ = 0;
  std::vector<double> coords_;  // size_ * dim_
  std::vector<double> base_point_;
};

/// n particle positions, stored flat (n x dim).
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::size_t n, std::size_t dim) : n_(n), dim_(dim), coords_(n * dim, 0.0) {}
  Configuration(std::size_t dim, std::vector<double> coords);

  /// Finite-space configuration from label indices.
  static Configuration from_indices(std::span<const std::size_t> indices);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  Point operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<double> mutable_point(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }
  void set(std::size_t i, Point p);
  const std::vector<double>& coords() const { return coords_; }
  std::vector<double>& coords() { return coords_; }

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 1;
  std::vector<double> coords_;
};

}  // namespace mfldp
