#include "mfldp/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfldp/error.hpp"

namespace mfldp {

namespace {

constexpr std::size_t kMaxGridPoints = 10'000'000;

bool parse_number(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

SpacePtr StateSpace::finite(std::vector<std::string> labels, std::vector<std::vector<double>> rho,
                            std::vector<double> values, std::size_t base_label) {
  const std::size_t k = labels.size();
  if (k == 0) throw Error(ErrorCode::invalid_argument, "finite space needs at least one label");
  if (rho.size() != k) throw Error(ErrorCode::invalid_argument, "distance table must be |S| x |S|");
  for (const auto& row : rho) {
    if (row.size() != k) throw Error(ErrorCode::invalid_argument, "distance table must be |S| x |S|");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (rho[i][i] != 0.0) throw Error(ErrorCode::invalid_argument, "distance table needs a zero diagonal");
    for (std::size_t j = 0; j < k; ++j) {
      if (!(rho[i][j] >= 0.0) || !std::isfinite(rho[i][j]))
        throw Error(ErrorCode::invalid_argument, "distances must be finite and nonnegative");
      if (rho[i][j] != rho[j][i]) throw Error(ErrorCode::invalid_argument, "distance table must be symmetric");
      if (i != j && rho[i][j] == 0.0)
        throw Error(ErrorCode::invalid_argument, "distinct labels must be at positive distance");
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < k; ++l)
        if (rho[i][l] > rho[i][j] + rho[j][l] + 1e-12 * (1.0 + rho[i][l]))
          throw Error(ErrorCode::invalid_argument, "distance table violates the triangle inequality");
  {
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorCode::invalid_argument, "labels must be distinct");
  }
  if (values.empty()) {
    values.resize(k);
    bool numeric = true;
    for (std::size_t i = 0; i < k && numeric; ++i) numeric = parse_number(labels[i], values[i]);
    if (!numeric)
      for (std::size_t i = 0; i < k; ++i) values[i] = static_cast<double>(i);
  }
  if (values.size() != k) throw Error(ErrorCode::invalid_argument, "one value per label required");
  if (base_label >= k) throw Error(ErrorCode::invalid_argument, "base label out of range");

  auto s = std::shared_ptr<StateSpace>(new StateSpace());
  s->kind_ = Kind::finite;
  s->dim_ = 1;
  s->size_ = k;
  s->labels_ = std::move(labels);
  s->rho_ = std::move(rho);
  s->values_ = std::move(values);
  s->coords_.resize(k);
  for (std::size_t i = 0; i < k; ++i) s->coords_[i] = static_cast<double>(i);
  s->base_point_ = {static_cast<double>(base_label)};
  return s;
}

SpacePtr StateSpace::euclidean(std::size_t dim, double lo, double hi, std::size_t cells,
                               std::vector<double> base_point) {
  if (dim < 1) throw Error(ErrorCode::invalid_argument, "euclidean dimension must be >= 1");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorCode::invalid_argument, "box must satisfy lo < hi");
  if (cells < 1) throw Error(ErrorCode::invalid_argument, "grid needs at least one cell");
  if (base_point.empty()) base_point.assign(dim, 0.0);
  if (base_point.size() != dim) throw Error(ErrorCode::invalid_argument, "base point dimension mismatch");
  auto s = std::shared_ptr<StateSpace>(new StateSpace());
  s->kind_ = Kind::euclidean;
  s->dim_ = dim;
  s->lo_ = lo;
  s->hi_ = hi;
  s->cells_ = cells;
  s->base_point_ = std::move(base_point);
  s->build_grid();
  return s;
}

SpacePtr StateSpace::spins() {
  return finite({"-1", "1"}, {{0.0, 2.0}, {2.0, 0.0}}, {-1.0, 1.0});
}

void StateSpace::build_grid() {
  double total = 1.0;
  for (std::size_t d = 0; d < dim_; ++d) total *= static_cast<double>(cells_);
  if (total > static_cast<double>(kMaxGridPoints)) {
    size_ = std::numeric_limits<std::size_t>::max();
    return;
  }
  size_ = static_cast<std::size_t>(total);
  coords_.resize(size_ * dim_);
  const double h = cell_width();
  for (std::size_t i = 0; i < size_; ++i) {
    std::size_t rem = i;
    for (std::size_t d = dim_; d-- > 0;) {
      const std::size_t c = rem % cells_;
      rem /= cells_;
      coords_[i * dim_ + d] = lo_ + (static_cast<double>(c) + 0.5) * h;
    }
  }
}

double StateSpace::cell_volume() const {
  return std::pow(cell_width(), static_cast<double>(dim_));
}

Point StateSpace::point(std::size_t i) const {
  if (coords_.empty()) throw Error(ErrorCode::support_too_large, "grid too large to materialize");
  if (i >= size_) throw Error(ErrorCode::index_out_of_range, "point index out of range");
  return {coords_.data() + i * dim_, dim_};
}

std::size_t StateSpace::index_of(Point p) const {
  if (p.size() != dim_) throw Error(ErrorCode::dimension_mismatch, "point has the wrong dimension");
  if (kind_ == Kind::finite) {
    const double v = p[0];
    if (!(v >= 0.0) || v >= static_cast<double>(size_) || v != std::floor(v))
      throw Error(ErrorCode::index_out_of_range, "not a label index of this space");
    return static_cast<std::size_t>(v);
  }
  const double h = cell_width();
  std::size_t idx = 0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double c = std::floor((p[d] - lo_) / h);
    if (c < 0.0) c = 0.0;
    if (c > static_cast<double>(cells_ - 1)) c = static_cast<double>(cells_ - 1);
    idx = idx * cells_ + static_cast<std::size_t>(c);
  }
  return idx;
}

bool StateSpace::contains(Point p) const {
  if (p.size() != dim_) return false;
  if (kind_ == Kind::finite) {
    const double v = p[0];
    return v >= 0.0 && v < static_cast<double>(size_) && v == std::floor(v);
  }
  for (double x : p)
    if (!(x >= lo_ && x <= hi_)) return false;
  return true;
}

double StateSpace::distance(Point a, Point b) const {
  if (kind_ == Kind::finite) return rho_[index_of(a)][index_of(b)];
  double s = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return std::sqrt(s);
}

double StateSpace::value(Point p, std::size_t c) const {
  if (kind_ == Kind::finite) return values_[index_of(p)];
  return p[c];
}

std::size_t StateSpace::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  throw Error(ErrorCode::invalid_argument, "unknown label '" + label + "'");
}

bool StateSpace::compatible(const StateSpace& other) const {
  if (this == &other) return true;
  if (kind_ != other.kind_ || dim_ != other.dim_) return false;
  if (kind_ == Kind::finite) return labels_ == other.labels_ && rho_ == other.rho_;
  return true;
}

nlohmann::json StateSpace::to_json() const {
  if (kind_ == Kind::finite) {
    return {{"kind", "finite"}, {"labels", labels_}, {"rho", rho_}, {"values", values_}};
  }
  return {{"kind", "euclidean"}, {"dim", dim_}, {"box", {lo_, hi_}}, {"cells", cells_}};
}

SpacePtr StateSpace::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite") {
    auto labels = j.at("labels").get<std::vector<std::string>>();
    std::vector<std::vector<double>> rho;
    if (j.contains("rho")) {
      rho = j.at("rho").get<std::vector<std::vector<double>>>();
    } else {
      // discrete metric
      rho.assign(labels.size(), std::vector<double>(labels.size(), 1.0));
      for (std::size_t i = 0; i < labels.size(); ++i) rho[i][i] = 0.0;
    }
    std::vector<double> values;
    if (j.contains("values")) values = j.at("values").get<std::vector<double>>();
    std::size_t base = 0;
    if (j.contains("base")) {
      const auto& b = j.at("base");
      base = b.is_string() ? std::size_t(std::find(labels.begin(), labels.end(), b.get<std::string>()) - labels.begin())
                           : b.get<std::size_t>();
    }
    return finite(std::move(labels), std::move(rho), std::move(values), base);
  }
  if (kind == "euclidean") {
    const auto box = j.at("box").get<std::vector<double>>();
    if (box.size() != 2) throw Error(ErrorCode::invalid_argument, "box must be [lo, hi]");
    std::vector<double> base;
    if (j.contains("base")) base = j.at("base").get<std::vector<double>>();
    return euclidean(j.at("dim").get<std::size_t>(), box[0], box[1], j.value("cells", std::size_t{1001}),
                     std::move(base));
  }
  throw Error(ErrorCode::invalid_argument, "unknown space kind '" + kind + "'");
}

Configuration::Configuration(std::size_t dim, std::vector<double> coords)
    : n_(dim == 0 ? 0 : coords.size() / dim), dim_(dim), coords_(std::move(coords)) {
  if (dim == 0 || coords_.size() % dim != 0)
    throw Error(ErrorCode::dimension_mismatch, "coordinate count is not a multiple of the dimension");
}

Configuration Configuration::from_indices(std::span<const std::size_t> indices) {
  Configuration c(indices.size(), 1);
  for (std::size_t i = 0; i < indices.size(); ++i) c.coords_[i] = static_cast<double>(indices[i]);
  return c;
}

void Configuration::set(std::size_t i, Point p) {
  std::copy(p.begin(), p.end(), coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
}

}  // namespace mfldp
