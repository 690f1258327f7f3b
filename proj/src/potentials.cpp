#include "mfldp/potentials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "mfldp/error.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/rng.hpp"

namespace mfldp {

// ---------------------------------------------------------------- confinement

ConfinementPotential ConfinementPotential::zero() { return {}; }

ConfinementPotential ConfinementPotential::quadratic(double stiffness, double center) {
  ConfinementPotential v;
  v.family_ = Family::quadratic;
  v.stiffness_ = stiffness;
  v.center_ = center;
  return v;
}

ConfinementPotential ConfinementPotential::table(std::vector<double> values) {
  for (double x : values)
    if (std::isnan(x) || x == kNegInf) throw Error(ErrorCode::invalid_argument, "confinement must lie in (-inf, +inf]");
  ConfinementPotential v;
  v.family_ = Family::table;
  v.table_ = std::move(values);
  return v;
}

ConfinementPotential ConfinementPotential::custom(Evaluator value, Gradient gradient) {
  ConfinementPotential v;
  v.family_ = Family::custom;
  v.custom_ = std::move(value);
  v.custom_gradient_ = std::move(gradient);
  return v;
}

std::string ConfinementPotential::name() const {
  switch (family_) {
    case Family::zero: return "zero";
    case Family::quadratic: return "quadratic";
    case Family::table: return "table";
    case Family::custom: return "custom";
  }
  return "unknown";
}

double ConfinementPotential::operator()(const StateSpace& space, Point x) const {
  switch (family_) {
    case Family::zero: return 0.0;
    case Family::quadratic: {
      double s = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) {
        const double t = space.value(x, c) - center_;
        s += t * t;
      }
      return 0.5 * stiffness_ * s;
    }
    case Family::table: {
      const std::size_t i = space.index_of(x);
      if (i >= table_.size()) throw Error(ErrorCode::index_out_of_range, "confinement table too short");
      return table_[i];
    }
    case Family::custom: return custom_(x);
  }
  return 0.0;
}

bool ConfinementPotential::differentiable() const {
  return family_ == Family::zero || family_ == Family::quadratic ||
         (family_ == Family::custom && static_cast<bool>(custom_gradient_));
}

void ConfinementPotential::gradient(const StateSpace& space, Point x, std::span<double> out) const {
  if (space.is_finite() || !differentiable())
    throw Error(ErrorCode::non_differentiable_family, "confinement '" + name() + "' has no gradient here");
  switch (family_) {
    case Family::zero: std::fill(out.begin(), out.end(), 0.0); return;
    case Family::quadratic:
      for (std::size_t c = 0; c < x.size(); ++c) out[c] = stiffness_ * (x[c] - center_);
      return;
    case Family::custom: custom_gradient_(x, out); return;
    case Family::table: break;
  }
}

std::vector<double> ConfinementPotential::tabulate(const StateSpace& space) const {
  std::vector<double> out(space.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(space, space.point(i));
  return out;
}

nlohmann::json ConfinementPotential::to_json() const {
  switch (family_) {
    case Family::zero: return {{"family", "zero"}};
    case Family::quadratic: return {{"family", "quadratic"}, {"stiffness", stiffness_}, {"center", center_}};
    case Family::table: return {{"family", "table"}, {"values", table_}};
    case Family::custom: return {{"family", "custom"}};
  }
  return {};
}

// ---------------------------------------------------------------- interaction

namespace {

void require_order2(int order, const char* family) {
  if (order != 2) throw Error(ErrorCode::invalid_argument, std::string(family) + " is a pair potential");
}

}  // namespace

InteractionPotential InteractionPotential::constant(SpacePtr space, int order, double c) {
  if (order < 1) throw Error(ErrorCode::invalid_argument, "order must be >= 1");
  if (std::isnan(c) || c == kNegInf) throw Error(ErrorCode::invalid_argument, "value must lie in (-inf, +inf]");
  InteractionPotential w;
  w.space_ = std::move(space);
  w.family_ = Family::constant;
  w.order_ = order;
  w.b_ = c;
  return w;
}

InteractionPotential InteractionPotential::power_law(SpacePtr space, double b, double beta) {
  if (!(b > 0.0)) throw Error(ErrorCode::invalid_argument, "power-law amplitude b must be > 0");
  if (!(beta > 0.0)) throw Error(ErrorCode::invalid_argument, "power-law exponent beta must be > 0");
  if (!space->is_finite() && !(beta < static_cast<double>(space->dim())))
    throw Error(ErrorCode::invalid_argument, "power-law exponent must satisfy beta < d");
  InteractionPotential w;
  w.space_ = std::move(space);
  w.family_ = Family::power_law;
  w.b_ = b;
  w.beta_ = beta;
  return w;
}

InteractionPotential InteractionPotential::logarithmic(SpacePtr space, double b) {
  if (!(b > 0.0)) throw Error(ErrorCode::invalid_argument, "logarithmic amplitude b must be > 0");
  InteractionPotential w;
  w.space_ = std::move(space);
  w.family_ = Family::logarithmic;
  w.b_ = b;
  return w;
}

InteractionPotential InteractionPotential::quadratic_product(SpacePtr space, double theta, int order) {
  if (order < 1) throw Error(ErrorCode::invalid_argument, "order must be >= 1");
  InteractionPotential w;
  w.space_ = std::move(space);
  w.family_ = Family::quadratic_product;
  w.order_ = order;
  w.b_ = theta;
  return w;
}

InteractionPotential InteractionPotential::spin_product(SpacePtr space, double beta) {
  if (!space->is_finite()) throw Error(ErrorCode::invalid_argument, "spin_product needs a finite space");
  InteractionPotential w;
  w.space_ = std::move(space);
  w.family_ = Family::spin_product;
  w.b_ = beta;
  return w;
}

InteractionPotential InteractionPotential::hard_core(SpacePtr space, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "hard-core radius must be > 0");
  InteractionPotential w;
  w.space_ = std::move(space);
  w.family_ = Family::hard_core;
  w.b_ = radius;
  return w;
}

InteractionPotential InteractionPotential::table(SpacePtr space, int order, std::vector<double> values) {
  if (!space->is_finite()) throw Error(ErrorCode::invalid_argument, "table potentials need a finite space");
  if (order < 1) throw Error(ErrorCode::invalid_argument, "order must be >= 1");
  const std::size_t s = space->size();
  std::size_t expected = 1;
  for (int j = 0; j < order; ++j) expected *= s;
  if (values.size() != expected) throw Error(ErrorCode::invalid_argument, "table needs |S|^k entries");
  for (double v : values)
    if (std::isnan(v) || v == kNegInf) throw Error(ErrorCode::invalid_argument, "table values must lie in (-inf, +inf]");
  // symmetry: compare every entry with its sorted-index representative
  std::vector<std::size_t> idx(static_cast<std::size_t>(order));
  for (std::size_t flat = 0; flat < expected; ++flat) {
    std::size_t rem = flat;
    for (int j = order - 1; j >= 0; --j) {
      idx[static_cast<std::size_t>(j)] = rem % s;
      rem /= s;
    }
    std::sort(idx.begin(), idx.end());
    std::size_t rep = 0;
    for (auto a : idx) rep = rep * s + a;
    const double x = values[flat], y = values[rep];
    if (!(x == y || std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x))))
      throw Error(ErrorCode::invalid_argument, "table potential is not symmetric");
  }
  InteractionPotential w;
  w.space_ = std::move(space);
  w.family_ = Family::table;
  w.order_ = order;
  w.table_ = std::move(values);
  return w;
}

InteractionPotential InteractionPotential::custom(SpacePtr space, int order, Evaluator fn, std::string tag) {
  if (order < 1) throw Error(ErrorCode::invalid_argument, "order must be >= 1");
  InteractionPotential w;
  w.space_ = std::move(space);
  w.family_ = Family::custom;
  w.order_ = order;
  w.custom_ = std::make_shared<const Evaluator>(std::move(fn));
  w.tag_ = std::move(tag);
  return w;
}

std::string InteractionPotential::name() const {
  std::string base;
  switch (family_) {
    case Family::constant: base = "constant"; break;
    case Family::power_law: base = "power_law"; break;
    case Family::logarithmic: base = "log"; break;
    case Family::quadratic_product: base = "quadratic_product"; break;
    case Family::spin_product: base = "spin_product"; break;
    case Family::hard_core: base = "hard_core"; break;
    case Family::table: base = "table"; break;
    case Family::truncated: base = "truncated(" + base_->name() + ")"; break;
    case Family::custom: base = tag_; break;
  }
  if (part_ == Part::positive) base += "+";
  if (part_ == Part::negative) base += "-";
  return base;
}

double InteractionPotential::finish(double v) const {
  if (scale_ != 1.0) v = scale_ == 0.0 ? 0.0 : v * scale_;
  switch (part_) {
    case Part::full: return v;
    case Part::positive: return v > 0.0 ? v : 0.0;
    case Part::negative: return v < 0.0 ? -v : 0.0;
  }
  return v;
}

double InteractionPotential::raw_pair(Point a, Point b) const {
  const StateSpace& s = *space_;
  switch (family_) {
    case Family::constant: return b_;
    case Family::power_law: {
      const double r = s.distance(a, b);
      return r > 0.0 ? b_ / std::pow(r, beta_) : kInf;
    }
    case Family::logarithmic: {
      const double r = s.distance(a, b);
      return r > 0.0 ? -b_ * std::log(r) : kInf;
    }
    case Family::quadratic_product: {
      double dot = 0.0;
      if (s.is_finite()) return b_ * s.value(a) * s.value(b);
      for (std::size_t c = 0; c < a.size(); ++c) dot += a[c] * b[c];
      return b_ * dot;
    }
    case Family::spin_product: return -0.5 * b_ * s.value(a) * s.value(b);
    case Family::hard_core: return s.distance(a, b) < b_ ? kInf : 0.0;
    case Family::table: return table_[s.index_of(a) * s.size() + s.index_of(b)];
    case Family::truncated: {
      const double v = base_->pair(a, b);
      return std::max(-level_, std::min(v, level_));
    }
    case Family::custom: {
      const std::array<Point, 2> t{a, b};
      return (*custom_)(t);
    }
  }
  return 0.0;
}

double InteractionPotential::raw(std::span<const Point> tuple) const {
  if (order_ == 2) return raw_pair(tuple[0], tuple[1]);
  const StateSpace& s = *space_;
  switch (family_) {
    case Family::constant: return b_;
    case Family::quadratic_product: {
      const std::size_t dims = s.is_finite() ? 1 : s.dim();
      double total = 0.0;
      for (std::size_t c = 0; c < dims; ++c) {
        double prod = 1.0;
        for (const auto& p : tuple) prod *= s.is_finite() ? s.value(p) : p[c];
        total += prod;
      }
      return b_ * total;
    }
    case Family::table: {
      std::size_t flat = 0;
      for (const auto& p : tuple) flat = flat * s.size() + s.index_of(p);
      return table_[flat];
    }
    case Family::truncated: {
      const double v = base_->value(tuple);
      return std::max(-level_, std::min(v, level_));
    }
    case Family::custom: return (*custom_)(tuple);
    default: break;
  }
  throw Error(ErrorCode::arity_mismatch, name() + " is a pair potential");
}

double InteractionPotential::value(std::span<const Point> tuple) const { return finish(raw(tuple)); }

double InteractionPotential::pair(Point a, Point b) const { return finish(raw_pair(a, b)); }

double InteractionPotential::operator()(std::span<const Point> tuple) const {
  if (static_cast<int>(tuple.size()) != order_)
    throw Error(ErrorCode::arity_mismatch,
                "expected " + std::to_string(order_) + " points, got " + std::to_string(tuple.size()));
  for (const auto& p : tuple)
    if (p.size() != space_->dim()) throw Error(ErrorCode::dimension_mismatch, "point dimension mismatch");
  return value(tuple);
}

bool InteractionPotential::singular() const {
  switch (family_) {
    case Family::power_law:
    case Family::logarithmic:
    case Family::hard_core: return true;
    default: return false;
  }
}

bool InteractionPotential::differentiable() const {
  if (space_->is_finite() || part_ != Part::full) return false;
  switch (family_) {
    case Family::constant:
    case Family::power_law:
    case Family::logarithmic:
    case Family::quadratic_product: return true;
    default: return false;
  }
}

void InteractionPotential::grad_first(std::span<const Point> tuple, std::span<double> out) const {
  if (!differentiable())
    throw Error(ErrorCode::non_differentiable_family, "no gradient for '" + name() + "' on this space");
  const std::size_t d = space_->dim();
  std::fill(out.begin(), out.end(), 0.0);
  switch (family_) {
    case Family::constant: return;
    case Family::power_law:
    case Family::logarithmic: {
      const Point a = tuple[0], b = tuple[1];
      double r2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) r2 += (a[c] - b[c]) * (a[c] - b[c]);
      if (!(r2 > 0.0)) throw Error(ErrorCode::singular_configuration, "coincident points in a singular potential");
      // power law: d/dx b r^-beta = -b beta r^(-beta-2) (x - y); log: -b (x - y) / r^2
      const double f = family_ == Family::power_law ? -b_ * beta_ * std::pow(r2, -0.5 * beta_ - 1.0) : -b_ / r2;
      for (std::size_t c = 0; c < d; ++c) out[c] = scale_ * f * (a[c] - b[c]);
      return;
    }
    case Family::quadratic_product:
      for (std::size_t c = 0; c < d; ++c) {
        double prod = 1.0;
        for (std::size_t i = 1; i < tuple.size(); ++i) prod *= tuple[i][c];
        out[c] = scale_ * b_ * prod;
      }
      return;
    default: break;
  }
}

std::optional<double> InteractionPotential::product_coupling() const {
  if (order_ != 2 || part_ != Part::full) return std::nullopt;
  if (family_ == Family::quadratic_product) return scale_ * b_;
  if (family_ == Family::spin_product) return -0.5 * scale_ * b_;
  return std::nullopt;
}

std::optional<double> InteractionPotential::bound() const {
  double m = 0.0;
  switch (family_) {
    case Family::constant: m = std::abs(b_); break;
    case Family::spin_product: {
      double v = 0.0;
      for (double x : space_->values()) v = std::max(v, std::abs(x));
      m = 0.5 * std::abs(b_) * v * v;
      break;
    }
    case Family::table:
      for (double x : table_) m = std::max(m, std::abs(x));
      break;
    case Family::truncated: m = level_; break;
    case Family::quadratic_product:
      if (!space_->is_finite()) return std::nullopt;
      {
        double v = 0.0;
        for (double x : space_->values()) v = std::max(v, std::abs(x));
        m = std::abs(b_) * std::pow(v, order_);
      }
      break;
    default: return std::nullopt;
  }
  if (!std::isfinite(m)) return std::nullopt;
  return m * std::abs(scale_);
}

InteractionPotential InteractionPotential::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) throw Error(ErrorCode::invalid_argument, "scale must be finite and >= 0");
  if (part_ != Part::full) throw Error(ErrorCode::invalid_argument, "scale the full potential before taking parts");
  InteractionPotential w = *this;
  w.scale_ *= factor;
  return w;
}

InteractionPotential InteractionPotential::positive_part() const {
  InteractionPotential w = *this;
  if (part_ != Part::full) throw Error(ErrorCode::invalid_argument, "already a one-sided part");
  w.part_ = Part::positive;
  return w;
}

InteractionPotential InteractionPotential::negative_part() const {
  InteractionPotential w = *this;
  if (part_ != Part::full) throw Error(ErrorCode::invalid_argument, "already a one-sided part");
  w.part_ = Part::negative;
  return w;
}

nlohmann::json InteractionPotential::to_json() const {
  nlohmann::json j{{"order", order_}, {"family", name()}};
  switch (family_) {
    case Family::constant: j["c"] = b_; break;
    case Family::power_law: j["b"] = b_; j["beta"] = beta_; break;
    case Family::logarithmic: j["b"] = b_; break;
    case Family::quadratic_product: j["theta"] = b_; break;
    case Family::spin_product: j["beta"] = b_; break;
    case Family::hard_core: j["radius"] = b_; break;
    case Family::table: j["values"] = table_; break;
    case Family::truncated: j["base"] = base_->to_json(); j["level"] = level_; break;
    case Family::custom: break;
  }
  if (scale_ != 1.0) j["scale"] = scale_;
  return j;
}

InteractionPotential truncate(const InteractionPotential& w, double level) {
  if (!(level > 0.0)) throw Error(ErrorCode::invalid_argument, "truncation level must be > 0");
  InteractionPotential t;
  t.space_ = w.space_;
  t.family_ = InteractionPotential::Family::truncated;
  t.order_ = w.order_;
  t.level_ = level;
  t.base_ = std::make_shared<const InteractionPotential>(w);
  return t;
}

double symmetry_defect(const InteractionPotential& w, std::size_t trials, std::uint64_t seed) {
  const auto& s = *w.space();
  const std::size_t k = static_cast<std::size_t>(w.order());
  const std::size_t d = s.dim();
  Rng rng(derive_seed(seed, 0));
  std::vector<double> buf(k * d);
  std::vector<double> perm_buf(k * d);
  std::vector<Point> tuple(k), ptuple(k);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      if (s.is_finite()) {
        buf[i] = static_cast<double>(std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng));
      } else {
        for (std::size_t c = 0; c < d; ++c) buf[i * d + c] = s.lo() + (s.hi() - s.lo()) * uniform01(rng);
      }
      tuple[i] = Point(buf.data() + i * d, d);
    }
    const double ref = w(tuple);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    while (std::next_permutation(perm.begin(), perm.end())) {
      for (std::size_t i = 0; i < k; ++i) ptuple[i] = tuple[perm[i]];
      const double v = w(ptuple);
      if (ref == v) continue;
      const double diff = std::abs(ref - v);
      worst = std::max(worst, std::isnan(diff) ? kInf : diff);
    }
  }
  return worst;
}

namespace {

void flatten_into(const nlohmann::json& j, std::vector<double>& out) {
  if (j.is_array()) {
    for (const auto& e : j) flatten_into(e, out);
  } else if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "+inf")) {
    out.push_back(kInf);
  } else {
    out.push_back(j.get<double>());
  }
}

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::config_error, std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) throw Error(ErrorCode::config_error, std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

InteractionPotential interaction_from_json(SpacePtr space, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::config_error, "potential must be an object");
  if (!j.contains("family")) throw Error(ErrorCode::config_error, "missing field 'family'");
  const std::string family = j.at("family").get<std::string>();
  const int order = j.value("order", 2);
  InteractionPotential w = [&] {
    if (family == "power_law") {
      require_order2(order, "power_law");
      return InteractionPotential::power_law(space, number_field(j, "b"), number_field(j, "beta"));
    }
    if (family == "log" || family == "logarithmic") {
      require_order2(order, "log");
      return InteractionPotential::logarithmic(space, number_field(j, "b"));
    }
    if (family == "spin_product") {
      require_order2(order, "spin_product");
      return InteractionPotential::spin_product(space, number_field(j, "beta"));
    }
    if (family == "quadratic_product") return InteractionPotential::quadratic_product(space, number_field(j, "theta"), order);
    if (family == "hard_core") {
      require_order2(order, "hard_core");
      return InteractionPotential::hard_core(space, number_field(j, "radius"));
    }
    if (family == "constant") return InteractionPotential::constant(space, order, number_field(j, "c"));
    if (family == "table") {
      if (!j.contains("values")) throw Error(ErrorCode::config_error, "missing field 'values'");
      std::vector<double> values;
      flatten_into(j.at("values"), values);
      return InteractionPotential::table(space, order, std::move(values));
    }
    throw Error(ErrorCode::config_error, "unknown family '" + family + "'");
  }();
  if (j.contains("scale")) w = w.scaled(number_field(j, "scale"));
  if (j.contains("truncate")) w = truncate(w, number_field(j, "truncate"));
  return w;
}

ConfinementPotential confinement_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::config_error, "confinement must be an object");
  const std::string family = j.value("family", std::string("zero"));
  if (family == "zero") return ConfinementPotential::zero();
  if (family == "quadratic") return ConfinementPotential::quadratic(j.value("stiffness", 1.0), j.value("center", 0.0));
  if (family == "table") {
    if (!j.contains("values")) throw Error(ErrorCode::config_error, "missing field 'values'");
    std::vector<double> values;
    flatten_into(j.at("values"), values);
    return ConfinementPotential::table(std::move(values));
  }
  throw Error(ErrorCode::config_error, "unknown confinement family '" + family + "'");
}

}  // namespace mfldp
