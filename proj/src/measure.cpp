#include "mfldp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfldp/error.hpp"
#include "mfldp/numeric.hpp"

namespace mfldp {

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::vector<double> coords, std::vector<double> weights)
    : space_(std::move(space)), coords_(std::move(coords)), weights_(std::move(weights)) {
  canonicalize();
}

void DiscreteMeasure::canonicalize() {
  if (!space_) throw Error(ErrorCode::invalid_argument, "measure needs a state space");
  const std::size_t d = space_->dim();
  if (coords_.size() != weights_.size() * d)
    throw Error(ErrorCode::dimension_mismatch, "support coordinates do not match the weight count");
  if (weights_.empty()) throw Error(ErrorCode::invalid_argument, "measure needs at least one atom");
  CompensatedSum total;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::invalid_argument, "weights must be finite and >= 0");
    total.add(w);
  }
  if (std::abs(total.value() - 1.0) > kMassTolerance)
    throw Error(ErrorCode::invalid_argument, "weights must sum to 1");
  if (space_->is_finite()) {
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (!space_->contains(Point(coords_.data() + i, 1)))
        throw Error(ErrorCode::index_out_of_range, "atom is not a label of the space");
  }

  std::vector<std::size_t> order(weights_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(coords_.begin() + a * d, coords_.begin() + (a + 1) * d,
                                        coords_.begin() + b * d, coords_.begin() + (b + 1) * d);
  };
  std::stable_sort(order.begin(), order.end(), less);

  std::vector<double> c;
  std::vector<double> w;
  c.reserve(coords_.size());
  w.reserve(weights_.size());
  for (std::size_t idx : order) {
    const auto first = coords_.begin() + idx * d;
    if (!w.empty() && std::equal(first, first + d, c.end() - d)) {
      w.back() += weights_[idx];
    } else {
      c.insert(c.end(), first, first + d);
      w.push_back(weights_[idx]);
    }
  }
  coords_ = std::move(c);
  weights_ = std::move(w);
}

DiscreteMeasure DiscreteMeasure::on_space(SpacePtr space, std::vector<double> weights) {
  if (weights.size() != space->size())
    throw Error(ErrorCode::dimension_mismatch, "one weight per space point required");
  std::vector<double> coords;
  coords.reserve(weights.size() * space->dim());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    auto p = space->point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return DiscreteMeasure(std::move(space), std::move(coords), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::dirac(SpacePtr space, Point p) {
  return DiscreteMeasure(std::move(space), std::vector<double>(p.begin(), p.end()), {1.0});
}

std::vector<double> DiscreteMeasure::dense_weights() const {
  std::vector<double> out(space_->size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) out[space_->index_of(point(i))] += weights_[i];
  return out;
}

DiscreteMeasure DiscreteMeasure::projected() const {
  std::vector<double> coords;
  coords.reserve(coords_.size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto p = space_->point(space_->index_of(point(i)));
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return DiscreteMeasure(space_, std::move(coords), weights_);
}

double DiscreteMeasure::mean(std::size_t c) const {
  CompensatedSum s;
  for (std::size_t i = 0; i < size(); ++i) s.add(weights_[i] * space_->value(point(i), c));
  return s.value();
}

nlohmann::json DiscreteMeasure::to_json() const {
  nlohmann::json support = nlohmann::json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    auto p = point(i);
    if (space_->is_finite()) {
      support.push_back(space_->labels()[space_->index_of(p)]);
    } else if (dim() == 1) {
      support.push_back(p[0]);
    } else {
      support.push_back(std::vector<double>(p.begin(), p.end()));
    }
  }
  return {{"support", support}, {"weights", weights_}};
}

DiscreteMeasure DiscreteMeasure::from_json(SpacePtr space, const nlohmann::json& j) {
  const auto& support = j.at("support");
  auto weights = j.at("weights").get<std::vector<double>>();
  if (!support.is_array() || support.size() != weights.size())
    throw Error(ErrorCode::invalid_argument, "support and weights must have equal length");
  std::vector<double> coords;
  for (const auto& s : support) {
    if (space->is_finite()) {
      coords.push_back(static_cast<double>(space->label_index(s.is_string() ? s.get<std::string>() : s.dump())));
    } else if (s.is_number()) {
      coords.push_back(s.get<double>());
    } else {
      auto v = s.get<std::vector<double>>();
      coords.insert(coords.end(), v.begin(), v.end());
    }
  }
  return DiscreteMeasure(std::move(space), std::move(coords), std::move(weights));
}

EmpiricalMeasure::EmpiricalMeasure(SpacePtr space, Configuration points) : points_(std::move(points)) {
  const std::size_t n = points_.size();
  if (n == 0) throw Error(ErrorCode::empty_configuration, "empirical measure of zero points");
  if (points_.dim() != space->dim()) throw Error(ErrorCode::dimension_mismatch, "configuration dimension mismatch");
  const std::size_t d = space->dim();
  const auto& c = points_.coords();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(c.begin() + a * d, c.begin() + (a + 1) * d, c.begin() + b * d,
                                        c.begin() + (b + 1) * d);
  });
  // Atoms carry count/n, computed from exact integer counts.
  std::vector<double> coords;
  std::vector<double> weights;
  std::size_t run = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto first = c.begin() + order[r] * d;
    if (r > 0 && std::equal(first, first + d, coords.end() - d)) {
      ++run;
    } else {
      if (r > 0) weights.push_back(static_cast<double>(run) / static_cast<double>(n));
      coords.insert(coords.end(), first, first + d);
      run = 1;
    }
  }
  weights.push_back(static_cast<double>(run) / static_cast<double>(n));
  measure_ = DiscreteMeasure(std::move(space), std::move(coords), std::move(weights));
}

EmpiricalMeasure empirical_measure(SpacePtr space, const Configuration& x) {
  return EmpiricalMeasure(std::move(space), x);
}

double ReferenceMeasure::normalizer() const { return std::exp(log_normalizer); }

ReferenceMeasure build_reference(SpacePtr space, std::span<const double> base_weights,
                                 std::span<const double> confinement) {
  const std::size_t k = space->size();
  if (base_weights.size() != k || confinement.size() != k)
    throw Error(ErrorCode::dimension_mismatch, "base weights and confinement need one entry per point");
  bool any_positive = false;
  for (double m : base_weights) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw Error(ErrorCode::invalid_argument, "base weights must be finite and >= 0");
    any_positive = any_positive || m > 0.0;
  }
  if (!any_positive) throw Error(ErrorCode::invalid_argument, "base weights are all zero");
  for (double v : confinement)
    if (std::isnan(v) || v == kNegInf) throw Error(ErrorCode::invalid_argument, "confinement must lie in (-inf, +inf]");

  ReferenceMeasure ref;
  ref.base_weights.assign(base_weights.begin(), base_weights.end());
  ref.confinement.assign(confinement.begin(), confinement.end());
  ref.log_alpha.resize(k);
  LogSumExp lse;
  for (std::size_t i = 0; i < k; ++i) {
    const double t = base_weights[i] > 0.0 ? std::log(base_weights[i]) - confinement[i] : kNegInf;
    ref.log_alpha[i] = t;
    lse.add(t);
  }
  const double log_c = lse.value();
  if (log_c == kNegInf || !std::isfinite(log_c) || log_c >= std::log(std::numeric_limits<double>::max()))
    throw Error(ErrorCode::normalization_diverged, "sum of exp(-V) m is zero or not finite");
  ref.log_normalizer = log_c;
  std::vector<double> w(k);
  for (std::size_t i = 0; i < k; ++i) {
    ref.log_alpha[i] -= log_c;
    w[i] = std::exp(ref.log_alpha[i]);
  }
  // Absorb the rounding residue into the largest atom so the weights sum to 1.
  const double residue = 1.0 - compensated_sum(w);
  *std::max_element(w.begin(), w.end()) += residue;
  ref.alpha = DiscreteMeasure::on_space(std::move(space), std::move(w));
  return ref;
}

ReferenceMeasure reference_from_alpha(SpacePtr space, std::span<const double> alpha) {
  std::vector<double> v(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) v[i] = alpha[i] > 0.0 ? -std::log(alpha[i]) : kInf;
  const std::vector<double> m(alpha.size(), 1.0);
  return build_reference(std::move(space), m, v);
}

double relative_entropy(std::span<const double> nu, std::span<const double> mu) {
  if (nu.size() != mu.size()) throw Error(ErrorCode::space_mismatch, "measures are not aligned");
  CompensatedSum s;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] <= 0.0) continue;
    if (mu[i] <= 0.0) return kInf;
    s.add(nu[i] * (std::log(nu[i]) - std::log(mu[i])));
  }
  return std::max(0.0, s.value());
}

double relative_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
  if (!nu.space() || !mu.space() || !nu.space()->compatible(*mu.space()))
    throw Error(ErrorCode::space_mismatch, "relative entropy across different spaces");
  const std::size_t d = nu.dim();
  const auto& a = nu.coords();
  const auto& b = mu.coords();
  CompensatedSum s;
  std::size_t j = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double w = nu.weight(i);
    if (w <= 0.0) continue;
    while (j < mu.size() && std::lexicographical_compare(b.begin() + j * d, b.begin() + (j + 1) * d,
                                                         a.begin() + i * d, a.begin() + (i + 1) * d))
      ++j;
    if (j == mu.size() || !std::equal(a.begin() + i * d, a.begin() + (i + 1) * d, b.begin() + j * d))
      return kInf;
    const double m = mu.weight(j);
    if (m <= 0.0) return kInf;
    s.add(w * (std::log(w) - std::log(m)));
  }
  return std::max(0.0, s.value());
}

std::vector<double> product_weights(std::span<const double> w, std::size_t k) {
  std::vector<double> out{1.0};
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<double> next;
    next.reserve(out.size() * w.size());
    for (double a : out)
      for (double b : w) next.push_back(a * b);
    out = std::move(next);
  }
  return out;
}

ReferenceSampler::ReferenceSampler(SpacePtr space, std::span<const double> weights) : space_(std::move(space)) {
  if (weights.size() != space_->size()) throw Error(ErrorCode::dimension_mismatch, "one weight per point required");
  cumulative_.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cumulative_[i] = acc;
  }
  if (!(acc > 0.0)) throw Error(ErrorCode::invalid_argument, "sampling weights sum to zero");
  for (auto& c : cumulative_) c /= acc;
  cumulative_.back() = 1.0;
}

std::size_t ReferenceSampler::draw_index(Rng& rng) const {
  const double u = uniform01(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
  if (idx >= cumulative_.size()) idx = cumulative_.size() - 1;
  return idx;
}

void ReferenceSampler::draw(Rng& rng, std::span<double> out) const {
  const std::size_t idx = draw_index(rng);
  auto p = space_->point(idx);
  if (space_->is_finite()) {
    out[0] = p[0];
    return;
  }
  const double h = space_->cell_width();
  for (std::size_t d = 0; d < space_->dim(); ++d) out[d] = p[d] + (uniform01(rng) - 0.5) * h;
}

Configuration ReferenceSampler::draw_configuration(Rng& rng, std::size_t n) const {
  Configuration x(n, space_->dim());
  for (std::size_t i = 0; i < n; ++i) draw(rng, x.mutable_point(i));
  return x;
}

}  // namespace mfldp
