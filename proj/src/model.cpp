#include "mfldp/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mfldp/error.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/parallel.hpp"
#include "mfldp/ustats.hpp"
#include "tuple_iteration.hpp"

namespace mfldp {

GibbsModel::GibbsModel(SpacePtr space, ConfinementPotential confinement, std::vector<InteractionPotential> interactions,
                       std::vector<double> base_weights)
    : space_(std::move(space)), confinement_(std::move(confinement)), interactions_(std::move(interactions)) {
  std::set<int> orders;
  for (const auto& w : interactions_) {
    if (w.order() < 2) throw Error(ErrorCode::invalid_argument, "interaction orders start at 2");
    if (!orders.insert(w.order()).second) throw Error(ErrorCode::invalid_argument, "interaction orders must be distinct");
    if (!w.space()->compatible(*space_)) throw Error(ErrorCode::space_mismatch, "interaction lives on another space");
  }
  if (base_weights.empty()) base_weights.assign(space_->size(), space_->is_finite() ? 1.0 : space_->cell_volume());
  reference_ = build_reference(space_, base_weights, confinement_.tabulate(*space_));
  if (!space_->is_finite()) {
    const double vol = space_->cell_volume();
    log_base_density_.resize(base_weights.size());
    for (std::size_t i = 0; i < base_weights.size(); ++i)
      log_base_density_[i] = base_weights[i] > 0.0 ? std::log(base_weights[i] / vol) : kNegInf;
  }
}

GibbsModel GibbsModel::from_alpha(SpacePtr space, std::span<const double> alpha,
                                  std::vector<InteractionPotential> interactions) {
  std::vector<double> v(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) v[i] = alpha[i] > 0.0 ? -std::log(alpha[i]) : kInf;
  return GibbsModel(std::move(space), ConfinementPotential::table(std::move(v)), std::move(interactions));
}

GibbsModel GibbsModel::spin(double beta) {
  auto s = StateSpace::spins();
  return GibbsModel(s, ConfinementPotential::zero(), {InteractionPotential::spin_product(s, beta)});
}

GibbsModel GibbsModel::quadratic_product(double theta, double lo, double hi, std::size_t cells) {
  auto s = StateSpace::euclidean(1, lo, hi, cells);
  return GibbsModel(s, ConfinementPotential::quadratic(1.0, 0.0), {InteractionPotential::quadratic_product(s, theta)});
}

int GibbsModel::max_order() const {
  int n = 1;
  for (const auto& w : interactions_) n = std::max(n, w.order());
  return n;
}

GibbsModel GibbsModel::scaled(double t) const {
  GibbsModel m = *this;
  for (auto& w : m.interactions_) w = w.scaled(t);
  return m;
}

double GibbsModel::log_reference_density(Point x) const {
  if (!space_->contains(x)) return kNegInf;
  const std::size_t i = space_->index_of(x);
  if (space_->is_finite()) return reference_.log_alpha[i];
  return log_base_density_[i] - confinement_(*space_, x);
}

double GibbsModel::interaction_energy(const Configuration& x) const {
  const double n = static_cast<double>(x.size());
  CompensatedSum s;
  for (const auto& w : interactions_) {
    const double u = u_statistic(w, x);
    if (u == kInf) return kInf;
    s.add(n * u);
  }
  return s.value();
}

double GibbsModel::hamiltonian(const Configuration& x) const {
  if (x.size() < static_cast<std::size_t>(max_order()))
    throw Error(ErrorCode::too_few_particles, "need at least N particles");
  CompensatedSum s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = confinement_(*space_, x[i]);
    if (v == kInf) return kInf;
    s.add(v);
  }
  const double e = interaction_energy(x);
  if (e == kInf) return kInf;
  s.add(e);
  return s.value();
}

bool GibbsModel::differentiable() const {
  if (space_->is_finite() || !confinement_.differentiable()) return false;
  return std::all_of(interactions_.begin(), interactions_.end(), [](const auto& w) { return w.differentiable(); });
}

bool GibbsModel::singular() const {
  return std::any_of(interactions_.begin(), interactions_.end(), [](const auto& w) { return w.singular(); });
}

std::vector<double> GibbsModel::grad_hamiltonian(const Configuration& x) const {
  if (space_->is_finite()) throw Error(ErrorCode::non_differentiable_family, "gradients need a euclidean space");
  const std::size_t n = x.size(), d = space_->dim();
  if (n < static_cast<std::size_t>(max_order())) throw Error(ErrorCode::too_few_particles, "need at least N particles");
  std::vector<double> grad(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) confinement_.gradient(*space_, x[i], std::span<double>(grad.data() + i * d, d));

  for (const auto& w : interactions_) {
    const std::size_t k = static_cast<std::size_t>(w.order());
    // d/dx_i of n U_n = n k / |I_n^k| * sum over ordered (k-1)-tuples of grad_1 W(x_i, ...)
    const double factor = static_cast<double>(n) * static_cast<double>(k) / ordered_tuple_count(n, k);
    if (auto c = w.product_coupling()) {
      std::vector<double> sum(d, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c2 = 0; c2 < d; ++c2) sum[c2] += x[i][c2];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c2 = 0; c2 < d; ++c2) grad[i * d + c2] += factor * *c * (sum[c2] - x[i][c2]);
      continue;
    }
    if (!w.differentiable())
      throw Error(ErrorCode::non_differentiable_family, "interaction '" + w.name() + "' has no gradient");
    const long nl = static_cast<long>(n);
    bool singular_hit = false;
#pragma omp parallel for schedule(static) num_threads(worker_count()) reduction(|| : singular_hit)
    for (long li = 0; li < nl; ++li) {
      const auto i = static_cast<std::size_t>(li);
      std::vector<std::size_t> idx(k);
      std::vector<Point> tuple(k);
      std::vector<double> g(d), acc(d, 0.0);
      idx[0] = i;
      tuple[0] = x[i];
      try {
        detail::for_each_distinct(n, idx, 1, [&](const std::vector<std::size_t>& t) {
          for (std::size_t j = 1; j < k; ++j) tuple[j] = x[t[j]];
          w.grad_first(tuple, g);
          for (std::size_t c2 = 0; c2 < d; ++c2) acc[c2] += g[c2];
        });
      } catch (const Error&) {
        singular_hit = true;
      }
      for (std::size_t c2 = 0; c2 < d; ++c2) grad[i * d + c2] += factor * acc[c2];
    }
    if (singular_hit) throw Error(ErrorCode::singular_configuration, "configuration sits on a singularity of the interaction");
  }
  return grad;
}

nlohmann::json GibbsModel::to_json() const {
  nlohmann::json ws = nlohmann::json::array();
  for (const auto& w : interactions_) ws.push_back(w.to_json());
  return {{"space", space_->to_json()},
          {"confinement", confinement_.to_json()},
          {"interactions", ws},
          {"log_normalizer", reference_.log_normalizer}};
}

}  // namespace mfldp
