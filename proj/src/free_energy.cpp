#include "mfldp/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "mfldp/error.hpp"
#include "mfldp/json_util.hpp"
#include "mfldp/kernels.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/parallel.hpp"
#include "mfldp/partition.hpp"
#include "mfldp/wasserstein.hpp"
#include "tuple_iteration.hpp"

namespace mfldp {

namespace {

constexpr std::size_t kMaxScanLabels = 4;
constexpr std::size_t kMaxExactIterateLabels = 200;

// Positive-weight atoms of a dense weight vector.
DiscreteMeasure sparse_measure(const SpacePtr& space, std::span<const double> weights) {
  std::vector<double> coords, w;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    const auto p = space->point(i);
    coords.insert(coords.end(), p.begin(), p.end());
    w.push_back(weights[i]);
  }
  return DiscreteMeasure(space, std::move(coords), std::move(w));
}

std::vector<double> embed(const StateSpace& space, Point p) {
  if (space.is_finite()) return {space.value(p)};
  return {p.begin(), p.end()};
}

// pi_nu W(x) = int W(x, y_2, ..., y_k) dnu^{(x)(k-1)} for every label / cell x.
std::vector<double> mean_field(const InteractionPotential& w, const SpacePtr& space, const DiscreteMeasure& nu) {
  const std::size_t s = space->size();
  std::vector<double> out(s, 0.0);
  if (auto c = w.product_coupling()) {
    std::vector<double> mean(space->is_finite() ? 1 : space->dim(), 0.0);
    for (std::size_t a = 0; a < nu.size(); ++a) {
      const auto e = embed(*space, nu.point(a));
      for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += nu.weight(a) * e[d];
    }
    for (std::size_t i = 0; i < s; ++i) {
      const auto e = embed(*space, space->point(i));
      double dot = 0.0;
      for (std::size_t d = 0; d < mean.size(); ++d) dot += e[d] * mean[d];
      out[i] = *c * dot;
    }
    return out;
  }
  const std::size_t k = static_cast<std::size_t>(w.order());
  const long sl = static_cast<long>(s);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long li = 0; li < sl; ++li) {
    const auto i = static_cast<std::size_t>(li);
    std::vector<Point> tuple(k);
    std::vector<std::size_t> rest(k - 1, 0);
    tuple[0] = space->point(i);
    CompensatedSum acc;
    bool infinite = false;
    do {
      double weight = 1.0;
      for (std::size_t j = 1; j < k; ++j) {
        weight *= nu.weight(rest[j - 1]);
        tuple[j] = nu.point(rest[j - 1]);
      }
      const double v = w.value(tuple);
      if (v == kInf) {
        infinite = true;
        break;
      }
      acc.add(weight * v);
    } while (detail::next_digits(nu.size(), rest));
    out[i] = infinite ? kInf : acc.value();
  }
  return out;
}

void require_same_space(const GibbsModel& model, const DiscreteMeasure& nu) {
  if (!nu.space() || !nu.space()->compatible(*model.space()))
    throw Error(ErrorCode::space_mismatch, "measure and model live on different spaces");
}

nlohmann::json measure_json(const DiscreteMeasure& m) { return m.to_json(); }

}  // namespace

InteractionEnergy interaction_energy(const InteractionPotential& w, const DiscreteMeasure& nu) {
  const auto parts = kernels::omp::atom_energy(w, nu);
  InteractionEnergy e;
  e.positive = parts.positive;
  e.negative = parts.negative;
  e.negative_integrable = std::isfinite(parts.negative);
  e.value = parts.positive == kInf ? kInf : parts.positive - parts.negative;
  return e;
}

nlohmann::json FreeEnergyBreakdown::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (double t : interaction_terms) terms.push_back(extended_number(t));
  nlohmann::json j{{"entropy", extended_number(entropy)},
                   {"interaction_terms", terms},
                   {"total", extended_number(total)},
                   {"entropy_infinite", entropy_infinite},
                   {"negative_part_diverges", negative_part_diverges}};
  if (normalized_rate) j["normalized_rate"] = extended_number(*normalized_rate);
  return j;
}

namespace {

FreeEnergyBreakdown breakdown_dense(const GibbsModel& model, std::span<const double> weights) {
  FreeEnergyBreakdown out;
  out.entropy = relative_entropy(weights, model.alpha());
  out.entropy_infinite = out.entropy == kInf;
  const auto nu = sparse_measure(model.space(), weights);
  CompensatedSum total;
  total.add(out.entropy);
  bool positive_infinite = false;
  for (const auto& w : model.interactions()) {
    const auto e = interaction_energy(w, nu);
    out.interaction_terms.push_back(e.value);
    out.negative_part_diverges = out.negative_part_diverges || !e.negative_integrable;
    if (e.value == kInf) {
      positive_infinite = true;
    } else {
      total.add(e.value);
    }
  }
  out.total = (out.entropy_infinite || out.negative_part_diverges || positive_infinite) ? kInf : total.value();
  return out;
}

}  // namespace

FreeEnergyBreakdown free_energy(const GibbsModel& model, const DiscreteMeasure& nu, std::optional<double> inf_value) {
  require_same_space(model, nu);
  auto out = breakdown_dense(model, nu.dense_weights());
  if (inf_value) out.normalized_rate = out.total == kInf ? kInf : out.total - *inf_value;
  return out;
}

double free_energy_dense(const GibbsModel& model, std::span<const double> weights) {
  if (weights.size() != model.space()->size()) throw Error(ErrorCode::dimension_mismatch, "one weight per label / cell");
  return breakdown_dense(model, weights).total;
}

std::string critical_map_label(const GibbsModel& model) { return model.max_order() > 2 ? "extended-CE" : "CE"; }

std::vector<double> critical_map(const GibbsModel& model, std::span<const double> weights) {
  const auto& log_alpha = model.reference().log_alpha;
  std::vector<double> logt(log_alpha.begin(), log_alpha.end());
  if (model.has_interactions()) {
    const auto nu = sparse_measure(model.space(), weights);
    for (const auto& w : model.interactions()) {
      const auto pi = mean_field(w, model.space(), nu);
      const double k = static_cast<double>(w.order());
      for (std::size_t i = 0; i < logt.size(); ++i) logt[i] = pi[i] == kInf ? kNegInf : logt[i] - k * pi[i];
    }
  }
  const double log_c = log_sum_exp(logt);  // C_crit
  if (!std::isfinite(log_c)) throw Error(ErrorCode::normalization_diverged, "critical map normalizer is not finite");
  std::vector<double> out(logt.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(logt[i] - log_c);
  const double residue = 1.0 - compensated_sum(out);
  *std::max_element(out.begin(), out.end()) += residue;
  return out;
}

DiscreteMeasure critical_map(const GibbsModel& model, const DiscreteMeasure& nu) {
  require_same_space(model, nu);
  return DiscreteMeasure::on_space(model.space(), critical_map(model, nu.dense_weights()));
}

std::vector<double> directional_derivatives(const GibbsModel& model, std::span<const double> weights) {
  const auto& log_alpha = model.reference().log_alpha;
  const double entropy = relative_entropy(weights, model.alpha());
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = weights[i] > 0.0 ? std::log(weights[i]) - log_alpha[i] - entropy : kNegInf;
  const auto nu = sparse_measure(model.space(), weights);
  for (const auto& w : model.interactions()) {
    const auto pi = mean_field(w, model.space(), nu);
    const double energy = interaction_energy(w, nu).value;
    const double k = static_cast<double>(w.order());
    for (std::size_t i = 0; i < out.size(); ++i)
      if (weights[i] > 0.0) out[i] += k * (pi[i] - energy);
  }
  return out;
}

double iterate_distance(const GibbsModel& model, std::span<const double> a, std::span<const double> b) {
  const auto& space = model.space();
  if (space->is_finite() && space->size() <= kMaxExactIterateLabels) {
    std::vector<double> cost(space->size() * space->size());
    for (std::size_t i = 0; i < space->size(); ++i)
      for (std::size_t j = 0; j < space->size(); ++j) cost[i * space->size() + j] = space->rho()[i][j];
    return solve_transport(a, b, cost).cost;
  }
  if (!space->is_finite() && space->dim() == 1) {
    std::vector<double> x(space->size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = space->point(i)[0];
    return wasserstein_1d(x, a, b, 1.0);
  }
  CompensatedSum tv;
  for (std::size_t i = 0; i < a.size(); ++i) tv.add(std::abs(a[i] - b[i]));
  return 0.5 * tv.value();
}

nlohmann::json MinimizerResult::to_json(bool with_history) const {
  nlohmann::json alts = nlohmann::json::array();
  for (const auto& a : alternates) alts.push_back(measure_json(a));
  nlohmann::json j{{"minimizer", measure_json(minimizer)},
                   {"inf_value", extended_number(inf_value)},
                   {"method", method},
                   {"iterations", iterations},
                   {"converged", converged},
                   {"residual", extended_number(residual)},
                   {"alternates", alts}};
  if (!map_label.empty()) j["map_label"] = map_label;
  if (with_history) j["residual_history"] = residuals;
  return j;
}

MinimizerResult fixed_point(const GibbsModel& model, const DiscreteMeasure& start, const FixedPointOptions& options) {
  require_same_space(model, start);
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw Error(ErrorCode::invalid_argument, "damping must lie in (0, 1]");
  if (!(options.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be > 0");
  std::vector<double> w = start.dense_weights();
  std::vector<double> next(w.size());
  MinimizerResult out;
  out.method = "fixed-point";
  out.map_label = critical_map_label(model);
  out.converged = false;
  const double g = options.damping;
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const auto t = critical_map(model, w);
    for (std::size_t i = 0; i < w.size(); ++i) next[i] = (1.0 - g) * w[i] + g * t[i];
    const double step = iterate_distance(model, next, w);
    w.swap(next);
    out.iterations = it;
    if (options.keep_history) out.residuals.push_back(step);
    if (step <= options.tol) {
      out.converged = true;
      break;
    }
  }
  out.residual = iterate_distance(model, w, critical_map(model, w));
  out.inf_value = free_energy_dense(model, w);
  out.minimizer = DiscreteMeasure::on_space(model.space(), std::move(w));
  return out;
}

namespace {

std::vector<double> from_counts(std::span<const std::uint64_t> counts, double total) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(counts[i]) / total;
  return w;
}

using EventFn = std::function<bool(std::span<const double>)>;

struct ScanBest {
  double value = kInf;
  std::vector<double> weights;
  bool found = false;
};

// Coarse lattice scan of the simplex with lattice spacing 1 / total.
ScanBest coarse_scan(const GibbsModel& model, std::uint64_t total, const EventFn& in_event) {
  const std::size_t s = model.space()->size();
  const double td = static_cast<double>(total);
  const long first_max = static_cast<long>(total);
  std::vector<ScanBest> per_first(total + 1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long c0 = 0; c0 <= first_max; ++c0) {
    auto& best = per_first[static_cast<std::size_t>(c0)];
    std::vector<std::uint64_t> counts(s);
    counts[0] = static_cast<std::uint64_t>(c0);
    const std::uint64_t rest = total - counts[0];
    auto visit = [&] {
      const auto w = from_counts(counts, td);
      if (in_event && !in_event(w)) return;
      const double v = free_energy_dense(model, w);
      if (!best.found || v < best.value) {
        best.value = v;
        best.weights = w;
        best.found = true;
      }
    };
    if (s == 1) {
      if (rest == 0) visit();
      continue;
    }
    CompositionIterator it(rest, s - 1);
    do {
      std::copy(it.counts().begin(), it.counts().end(), counts.begin() + 1);
      visit();
    } while (it.next());
  }
  ScanBest best;
  for (auto& b : per_first)
    if (b.found && (!best.found || b.value < best.value)) best = std::move(b);
  return best;
}

// Local lattice of spacing h around `center`, offsets in [-10, 10] on the
// first s-1 coordinates.
void refine(const GibbsModel& model, ScanBest& best, double h, const EventFn& in_event) {
  const std::size_t s = best.weights.size();
  if (s < 2) return;
  const std::vector<double> center = best.weights;
  std::vector<int> offset(s - 1, -10);
  std::vector<double> w(s);
  while (true) {
    double sum = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < s; ++i) {
      w[i] = center[i] + h * offset[i];
      if (w[i] < 0.0) {
        if (w[i] > -1e-15) {
          w[i] = 0.0;
        } else {
          ok = false;
        }
      }
      sum += w[i];
    }
    w[s - 1] = 1.0 - sum;
    if (w[s - 1] < 0.0) {
      if (w[s - 1] > -1e-15) {
        w[s - 1] = 0.0;
      } else {
        ok = false;
      }
    }
    if (ok && (!in_event || in_event(w))) {
      const double v = free_energy_dense(model, w);
      if (v < best.value) {
        best.value = v;
        best.weights = w;
      }
    }
    std::size_t d = 0;
    while (d < offset.size() && ++offset[d] > 10) offset[d++] = -10;
    if (d == offset.size()) break;
  }
}

MinimizerResult grid_scan(const GibbsModel& model, const SearchSpec& spec, const EventFn& in_event, bool* found) {
  const auto& space = model.space();
  if (!space->is_finite() || space->size() > kMaxScanLabels)
    throw Error(ErrorCode::search_space_unsupported, "grid scans need a finite space with at most 4 labels");
  if (!(spec.mesh > 0.0 && spec.mesh <= 1.0)) throw Error(ErrorCode::invalid_argument, "mesh must lie in (0, 1]");
  const auto total = static_cast<std::uint64_t>(std::llround(1.0 / spec.mesh));
  ScanBest best = coarse_scan(model, total, in_event);
  MinimizerResult out;
  out.method = "grid-scan";
  if (found) *found = best.found;
  if (!best.found) return out;
  double h = 1.0 / static_cast<double>(total);
  for (int r = 0; r < spec.refinements; ++r) {
    h /= 10.0;
    refine(model, best, h, in_event);
  }
  out.inf_value = best.value;
  out.residual = h;
  out.minimizer = DiscreteMeasure::on_space(space, std::move(best.weights));
  return out;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol, double* arg) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  *arg = fc <= fd ? c : d;
  return std::min(fc, fd);
}

MinimizerResult parametric_1d(const GibbsModel& model, const SearchSpec& spec) {
  const auto& space = model.space();
  if (!space->is_finite() || space->size() != 2)
    throw Error(ErrorCode::search_space_unsupported, "the 1-d scan needs a two-label space");
  const auto f = [&](double q) {
    const std::vector<double> w{1.0 - q, q};
    return free_energy_dense(model, w);
  };
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / spec.mesh));
  std::vector<double> values(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) values[i] = f(static_cast<double>(i) / static_cast<double>(steps));
  // refine every discrete local minimum, keep the ones attaining the infimum
  std::vector<std::pair<double, double>> minima;  // (value, q)
  for (std::size_t i = 0; i <= steps; ++i) {
    const bool left = i == 0 || values[i] <= values[i - 1];
    const bool right = i == steps || values[i] <= values[i + 1];
    if (!left || !right || values[i] == kInf) continue;
    const double q = static_cast<double>(i) / static_cast<double>(steps);
    const double lo = std::max(0.0, q - spec.mesh), hi = std::min(1.0, q + spec.mesh);
    double arg = q;
    double v = golden_section(f, lo, hi, 1e-12, &arg);
    if (values[i] < v) {
      v = values[i];
      arg = q;
    }
    minima.emplace_back(v, arg);
  }
  MinimizerResult out;
  out.method = "parametric-1d";
  out.residual = 1e-12;
  if (minima.empty()) throw Error(ErrorCode::invalid_argument, "free energy is +inf on the whole scan");
  std::size_t best = 0;
  for (std::size_t i = 1; i < minima.size(); ++i)
    if (minima[i].first < minima[best].first) best = i;
  out.inf_value = minima[best].first;
  out.minimizer = DiscreteMeasure::on_space(space, {1.0 - minima[best].second, minima[best].second});
  for (std::size_t i = 0; i < minima.size(); ++i) {
    if (i == best || minima[i].first - out.inf_value > 1e-9) continue;
    if (std::abs(minima[i].second - minima[best].second) < 1e-6) continue;
    out.alternates.push_back(DiscreteMeasure::on_space(space, {1.0 - minima[i].second, minima[i].second}));
  }
  return out;
}

std::vector<DiscreteMeasure> default_starts(const GibbsModel& model, const SearchSpec& spec) {
  const auto& space = model.space();
  const auto& alpha = model.alpha();
  std::vector<DiscreteMeasure> starts{model.reference().alpha};
  std::vector<std::size_t> points;
  if (space->is_finite()) {
    for (std::size_t i = 0; i < space->size(); ++i) points.push_back(i);
  } else {
    const std::size_t count = std::max<std::size_t>(1, spec.start_points);
    for (std::size_t j = 0; j < count; ++j)
      points.push_back((2 * j + 1) * space->size() / (2 * count));
  }
  for (auto p : points) {
    std::vector<double> w(alpha.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 * alpha[i];
    w[p] += 0.5;
    starts.push_back(DiscreteMeasure::on_space(space, std::move(w)));
  }
  return starts;
}

MinimizerResult multistart(const GibbsModel& model, const SearchSpec& spec) {
  const auto starts = spec.starts.empty() ? default_starts(model, spec) : spec.starts;
  std::vector<MinimizerResult> results(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
  const long ns = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long i = 0; i < ns; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = fixed_point(model, starts[static_cast<std::size_t>(i)], spec.fixed_point);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].inf_value < results[best].inf_value) best = i;
  MinimizerResult out = results[best];
  std::vector<std::vector<double>> seen{out.minimizer.dense_weights()};
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i == best || !results[i].converged || results[i].inf_value - out.inf_value > 1e-9) continue;
    const auto w = results[i].minimizer.dense_weights();
    bool fresh = true;
    for (const auto& s : seen) fresh = fresh && iterate_distance(model, s, w) > 1e-6;
    if (!fresh) continue;
    seen.push_back(w);
    out.alternates.push_back(results[i].minimizer);
  }
  return out;
}

}  // namespace

MinimizerResult minimize(const GibbsModel& model, const SearchSpec& spec) {
  SearchMethod method = spec.method;
  const auto& space = model.space();
  if (method == SearchMethod::automatic) {
    if (space->is_finite() && space->size() == 2) {
      method = SearchMethod::parametric_1d;
    } else if (space->is_finite() && space->size() <= kMaxScanLabels) {
      method = SearchMethod::grid_scan;
    } else {
      method = SearchMethod::fixed_point;
    }
  }
  switch (method) {
    case SearchMethod::grid_scan: return grid_scan(model, spec, {}, nullptr);
    case SearchMethod::parametric_1d: return parametric_1d(model, spec);
    case SearchMethod::fixed_point: return multistart(model, spec);
    case SearchMethod::automatic: break;
  }
  throw Error(ErrorCode::search_space_unsupported, "no search method applies");
}

std::optional<MinimizerResult> minimize_on_event(const GibbsModel& model, const EventFn& in_event,
                                                  const SearchSpec& spec) {
  bool found = false;
  auto result = grid_scan(model, spec, in_event, &found);
  if (!found) return std::nullopt;
  return result;
}

double stationary_residual(const GibbsModel& model, std::span<const double> weights) {
  const auto& space = *model.space();
  if (space.is_finite() || space.dim() != 1)
    throw Error(ErrorCode::dimension_mismatch, "the stationary residual is implemented on 1-d grids");
  if (weights.size() != space.size()) throw Error(ErrorCode::dimension_mismatch, "one weight per grid cell");
  if (!model.confinement().differentiable())
    throw Error(ErrorCode::requires_smooth_family, "confinement has no gradient");
  const std::size_t s = space.size();
  const double h = space.cell_width();
  std::vector<double> rho(s), drift(s, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    rho[i] = weights[i] / h;
    double g = 0.0;
    model.confinement().gradient(space, space.point(i), std::span<double>(&g, 1));
    drift[i] = g;
  }
  const auto nu = sparse_measure(model.space(), weights);
  for (const auto& w : model.interactions()) {
    if (w.order() != 2 || w.singular() || (!w.differentiable() && !w.product_coupling()))
      throw Error(ErrorCode::requires_smooth_family, "stationary residual needs smooth pair interactions");
    for (std::size_t i = 0; i < s; ++i) {
      // (grad_1 W * nu)(x_i)
      CompensatedSum acc;
      double g = 0.0;
      for (std::size_t a = 0; a < nu.size(); ++a) {
        const std::array<Point, 2> t{space.point(i), nu.point(a)};
        w.grad_first(t, std::span<double>(&g, 1));
        acc.add(nu.weight(a) * g);
      }
      drift[i] += 2.0 * acc.value();
    }
  }
  CompensatedSum norm;
  for (std::size_t i = 1; i + 1 < s; ++i) {
    const double lap = (rho[i + 1] - 2.0 * rho[i] + rho[i - 1]) / (h * h);
    const double div = (rho[i + 1] * drift[i + 1] - rho[i - 1] * drift[i - 1]) / (2.0 * h);
    const double r = lap + div;
    norm.add(r * r);
  }
  return std::sqrt(h * norm.value());
}

double rate_identification(const GibbsModel& model, const DiscreteMeasure& nu, std::size_t n) {
  const auto fe = free_energy(model, nu);
  if (fe.total == kInf) return kInf;
  return fe.total + log_partition_exact(model, n).value;
}

}  // namespace mfldp
