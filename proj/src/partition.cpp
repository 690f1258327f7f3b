#include "mfldp/partition.hpp"

#include <cmath>
#include <exception>

#include "mfldp/error.hpp"
#include "mfldp/integrability.hpp"
#include "mfldp/kernels.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/parallel.hpp"
#include "mfldp/sampler.hpp"
#include "mfldp/ustats.hpp"

namespace mfldp {

namespace {

constexpr std::size_t kMagnetizationLimit = 100000;

bool has_magnetization_form(const GibbsModel& model) {
  const auto& ws = model.interactions();
  return model.space()->is_finite() && model.space()->size() == 2 && ws.size() == 1 && ws[0].order() == 2 &&
         ws[0].product_coupling().has_value();
}

double magnetization_classes(const GibbsModel& model, std::size_t n) {
  const auto& space = *model.space();
  const double c = *model.interactions()[0].product_coupling();
  const double v0 = space.values()[0], v1 = space.values()[1];
  const double la0 = model.reference().log_alpha[0], la1 = model.reference().log_alpha[1];
  const double nd = static_cast<double>(n);
  LogSumExp acc;
  for (std::size_t k = 0; k <= n; ++k) {
    const double kd = static_cast<double>(k), rd = nd - kd;
    const double lw = (k > 0 ? kd * la1 : 0.0) + (k < n ? rd * la0 : 0.0);
    if (lw == kNegInf) continue;
    // n U_n = c (M^2 - Q) / (n - 1) with M = sum x_i, Q = sum x_i^2
    const double m = kd * v1 + rd * v0;
    const double q = kd * v1 * v1 + rd * v0 * v0;
    acc.add(log_binomial(n, k) + lw - c * (m * m - q) / (nd - 1.0));
  }
  return acc.value() / nd;
}

double type_classes(const GibbsModel& model, std::size_t n) {
  CompositionIterator it(n, model.space()->size());
  LogSumExp acc;
  do {
    acc.add(log_type_class_weight(model, it.counts()));
  } while (it.next());
  return acc.value() / static_cast<double>(n);
}

double enumeration(const GibbsModel& model, std::size_t n) {
  const auto& log_alpha = model.reference().log_alpha;
  const double nd = static_cast<double>(n);
  const LogTerm term = [&](std::span<const std::size_t> labels) {
    double lw = 0.0;
    for (auto l : labels) lw += log_alpha[l];
    if (lw == kNegInf) return kNegInf;
    const Configuration x = Configuration::from_indices(labels);
    CompensatedSum energy;
    for (const auto& w : model.interactions()) {
      const double u = kernels::serial::tuple_total(w, x).value() /
                       ordered_tuple_count(n, static_cast<std::uint64_t>(w.order()));
      if (u == kInf) return kNegInf;
      energy.add(nd * u);
    }
    return lw - energy.value();
  };
  return kernels::omp::enumerate_log_sum(model.space()->size(), n, term) / nd;
}

}  // namespace

double log_type_class_weight(const GibbsModel& model, std::span<const std::uint64_t> counts) {
  const auto& log_alpha = model.reference().log_alpha;
  std::uint64_t n = 0;
  double lw = log_multinomial(counts);
  for (std::size_t l = 0; l < counts.size(); ++l) {
    n += counts[l];
    if (counts[l] == 0) continue;
    if (log_alpha[l] == kNegInf) return kNegInf;
    lw += static_cast<double>(counts[l]) * log_alpha[l];
  }
  CompensatedSum energy;
  for (const auto& w : model.interactions()) {
    const auto total = tuple_total_from_counts(w, counts);
    if (total.infinite > 0) return kNegInf;
    energy.add(static_cast<double>(n) * total.finite / ordered_tuple_count(n, static_cast<std::uint64_t>(w.order())));
  }
  return lw - energy.value();
}

PartitionValue log_partition_exact(const GibbsModel& model, std::size_t n, PartitionMethod method) {
  if (!model.space()->is_finite()) throw Error(ErrorCode::invalid_argument, "exact partition functions need a finite space");
  if (n < static_cast<std::size_t>(model.max_order())) throw Error(ErrorCode::too_few_particles, "need n >= N");
  if (n == 0) throw Error(ErrorCode::empty_configuration, "n must be positive");
  const std::size_t s = model.space()->size();
  const bool magnetization_ok = has_magnetization_form(model) && n <= kMagnetizationLimit;
  const bool types_ok = composition_count(n, s) <= kEnumerationLimit;
  const bool enumeration_ok = std::pow(static_cast<double>(s), static_cast<double>(n)) <= kEnumerationLimit;

  if (method == PartitionMethod::automatic) {
    if (!model.has_interactions()) return {0.0, "no-interaction"};
    if (magnetization_ok) {
      method = PartitionMethod::magnetization_classes;
    } else if (types_ok) {
      method = PartitionMethod::type_classes;
    } else if (enumeration_ok) {
      method = PartitionMethod::enumeration;
    } else {
      throw Error(ErrorCode::too_large_to_enumerate, "no exact method applies at this n; use the estimator");
    }
  }
  switch (method) {
    case PartitionMethod::magnetization_classes:
      if (!magnetization_ok)
        throw Error(ErrorCode::too_large_to_enumerate, "magnetization classes need a two-label product model, n <= 1e5");
      return {magnetization_classes(model, n), "magnetization-classes"};
    case PartitionMethod::type_classes:
      if (!types_ok) throw Error(ErrorCode::too_large_to_enumerate, "too many type classes");
      return {type_classes(model, n), "type-classes"};
    case PartitionMethod::enumeration:
      if (!enumeration_ok) throw Error(ErrorCode::too_large_to_enumerate, "|S|^n exceeds the enumeration limit");
      return {enumeration(model, n), "enumeration"};
    case PartitionMethod::automatic: break;
  }
  return {0.0, "no-interaction"};
}

namespace {

// E[sum_k W^(k)(X_1, ..., X_k)] with X_i i.i.d. alpha: exact on finite
// spaces, Monte Carlo over continuous cell positions otherwise.
ThermodynamicPoint independent_node(const GibbsModel& model, const ThermodynamicOptions& options) {
  ThermodynamicPoint pt;
  pt.acceptance = 1.0;
  if (model.space()->is_finite()) {
    CompensatedSum s;
    for (const auto& w : model.interactions()) {
      const auto parts = kernels::omp::atom_energy(w, model.reference().alpha);
      s.add(parts.positive - parts.negative);
    }
    pt.mean = s.value();
    return pt;
  }
  double var = 0.0;
  CompensatedSum s;
  for (std::size_t r = 0; r < model.interactions().size(); ++r) {
    const auto& w = model.interactions()[r];
    const TupleFunction f = [&w](std::span<const Point> t) { return w.value(t); };
    const std::size_t count = options.sweeps * options.batches;
    const auto values = sample_tuple_values(f, w.order(), model.space(), model.alpha(), count,
                                            derive_seed(options.seed, 1000003 + r));
    CompensatedSum m1, m2;
    for (double v : values) m1.add(v);
    const double mean = m1.value() / static_cast<double>(count);
    for (double v : values) m2.add((v - mean) * (v - mean));
    s.add(mean);
    var += m2.value() / static_cast<double>(count - 1) / static_cast<double>(count);
  }
  pt.mean = s.value();
  pt.std_error = std::sqrt(var);
  return pt;
}

ThermodynamicPoint chain_node(const GibbsModel& model, std::size_t n, double t, std::size_t node,
                              const ThermodynamicOptions& options) {
  const GibbsModel scaled = model.scaled(t);
  McmcOptions mo;
  mo.n = n;
  mo.sigma = options.sigma;
  mo.seed = options.seed;
  mo.stream = node;
  McmcChain chain(scaled, mo);
  run_burn_in(chain, options.burn_in_sweeps * n, !model.space()->is_finite());
  const std::size_t per_batch = std::max<std::size_t>(1, options.sweeps / options.batches);
  const std::size_t proposals_before = chain.stats().proposals, accepted_before = chain.stats().accepted;
  std::vector<double> batch_means(options.batches);
  for (std::size_t b = 0; b < options.batches; ++b) {
    CompensatedSum acc;
    for (std::size_t s = 0; s < per_batch; ++s) {
      chain.sweep();
      acc.add(chain.cache().u_sum() / t);
    }
    batch_means[b] = acc.value() / static_cast<double>(per_batch);
  }
  ThermodynamicPoint pt;
  pt.t = t;
  CompensatedSum m;
  for (double v : batch_means) m.add(v);
  pt.mean = m.value() / static_cast<double>(options.batches);
  CompensatedSum v2;
  for (double v : batch_means) v2.add((v - pt.mean) * (v - pt.mean));
  const double nb = static_cast<double>(options.batches);
  pt.std_error = std::sqrt(v2.value() / (nb - 1.0) / nb);
  pt.acceptance = static_cast<double>(chain.stats().accepted - accepted_before) /
                  static_cast<double>(chain.stats().proposals - proposals_before);
  return pt;
}

double trapezoid(const std::vector<ThermodynamicPoint>& pts, const std::vector<std::size_t>& nodes) {
  CompensatedSum s;
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    const auto& a = pts[nodes[j - 1]];
    const auto& b = pts[nodes[j]];
    s.add(0.5 * (b.t - a.t) * (a.mean + b.mean));
  }
  return s.value();
}

}  // namespace

PartitionEstimate log_partition_estimate(const GibbsModel& model, std::size_t n, const ThermodynamicOptions& options) {
  if (options.points < 10) throw Error(ErrorCode::invalid_argument, "thermodynamic integration needs >= 10 nodes");
  if (options.batches < 2 || options.sweeps < options.batches)
    throw Error(ErrorCode::invalid_argument, "need at least two batches and one sweep per batch");
  if (n < static_cast<std::size_t>(model.max_order())) throw Error(ErrorCode::too_few_particles, "need n >= N");
  PartitionEstimate out;
  out.schedule.resize(options.points);
  if (!model.has_interactions()) {
    for (std::size_t i = 0; i < options.points; ++i)
      out.schedule[i].t = static_cast<double>(i) / static_cast<double>(options.points - 1);
    return out;
  }
  const long np = static_cast<long>(options.points);
  std::vector<std::exception_ptr> failures(options.points);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long i = 0; i < np; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double t = static_cast<double>(ui) / static_cast<double>(options.points - 1);
    try {
      out.schedule[ui] = ui == 0 ? independent_node(model, options) : chain_node(model, n, t, ui, options);
      out.schedule[ui].t = t;
    } catch (...) {
      failures[ui] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<std::size_t> all(options.points), coarse;
  for (std::size_t i = 0; i < options.points; ++i) {
    all[i] = i;
    if (i % 2 == 0 || i + 1 == options.points) coarse.push_back(i);
  }
  const double fine = trapezoid(out.schedule, all);
  out.value = -fine;
  out.quadrature_resolution = std::abs(fine - trapezoid(out.schedule, coarse));
  const double h = 1.0 / static_cast<double>(options.points - 1);
  CompensatedSum var;
  for (std::size_t i = 0; i < options.points; ++i) {
    const double w = (i == 0 || i + 1 == options.points) ? 0.5 * h : h;
    var.add(w * w * out.schedule[i].std_error * out.schedule[i].std_error);
  }
  out.std_error = std::sqrt(var.value());
  return out;
}

}  // namespace mfldp
