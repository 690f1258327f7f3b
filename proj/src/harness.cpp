#include "mfldp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "mfldp/error.hpp"
#include "mfldp/json_util.hpp"
#include "mfldp/numeric.hpp"
#include "mfldp/parallel.hpp"
#include "mfldp/partition.hpp"
#include "mfldp/rng.hpp"
#include "mfldp/ustats.hpp"
#include "mfldp/wasserstein.hpp"
#include "tuple_iteration.hpp"

namespace mfldp {

namespace {

constexpr double kEventTolerance = 1e-12;
constexpr double kWilsonZ = 1.959963984540054;

double magnetization(const SpacePtr& space, std::span<const double> w) {
  CompensatedSum m;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) m.add(w[i] * (space->is_finite() ? space->value(space->point(i)) : space->point(i)[0]));
  return m.value();
}

double mass_of(std::span<const std::size_t> labels, std::span<const double> w) {
  CompensatedSum m;
  for (auto l : labels) m.add(w[l]);
  return m.value();
}

std::string label_list(const SpacePtr& space, std::span<const std::size_t> labels) {
  std::string out = "{";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ",";
    out += space->is_finite() ? space->labels()[labels[i]] : std::to_string(labels[i]);
  }
  return out + "}";
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void check_labels(const SpacePtr& space, std::span<const std::size_t> labels) {
  for (auto l : labels)
    if (l >= space->size()) throw Error(ErrorCode::index_out_of_range, "event label outside the space");
}

std::vector<double> type_weights(std::span<const std::uint64_t> counts, std::size_t n) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return w;
}

void require_enumerable_types(std::size_t n, std::size_t labels) {
  if (composition_count(n, labels) > kEnumerationLimit)
    throw Error(ErrorCode::too_large_to_enumerate, "too many type classes");
}

std::vector<double> empirical_weights(const SpacePtr& space, const Configuration& x) {
  std::vector<double> w(space->size(), 0.0);
  const double inc = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w[space->index_of(x[i])] += inc;
  return w;
}

template <typename F>
void parallel_rows(std::size_t count, F&& body) {
  std::vector<std::exception_ptr> errors(count);
  const long nc = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long i = 0; i < nc; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return kNaN;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Event Event::always() { return {"always", [](std::span<const double>) { return true; }, true}; }

Event Event::mass_at_most(const SpacePtr& space, std::vector<std::size_t> labels, double threshold) {
  check_labels(space, labels);
  std::string d = "nu(" + label_list(space, labels) + ") <= " + fmt(threshold);
  return {d, [labels, threshold](std::span<const double> w) { return mass_of(labels, w) <= threshold + kEventTolerance; },
          true};
}

Event Event::mass_at_least(const SpacePtr& space, std::vector<std::size_t> labels, double threshold) {
  check_labels(space, labels);
  std::string d = "nu(" + label_list(space, labels) + ") >= " + fmt(threshold);
  return {d, [labels, threshold](std::span<const double> w) { return mass_of(labels, w) >= threshold - kEventTolerance; },
          true};
}

Event Event::magnetization_abs_at_least(const SpacePtr& space, double threshold) {
  return {"|m(nu)| >= " + fmt(threshold),
          [space, threshold](std::span<const double> w) {
            return std::abs(magnetization(space, w)) >= threshold - kEventTolerance;
          },
          true};
}

Event Event::magnetization_abs_at_most(const SpacePtr& space, double threshold) {
  return {"|m(nu)| <= " + fmt(threshold),
          [space, threshold](std::span<const double> w) {
            return std::abs(magnetization(space, w)) <= threshold + kEventTolerance;
          },
          true};
}

Event Event::from_json(const SpacePtr& space, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw Error(ErrorCode::config_error, "event.type: missing or not a string");
  const auto type = j["type"].get<std::string>();
  if (type == "always") return always();
  auto threshold = [&] {
    if (!j.contains("threshold") || !j["threshold"].is_number())
      throw Error(ErrorCode::config_error, "event.threshold: missing or not a number");
    return j["threshold"].get<double>();
  };
  auto labels = [&] {
    if (!j.contains("labels") || !j["labels"].is_array())
      throw Error(ErrorCode::config_error, "event.labels: missing or not an array");
    std::vector<std::size_t> out;
    for (const auto& l : j["labels"]) {
      try {
        out.push_back(l.is_string() ? space->label_index(l.get<std::string>()) : l.get<std::size_t>());
      } catch (const std::exception& e) {
        throw Error(ErrorCode::config_error, std::string("event.labels: ") + e.what());
      }
    }
    return out;
  };
  if (type == "mass_at_most") return mass_at_most(space, labels(), threshold());
  if (type == "mass_at_least") return mass_at_least(space, labels(), threshold());
  if (type == "magnetization_abs_at_least") return magnetization_abs_at_least(space, threshold());
  if (type == "magnetization_abs_at_most") return magnetization_abs_at_most(space, threshold());
  throw Error(ErrorCode::config_error, "event.type: unknown event type '" + type + "'");
}

double types_envelope(std::size_t labels, std::size_t n) {
  return static_cast<double>(labels) * std::log(static_cast<double>(n) + 1.0) / static_cast<double>(n);
}

bool RateReport::gaps_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(std::abs(rows[i].gap) < std::abs(rows[i - 1].gap))) return false;
  return true;
}

nlohmann::json RateReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"n", r.n},
                         {"value", extended_number(r.value)},
                         {"lower", extended_number(r.lower)},
                         {"upper", extended_number(r.upper)},
                         {"target", extended_number(r.target)},
                         {"gap", extended_number(r.gap)},
                         {"envelope", extended_number(r.envelope)},
                         {"hits", r.hits},
                         {"replicas", r.replicas},
                         {"censored", r.censored}});
  }
  return {{"method", method},
          {"event", event},
          {"target_available", target_available},
          {"target", extended_number(target)},
          {"gaps_decreasing", gaps_decreasing()},
          {"rows", rows_json},
          {"notes", notes}};
}

RateReport sanov_exact_check(const SpacePtr& space, std::span<const double> alpha, std::span<const std::size_t> n_list,
                             const Event& event, const SearchSpec& search) {
  if (!space->is_finite() || space->size() > 5)
    throw Error(ErrorCode::invalid_argument, "exact Sanov checks need a finite space with at most 5 labels");
  const std::size_t s = space->size();
  for (auto n : n_list) {
    if (n == 0 || n > 2000) throw Error(ErrorCode::invalid_argument, "exact Sanov checks need 1 <= n <= 2000");
    require_enumerable_types(n, s);
  }
  const auto free_model = GibbsModel::from_alpha(space, alpha, {});
  RateReport report;
  report.method = "exact-types";
  report.event = event.description;
  const auto best = minimize_on_event(free_model, event.contains, search);
  if (!best) throw Error(ErrorCode::event_empty, "no measure on the search lattice satisfies the event");
  report.target = -best->inf_value;
  report.rows.resize(n_list.size());
  std::vector<double> log_alpha(s);
  for (std::size_t i = 0; i < s; ++i) log_alpha[i] = std::log(alpha[i]);
  parallel_rows(n_list.size(), [&](std::size_t r) {
    const std::size_t n = n_list[r];
    LogSumExp acc;
    CompositionIterator it(n, s);
    do {
      const auto& c = it.counts();
      if (!event.contains(type_weights(c, n))) continue;
      double term = log_multinomial(c);
      for (std::size_t i = 0; i < s; ++i)
        if (c[i] > 0) term += static_cast<double>(c[i]) * log_alpha[i];
      acc.add(term);
    } while (it.next());
    auto& row = report.rows[r];
    row.n = n;
    row.value = acc.empty() ? kNegInf : acc.value() / static_cast<double>(n);
    row.lower = row.upper = row.value;
    row.censored = acc.empty();
    row.target = report.target;
    row.gap = row.value - row.target;
    row.envelope = types_envelope(s, n);
  });
  return report;
}

std::vector<Configuration> sample_replicas(const GibbsModel& model, std::size_t n, std::size_t replicas,
                                           std::size_t burn_in_sweeps, double sigma, std::uint64_t seed) {
  std::vector<Configuration> out(replicas);
  if (!model.has_interactions()) {
    const ReferenceSampler sampler(model.space(), model.alpha());
    parallel_rows(replicas, [&](std::size_t r) {
      auto rng = make_rng(seed, r);
      out[r] = sampler.draw_configuration(rng, n);
    });
    return out;
  }
  parallel_rows(replicas, [&](std::size_t r) {
    McmcOptions options;
    options.n = n;
    options.sigma = sigma;
    options.seed = seed;
    options.stream = r;
    McmcChain chain(model, options);
    run_burn_in(chain, burn_in_sweeps * n, true);
    out[r] = chain.state();
  });
  return out;
}

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / nt;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2.0 * nt)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

RateReport estimate_rate(const GibbsModel& model, const Event& event, std::span<const std::size_t> n_list,
                         const RateOptions& options) {
  if (options.replicas == 0) throw Error(ErrorCode::invalid_argument, "replicas must be positive");
  RateReport report;
  report.method = "monte-carlo";
  report.event = event.description;
  const auto& space = model.space();
  report.target_available = event.certifiable && space->is_finite() && space->size() <= 4;
  if (report.target_available) {
    const auto restricted = minimize_on_event(model, event.contains, options.search);
    if (!restricted) throw Error(ErrorCode::event_empty, "no measure on the search lattice satisfies the event");
    const auto global = minimize(model, options.search);
    report.target = -(restricted->inf_value - global.inf_value);
  } else {
    report.target = kNaN;
    report.notes.push_back("target unavailable");
  }
  for (std::size_t r = 0; r < n_list.size(); ++r) {
    const std::size_t n = n_list[r];
    const auto configs = sample_replicas(model, n, options.replicas, options.burn_in_sweeps, options.sigma,
                                         derive_seed(options.seed, r));
    std::size_t hits = 0;
    for (const auto& x : configs) hits += event.contains(empirical_weights(space, x)) ? 1 : 0;
    RateRow row;
    row.n = n;
    row.hits = hits;
    row.replicas = options.replicas;
    const double nd = static_cast<double>(n);
    const auto [lo, hi] = wilson_interval(hits, options.replicas);
    row.censored = hits == 0;
    row.value = hits ? std::log(static_cast<double>(hits) / static_cast<double>(options.replicas)) / nd : kNegInf;
    row.lower = lo > 0.0 ? std::log(lo) / nd : kNegInf;
    row.upper = std::log(hi) / nd;
    row.target = report.target;
    row.gap = row.value - row.target;
    row.envelope = kNaN;
    if (row.censored) report.notes.push_back("event never hit at n = " + std::to_string(n));
    report.rows.push_back(row);
  }
  return report;
}

RateReport partition_limit(const GibbsModel& model, std::span<const std::size_t> n_list, const SearchSpec& search) {
  RateReport report;
  report.method = "exact-partition";
  report.event = "whole space";
  report.target = -minimize(model, search).inf_value;
  report.rows.resize(n_list.size());
  parallel_rows(n_list.size(), [&](std::size_t r) {
    const auto z = log_partition_exact(model, n_list[r]);
    auto& row = report.rows[r];
    row.n = n_list[r];
    row.value = row.lower = row.upper = z.value;
    row.target = report.target;
    row.gap = row.value - row.target;
    row.envelope = types_envelope(model.space()->size(), row.n);
  });
  return report;
}

// ---------------------------------------------------------------------------
// Inequality suites

namespace {

constexpr std::size_t kDecouplingK = 2;

struct SymmetricInstance {
  std::size_t s = 2;
  std::size_t n = 2;
  std::vector<double> alpha;
  std::vector<double> table;  // s x s, symmetric
};

double quarter(Rng& rng, int lo, int hi) {
  return static_cast<double>(std::uniform_int_distribution<int>(lo, hi)(rng)) / 4.0;
}

std::vector<double> random_law(Rng& rng, std::size_t s) {
  std::vector<double> w(s);
  double total = 0.0;
  for (auto& x : w) total += x = static_cast<double>(std::uniform_int_distribution<int>(1, 4)(rng));
  for (auto& x : w) x /= total;
  return w;
}

SymmetricInstance random_symmetric(Rng& rng, const InequalityOptions& o, bool zero) {
  SymmetricInstance inst;
  inst.s = std::uniform_int_distribution<std::size_t>(2, std::max<std::size_t>(2, o.max_alphabet))(rng);
  inst.n = std::uniform_int_distribution<std::size_t>(kDecouplingK, std::max(kDecouplingK, o.max_n))(rng);
  inst.alpha = random_law(rng, inst.s);
  inst.table.assign(inst.s * inst.s, 0.0);
  for (std::size_t a = 0; a < inst.s; ++a)
    for (std::size_t b = a; b < inst.s; ++b) {
      const double v = zero ? 0.0 : quarter(rng, -8, 8);
      inst.table[a * inst.s + b] = inst.table[b * inst.s + a] = v;
    }
  return inst;
}

nlohmann::json dump(const SymmetricInstance& inst) {
  return {{"alphabet", inst.s}, {"n", inst.n}, {"alpha", inst.alpha}, {"table", inst.table}};
}

nlohmann::json dump(const DecoupledInstance& inst) {
  return {{"alphabet", inst.alphabet}, {"n", inst.n}, {"k", inst.k}, {"laws", inst.laws}, {"phi", inst.phi}};
}

// Law of S = sum over ordered distinct pairs of Phi(X_i, X_j), X_i i.i.d.
// alpha, and of the decoupled sum with X^1, X^2 independent copies. Both are
// returned as (log probability, |sum|) atoms.
struct SumLaw {
  std::vector<double> log_p;
  std::vector<double> abs_sum;
};

SumLaw coupled_law(const SymmetricInstance& inst) {
  SumLaw law;
  std::vector<std::size_t> x(inst.n, 0);
  do {
    double lp = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i) {
      lp += std::log(inst.alpha[x[i]]);
      for (std::size_t j = 0; j < inst.n; ++j)
        if (i != j) sum += inst.table[x[i] * inst.s + x[j]];
    }
    law.log_p.push_back(lp);
    law.abs_sum.push_back(std::abs(sum));
  } while (detail::next_digits(inst.s, x));
  return law;
}

SumLaw decoupled_law(const SymmetricInstance& inst) {
  SumLaw law;
  std::vector<std::size_t> x(2 * inst.n, 0);  // replica 1 then replica 2
  do {
    double lp = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i) {
      lp += std::log(inst.alpha[x[i]]) + std::log(inst.alpha[x[inst.n + i]]);
      for (std::size_t j = 0; j < inst.n; ++j)
        if (i != j) sum += inst.table[x[i] * inst.s + x[inst.n + j]];
    }
    law.log_p.push_back(lp);
    law.abs_sum.push_back(std::abs(sum));
  } while (detail::next_digits(inst.s, x));
  return law;
}

double log_mean_exp(const SumLaw& law, double scale) {
  LogSumExp acc;
  for (std::size_t i = 0; i < law.log_p.size(); ++i) acc.add(law.log_p[i] + scale * law.abs_sum[i]);
  return acc.value();
}

double mean_square(const SumLaw& law, double scale) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < law.log_p.size(); ++i) {
    const double v = scale * law.abs_sum[i];
    acc.add(std::exp(law.log_p[i]) * v * v);
  }
  return acc.value();
}

bool within(double lhs, double rhs) { return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs)); }

void summarize(InequalitySuite& suite, std::vector<double> slacks) {
  suite.checks = slacks.size();
  if (slacks.empty()) return;
  std::sort(slacks.begin(), slacks.end());
  suite.min_slack = slacks.front();
  suite.median_slack = quantile(slacks, 0.5);
}

DecoupledInstance random_decoupled(Rng& rng, const InequalityOptions& o, bool zero) {
  DecoupledInstance inst;
  inst.k = kDecouplingK;
  inst.alphabet = std::uniform_int_distribution<std::size_t>(2, std::max<std::size_t>(2, o.max_alphabet))(rng);
  inst.n = std::uniform_int_distribution<std::size_t>(inst.k, std::max(inst.k, o.max_n))(rng);
  for (std::size_t j = 0; j < inst.k * inst.n; ++j) inst.laws.push_back(random_law(rng, inst.alphabet));
  const std::size_t tuples = ordered_tuples(inst.n, inst.k).size();
  const std::size_t cells = inst.alphabet * inst.alphabet;
  for (std::size_t t = 0; t < tuples; ++t) {
    std::vector<double> table(cells);
    for (auto& v : table) v = zero ? 0.0 : quarter(rng, -8, 8);
    inst.phi.push_back(std::move(table));
  }
  return inst;
}

SpacePtr alphabet_space(std::size_t s) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rho(s, std::vector<double>(s, 1.0));
  for (std::size_t i = 0; i < s; ++i) {
    labels.push_back("s" + std::to_string(i));
    rho[i][i] = 0.0;
  }
  std::vector<double> values(s);
  for (std::size_t i = 0; i < s; ++i) values[i] = static_cast<double>(i);
  return StateSpace::finite(labels, rho, values);
}

}  // namespace

bool InequalityReport::all_hold() const {
  for (const auto& s : suites)
    if (s.violations) return false;
  return true;
}

nlohmann::json InequalityReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : suites) {
    out.push_back({{"suite", s.name},
                   {"instances", s.instances},
                   {"checks", s.checks},
                   {"violations", s.violations},
                   {"min_slack", extended_number(s.min_slack)},
                   {"median_slack", extended_number(s.median_slack)},
                   {"violating_instances", s.dumps}});
  }
  return {{"suites", out}, {"all_hold", all_hold()}};
}

InequalityReport verify_inequalities(const InequalityOptions& options) {
  if (options.max_alphabet < 2 || options.max_n < kDecouplingK)
    throw Error(ErrorCode::invalid_argument, "inequality suites need alphabets >= 2 and n >= 2");
  if (std::pow(static_cast<double>(options.max_alphabet), static_cast<double>(kDecouplingK * options.max_n)) >
      kEnumerationLimit)
    throw Error(ErrorCode::too_large_to_enumerate, "inequality instances exceed the enumeration budget");
  const std::size_t count = options.instances;
  const double c2 = static_cast<double>(decoupling_constant(2));
  const std::vector<double> exp_lambdas{0.5, 1.0};
  const std::vector<double> key_lambdas{0.1, 0.5, 1.0, 2.0};

  // One slot per (suite, instance, parameter), filled in parallel and read in order.
  std::vector<std::vector<InequalityCase>> dec_exp(count), dec_sq(count), iter(count), key(count);
  std::vector<nlohmann::json> dec_dump(count), iter_dump(count), key_dump(count);

  parallel_rows(count, [&](std::size_t i) {
    auto rng = make_rng(options.seed, i);
    const auto inst = random_symmetric(rng, options, i == 0);
    dec_dump[i] = dump(inst);
    const auto lhs = coupled_law(inst);
    const auto rhs = decoupled_law(inst);
    for (double lambda : exp_lambdas) {
      const double l = log_mean_exp(lhs, lambda), r = log_mean_exp(rhs, lambda * c2);
      dec_exp[i].push_back({"decoupling-exp", i, "lambda=" + fmt(lambda), l, r, within(l, r)});
    }
    const double l = mean_square(lhs, 1.0), r = mean_square(rhs, c2);
    dec_sq[i].push_back({"decoupling-square", i, "square", l, r, within(l, r)});
  });

  parallel_rows(count, [&](std::size_t i) {
    auto rng = make_rng(derive_seed(options.seed, 1), i);
    const auto inst = random_decoupled(rng, options, i == 0);
    iter_dump[i] = dump(inst);
    const double l = iterated_log_mgf_lhs(inst), r = iterated_log_mgf_bound(inst);
    iter[i].push_back({"iterated-log-mgf", i, "", l, r, within(l, r)});
  });

  parallel_rows(count, [&](std::size_t i) {
    auto rng = make_rng(derive_seed(options.seed, 2), i);
    const auto inst = random_symmetric(rng, options, i == 0);
    key_dump[i] = dump(inst);
    const auto space = alphabet_space(inst.s);
    const auto w = InteractionPotential::table(space, 2, inst.table);
    for (double lambda : key_lambdas) {
      const double l = log_mgf_exact(w, inst.alpha, inst.n, lambda);
      const double r = log_mgf_keybound(w, inst.alpha, lambda).value;
      key[i].push_back({"key-bound", i, "lambda=" + fmt(lambda), l, r, within(l, r)});
    }
  });

  InequalityReport report;
  auto collect = [&](const std::string& name, const std::vector<std::vector<InequalityCase>>& cases,
                     const std::vector<nlohmann::json>& dumps) {
    InequalitySuite suite;
    suite.name = name;
    suite.instances = count;
    std::vector<double> slacks;
    for (std::size_t i = 0; i < count; ++i) {
      bool violated = false;
      for (const auto& c : cases[i]) {
        report.cases.push_back(c);
        slacks.push_back(c.rhs - c.lhs);
        if (!c.holds) {
          ++suite.violations;
          violated = true;
        }
      }
      if (violated) suite.dumps.push_back(dumps[i]);
    }
    summarize(suite, std::move(slacks));
    report.suites.push_back(std::move(suite));
  };
  collect("decoupling-exp", dec_exp, dec_dump);
  collect("decoupling-square", dec_sq, dec_dump);
  collect("iterated-log-mgf", iter, iter_dump);
  collect("key-bound", key, key_dump);
  return report;
}

// ---------------------------------------------------------------------------
// Convergence

double distance_to_targets(const SpacePtr& space, const Configuration& x, std::span<const DiscreteMeasure> targets,
                           double p) {
  if (targets.empty()) throw Error(ErrorCode::invalid_argument, "no target measures");
  const auto ln = empirical_measure(space, x);
  double best = kInf;
  for (const auto& t : targets) {
    const double d = (!space->is_finite() && space->dim() == 1) ? wasserstein_1d(ln.measure(), t, p)
                                                                 : wasserstein_exact(ln.measure(), t, p).distance;
    best = std::min(best, d);
  }
  return best;
}

nlohmann::json ConvergenceReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"n", r.n}, {"mean", r.mean}, {"std_error", r.std_error}, {"q10", r.q10}, {"q50", r.q50},
                   {"q90", r.q90}});
  return {{"rows", out}, {"verdict", verdict}};
}

ConvergenceReport convergence_report(const GibbsModel& model, std::span<const DiscreteMeasure> targets,
                                     std::span<const std::size_t> n_list, const ConvergenceOptions& options) {
  if (options.replicas == 0) throw Error(ErrorCode::invalid_argument, "replicas must be positive");
  ConvergenceReport report;
  for (std::size_t r = 0; r < n_list.size(); ++r) {
    const auto configs = sample_replicas(model, n_list[r], options.replicas, options.burn_in_sweeps, options.sigma,
                                         derive_seed(options.seed, r));
    std::vector<double> d(configs.size());
    parallel_rows(configs.size(), [&](std::size_t i) { d[i] = distance_to_targets(model.space(), configs[i], targets, options.p); });
    ConvergenceRow row;
    row.n = n_list[r];
    CompensatedSum sum, sq;
    for (double v : d) sum.add(v);
    row.mean = sum.value() / static_cast<double>(d.size());
    for (double v : d) sq.add((v - row.mean) * (v - row.mean));
    const double var = d.size() > 1 ? sq.value() / static_cast<double>(d.size() - 1) : 0.0;
    row.std_error = std::sqrt(var / static_cast<double>(d.size()));
    std::sort(d.begin(), d.end());
    row.q10 = quantile(d, 0.1);
    row.q50 = quantile(d, 0.5);
    row.q90 = quantile(d, 0.9);
    report.rows.push_back(row);
  }
  bool strict = true, within_error = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& a = report.rows[i - 1];
    const auto& b = report.rows[i];
    strict = strict && b.mean < a.mean;
    within_error = within_error && b.mean <= a.mean + 2.0 * std::hypot(a.std_error, b.std_error);
  }
  report.verdict = strict ? "decreasing" : within_error ? "non-increasing within error" : "not decreasing";
  return report;
}

// ---------------------------------------------------------------------------
// Finite-n checks

LowerBoundCheck ld_lower_bound_check(const GibbsModel& model, std::size_t n, const Event& event) {
  const auto& space = model.space();
  if (!space->is_finite()) throw Error(ErrorCode::invalid_argument, "lower-bound checks need a finite space");
  require_enumerable_types(n, space->size());
  LogSumExp acc;
  double best = kInf;
  CompositionIterator it(n, space->size());
  do {
    const auto w = type_weights(it.counts(), n);
    if (!event.contains(w)) continue;
    acc.add(log_type_class_weight(model, it.counts()));
    best = std::min(best, free_energy_dense(model, w));
  } while (it.next());
  if (acc.empty()) throw Error(ErrorCode::event_empty, "no type class satisfies the event");
  LowerBoundCheck out;
  out.n = n;
  out.value = acc.value() / static_cast<double>(n);
  out.best_type = best;
  out.envelope = types_envelope(space->size(), n);
  out.holds = out.value >= -best - out.envelope - 1e-12;
  return out;
}

SandwichCheck partition_sandwich_check(const GibbsModel& model, std::size_t n) {
  const auto& space = model.space();
  if (!space->is_finite()) throw Error(ErrorCode::invalid_argument, "sandwich checks need a finite space");
  require_enumerable_types(n, space->size());
  double best = kInf;
  CompositionIterator it(n, space->size());
  do {
    best = std::min(best, free_energy_dense(model, type_weights(it.counts(), n)));
  } while (it.next());
  SandwichCheck out;
  out.n = n;
  out.value = log_partition_exact(model, n).value;
  out.type_bound = -best;
  out.envelope = types_envelope(space->size(), n);
  out.holds = std::abs(out.value - out.type_bound) <= out.envelope;
  return out;
}

}  // namespace mfldp
