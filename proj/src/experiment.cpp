#include "mfldp/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mfldp/error.hpp"
#include "mfldp/json_util.hpp"
#include "mfldp/langevin.hpp"
#include "mfldp/parallel.hpp"
#include "mfldp/partition.hpp"
#include "mfldp/rng.hpp"
#include "mfldp/sampler.hpp"
#include "mfldp/wasserstein.hpp"

namespace mfldp {

namespace {

using C = Table;

std::string point_label(const StateSpace& space, Point p) {
  if (space.is_finite()) return space.labels()[space.index_of(p)];
  std::string out;
  for (std::size_t d = 0; d < p.size(); ++d) {
    if (d) out += " ";
    out += format_double(p[d]);
  }
  return out;
}

void add_measure_rows(Table& t, const std::string& tag, const DiscreteMeasure& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    t.add_row({tag, C::cell(i), point_label(*m.space(), m.point(i)), C::cell(m.weight(i))});
}

Table measure_table(const std::string& name, const MinimizerResult& r) {
  Table t(name, {"measure", "atom", "point", "weight"});
  add_measure_rows(t, "minimizer", r.minimizer);
  for (std::size_t a = 0; a < r.alternates.size(); ++a) add_measure_rows(t, "alternate" + std::to_string(a), r.alternates[a]);
  return t;
}

double coordinate_mean(const StateSpace& space, const Configuration& x) {
  CompensatedSum s;
  for (std::size_t i = 0; i < x.size(); ++i) s.add(space.is_finite() ? space.value(x[i]) : x[i][0]);
  return s.value() / static_cast<double>(x.size());
}

Table rate_table(const RateReport& r) {
  Table t("rate", {"n", "value", "lower", "upper", "target", "gap", "envelope", "hits", "replicas", "censored"});
  for (const auto& row : r.rows)
    t.add_row({C::cell(row.n), C::cell(row.value), C::cell(row.lower), C::cell(row.upper), C::cell(row.target),
               C::cell(row.gap), C::cell(row.envelope), C::cell(row.hits), C::cell(row.replicas),
               row.censored ? "true" : "false"});
  return t;
}

PlotSpec rate_plot(const std::string& name, const std::string& title, const RateReport& r) {
  PlotSpec p{name, title, "n", "(1/n) log P", true, {}};
  Series value{"estimate", {}, {}}, target{"target", {}, {}};
  for (const auto& row : r.rows) {
    value.x.push_back(static_cast<double>(row.n));
    value.y.push_back(row.value);
    target.x.push_back(static_cast<double>(row.n));
    target.y.push_back(row.target);
  }
  p.series = {value, target};
  return p;
}

// ---------------------------------------------------------------------------

struct ReplicaTrace {
  std::vector<std::vector<std::string>> rows;
  std::string frames;
  McmcStats stats;
  std::size_t langevin_steps = 0;
};

ExperimentOutput run_sample(const ExperimentConfig& c, const GibbsModel& model) {
  ExperimentOutput out;
  Table samples("samples", {"n", "replica", "step", "time", "u_sum", "mean"});
  Table stats("chains", {"n", "replica", "proposals", "accepted", "acceptance", "sigma", "max_audit_drift"});
  const auto& space = *model.space();
  for (std::size_t ni = 0; ni < c.n_list.size(); ++ni) {
    const std::size_t n = c.n_list[ni];
    const std::uint64_t seed = derive_seed(c.seed, ni);
    std::vector<ReplicaTrace> traces(c.replicas);
    std::vector<std::exception_ptr> errors(c.replicas);
    const long nr = static_cast<long>(c.replicas);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (long lr = 0; lr < nr; ++lr) {
      const auto r = static_cast<std::size_t>(lr);
      auto& tr = traces[r];
      const bool frames = c.output.frames && ni == 0 && r == 0;
      try {
        auto record = [&](std::size_t step, double time, const Configuration& x) {
          const double u = model.has_interactions() ? model.interaction_energy(x) / static_cast<double>(n) : 0.0;
          tr.rows.push_back({C::cell(n), C::cell(r), C::cell(step), C::cell(time), C::cell(u),
                             C::cell(coordinate_mean(space, x))});
          if (frames) {
            std::ostringstream f;
            write_frame(f, x);
            tr.frames += f.str();
          }
        };
        if (c.sampler.method == "langevin") {
          LangevinConfig lc;
          lc.dt = c.sampler.dt;
          lc.horizon = c.sampler.horizon;
          lc.record_every = c.sampler.record_every;
          std::size_t frame = 0;
          const auto st = simulate_sde(model, n, lc, derive_seed(seed, r),
                                       [&](double t, const Configuration& x) { record(frame++, t, x); });
          tr.langevin_steps = st.steps;
        } else {
          McmcOptions o;
          o.n = n;
          o.sigma = c.sampler.sigma;
          o.seed = seed;
          o.stream = r;
          McmcChain chain(model, o);
          run_burn_in(chain, c.sampler.burn_in_sweeps * n, true);
          for (std::size_t s = 1; s <= c.sampler.sweeps; ++s) {
            chain.sweep();
            if (s % c.sampler.thinning == 0) record(s, kNaN, chain.state());
          }
          tr.stats = chain.stats();
          tr.stats.sigma = chain.sigma();
        }
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (std::size_t r = 0; r < traces.size(); ++r) {
      for (auto& row : traces[r].rows) samples.add_row(std::move(row));
      out.frames += traces[r].frames;
      const auto& s = traces[r].stats;
      if (c.sampler.method == "mcmc")
        stats.add_row({C::cell(n), C::cell(r), C::cell(s.proposals), C::cell(s.accepted), C::cell(s.acceptance_rate()),
                       C::cell(s.sigma), C::cell(s.max_audit_drift)});
    }
  }
  out.summary = {{"sampler", c.sampler.method}, {"records", samples.rows()}};
  out.tables.push_back(std::move(samples));
  if (c.sampler.method == "mcmc") out.tables.push_back(std::move(stats));
  return out;
}

ExperimentOutput run_minimize(const ExperimentConfig& c, const GibbsModel& model, const RunOptions& options) {
  ExperimentOutput out;
  auto spec = c.solver;
  spec.fixed_point.keep_history = options.trace;
  const auto r = minimize(model, spec);
  const auto breakdown = free_energy(model, r.minimizer, r.inf_value);
  out.summary = {{"result", r.to_json(options.trace)}, {"breakdown", breakdown.to_json()}};
  out.tables.push_back(measure_table("minimizer", r));
  if (!r.converged) out.numerical_failures.push_back("minimizer did not converge");
  return out;
}

ExperimentOutput run_fixed_point(const ExperimentConfig& c, const GibbsModel& model) {
  ExperimentOutput out;
  auto opts = c.solver.fixed_point;
  opts.keep_history = true;
  const auto r = fixed_point(model, model.reference().alpha, opts);
  out.summary = {{"result", r.to_json(false)}, {"breakdown", free_energy(model, r.minimizer).to_json()}};
  out.tables.push_back(measure_table("fixed_point", r));
  Table hist("residuals", {"iteration", "step"});
  for (std::size_t i = 0; i < r.residuals.size(); ++i) hist.add_row({C::cell(i + 1), C::cell(r.residuals[i])});
  out.tables.push_back(std::move(hist));
  if (!r.converged) out.numerical_failures.push_back("fixed-point iteration did not converge");
  return out;
}

ExperimentOutput run_rate(const ExperimentConfig& c, const GibbsModel& model) {
  ExperimentOutput out;
  const auto event = Event::from_json(model.space(), *c.event);
  const bool exact = c.rate_method == "exact" ||
                     (c.rate_method == "auto" && model.space()->is_finite() && !model.has_interactions());
  RateReport report;
  if (exact) {
    if (model.has_interactions())
      throw Error(ErrorCode::config_error, "rate_method: exact rates are available without interactions only");
    report = sanov_exact_check(model.space(), model.alpha(), c.n_list, event, c.solver);
  } else {
    RateOptions o;
    o.replicas = c.replicas;
    o.burn_in_sweeps = c.sampler.burn_in_sweeps;
    o.sigma = c.sampler.sigma;
    o.seed = c.seed;
    o.search = c.solver;
    report = estimate_rate(model, event, c.n_list, o);
  }
  out.summary = report.to_json();
  out.tables.push_back(rate_table(report));
  out.plots.push_back(rate_plot("rate", "rate of " + report.event, report));
  return out;
}

ExperimentOutput run_zn(const ExperimentConfig& c, const GibbsModel& model, const RunOptions& options) {
  ExperimentOutput out;
  const double target = -minimize(model, c.solver).inf_value;
  Table t("zn", {"n", "value", "std_error", "quadrature_resolution", "target", "gap", "envelope", "method"});
  Table schedule("schedule", {"n", "t", "mean", "std_error", "acceptance"});
  RateReport plot_data;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    const std::size_t n = c.n_list[i];
    const double envelope = model.space()->is_finite() ? types_envelope(model.space()->size(), n) : kNaN;
    double value, se = 0.0, resolution = 0.0;
    std::string method;
    if (c.partition.method == "exact") {
      const auto z = log_partition_exact(model, n);
      value = z.value;
      method = z.method;
    } else {
      auto ti = c.partition.thermodynamic;
      ti.seed = derive_seed(c.seed, i);
      const auto est = log_partition_estimate(model, n, ti);
      value = est.value;
      se = est.std_error;
      resolution = est.quadrature_resolution;
      method = "thermodynamic-integration";
      for (const auto& p : est.schedule)
        schedule.add_row({C::cell(n), C::cell(p.t), C::cell(p.mean), C::cell(p.std_error), C::cell(p.acceptance)});
    }
    t.add_row({C::cell(n), C::cell(value), C::cell(se), C::cell(resolution), C::cell(target), C::cell(value - target),
               C::cell(envelope), method});
    rows.push_back({{"n", n}, {"value", extended_number(value)}, {"std_error", se}, {"gap", extended_number(value - target)},
                    {"envelope", extended_number(envelope)}, {"method", method}});
    RateRow row;
    row.n = n;
    row.value = value;
    row.target = target;
    plot_data.rows.push_back(row);
  }
  out.summary = {{"target", extended_number(target)}, {"rows", rows}};
  out.tables.push_back(std::move(t));
  if (options.trace && schedule.rows()) out.tables.push_back(std::move(schedule));
  auto plot = rate_plot("zn", "(1/n) log Z_n", plot_data);
  plot.y_label = "(1/n) log Z_n";
  out.plots.push_back(std::move(plot));
  return out;
}

ExperimentOutput run_verify(const ExperimentConfig& c, const RunOptions& options) {
  ExperimentOutput out;
  const auto report = verify_inequalities(c.verify);
  out.summary = report.to_json();
  Table suites("suites", {"suite", "instances", "checks", "violations", "min_slack", "median_slack"});
  for (const auto& s : report.suites) {
    suites.add_row({s.name, C::cell(s.instances), C::cell(s.checks), C::cell(s.violations), C::cell(s.min_slack),
                    C::cell(s.median_slack)});
    if (s.violations) out.numerical_failures.push_back(s.name + ": " + std::to_string(s.violations) + " violations");
  }
  out.tables.push_back(std::move(suites));
  if (options.trace) {
    Table cases("cases", {"suite", "instance", "parameter", "lhs", "rhs", "holds"});
    for (const auto& k : report.cases)
      cases.add_row({k.suite, C::cell(k.instance), k.parameter, C::cell(k.lhs), C::cell(k.rhs), k.holds ? "true" : "false"});
    out.tables.push_back(std::move(cases));
  }
  return out;
}

ExperimentOutput run_converge(const ExperimentConfig& c, const GibbsModel& model) {
  ExperimentOutput out;
  const auto m = minimize(model, c.solver);
  std::vector<DiscreteMeasure> targets{m.minimizer};
  targets.insert(targets.end(), m.alternates.begin(), m.alternates.end());
  ConvergenceOptions o;
  o.replicas = c.replicas;
  o.burn_in_sweeps = c.sampler.burn_in_sweeps;
  o.sigma = c.sampler.sigma;
  o.p = c.p;
  o.seed = c.seed;
  const auto report = convergence_report(model, targets, c.n_list, o);
  out.summary = report.to_json();
  out.summary["targets"] = targets.size();
  Table t("converge", {"n", "mean", "std_error", "q10", "q50", "q90"});
  PlotSpec plot{"converge", "W_p(L_n, minimizer)", "n", "distance", true, {}};
  Series mean{"mean", {}, {}}, q90{"q90", {}, {}};
  for (const auto& r : report.rows) {
    t.add_row({C::cell(r.n), C::cell(r.mean), C::cell(r.std_error), C::cell(r.q10), C::cell(r.q50), C::cell(r.q90)});
    mean.x.push_back(static_cast<double>(r.n));
    mean.y.push_back(r.mean);
    q90.x.push_back(static_cast<double>(r.n));
    q90.y.push_back(r.q90);
  }
  plot.series = {mean, q90};
  out.tables.push_back(std::move(t));
  out.plots.push_back(std::move(plot));
  return out;
}

ExperimentOutput run_wasserstein(const ExperimentConfig& c) {
  ExperimentOutput out;
  const auto& w = *c.measures;
  const auto r = wasserstein_exact(w.mu, w.nu, w.p);
  out.summary = {{"p", w.p}, {"distance", r.distance}, {"cost", r.plan.cost}};
  const auto& space = w.mu.space();
  if (!space->is_finite() && space->dim() == 1) out.summary["distance_quantile"] = wasserstein_1d(w.mu, w.nu, w.p);
  Table d("distance", {"p", "distance"});
  d.add_row({C::cell(w.p), C::cell(r.distance)});
  out.tables.push_back(std::move(d));
  if (c.output.plan) {
    Table plan("plan", {"i", "j", "mass"});
    for (const auto& e : r.plan.entries) plan.add_row({C::cell(e.i), C::cell(e.j), C::cell(e.mass)});
    out.tables.push_back(std::move(plan));
  }
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  if (config.kind == ExperimentKind::verify) return run_verify(config, options);
  if (config.kind == ExperimentKind::wasserstein) return run_wasserstein(config);
  const auto model = build_model(config.model_spec);
  switch (config.kind) {
    case ExperimentKind::sample: return run_sample(config, model);
    case ExperimentKind::minimize: return run_minimize(config, model, options);
    case ExperimentKind::fixed_point: return run_fixed_point(config, model);
    case ExperimentKind::rate: return run_rate(config, model);
    case ExperimentKind::zn: return run_zn(config, model, options);
    case ExperimentKind::converge: return run_converge(config, model);
    default: break;
  }
  throw Error(ErrorCode::config_error, "kind: not runnable");
}

nlohmann::json make_manifest(const ExperimentConfig& config, const ExperimentOutput& output) {
  return {{"version", kVersion},
          {"kind", to_string(config.kind)},
          {"config_hash", hash_hex(config.hash())},
          {"seed", config.seed},
          {"seed_derivation", "splitmix64 streams per (n index, replica)"},
          {"config", nlohmann::json::parse(config.source)},
          {"numerical_failures", output.numerical_failures},
          {"summary", output.summary}};
}

void write_report(const ExperimentConfig& config, const ExperimentOutput& output, const std::filesystem::path& dir) {
  write_bundle(dir, make_manifest(config, output), output.tables, output.plots);
  if (!output.frames.empty()) {
    std::ofstream f(dir / "frames.bin", std::ios::binary);
    f << output.frames;
  }
}

}  // namespace mfldp
