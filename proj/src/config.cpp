#include "mfldp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mfldp/error.hpp"
#include "mfldp/report.hpp"

namespace mfldp {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::config_error, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void allow_only(const nlohmann::json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(join(path, k), "unknown field");
}

double number(const nlohmann::json& j, const std::string& path, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(join(path, key), "expected a number");
  return j[key].get<double>();
}

bool non_negative_integer(const nlohmann::json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::size_t count(const nlohmann::json& j, const std::string& path, const std::string& key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!non_negative_integer(j[key])) fail(join(path, key), "expected a non-negative integer");
  return j[key].get<std::size_t>();
}

bool flag(const nlohmann::json& j, const std::string& path, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) fail(join(path, key), "expected true or false");
  return j[key].get<bool>();
}

std::string text(const nlohmann::json& j, const std::string& path, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) fail(join(path, key), "expected a string");
  return j[key].get<std::string>();
}

void positive(double x, const std::string& path) {
  if (!(x > 0.0)) fail(path, "must be > 0");
}

template <typename F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string what = e.what();
    const auto colon = what.find(": ");
    fail(path, colon == std::string::npos ? what : what.substr(colon + 2));
  } catch (const nlohmann::json::exception& e) {
    fail(path, e.what());
  }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

SpacePtr build_space(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind")) fail(join(path, "kind"), "missing");
  if (j["kind"] == "spins") return StateSpace::spins();
  return with_path(path, [&] { return StateSpace::from_json(j); });
}

DiscreteMeasure load_measure(const nlohmann::json& j, const std::string& path, const SpacePtr& space,
                             const std::filesystem::path& base_dir) {
  nlohmann::json body = j;
  if (j.is_string()) {
    const auto file = base_dir / j.get<std::string>();
    std::ifstream in(file);
    if (!in) fail(path, "file not found: " + file.string());
    try {
      body = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      fail(path, file.string() + ": " + e.what());
    }
  }
  return with_path(path, [&] { return DiscreteMeasure::from_json(space, body); });
}

SearchMethod search_method(const std::string& s, const std::string& path) {
  if (s == "auto") return SearchMethod::automatic;
  if (s == "grid_scan") return SearchMethod::grid_scan;
  if (s == "parametric_1d") return SearchMethod::parametric_1d;
  if (s == "fixed_point") return SearchMethod::fixed_point;
  fail(path, "unknown method '" + s + "'");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::sample: return "sample";
    case ExperimentKind::minimize: return "minimize";
    case ExperimentKind::fixed_point: return "fixed-point";
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::zn: return "zn";
    case ExperimentKind::verify: return "verify";
    case ExperimentKind::converge: return "converge";
    case ExperimentKind::wasserstein: return "wasserstein";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::sample, ExperimentKind::minimize, ExperimentKind::fixed_point, ExperimentKind::rate,
                 ExperimentKind::zn, ExperimentKind::verify, ExperimentKind::converge, ExperimentKind::wasserstein})
    if (to_string(k) == s) return k;
  fail("kind", "unknown experiment kind '" + s + "'");
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(source); }

GibbsModel build_model(const nlohmann::json& spec) {
  const std::string path = "model";
  if (!spec.is_object()) fail(path, "expected an object");
  if (spec.contains("preset")) {
    const auto preset = text(spec, path, "preset", "");
    if (preset == "spin") {
      allow_only(spec, path, {"preset", "beta"});
      if (!spec.contains("beta")) fail(join(path, "beta"), "missing");
      return GibbsModel::spin(number(spec, path, "beta", 0.0));
    }
    if (preset == "quadratic_product") {
      allow_only(spec, path, {"preset", "theta", "box", "cells"});
      if (!spec.contains("theta")) fail(join(path, "theta"), "missing");
      double lo = -5.0, hi = 5.0;
      if (spec.contains("box")) {
        const auto& b = spec["box"];
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
          fail(join(path, "box"), "expected [lo, hi]");
        lo = b[0].get<double>();
        hi = b[1].get<double>();
      }
      const auto cells = count(spec, path, "cells", 1001);
      return with_path(path, [&] { return GibbsModel::quadratic_product(number(spec, path, "theta", 0.0), lo, hi, cells); });
    }
    fail(join(path, "preset"), "unknown preset '" + preset + "'");
  }
  allow_only(spec, path, {"space", "alpha", "base_weights", "confinement", "interactions"});
  if (!spec.contains("space")) fail(join(path, "space"), "missing");
  const auto space = build_space(spec["space"], join(path, "space"));
  std::vector<InteractionPotential> interactions;
  if (spec.contains("interactions")) {
    const auto& list = spec["interactions"];
    if (!list.is_array()) fail(join(path, "interactions"), "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto p = join(path, "interactions") + "[" + std::to_string(i) + "]";
      interactions.push_back(with_path(p, [&] { return interaction_from_json(space, list[i]); }));
    }
  }
  if (spec.contains("alpha")) {
    if (!space->is_finite()) fail(join(path, "alpha"), "only finite spaces take alpha directly");
    if (spec.contains("confinement") || spec.contains("base_weights"))
      fail(join(path, "alpha"), "give either alpha or confinement/base_weights");
    const auto alpha = with_path(join(path, "alpha"), [&] { return spec["alpha"].get<std::vector<double>>(); });
    return with_path(path, [&] { return GibbsModel::from_alpha(space, alpha, interactions); });
  }
  ConfinementPotential v = ConfinementPotential::zero();
  if (spec.contains("confinement"))
    v = with_path(join(path, "confinement"), [&] { return confinement_from_json(spec["confinement"]); });
  std::vector<double> base;
  if (spec.contains("base_weights"))
    base = with_path(join(path, "base_weights"), [&] { return spec["base_weights"].get<std::vector<double>>(); });
  return with_path(path, [&] { return GibbsModel(space, v, interactions, base); });
}

ExperimentConfig parse_config(const std::string& source, const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(source, e.byte);
    throw Error(ErrorCode::config_error,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON");
  }
  allow_only(j, "", {"kind", "seed", "model", "n_list", "replicas", "sampler", "solver", "event", "rate_method",
                     "partition", "measures", "verify", "p", "output"});
  ExperimentConfig c;
  if (!j.contains("kind")) fail("kind", "missing");
  c.kind = experiment_kind_from_string(text(j, "", "kind", ""));
  if (!j.contains("seed")) fail("seed", "missing (seeds must be explicit)");
  if (!non_negative_integer(j["seed"])) fail("seed", "expected a non-negative integer");
  c.seed = j["seed"].get<std::uint64_t>();

  const bool needs_model = c.kind != ExperimentKind::verify && c.kind != ExperimentKind::wasserstein;
  if (j.contains("model")) {
    c.model_spec = j["model"];
    build_model(c.model_spec);
  } else if (needs_model) {
    fail("model", "missing");
  }

  if (j.contains("n_list")) {
    if (!j["n_list"].is_array()) fail("n_list", "expected an array of positive integers");
    for (std::size_t i = 0; i < j["n_list"].size(); ++i) {
      const auto& v = j["n_list"][i];
      if (!non_negative_integer(v) || v.get<std::size_t>() == 0)
        fail("n_list[" + std::to_string(i) + "]", "expected a positive integer");
      c.n_list.push_back(v.get<std::size_t>());
    }
  }
  const bool needs_n = c.kind == ExperimentKind::sample || c.kind == ExperimentKind::rate ||
                       c.kind == ExperimentKind::zn || c.kind == ExperimentKind::converge;
  if (needs_n && c.n_list.empty()) fail("n_list", "missing or empty");
  c.replicas = count(j, "", "replicas", c.replicas);
  if (c.replicas == 0) fail("replicas", "must be positive");
  c.p = number(j, "", "p", 1.0);
  if (!(c.p >= 1.0)) fail("p", "must be >= 1");

  if (j.contains("sampler")) {
    const auto& s = j["sampler"];
    allow_only(s, "sampler", {"method", "burn_in_sweeps", "sweeps", "thinning", "sigma", "dt", "horizon", "record_every"});
    c.sampler.method = text(s, "sampler", "method", c.sampler.method);
    if (c.sampler.method != "mcmc" && c.sampler.method != "langevin")
      fail("sampler.method", "expected \"mcmc\" or \"langevin\"");
    c.sampler.burn_in_sweeps = count(s, "sampler", "burn_in_sweeps", c.sampler.burn_in_sweeps);
    c.sampler.sweeps = count(s, "sampler", "sweeps", c.sampler.sweeps);
    c.sampler.thinning = count(s, "sampler", "thinning", c.sampler.thinning);
    if (c.sampler.thinning == 0) fail("sampler.thinning", "must be positive");
    c.sampler.sigma = number(s, "sampler", "sigma", c.sampler.sigma);
    positive(c.sampler.sigma, "sampler.sigma");
    c.sampler.dt = number(s, "sampler", "dt", c.sampler.dt);
    positive(c.sampler.dt, "sampler.dt");
    c.sampler.horizon = number(s, "sampler", "horizon", c.sampler.horizon);
    positive(c.sampler.horizon, "sampler.horizon");
    c.sampler.record_every = count(s, "sampler", "record_every", c.sampler.record_every);
    if (c.sampler.record_every == 0) fail("sampler.record_every", "must be positive");
  }

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    allow_only(s, "solver", {"method", "mesh", "refinements", "damping", "tol", "max_iter", "start_points"});
    c.solver.method = search_method(text(s, "solver", "method", "auto"), "solver.method");
    c.solver.mesh = number(s, "solver", "mesh", c.solver.mesh);
    if (!(c.solver.mesh > 0.0 && c.solver.mesh <= 1.0)) fail("solver.mesh", "must lie in (0, 1]");
    c.solver.refinements = static_cast<int>(count(s, "solver", "refinements", 3));
    c.solver.fixed_point.damping = number(s, "solver", "damping", c.solver.fixed_point.damping);
    if (!(c.solver.fixed_point.damping > 0.0 && c.solver.fixed_point.damping <= 1.0))
      fail("solver.damping", "must lie in (0, 1]");
    c.solver.fixed_point.tol = number(s, "solver", "tol", c.solver.fixed_point.tol);
    positive(c.solver.fixed_point.tol, "solver.tol");
    c.solver.fixed_point.max_iter = count(s, "solver", "max_iter", c.solver.fixed_point.max_iter);
    c.solver.start_points = count(s, "solver", "start_points", c.solver.start_points);
  }

  if (j.contains("event")) {
    c.event = j["event"];
    if (!c.model_spec.is_null()) {
      const auto model = build_model(c.model_spec);
      Event::from_json(model.space(), *c.event);
    }
  }
  if (c.kind == ExperimentKind::rate && !c.event) fail("event", "missing");
  c.rate_method = text(j, "", "rate_method", c.rate_method);
  if (c.rate_method != "auto" && c.rate_method != "exact" && c.rate_method != "monte-carlo")
    fail("rate_method", "expected \"auto\", \"exact\" or \"monte-carlo\"");

  if (j.contains("partition")) {
    const auto& s = j["partition"];
    allow_only(s, "partition", {"method", "points", "burn_in_sweeps", "sweeps", "batches", "sigma"});
    c.partition.method = text(s, "partition", "method", c.partition.method);
    if (c.partition.method != "exact" && c.partition.method != "thermodynamic")
      fail("partition.method", "expected \"exact\" or \"thermodynamic\"");
    auto& ti = c.partition.thermodynamic;
    ti.points = count(s, "partition", "points", ti.points);
    if (ti.points < 3 || ti.points % 2 == 0) fail("partition.points", "must be odd and >= 3");
    ti.burn_in_sweeps = count(s, "partition", "burn_in_sweeps", ti.burn_in_sweeps);
    ti.sweeps = count(s, "partition", "sweeps", ti.sweeps);
    ti.batches = count(s, "partition", "batches", ti.batches);
    if (ti.batches < 2 || ti.sweeps < ti.batches) fail("partition.batches", "need 2 <= batches <= sweeps");
    ti.sigma = number(s, "partition", "sigma", ti.sigma);
    positive(ti.sigma, "partition.sigma");
  }
  c.partition.thermodynamic.seed = c.seed;

  if (j.contains("measures")) {
    const auto& s = j["measures"];
    allow_only(s, "measures", {"space", "mu", "nu", "p"});
    WassersteinSpec w;
    SpacePtr space;
    if (s.contains("space")) {
      w.space = s["space"];
      space = build_space(s["space"], "measures.space");
    } else if (!c.model_spec.is_null()) {
      space = build_model(c.model_spec).space();
      w.space = space->to_json();
    } else {
      fail("measures.space", "missing (no model to take it from)");
    }
    if (!s.contains("mu")) fail("measures.mu", "missing");
    if (!s.contains("nu")) fail("measures.nu", "missing");
    w.mu = load_measure(s["mu"], "measures.mu", space, base_dir);
    w.nu = load_measure(s["nu"], "measures.nu", space, base_dir);
    w.p = number(s, "measures", "p", c.p);
    if (!(w.p >= 1.0)) fail("measures.p", "must be >= 1");
    c.measures = std::move(w);
  }
  if (c.kind == ExperimentKind::wasserstein && !c.measures) fail("measures", "missing");

  if (j.contains("verify")) {
    const auto& s = j["verify"];
    allow_only(s, "verify", {"instances", "max_alphabet", "max_n"});
    c.verify.instances = count(s, "verify", "instances", c.verify.instances);
    c.verify.max_alphabet = count(s, "verify", "max_alphabet", c.verify.max_alphabet);
    c.verify.max_n = count(s, "verify", "max_n", c.verify.max_n);
    if (c.verify.max_alphabet < 2 || c.verify.max_alphabet > 3) fail("verify.max_alphabet", "must lie in [2, 3]");
    if (c.verify.max_n < 2 || c.verify.max_n > 5) fail("verify.max_n", "must lie in [2, 5]");
  }
  c.verify.seed = c.seed;

  if (j.contains("output")) {
    const auto& s = j["output"];
    allow_only(s, "output", {"dir", "frames", "plan"});
    c.output.dir = text(s, "output", "dir", c.output.dir.string());
    c.output.frames = flag(s, "output", "frames", c.output.frames);
    c.output.plan = flag(s, "output", "plan", c.output.plan);
  }
  c.source = j.dump();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::config_error, file.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

}  // namespace mfldp
