#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfldp/free_energy.hpp"
#include "mfldp/harness.hpp"
#include "mfldp/model.hpp"
#include "mfldp/partition.hpp"

namespace mfldp {

enum class ExperimentKind { sample, minimize, fixed_point, rate, zn, verify, converge, wasserstein };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct SamplerSpec {
  std::string method = "mcmc";  // mcmc | langevin
  std::size_t burn_in_sweeps = 200;
  std::size_t sweeps = 100;
  std::size_t thinning = 1;     // sweeps between recorded samples
  double sigma = 0.5;
  double dt = 1e-3;
  double horizon = 10.0;
  std::size_t record_every = 100;
};

struct PartitionSpec {
  std::string method = "exact";  // exact | thermodynamic
  ThermodynamicOptions thermodynamic;
};

struct WassersteinSpec {
  nlohmann::json space;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  double p = 1.0;
};

struct OutputSpec {
  std::filesystem::path dir = "out";
  bool frames = false;
  bool plan = true;
};

/// Validated experiment description. Every numeric field has a default;
/// errors carry the JSON path of the offending field.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::verify;
  std::uint64_t seed = 0;
  nlohmann::json model_spec;  // empty for kinds that need no model
  std::vector<std::size_t> n_list;
  std::size_t replicas = 20;
  SamplerSpec sampler;
  SearchSpec solver;
  std::optional<nlohmann::json> event;
  std::string rate_method = "auto";  // auto | exact | monte-carlo
  PartitionSpec partition;
  std::optional<WassersteinSpec> measures;
  InequalityOptions verify;
  double p = 1.0;
  OutputSpec output;
  std::string source;  // canonical JSON text the hash is computed from

  std::uint64_t hash() const;
};

/// Parses and validates a JSON config; relative file paths resolve against
/// `base_dir`. Throws Error(config_error) with "line L, column C" for syntax
/// errors and the field path for schema errors.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& file);

/// Builds a model from the "model" object:
///   {"preset": "spin", "beta": 1.5}
///   {"preset": "quadratic_product", "theta": 0.25, "box": [-5, 5], "cells": 1001}
///   {"space": {...}, "alpha": [...], "base_weights": [...], "confinement": {...}, "interactions": [...]}
GibbsModel build_model(const nlohmann::json& spec);

}  // namespace mfldp
