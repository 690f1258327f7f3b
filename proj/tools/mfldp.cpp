#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfldp/config.hpp"
#include "mfldp/error.hpp"
#include "mfldp/experiment.hpp"
#include "mfldp/parallel.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;
constexpr int kOtherError = 1;

bool numerical(mfldp::ErrorCode code) {
  using mfldp::ErrorCode;
  return code == ErrorCode::diverged || code == ErrorCode::normalization_diverged ||
         code == ErrorCode::no_finite_starting_point || code == ErrorCode::budget_exhausted ||
         code == ErrorCode::singular_configuration;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field Gibbs measures: sampling, free energies and large-deviation checks"};
  app.require_subcommand(1);
  std::string config_file, out_dir;
  std::optional<std::uint64_t> seed;
  bool trace = false, strict = false;
  const std::vector<std::string> kinds{"sample", "minimize", "fixed-point", "rate", "zn", "verify", "converge",
                                       "wasserstein"};
  for (const auto& k : kinds) {
    auto* sub = app.add_subcommand(k, "run a " + k + " experiment");
    sub->add_option("--config", config_file, "JSON experiment config")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed (overrides the config seed)");
    sub->add_flag("--trace", trace, "write per-iteration tables");
    sub->add_flag("--strict", strict, "exit with code 3 on non-convergence or failed checks");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  const std::string kind = app.get_subcommands().front()->get_name();
  mfldp::configure_threads_from_env();

  try {
    std::ifstream in(config_file, std::ios::binary);
    if (!in) throw mfldp::Error(mfldp::ErrorCode::config_error, config_file + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    const auto base = std::filesystem::path(config_file).parent_path();
    auto config = mfldp::parse_config(text, base.empty() ? "." : base);
    if (mfldp::to_string(config.kind) != kind)
      throw mfldp::Error(mfldp::ErrorCode::config_error,
                         "kind: config describes '" + mfldp::to_string(config.kind) + "', command is '" + kind + "'");
    if (seed) {
      auto j = nlohmann::json::parse(config.source);
      j["seed"] = *seed;
      config = mfldp::parse_config(j.dump(), base.empty() ? "." : base);
    }
    const std::filesystem::path dir = out_dir.empty() ? config.output.dir : std::filesystem::path(out_dir);
    mfldp::RunOptions options;
    options.trace = trace;
    const auto output = mfldp::run_experiment(config, options);
    mfldp::write_report(config, output, dir);
    std::cout << "wrote " << (dir / "report.json").string() << '\n';
    for (const auto& f : output.numerical_failures) std::cerr << "warning: " << f << '\n';
    if (strict && !output.numerical_failures.empty()) return kNumericalFailure;
    return 0;
  } catch (const mfldp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.code() == mfldp::ErrorCode::config_error) return kConfigError;
    return numerical(e.code()) ? kNumericalFailure : kOtherError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOtherError;
  }
}
