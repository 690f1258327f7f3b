#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfldp/free_energy.hpp"
#include "mfldp/model.hpp"
#include "mfldp/sampler.hpp"

namespace mfldp {

/// Set of measures described by a predicate on weights over the labels /
/// grid cells of a space.
struct Event {
  std::string description;
  std::function<bool(std::span<const double>)> contains;
  /// False for free-form events, whose infimum cannot be certified.
  bool certifiable = true;

  static Event always();
  /// nu(labels) <= threshold.
  static Event mass_at_most(const SpacePtr& space, std::vector<std::size_t> labels, double threshold);
  static Event mass_at_least(const SpacePtr& space, std::vector<std::size_t> labels, double threshold);
  /// |m(nu)| >= threshold, m the mean of the numeric embedding.
  static Event magnetization_abs_at_least(const SpacePtr& space, double threshold);
  static Event magnetization_abs_at_most(const SpacePtr& space, double threshold);

  /// {"type": "mass_at_most", "labels": ["a"], "threshold": 0.2}, ...
  static Event from_json(const SpacePtr& space, const nlohmann::json& j);
};

/// |S| log(n + 1) / n.
double types_envelope(std::size_t labels, std::size_t n);

struct RateRow {
  std::size_t n = 0;
  double value = 0.0;    // (1/n) log P (or log Z~_n)
  double lower = 0.0;    // interval, equal to value for exact rows
  double upper = 0.0;
  double target = 0.0;
  double gap = 0.0;      // value - target
  double envelope = 0.0; // |S| log(n+1)/n when defined, else nan
  std::size_t hits = 0;
  std::size_t replicas = 0;
  bool censored = false; // event never hit: value = -inf
};

struct RateReport {
  std::string method;  // exact-types | monte-carlo | exact-partition | thermodynamic-integration
  std::string event;
  bool target_available = true;
  double target = 0.0;
  std::vector<RateRow> rows;
  std::vector<std::string> notes;

  /// Gaps shrink in absolute value along the n list.
  bool gaps_decreasing() const;
  nlohmann::json to_json() const;
};

/// Exact (1/n) log P(L_n in event) under alpha^{(x)n} by summing multinomial
/// type-class probabilities, against -inf_{event} H(nu | alpha).
RateReport sanov_exact_check(const SpacePtr& space, std::span<const double> alpha, std::span<const std::size_t> n_list,
                             const Event& event, const SearchSpec& search = {});

struct RateOptions {
  std::size_t replicas = 1000;
  std::size_t burn_in_sweeps = 200;
  double sigma = 0.5;
  std::uint64_t seed = 0;
  SearchSpec search;
};

/// Frequency of {L_n in event} over independent replicas (i.i.d. draws when
/// the model has no interactions, otherwise the end state of one MCMC chain
/// per replica), with 95% Wilson intervals. Target: -inf_{event} I_W.
RateReport estimate_rate(const GibbsModel& model, const Event& event, std::span<const std::size_t> n_list,
                         const RateOptions& options);

/// (1/n) log Z~_n per n against -inf H_W.
RateReport partition_limit(const GibbsModel& model, std::span<const std::size_t> n_list, const SearchSpec& search = {});

struct InequalityCase {
  std::string suite;
  std::size_t instance = 0;
  std::string parameter;  // psi / lambda
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

struct InequalitySuite {
  std::string name;
  std::size_t instances = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double min_slack = 0.0;  // min (rhs - lhs)
  double median_slack = 0.0;
  std::vector<nlohmann::json> dumps;  // full instances for every violation
};

struct InequalityOptions {
  std::size_t instances = 100;
  std::size_t max_alphabet = 3;
  std::size_t max_n = 5;
  std::uint64_t seed = 0;
};

struct InequalityReport {
  std::vector<InequalitySuite> suites;
  std::vector<InequalityCase> cases;
  bool all_hold() const;
  nlohmann::json to_json() const;
};

/// Decoupling (Psi = exp(lambda .) and (.)^2), the iterated log-MGF bound and
/// the key MGF bound, each by exact enumeration on random small instances
/// with k = 2 and table entries in multiples of 1/4.
InequalityReport verify_inequalities(const InequalityOptions& options);

struct ConvergenceRow {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
};

struct ConvergenceOptions {
  std::size_t replicas = 20;
  std::size_t burn_in_sweeps = 200;
  double sigma = 0.5;
  double p = 1.0;
  std::uint64_t seed = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::string verdict;  // decreasing | non-increasing within error | not decreasing
  nlohmann::json to_json() const;
};

/// W_p(L_n, nearest target) over replicas, per n.
ConvergenceReport convergence_report(const GibbsModel& model, std::span<const DiscreteMeasure> targets,
                                     std::span<const std::size_t> n_list, const ConvergenceOptions& options);

/// W_p(L_n, nearest target) for one configuration.
double distance_to_targets(const SpacePtr& space, const Configuration& x, std::span<const DiscreteMeasure> targets,
                           double p);

/// Samples one configuration per replica (end state of a chain, or i.i.d.
/// from alpha without interactions). Replica r uses stream r of `seed`.
std::vector<Configuration> sample_replicas(const GibbsModel& model, std::size_t n, std::size_t replicas,
                                           std::size_t burn_in_sweeps, double sigma, std::uint64_t seed);

struct LowerBoundCheck {
  std::size_t n = 0;
  double value = 0.0;        // (1/n) log P_n^*(L_n in event), P_n^* = exp(-n sum U_n) alpha^n
  double best_type = 0.0;    // H_W at the best type class in the event
  double envelope = 0.0;
  bool holds = true;
};

/// Exact finite-n lower bound: value >= -H_W(nu_n) - |S| log(n+1)/n.
LowerBoundCheck ld_lower_bound_check(const GibbsModel& model, std::size_t n, const Event& event);

struct SandwichCheck {
  std::size_t n = 0;
  double value = 0.0;       // (1/n) log Z~_n
  double type_bound = 0.0;  // -min over type classes of H_W
  double envelope = 0.0;
  bool holds = true;
};

SandwichCheck partition_sandwich_check(const GibbsModel& model, std::size_t n);

/// 95% Wilson score interval for `hits` successes out of `trials`.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials);

}  // namespace mfldp
