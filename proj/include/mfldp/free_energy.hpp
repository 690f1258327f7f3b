#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfldp/model.hpp"

namespace mfldp {

/// int W dnu^{(x)k}, split into positive and negative parts.
struct InteractionEnergy {
  double value = 0.0;     // positive - negative, +inf if the positive part diverges
  double positive = 0.0;
  double negative = 0.0;
  bool negative_integrable = true;
};

InteractionEnergy interaction_energy(const InteractionPotential& w, const DiscreteMeasure& nu);

struct FreeEnergyBreakdown {
  double entropy = 0.0;                    // H(nu | alpha)
  std::vector<double> interaction_terms;   // W^(k)(nu) per interaction
  double total = 0.0;                      // H_W(nu)
  std::optional<double> normalized_rate;   // I_W(nu) = H_W(nu) - inf H_W, when inf is supplied
  bool entropy_infinite = false;
  bool negative_part_diverges = false;

  nlohmann::json to_json() const;
};

/// Measures are evaluated on the model's labels / grid cells (atoms are moved
/// to the cell containing them).
FreeEnergyBreakdown free_energy(const GibbsModel& model, const DiscreteMeasure& nu,
                                std::optional<double> inf_value = std::nullopt);

/// H_W of the measure with the given weights on the model's labels / cells.
double free_energy_dense(const GibbsModel& model, std::span<const double> weights);

/// Critical map T(nu) proportional to alpha exp(-sum_k k pi_nu W^(k)), where
/// pi_nu W^(k)(x) = int W(x, y_2, ..., y_k) dnu^{(x)(k-1)}. For pair
/// interactions this is the critical equation with the factor 2; with higher
/// orders the output is labeled "extended-CE".
std::vector<double> critical_map(const GibbsModel& model, std::span<const double> weights);
DiscreteMeasure critical_map(const GibbsModel& model, const DiscreteMeasure& nu);
std::string critical_map_label(const GibbsModel& model);

/// Derivatives of eps -> H_W(nu + eps (delta_x - nu)) at 0, one per label /
/// cell (-inf where nu vanishes).
std::vector<double> directional_derivatives(const GibbsModel& model, std::span<const double> weights);

struct FixedPointOptions {
  double damping = 0.5;
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  bool keep_history = false;
};

struct MinimizerResult {
  DiscreteMeasure minimizer;
  double inf_value = 0.0;
  std::string method;             // grid-scan | fixed-point | parametric-1d
  std::string map_label;          // CE | extended-CE (fixed-point only)
  std::size_t iterations = 0;
  bool converged = true;
  double residual = 0.0;          // W1(nu, T(nu)) for fixed points, mesh for scans
  std::vector<double> residuals;  // per-iteration step sizes when kept
  std::vector<DiscreteMeasure> alternates;  // other minimizers with the same value

  nlohmann::json to_json(bool with_history = false) const;
};

/// nu_{t+1} = (1 - gamma) nu_t + gamma T(nu_t) until W1(nu_{t+1}, nu_t) <= tol.
MinimizerResult fixed_point(const GibbsModel& model, const DiscreteMeasure& start, const FixedPointOptions& options = {});

/// Distance used by the fixed-point stopping rule: exact W1 on finite spaces,
/// the quantile formula on 1-d grids, total variation otherwise.
double iterate_distance(const GibbsModel& model, std::span<const double> a, std::span<const double> b);

enum class SearchMethod { automatic, grid_scan, parametric_1d, fixed_point };

struct SearchSpec {
  SearchMethod method = SearchMethod::automatic;
  double mesh = 1e-3;
  int refinements = 3;           // zoom levels after the coarse scan, mesh / 10 each
  FixedPointOptions fixed_point;
  std::vector<DiscreteMeasure> starts;  // empty: alpha plus half-mixtures with point masses
  std::size_t start_points = 9;         // point masses used for default starts on grids
};

/// Grid scan over the simplex (finite spaces, |S| <= 4), a scan over the
/// mass of the second label (two-label spaces) or multi-start fixed points.
MinimizerResult minimize(const GibbsModel& model, const SearchSpec& spec = {});

/// inf of H_W restricted to measures satisfying `in_event` (finite spaces,
/// |S| <= 4), by the same simplex scan; nullopt if no lattice point qualifies.
std::optional<MinimizerResult> minimize_on_event(const GibbsModel& model,
                                                  const std::function<bool(std::span<const double>)>& in_event,
                                                  const SearchSpec& spec = {});

/// L2 norm (interior cells) of the central-difference residual of
/// rho'' + (rho V')' + 2 (rho (W' * nu))' on a 1-d grid, rho = nu / h.
double stationary_residual(const GibbsModel& model, std::span<const double> weights);

/// (1/n) H(nu^{(x)n} | P_n) = H(nu | alpha) + sum_k W^(k)(nu) + (1/n) log Z~_n,
/// exact at finite n on finite spaces.
double rate_identification(const GibbsModel& model, const DiscreteMeasure& nu, std::size_t n);

}  // namespace mfldp
