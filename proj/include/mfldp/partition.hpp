#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfldp/model.hpp"

namespace mfldp {

enum class PartitionMethod { automatic, enumeration, type_classes, magnetization_classes };

struct PartitionValue {
  double value = 0.0;  // (1/n) log Z~_n
  std::string method;
};

/// Exact (1/n) log Z~_n for finite models, Z~_n = E_{alpha^n} exp(-n sum_k U_n(W^(k))).
///   magnetization_classes: two-label spaces with a single product-form pair
///     interaction; n up to 1e5.
///   type_classes: sums over label counts with multinomial weights; allowed
///     while the number of count vectors is at most 1e7.
///   enumeration: all |S|^n configurations; |S|^n <= 1e7.
/// `automatic` picks the first applicable method in that order.
PartitionValue log_partition_exact(const GibbsModel& model, std::size_t n,
                                   PartitionMethod method = PartitionMethod::automatic);

/// log of P_n^*(L_n = counts/n) = log [multinomial * prod alpha^c * exp(-n sum U_n)].
double log_type_class_weight(const GibbsModel& model, std::span<const std::uint64_t> counts);

struct ThermodynamicOptions {
  std::size_t points = 41;        // trapezoid nodes on [0, 1]
  std::size_t burn_in_sweeps = 2000;
  std::size_t sweeps = 20000;     // measured sweeps per node
  std::size_t batches = 20;       // batch means for the per-node error
  double sigma = 0.5;
  std::uint64_t seed = 0;
};

struct ThermodynamicPoint {
  double t = 0.0;
  double mean = 0.0;       // E_t[sum_k U_n(W^(k))]
  double std_error = 0.0;  // batch-means error
  double acceptance = 0.0;
};

struct PartitionEstimate {
  double value = 0.0;                   // (1/n) log Z~_n
  double std_error = 0.0;               // sqrt(sum w_i^2 se_i^2)
  double quadrature_resolution = 0.0;   // |trapezoid - trapezoid on every other node|
  std::vector<ThermodynamicPoint> schedule;
};

/// Thermodynamic integration: d/dt log Z~_n(t) = -n E_t[sum U_n], where the
/// model at t has interactions t W. Nodes are independent chains with seeds
/// derived from (seed, node index); the t = 0 node samples alpha exactly.
PartitionEstimate log_partition_estimate(const GibbsModel& model, std::size_t n, const ThermodynamicOptions& options);

}  // namespace mfldp
