#include "mfldp/ustats.hpp"

#include <cmath>
#include <ostream>

#include "mfldp/error.hpp"
#include "mfldp/integrability.hpp"
#include "mfldp/numeric.hpp"
#include "tuple_iteration.hpp"

namespace mfldp {

namespace {

void require_particles(std::size_t n, int k) {
  if (n < static_cast<std::size_t>(k))
    throw Error(ErrorCode::too_few_particles,
                "need n >= k (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
}

double enumeration_size(std::size_t s, std::size_t n) { return std::pow(static_cast<double>(s), static_cast<double>(n)); }

void require_enumerable(std::size_t s, std::size_t n) {
  if (enumeration_size(s, n) > kEnumerationLimit)
    throw Error(ErrorCode::too_large_to_enumerate,
                std::to_string(s) + "^" + std::to_string(n) + " configurations exceed the enumeration limit");
}

std::vector<double> log_weights(std::span<const double> w) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] > 0.0 ? std::log(w[i]) : kNegInf;
  return out;
}

}  // namespace

double u_statistic(const InteractionPotential& w, const Configuration& x) {
  require_particles(x.size(), w.order());
  const auto total = kernels::omp::tuple_total(w, x);
  return total.value() / ordered_tuple_count(x.size(), static_cast<std::uint64_t>(w.order()));
}

TupleTotal tuple_total_from_counts(const InteractionPotential& w, std::span<const std::uint64_t> counts) {
  const auto& space = *w.space();
  if (!space.is_finite()) throw Error(ErrorCode::invalid_argument, "label counts need a finite space");
  const std::size_t s = space.size();
  if (counts.size() != s) throw Error(ErrorCode::dimension_mismatch, "one count per label expected");
  const std::size_t k = static_cast<std::size_t>(w.order());
  std::vector<std::size_t> labels(k, 0);
  std::vector<Point> tuple(k);
  std::vector<std::uint64_t> mult(s, 0);
  CompensatedSum finite;
  TupleTotal total;
  do {
    std::fill(mult.begin(), mult.end(), 0);
    for (auto l : labels) ++mult[l];
    double count = 1.0;
    for (std::size_t l = 0; l < s && count > 0.0; ++l) count *= falling_factorial(counts[l], mult[l]);
    if (count == 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) tuple[j] = space.point(labels[j]);
    const double v = w.value(tuple);
    if (v == kInf) {
      total.infinite += static_cast<std::uint64_t>(count);
    } else {
      finite.add(count * v);
    }
  } while (detail::next_digits(s, labels));
  total.finite = finite.value();
  return total;
}

double decoupled_u_sum(const InteractionPotential& w, std::span<const Configuration> replicas) {
  if (replicas.size() != static_cast<std::size_t>(w.order()))
    throw Error(ErrorCode::arity_mismatch, "need one replica per tuple coordinate");
  for (const auto& r : replicas)
    if (r.size() != replicas[0].size())
      throw Error(ErrorCode::replica_length_mismatch, "replicas must all have length n");
  require_particles(replicas[0].size(), w.order());
  return kernels::omp::decoupled_total(w, replicas).value();
}

std::uint64_t decoupling_constant(int k) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "decoupling constants are defined for k >= 2");
  if (k == 2) return 8;
  unsigned __int128 c = static_cast<unsigned __int128>(1) << k;
  for (int j = 2; j <= k; ++j) {
    unsigned __int128 p = 1;
    for (int t = 0; t < j; ++t) p *= static_cast<unsigned>(j);
    c *= p - 1;
    if (c > UINT64_MAX) throw Error(ErrorCode::invalid_argument, "C_k overflows 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

double log_mgf_exact(const InteractionPotential& w, std::span<const double> alpha, std::size_t n, double lambda,
                     std::ostream* trace) {
  const auto& space = *w.space();
  if (!space.is_finite()) throw Error(ErrorCode::invalid_argument, "exact log-MGF needs a finite space");
  if (alpha.size() != space.size()) throw Error(ErrorCode::dimension_mismatch, "alpha must have one weight per label");
  require_particles(n, w.order());
  const std::size_t s = space.size();
  require_enumerable(s, n);
  const auto log_alpha = log_weights(alpha);
  const double tuples = ordered_tuple_count(n, static_cast<std::uint64_t>(w.order()));
  const double nd = static_cast<double>(n);
  auto term = [&](std::span<const std::size_t> digits, double* u_out) {
    std::vector<std::uint64_t> counts(s, 0);
    double lw = 0.0;
    for (auto d : digits) {
      ++counts[d];
      lw += log_alpha[d];
    }
    if (lw == kNegInf) return kNegInf;
    const double u = tuple_total_from_counts(w, counts).value() / tuples;
    if (u_out) *u_out = u;
    return lw + lambda * nd * u;
  };
  if (trace) {
    *trace << "configuration,log_weight_plus_exponent,u_statistic\n";
    const LogTerm traced = [&](std::span<const std::size_t> digits) {
      double u = kNaN;
      const double t = term(digits, &u);
      for (std::size_t i = 0; i < digits.size(); ++i) *trace << (i ? " " : "") << space.labels()[digits[i]];
      *trace << ',' << t << ',' << u << '\n';
      return t;
    };
    return kernels::serial::enumerate_log_sum(s, n, traced) / nd;
  }
  return kernels::omp::enumerate_log_sum(s, n, [&](std::span<const std::size_t> d) { return term(d, nullptr); }) / nd;
}

KeyBound log_mgf_keybound(const InteractionPotential& w, std::span<const double> alpha, double lambda,
                          std::size_t sample_budget, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be > 0");
  const int k = w.order();
  const double a = static_cast<double>(k) * static_cast<double>(decoupling_constant(k)) * lambda;
  const auto& space = *w.space();
  KeyBound out;
  if (space.is_finite()) {
    const auto log_alpha = log_weights(alpha);
    const LogTerm term = [&](std::span<const std::size_t> labels) {
      double lw = 0.0;
      for (auto l : labels) lw += log_alpha[l];
      if (lw == kNegInf) return kNegInf;
      std::vector<Point> t(labels.size());
      for (std::size_t j = 0; j < labels.size(); ++j) t[j] = space.point(labels[j]);
      return lw + a * std::abs(w.value(t));
    };
    out.value = kernels::serial::enumerate_log_sum(space.size(), static_cast<std::size_t>(k), term) / k;
    return out;
  }
  const TupleFunction f = [&w](std::span<const Point> t) { return std::abs(w.value(t)); };
  const auto est = check_exp_integrability(f, k, w.space(), alpha, a, sample_budget, seed);
  out.value = est.log_estimate / k;
  out.std_error = est.log_std_error / k;
  out.exact = false;
  out.unstable = est.unstable;
  return out;
}

std::vector<std::vector<std::size_t>> ordered_tuples(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx(k);
  detail::for_each_distinct(n, idx, 0, [&](const std::vector<std::size_t>& t) { out.push_back(t); });
  return out;
}

namespace {

void check_instance(const DecoupledInstance& inst) {
  if (inst.k < 1 || inst.n < inst.k) throw Error(ErrorCode::too_few_particles, "need 1 <= k <= n");
  if (inst.laws.size() != inst.n * inst.k) throw Error(ErrorCode::invalid_argument, "need one law per (replica, index)");
  for (const auto& l : inst.laws)
    if (l.size() != inst.alphabet) throw Error(ErrorCode::invalid_argument, "law size must equal the alphabet size");
  const double tuples = ordered_tuple_count(inst.n, inst.k);
  if (static_cast<double>(inst.phi.size()) != tuples) throw Error(ErrorCode::invalid_argument, "need one Phi per ordered tuple");
  const double cells = enumeration_size(inst.alphabet, inst.k);
  for (const auto& p : inst.phi)
    if (static_cast<double>(p.size()) != cells) throw Error(ErrorCode::invalid_argument, "Phi tables need alphabet^k entries");
}

}  // namespace

double iterated_log_mgf_lhs(const DecoupledInstance& inst) {
  check_instance(inst);
  const std::size_t s = inst.alphabet, n = inst.n, k = inst.k;
  require_enumerable(s, n * k);
  const auto tuples = ordered_tuples(n, k);
  std::vector<std::vector<double>> log_laws;
  for (const auto& l : inst.laws) log_laws.push_back(log_weights(l));
  const double scale = 1.0 / falling_factorial(n, k);
  const LogTerm term = [&](std::span<const std::size_t> x) {
    // x[j * n + i] is the value of X_i^{j+1}
    double lw = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) lw += log_laws[c][x[c]];
    if (lw == kNegInf) return kNegInf;
    CompensatedSum sum;
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      std::size_t flat = 0;
      for (std::size_t j = 0; j < k; ++j) flat = flat * s + x[j * n + tuples[t][j]];
      sum.add(inst.phi[t][flat]);
    }
    return lw + scale * sum.value();
  };
  return kernels::omp::enumerate_log_sum(s, n * k, term);
}

double iterated_log_mgf_bound(const DecoupledInstance& inst) {
  check_instance(inst);
  const std::size_t s = inst.alphabet, n = inst.n, k = inst.k;
  const auto tuples = ordered_tuples(n, k);
  const double inner = 1.0 / static_cast<double>(n - k + 1);
  CompensatedSum total;
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    LogSumExp acc;
    std::vector<std::size_t> a(k, 0);
    do {
      double lw = 0.0;
      std::size_t flat = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const double p = inst.laws[j * n + tuples[t][j]][a[j]];
        lw += p > 0.0 ? std::log(p) : kNegInf;
        flat = flat * s + a[j];
      }
      if (lw != kNegInf) acc.add(lw + inner * inst.phi[t][flat]);
    } while (detail::next_digits(s, a));
    total.add(acc.value());
  }
  return total.value() / falling_factorial(n, k - 1);
}

// ---------------------------------------------------------------- cache

UStatCache::UStatCache(std::vector<InteractionPotential> potentials, Configuration x)
    : potentials_(std::move(potentials)), x_(std::move(x)) {
  for (const auto& w : potentials_) {
    require_particles(x_.size(), w.order());
    counts_.push_back(ordered_tuple_count(x_.size(), static_cast<std::uint64_t>(w.order())));
    coupling_.push_back(w.product_coupling());
  }
  recompute();
}

std::vector<double> UStatCache::embed(Point p) const {
  if (potentials_.empty()) return {};
  const auto& space = *potentials_.front().space();
  if (space.is_finite()) return {space.value(p)};
  return {p.begin(), p.end()};
}

void UStatCache::recompute() {
  totals_.clear();
  for (const auto& w : potentials_) totals_.push_back(kernels::omp::tuple_total(w, x_));
  embedding_sum_.clear();
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const auto e = embed(x_[i]);
    if (embedding_sum_.empty()) embedding_sum_.assign(e.size(), 0.0);
    for (std::size_t c = 0; c < e.size(); ++c) embedding_sum_[c] += e[c];
  }
}

double UStatCache::u(std::size_t r) const { return totals_[r].value() / counts_[r]; }

std::vector<double> UStatCache::u_values() const {
  std::vector<double> out(potentials_.size());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = u(r);
  return out;
}

bool UStatCache::has_infinite() const {
  for (const auto& t : totals_)
    if (t.infinite > 0) return true;
  return false;
}

double UStatCache::u_sum() const {
  if (has_infinite()) return kInf;
  CompensatedSum s;
  for (std::size_t r = 0; r < totals_.size(); ++r) s.add(totals_[r].finite / counts_[r]);
  return s.value();
}

UStatCache::Move UStatCache::propose(std::size_t i, Point p) const {
  if (i >= x_.size()) throw Error(ErrorCode::index_out_of_range, "particle index out of range");
  Move m;
  m.index = i;
  m.point.assign(p.begin(), p.end());
  const Point np(m.point);
  for (std::size_t r = 0; r < potentials_.size(); ++r) {
    if (coupling_[r]) {
      // sum_{j != i} c <e(y), e(x_j)> = c <e(y), S - e(x_i)>
      const auto old_e = embed(x_[i]);
      const auto new_e = embed(np);
      double old_dot = 0.0, new_dot = 0.0;
      for (std::size_t c = 0; c < old_e.size(); ++c) {
        const double rest = embedding_sum_[c] - old_e[c];
        old_dot += old_e[c] * rest;
        new_dot += new_e[c] * rest;
      }
      m.removed.push_back({*coupling_[r] * old_dot, 0});
      m.added.push_back({*coupling_[r] * new_dot, 0});
    } else {
      m.removed.push_back(kernels::partial_total(potentials_[r], x_, i, x_[i]));
      m.added.push_back(kernels::partial_total(potentials_[r], x_, i, np));
    }
  }
  return m;
}

double UStatCache::delta_u_sum(const Move& move) const {
  bool now_infinite = false, then_infinite = false;
  CompensatedSum delta;
  for (std::size_t r = 0; r < potentials_.size(); ++r) {
    const auto k = static_cast<std::uint64_t>(potentials_[r].order());
    const std::uint64_t inf_after = totals_[r].infinite - k * move.removed[r].infinite + k * move.added[r].infinite;
    now_infinite = now_infinite || totals_[r].infinite > 0;
    then_infinite = then_infinite || inf_after > 0;
    delta.add(static_cast<double>(k) * (move.added[r].finite - move.removed[r].finite) / counts_[r]);
  }
  if (then_infinite) return kInf;
  if (now_infinite) return kNegInf;
  return delta.value();
}

void UStatCache::apply(const Move& move) {
  const std::size_t i = move.index;
  const Point np(move.point);
  const auto old_e = embed(x_[i]);
  const auto new_e = embed(np);
  for (std::size_t r = 0; r < potentials_.size(); ++r) {
    const auto k = static_cast<std::uint64_t>(potentials_[r].order());
    auto& t = totals_[r];
    t.infinite = t.infinite - k * move.removed[r].infinite + k * move.added[r].infinite;
    t.finite += static_cast<double>(k) * (move.added[r].finite - move.removed[r].finite);
  }
  for (std::size_t c = 0; c < old_e.size(); ++c) embedding_sum_[c] += new_e[c] - old_e[c];
  x_.set(i, np);
}

double UStatCache::drift() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < potentials_.size(); ++r) {
    const auto fresh = kernels::omp::tuple_total(potentials_[r], x_);
    if (fresh.infinite != totals_[r].infinite) return kInf;
    worst = std::max(worst, std::abs(fresh.finite - totals_[r].finite) / std::max(1.0, std::abs(fresh.finite)));
  }
  return worst;
}

std::vector<double> u_statistic_update(UStatCache& cache, std::size_t i, Point p) {
  cache.apply(cache.propose(i, p));
  return cache.u_values();
}

}  // namespace mfldp
