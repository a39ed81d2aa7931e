#ifndef STRATVAR_VARIANCE_HPP
#define STRATVAR_VARIANCE_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "stratvar/error.hpp"
#include "stratvar/model.hpp"
#include "stratvar/ratio.hpp"

// Closed-form variances of the four unbiased estimators of a red-ball
// fraction, plus the bounds that compare them. Everything here is exact.
//
//   simple with replacement      X/n                    p(1-p)/n
//   simple without replacement   Y/n                    p(1-p)/n * (N-n)/(N-1)
//   stratified with              sum (N_j/N) X_j/n_j    sum (N_j/N)^2 p_j(1-p_j)/n_j
//   stratified without           sum (N_j/N) Y_j/n_j    sum (N_j/N)^2 p_j(1-p_j)/n_j * (N_j-n_j)/(N_j-1)
//
// Per-stratum draws are independent.

namespace stratvar {

enum class EstimatorKind { SimpleWith, SimpleWithout, StratWith, StratWithout };

constexpr std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::SimpleWith: return "simple-with";
    case EstimatorKind::SimpleWithout: return "simple-without";
    case EstimatorKind::StratWith: return "strat-with";
    case EstimatorKind::StratWithout: return "strat-without";
  }
  return "unknown";
}

inline EstimatorKind parse_estimator_kind(std::string_view text) {
  for (auto kind : {EstimatorKind::SimpleWith, EstimatorKind::SimpleWithout, EstimatorKind::StratWith,
                    EstimatorKind::StratWithout})
    if (text == to_string(kind)) return kind;
  throw Error(ErrorKind::InvalidArgument, "unknown estimator kind '" + std::string(text) + "'");
}

constexpr bool is_stratified(EstimatorKind kind) {
  return kind == EstimatorKind::StratWith || kind == EstimatorKind::StratWithout;
}

constexpr bool is_without_replacement(EstimatorKind kind) {
  return kind == EstimatorKind::SimpleWithout || kind == EstimatorKind::StratWithout;
}

namespace detail {

inline void require_fraction(const Ratio& p) {
  if (p < 0 || p > 1) throw Error(ErrorKind::InvalidArgument, "fraction " + to_string(p) + " outside [0, 1]");
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorKind::InvalidArgument, message);
}

}  // namespace detail

inline Ratio var_simple_with(const Ratio& p, Count n) {
  detail::require_fraction(p);
  detail::require(n >= 1, "sample size must be >= 1");
  return p * (1 - p) / n;
}

inline Ratio var_simple_without(Count N, const Ratio& p, Count n) {
  detail::require(N >= 2, "population size must be >= 2");
  detail::require(n >= 1 && n <= N, "sample size outside [1, N]");
  return var_simple_with(p, n) * ratio(N - n, N - 1);
}

inline Ratio var_simple_without(Count N, Count red, Count n) {
  detail::require(N >= 2, "population size must be >= 2");
  detail::require(red >= 0 && red <= N, "red count outside [0, N]");
  return var_simple_without(N, ratio(red, N), n);
}

inline Ratio var_strat_with(const Scenario& scenario) {
  Ratio total = 0;
  const auto& pop = scenario.population();
  for (std::size_t j = 0; j < scenario.m(); ++j) {
    const Ratio weight = ratio(pop.size(j), pop.N());
    const Ratio& pj = scenario.distribution().fraction(j);
    total += weight * weight * pj * (1 - pj) / scenario.allocation().count(j);
  }
  return total;
}

inline Ratio var_strat_without(const Scenario& scenario) {
  Ratio total = 0;
  const auto& pop = scenario.population();
  for (std::size_t j = 0; j < scenario.m(); ++j) {
    const Count Nj = pop.size(j);
    const Count nj = scenario.allocation().count(j);
    const Ratio weight = ratio(Nj, pop.N());
    const Ratio& pj = scenario.distribution().fraction(j);
    total += weight * weight * pj * (1 - pj) / nj * ratio(Nj - nj, Nj - 1);
  }
  return total;
}

/// (N-n)/(N-m) * p(1-p)/n. Equals (N-1)/(N-m) * var(Y/n) for n < N and is 0
/// at n = N.
inline Ratio bound_B(Count N, Count m, Count n, const Ratio& p) {
  detail::require_fraction(p);
  detail::require(m >= 2, "need m >= 2");
  detail::require(n >= m, "need n >= m");
  detail::require(N > m, "need N > m");
  detail::require(n <= N, "need n <= N");
  return ratio(N - n, N - m) * p * (1 - p) / n;
}

struct Decomposition {
  Ratio simple_with;
  Ratio heterogeneity;
};

/// Under proportional allocation the stratified with-replacement variance
/// splits as var(X/n) - (1/n) sum (N_j/N)(p_j - p)^2. Both terms are
/// returned; heterogeneity is zero iff every p_j equals p.
inline Decomposition proportional_decomposition(const Scenario& scenario) {
  if (!is_proportional(scenario.population(), scenario.allocation()))
    throw Error(ErrorKind::NotProportional, "allocation is not proportional");
  const Ratio p = scenario.p();
  const Count n = scenario.n();
  const auto& pop = scenario.population();
  Ratio spread = 0;
  for (std::size_t j = 0; j < scenario.m(); ++j) {
    const Ratio diff = scenario.distribution().fraction(j) - p;
    spread += ratio(pop.size(j), pop.N()) * diff * diff;
  }
  return {var_simple_with(p, n), spread / n};
}

/// B + (N-n) / (4 (N-m) n N^2) * sum (N - m N_j)/(N_j - 1). Requires an exact
/// proportional allocation to exist for n.
inline Ratio minimax_upper_bound(const StratifiedPopulation& population, Count n, const Ratio& p) {
  const Count N = population.N();
  const Count m = static_cast<Count>(population.m());
  detail::require(n >= m && n < N, "need m <= n < N");
  for (std::size_t j = 0; j < population.m(); ++j)
    if ((n * population.size(j)) % N != 0)
      throw Error(ErrorKind::HypothesisViolated,
                  "(N_j/N) n is not an integer for stratum " + std::to_string(j), j);
  Ratio spread = 0;
  for (Count Nj : population.sizes()) spread += ratio(N - m * Nj, Nj - 1);
  return bound_B(N, m, n, p) + ratio(N - n, 4 * (N - m) * n * N * N) * spread;
}

struct RelaxedMax {
  Ratio value;
  std::vector<Ratio> argmax;
};

/// Maximum of the stratified without-replacement variance over real p_j with
/// sum p_j N_j = pN, ignoring integrality and the [0,1] box. The value bounds
/// the whole-ball maximum from above; argmax is the stationary point and may
/// fall outside [0,1].
inline RelaxedMax nature_relaxed_max(const StratifiedPopulation& population, const Allocation& allocation,
                                     const Ratio& p) {
  detail::require_fraction(p);
  if (allocation.m() != population.m())
    throw Error(ErrorKind::DimensionMismatch, "allocation and population disagree on stratum count");
  const Count N = population.N();
  std::vector<Ratio> alpha, beta;
  for (std::size_t j = 0; j < population.m(); ++j) {
    const Count Nj = population.size(j);
    const Count nj = allocation.count(j);
    if (nj == Nj)
      throw Error(ErrorKind::ExhaustedStratum, "stratum " + std::to_string(j) + " is sampled exhaustively", j);
    alpha.push_back(ratio(Nj * Nj * (Nj - nj), N * N * (Nj - 1) * nj));
    beta.push_back(ratio(Nj, N));
  }
  Ratio alpha_sum = 0, weighted = 0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    alpha_sum += alpha[j];
    weighted += beta[j] * beta[j] / alpha[j];
  }
  const Ratio tilt = 2 * p - 1;
  RelaxedMax out;
  out.value = (alpha_sum - tilt * tilt / weighted) / 4;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    out.argmax.push_back(Ratio(1, 2) + beta[j] * (p - Ratio(1, 2)) / (alpha[j] * weighted));
  return out;
}

struct VarianceReport {
  EstimatorKind kind;
  Ratio exact;
  double decimal;
  Scenario inputs;
};

inline Ratio evaluate(EstimatorKind kind, const Scenario& scenario) {
  switch (kind) {
    case EstimatorKind::SimpleWith: return var_simple_with(scenario.p(), scenario.n());
    case EstimatorKind::SimpleWithout: return var_simple_without(scenario.N(), scenario.p(), scenario.n());
    case EstimatorKind::StratWith: return var_strat_with(scenario);
    case EstimatorKind::StratWithout: return var_strat_without(scenario);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown estimator kind");
}

inline VarianceReport variance_report(EstimatorKind kind, const Scenario& scenario) {
  Ratio exact = evaluate(kind, scenario);
  const double decimal = to_double(exact);
  return {kind, std::move(exact), decimal, scenario};
}

}  // namespace stratvar

#endif  // STRATVAR_VARIANCE_HPP
