#ifndef STRATVAR_ORACLE_HPP
#define STRATVAR_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stratvar/error.hpp"
#include "stratvar/model.hpp"
#include "stratvar/parallel.hpp"
#include "stratvar/ratio.hpp"
#include "stratvar/variance.hpp"

// Brute-force ground truth. Every search walks its full enumeration; ties go
// to the lexicographically smallest witness (allocation first, then
// distribution), so results do not depend on the thread count.

namespace stratvar {

struct SearchOptions {
  SearchLimits limits{};
  unsigned threads = 1;
};

struct SearchResult {
  std::optional<Allocation> allocation;
  std::optional<RedDistribution> distribution;
  Ratio value;
  std::uint64_t examined = 0;
  std::optional<AllocationClass> cls;
};

namespace detail {

// With the allocation fixed, the stratified without-replacement variance is
//   (1/N^2) sum_j w_j r_j (N_j - r_j),   w_j = (N_j - n_j) / (n_j (N_j - 1)).
// Scaling every w_j by the lcm L of their denominators leaves an integer
// score whose maximiser is the variance maximiser; value = score / (L N^2).
template <class Int>
struct NatureObjective {
  std::vector<Int> weights;
  BigInt scale;

  Int score(std::span<const Count> reds, std::span<const Count> sizes) const {
    Int total = 0;
    for (std::size_t j = 0; j < reds.size(); ++j) total += weights[j] * Int(reds[j] * (sizes[j] - reds[j]));
    return total;
  }
};

struct ScaledWeights {
  std::vector<BigInt> weights;
  BigInt scale;
  BigInt max_score;
};

inline ScaledWeights scaled_weights(const StratifiedPopulation& population, const Allocation& allocation) {
  ScaledWeights out;
  std::vector<Ratio> w;
  BigInt lcm = 1;
  for (std::size_t j = 0; j < population.m(); ++j) {
    const Count Nj = population.size(j);
    const Count nj = allocation.count(j);
    w.push_back(ratio(Nj - nj, nj * (Nj - 1)));
    const BigInt d = denominator(w.back());
    lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
  }
  out.scale = lcm;
  out.max_score = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    BigInt weight = numerator(w[j]) * (lcm / denominator(w[j]));
    const Count Nj = population.size(j);
    out.max_score += weight * ((Nj * Nj) / 4);
    out.weights.push_back(std::move(weight));
  }
  return out;
}

template <class Int>
NatureObjective<Int> make_objective(const ScaledWeights& scaled) {
  NatureObjective<Int> obj;
  for (const auto& w : scaled.weights) obj.weights.push_back(Int(w));
  obj.scale = scaled.scale;
  return obj;
}

struct NatureScan {
  Ratio value;
  std::vector<std::vector<Count>> maximizers;  // lexicographic; only the first unless collecting ties
  std::uint64_t examined = 0;
};

template <class Int>
NatureScan scan_nature_with(const StratifiedPopulation& population, const NatureObjective<Int>& objective,
                            Count total_red, unsigned threads, bool collect_ties) {
  const std::size_t m = population.m();
  std::vector<Count> lo(m, 0);
  std::vector<Count> hi(population.sizes().begin(), population.sizes().end());
  const Count rest = population.N() - population.size(0);
  const Count first_lo = std::max<Count>(0, total_red - rest);
  const Count first_hi = std::min(population.size(0), total_red);

  struct Branch {
    std::optional<Int> best;
    std::vector<std::vector<Count>> argmax;
    std::uint64_t examined = 0;
  };
  const std::size_t branches = first_hi >= first_lo ? static_cast<std::size_t>(first_hi - first_lo + 1) : 0;
  std::vector<Branch> results(branches);
  parallel_for(branches, threads, [&](std::size_t b) {
    Branch& out = results[b];
    for_each_bounded_composition(
        lo, hi, total_red,
        [&](std::span<const Count> reds) {
          ++out.examined;
          const Int s = objective.score(reds, population.sizes());
          if (!out.best || s > *out.best) {
            out.best = s;
            out.argmax.assign(1, std::vector<Count>(reds.begin(), reds.end()));
          } else if (collect_ties && s == *out.best) {
            out.argmax.emplace_back(reds.begin(), reds.end());
          }
        },
        first_lo + static_cast<Count>(b));
  });

  NatureScan scan;
  std::optional<Int> best;
  for (auto& branch : results) {
    scan.examined += branch.examined;
    if (!branch.best) continue;
    if (!best || *branch.best > *best) {
      best = branch.best;
      scan.maximizers = std::move(branch.argmax);
    } else if (collect_ties && *branch.best == *best) {
      for (auto& w : branch.argmax) scan.maximizers.push_back(std::move(w));
    }
  }
  if (!best) throw std::logic_error("nature scan found no distribution");
  const Count N = population.N();
  scan.value = Ratio(BigInt(*best), objective.scale * N * N);
  return scan;
}

inline NatureScan scan_nature(const StratifiedPopulation& population, const Allocation& allocation,
                              Count total_red, const SearchOptions& options, bool collect_ties) {
  if (allocation.m() != population.m())
    throw Error(ErrorKind::DimensionMismatch, "allocation and population disagree on stratum count");
  if (total_red < 0 || total_red > population.N())
    throw Error(ErrorKind::InvalidArgument,
                "red total " + std::to_string(total_red) + " outside [0, " + std::to_string(population.N()) + "]");
  check_cap(count_distributions(population, total_red, options.limits.max_items + 1), options.limits,
            "distribution");
  const ScaledWeights scaled = scaled_weights(population, allocation);
  const BigInt kFits(std::numeric_limits<std::int64_t>::max() / 4);
  if (scaled.max_score < kFits)
    return scan_nature_with(population, make_objective<std::int64_t>(scaled), total_red, options.threads,
                            collect_ties);
  return scan_nature_with(population, make_objective<BigInt>(scaled), total_red, options.threads, collect_ties);
}

}  // namespace detail

/// Nature's best reply: the distribution of `total_red` red balls that
/// maximises the stratified without-replacement variance for a fixed
/// allocation.
inline SearchResult worst_nature(const StratifiedPopulation& population, const Allocation& allocation,
                                 Count total_red, const SearchOptions& options = {}) {
  auto scan = detail::scan_nature(population, allocation, total_red, options, false);
  SearchResult result;
  result.allocation = allocation;
  result.distribution = RedDistribution::from_counts(population, scan.maximizers.front());
  result.value = var_strat_without(Scenario(population, *result.distribution, allocation));
  if (result.value != scan.value) throw std::logic_error("scaled nature objective disagrees with variance");
  result.examined = scan.examined;
  return result;
}

/// Every maximising distribution, lexicographically ascending.
inline std::vector<RedDistribution> nature_maximizers(const StratifiedPopulation& population,
                                                      const Allocation& allocation, Count total_red,
                                                      const SearchOptions& options = {}) {
  auto scan = detail::scan_nature(population, allocation, total_red, options, true);
  std::vector<RedDistribution> out;
  for (auto& reds : scan.maximizers) out.push_back(RedDistribution::from_counts(population, std::move(reds)));
  return out;
}

/// The Statistician's best allocation in `cls` against a known distribution.
inline SearchResult best_allocation(const StratifiedPopulation& population, const RedDistribution& distribution,
                                    Count n, AllocationClass cls, const SearchOptions& options = {}) {
  if (distribution.m() != population.m())
    throw Error(ErrorKind::DimensionMismatch, "distribution and population disagree on stratum count");
  const auto candidates = enumerate_allocations(population, n, cls, options.limits);
  std::vector<Ratio> values(candidates.size());
  detail::parallel_for(candidates.size(), options.threads, [&](std::size_t i) {
    values[i] = var_strat_without(Scenario(population, distribution, candidates[i]));
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  SearchResult result;
  result.allocation = candidates[best];
  result.distribution = distribution;
  result.value = values[best];
  result.examined = candidates.size();
  result.cls = cls;
  return result;
}

struct MinimaxResult {
  Allocation allocation;
  RedDistribution distribution;
  Ratio value;
  std::uint64_t examined = 0;
  AllocationClass cls;
  /// B and the closed-form upper bound; present only when the divisibility
  /// hypotheses (exact proportional allocation, p N_j integral with
  /// 0 < p N_j < N_j) hold.
  std::optional<Ratio> lower_bound;
  std::optional<Ratio> upper_bound;
  /// lower <= value <= upper, checked for the Admissible class only.
  std::optional<bool> sandwich_holds;
};

/// True when an exact proportional allocation of n exists and R N_j / N is an
/// integer strictly between 0 and N_j for every stratum.
inline bool minimax_hypotheses_hold(const StratifiedPopulation& population, Count n, Count total_red) {
  const Count N = population.N();
  if (n < static_cast<Count>(population.m()) || n >= N) return false;
  for (Count Nj : population.sizes()) {
    if ((n * Nj) % N != 0 || (total_red * Nj) % N != 0) return false;
    const Count reds = total_red * Nj / N;
    if (reds <= 0 || reds >= Nj) return false;
  }
  return true;
}

/// min over the Statistician's class of max over Nature's distributions of
/// the stratified without-replacement variance.
inline MinimaxResult minimax_value(const StratifiedPopulation& population, Count n, Count total_red,
                                   AllocationClass cls = AllocationClass::Admissible,
                                   const SearchOptions& options = {}) {
  const auto candidates = enumerate_allocations(population, n, cls, options.limits);
  std::vector<detail::NatureScan> scans(candidates.size());
  SearchOptions inner = options;
  inner.threads = 1;
  detail::parallel_for(candidates.size(), options.threads, [&](std::size_t i) {
    scans[i] = detail::scan_nature(population, candidates[i], total_red, inner, false);
  });
  std::size_t best = 0;
  std::uint64_t examined = 0;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    examined += scans[i].examined;
    if (scans[i].value < scans[best].value) best = i;
  }
  MinimaxResult result{candidates[best],
                       RedDistribution::from_counts(population, scans[best].maximizers.front()),
                       scans[best].value,
                       examined,
                       cls,
                       std::nullopt,
                       std::nullopt,
                       std::nullopt};
  if (minimax_hypotheses_hold(population, n, total_red)) {
    const Ratio p = ratio(total_red, population.N());
    result.lower_bound = bound_B(population.N(), static_cast<Count>(population.m()), n, p);
    result.upper_bound = minimax_upper_bound(population, n, p);
    if (cls == AllocationClass::Admissible)
      result.sandwich_holds = *result.lower_bound <= result.value && result.value <= *result.upper_bound;
  }
  return result;
}

namespace detail {

inline std::uint64_t binomial_saturating(Count N, Count k, std::uint64_t saturate) {
  if (k < 0 || k > N) return 0;
  k = std::min(k, N - k);
  BigInt c = 1;
  for (Count i = 1; i <= k; ++i) {
    c = c * (N - k + i) / i;
    if (c > saturate) return saturate;
  }
  return c.convert_to<std::uint64_t>();
}

}  // namespace detail

/// var(Y/n) from first principles: every n-subset of the N balls (the first
/// `red` of which are red) is drawn with equal probability.
inline Ratio exhaustive_variance_Y(Count N, Count red, Count n, const SearchLimits& limits = {}) {
  if (N < 1 || red < 0 || red > N || n < 1 || n > N)
    throw Error(ErrorKind::InvalidArgument, "need 0 <= red <= N and 1 <= n <= N");
  detail::check_cap(detail::binomial_saturating(N, n, limits.max_items + 1), limits, "subset");
  std::vector<Count> chosen(static_cast<std::size_t>(n));
  std::iota(chosen.begin(), chosen.end(), Count{0});
  BigInt subsets = 0, sum = 0, sum_sq = 0;
  while (true) {
    Count y = 0;
    for (Count ball : chosen) y += ball < red ? 1 : 0;
    subsets += 1;
    sum += y;
    sum_sq += y * y;
    // advance to the next combination in lexicographic order
    std::size_t i = chosen.size();
    while (i > 0 && chosen[i - 1] == N - n + static_cast<Count>(i - 1)) --i;
    if (i == 0) break;
    ++chosen[i - 1];
    for (std::size_t k = i; k < chosen.size(); ++k) chosen[k] = chosen[k - 1] + 1;
  }
  // var(Y/n) = (E[Y^2] - E[Y]^2) / n^2
  return Ratio(subsets * sum_sq - sum * sum, subsets * subsets * n * n);
}

}  // namespace stratvar

#endif  // STRATVAR_ORACLE_HPP
