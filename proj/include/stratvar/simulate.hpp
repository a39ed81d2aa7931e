#ifndef STRATVAR_SIMULATE_HPP
#define STRATVAR_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "stratvar/error.hpp"
#include "stratvar/model.hpp"
#include "stratvar/parallel.hpp"
#include "stratvar/ratio.hpp"
#include "stratvar/rng.hpp"
#include "stratvar/variance.hpp"

namespace stratvar {

/// Red balls in n draws without replacement: draw, remove, repeat.
inline Count draw_without_replacement(Count N, Count red, Count n, CounterRng& rng) {
  if (red < 0 || red > N || n < 1 || n > N)
    throw Error(ErrorKind::InvalidArgument, "need 0 <= red <= N and 1 <= n <= N");
  Count left = N, reds_left = red, hits = 0;
  for (Count i = 0; i < n; ++i) {
    if (static_cast<Count>(rng.below(static_cast<std::uint64_t>(left))) < reds_left) {
      ++hits;
      --reds_left;
    }
    --left;
  }
  return hits;
}

/// Red balls in n independent draws with replacement.
inline Count draw_with_replacement(Count N, Count red, Count n, CounterRng& rng) {
  if (N < 1 || red < 0 || red > N || n < 1)
    throw Error(ErrorKind::InvalidArgument, "need 0 <= red <= N and n >= 1");
  Count hits = 0;
  for (Count i = 0; i < n; ++i)
    if (static_cast<Count>(rng.below(static_cast<std::uint64_t>(N))) < red) ++hits;
  return hits;
}

/// Trials are generated in fixed-size blocks. Block b of stratum j draws from
/// CounterRng::derive(seed, j, b), so the output never depends on how blocks
/// are spread over workers.
inline constexpr std::uint64_t kTrialsPerBlock = 4096;
/// Stream index used by the simple estimators, which draw from the whole urn.
inline constexpr std::uint64_t kWholeUrnStream = std::numeric_limits<std::uint64_t>::max();

struct SimConfig {
  Scenario scenario;
  EstimatorKind kind = EstimatorKind::StratWithout;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct SimResult {
  EstimatorKind kind;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double mean = 0;
  double variance = 0;
  /// Standard error of `variance`, from the fourth central moment:
  /// sqrt((m4 - s^4 (T-3)/(T-1)) / T).
  double variance_stderr = 0;
  /// sqrt(variance / trials).
  double mean_stderr = 0;
  Ratio exact_variance;
  Ratio p;
  /// (variance - exact) / variance_stderr; 0 when both agree and the
  /// standard error vanishes.
  double z = 0;
  /// (mean - p) / mean_stderr, with the same convention.
  double mean_z = 0;
};

namespace detail {

inline void require_integer_mode(const Scenario& scenario) {
  if (scenario.distribution().mode() != RedMode::Integer)
    throw Error(ErrorKind::InvalidArgument, "simulation needs whole red counts per stratum");
}

/// With a zero standard error every trial produced the same value; it counts
/// as agreement when it matches to rounding.
inline double z_score(double observed, double expected, double stderr_) {
  if (stderr_ > 0) return (observed - expected) / stderr_;
  if (std::abs(observed - expected) <= 1e-12 * std::max(1.0, std::abs(expected))) return 0.0;
  return observed > expected ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Per-stratum red counts for every trial of one block: result[j][t].
/// Stratum j's draws depend only on (seed, j, block) and that stratum's own
/// N_j, r_j, n_j.
inline std::vector<std::vector<Count>> stratum_draws(const SimConfig& config, std::uint64_t block) {
  detail::require_integer_mode(config.scenario);
  const auto& s = config.scenario;
  const std::uint64_t begin = block * kTrialsPerBlock;
  if (begin >= config.trials) return std::vector<std::vector<Count>>(s.m());
  const std::uint64_t count = std::min(kTrialsPerBlock, config.trials - begin);
  const bool without = is_without_replacement(config.kind);
  std::vector<std::vector<Count>> out(s.m(), std::vector<Count>(count));
  for (std::size_t j = 0; j < s.m(); ++j) {
    auto rng = CounterRng::derive(config.seed, j, block);
    const Count Nj = s.population().size(j), rj = s.distribution().counts()[j], nj = s.allocation().count(j);
    for (std::uint64_t t = 0; t < count; ++t)
      out[j][t] = without ? draw_without_replacement(Nj, rj, nj, rng) : draw_with_replacement(Nj, rj, nj, rng);
  }
  return out;
}

inline std::vector<Count> whole_urn_draws(const SimConfig& config, std::uint64_t block) {
  detail::require_integer_mode(config.scenario);
  const auto& s = config.scenario;
  const std::uint64_t begin = block * kTrialsPerBlock;
  if (begin >= config.trials) return {};
  const std::uint64_t count = std::min(kTrialsPerBlock, config.trials - begin);
  const Count N = s.N(), red = static_cast<Count>(numerator(s.distribution().total_red())), n = s.n();
  auto rng = CounterRng::derive(config.seed, kWholeUrnStream, block);
  std::vector<Count> out(count);
  for (auto& y : out)
    y = is_without_replacement(config.kind) ? draw_without_replacement(N, red, n, rng)
                                            : draw_with_replacement(N, red, n, rng);
  return out;
}

/// Runs `trials` independent replications of the configured estimator and
/// compares the empirical variance to the exact one.
inline SimResult estimate(const SimConfig& config) {
  detail::require_integer_mode(config.scenario);
  if (config.trials < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 trials");
  const auto& s = config.scenario;
  const std::uint64_t blocks = (config.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  const double N = static_cast<double>(s.N());
  std::vector<double> values(config.trials);

  detail::parallel_for(blocks, config.workers, [&](std::size_t b) {
    const std::uint64_t begin = b * kTrialsPerBlock;
    if (is_stratified(config.kind)) {
      const auto draws = stratum_draws(config, b);
      for (std::size_t t = 0; t < draws[0].size(); ++t) {
        double x = 0;
        for (std::size_t j = 0; j < s.m(); ++j)
          x += (static_cast<double>(s.population().size(j)) / N) *
               (static_cast<double>(draws[j][t]) / static_cast<double>(s.allocation().count(j)));
        values[begin + t] = x;
      }
    } else {
      const auto draws = whole_urn_draws(config, b);
      for (std::size_t t = 0; t < draws.size(); ++t)
        values[begin + t] = static_cast<double>(draws[t]) / static_cast<double>(s.n());
    }
  });

  // Moments are accumulated serially in trial order, so the floating-point
  // result is identical for any worker count.
  const double T = static_cast<double>(config.trials);
  double sum = 0;
  for (double v : values) sum += v;
  const bool constant = std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  const double mean = constant ? values.front() : sum / T;
  double m2 = 0, m4 = 0;
  for (double v : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  SimResult r;
  r.kind = config.kind;
  r.trials = config.trials;
  r.seed = config.seed;
  r.mean = mean;
  r.variance = m2 / (T - 1);
  const double fourth = m4 / T;
  const double spread = (fourth - r.variance * r.variance * (T - 3) / (T - 1)) / T;
  r.variance_stderr = spread > 0 ? std::sqrt(spread) : 0.0;
  r.mean_stderr = std::sqrt(r.variance / T);
  r.exact_variance = evaluate(config.kind, s);
  r.p = s.p();
  r.z = detail::z_score(r.variance, to_double(r.exact_variance), r.variance_stderr);
  r.mean_z = detail::z_score(r.mean, to_double(r.p), r.mean_stderr);
  return r;
}

}  // namespace stratvar

#endif  // STRATVAR_SIMULATE_HPP
