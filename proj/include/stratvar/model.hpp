#ifndef STRATVAR_MODEL_HPP
#define STRATVAR_MODEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stratvar/error.hpp"
#include "stratvar/ratio.hpp"

namespace stratvar {

using Count = std::int64_t;

inline constexpr std::uint64_t kDefaultSearchCap = 10'000'000;

/// Upper bound on the number of items any single enumeration may produce.
/// Exceeding it raises SearchSpaceExceeded; output is never truncated.
struct SearchLimits {
  std::uint64_t max_items = kDefaultSearchCap;
};

class StratifiedPopulation {
 public:
  explicit StratifiedPopulation(std::vector<Count> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2)
      throw Error(ErrorKind::TooFewStrata,
                  "need at least 2 strata, got " + std::to_string(sizes_.size()));
    for (std::size_t j = 0; j < sizes_.size(); ++j) {
      if (sizes_[j] < 2)
        throw Error(ErrorKind::StratumTooSmall, "stratum " + std::to_string(j) + " has size < 2", j);
    }
    total_ = std::accumulate(sizes_.begin(), sizes_.end(), Count{0});
  }

  std::size_t m() const noexcept { return sizes_.size(); }
  Count N() const noexcept { return total_; }
  Count size(std::size_t j) const { return sizes_.at(j); }
  std::span<const Count> sizes() const noexcept { return sizes_; }

  bool operator==(const StratifiedPopulation&) const = default;

 private:
  std::vector<Count> sizes_;
  Count total_ = 0;
};

class Allocation {
 public:
  Allocation(const StratifiedPopulation& population, std::vector<Count> counts)
      : counts_(std::move(counts)) {
    if (counts_.size() != population.m())
      throw Error(ErrorKind::DimensionMismatch,
                  "allocation has " + std::to_string(counts_.size()) + " entries for " +
                      std::to_string(population.m()) + " strata");
    for (std::size_t j = 0; j < counts_.size(); ++j) {
      if (counts_[j] < 1 || counts_[j] > population.size(j))
        throw Error(ErrorKind::AllocationOutOfRange,
                    "stratum " + std::to_string(j) + " sample size " + std::to_string(counts_[j]) +
                        " outside [1, " + std::to_string(population.size(j)) + "]",
                    j);
    }
    total_ = std::accumulate(counts_.begin(), counts_.end(), Count{0});
  }

  std::size_t m() const noexcept { return counts_.size(); }
  Count n() const noexcept { return total_; }
  Count count(std::size_t j) const { return counts_.at(j); }
  std::span<const Count> counts() const noexcept { return counts_; }

  bool operator==(const Allocation&) const = default;

 private:
  std::vector<Count> counts_;
  Count total_ = 0;
};

enum class RedMode { Integer, Rational };

/// Nature's choice of red balls per stratum. Integer mode holds counts
/// r_j in [0, N_j]; rational mode holds exact fractions p_j in [0, 1] that
/// need not be realizable by whole balls.
class RedDistribution {
 public:
  static RedDistribution from_counts(const StratifiedPopulation& population,
                                     std::vector<Count> counts) {
    if (counts.size() != population.m())
      throw Error(ErrorKind::DimensionMismatch,
                  "distribution has " + std::to_string(counts.size()) + " entries for " +
                      std::to_string(population.m()) + " strata");
    RedDistribution d;
    d.mode_ = RedMode::Integer;
    d.population_total_ = population.N();
    for (std::size_t j = 0; j < counts.size(); ++j) {
      if (counts[j] < 0 || counts[j] > population.size(j))
        throw Error(ErrorKind::RedOutOfRange,
                    "stratum " + std::to_string(j) + " red count " + std::to_string(counts[j]) +
                        " outside [0, " + std::to_string(population.size(j)) + "]",
                    j);
      d.fractions_.push_back(ratio(counts[j], population.size(j)));
      d.total_red_ += counts[j];
    }
    d.counts_ = std::move(counts);
    return d;
  }

  static RedDistribution from_fractions(const StratifiedPopulation& population,
                                        std::vector<Ratio> fractions) {
    if (fractions.size() != population.m())
      throw Error(ErrorKind::DimensionMismatch,
                  "distribution has " + std::to_string(fractions.size()) + " entries for " +
                      std::to_string(population.m()) + " strata");
    RedDistribution d;
    d.mode_ = RedMode::Rational;
    d.population_total_ = population.N();
    for (std::size_t j = 0; j < fractions.size(); ++j) {
      if (fractions[j] < 0 || fractions[j] > 1)
        throw Error(ErrorKind::RedOutOfRange,
                    "stratum " + std::to_string(j) + " fraction " + to_string(fractions[j]) +
                        " outside [0, 1]",
                    j);
      d.total_red_ += fractions[j] * population.size(j);
    }
    d.fractions_ = std::move(fractions);
    return d;
  }

  RedMode mode() const noexcept { return mode_; }
  std::size_t m() const noexcept { return fractions_.size(); }
  const Ratio& fraction(std::size_t j) const { return fractions_.at(j); }
  std::span<const Ratio> fractions() const noexcept { return fractions_; }

  /// Integer-mode counts; empty in rational mode.
  std::span<const Count> counts() const noexcept { return counts_; }

  /// pN, the number of red balls (integral in integer mode).
  const Ratio& total_red() const noexcept { return total_red_; }
  Ratio p() const { return total_red_ / population_total_; }

  bool operator==(const RedDistribution&) const = default;

 private:
  RedDistribution() = default;

  RedMode mode_ = RedMode::Integer;
  std::vector<Ratio> fractions_;
  std::vector<Count> counts_;
  Ratio total_red_{0};
  Count population_total_ = 0;
};

/// One fully validated instance: strata, red balls, and sample sizes.
class Scenario {
 public:
  Scenario(StratifiedPopulation population, RedDistribution distribution, Allocation allocation)
      : population_(std::move(population)),
        distribution_(std::move(distribution)),
        allocation_(std::move(allocation)) {
    if (distribution_.m() != population_.m() || allocation_.m() != population_.m())
      throw Error(ErrorKind::DimensionMismatch, "scenario components disagree on stratum count");
  }

  const StratifiedPopulation& population() const noexcept { return population_; }
  const RedDistribution& distribution() const noexcept { return distribution_; }
  const Allocation& allocation() const noexcept { return allocation_; }

  std::size_t m() const noexcept { return population_.m(); }
  Count N() const noexcept { return population_.N(); }
  Count n() const noexcept { return allocation_.n(); }
  Ratio p() const { return distribution_.p(); }

  bool operator==(const Scenario&) const = default;

 private:
  StratifiedPopulation population_;
  RedDistribution distribution_;
  Allocation allocation_;
};

inline Scenario build_scenario(std::vector<Count> sizes, std::vector<Count> reds,
                               std::vector<Count> counts) {
  StratifiedPopulation population(std::move(sizes));
  auto distribution = RedDistribution::from_counts(population, std::move(reds));
  Allocation allocation(population, std::move(counts));
  return Scenario(std::move(population), std::move(distribution), std::move(allocation));
}

inline Scenario build_scenario(std::vector<Count> sizes, std::vector<Ratio> fractions,
                               std::vector<Count> counts) {
  StratifiedPopulation population(std::move(sizes));
  auto distribution = RedDistribution::from_fractions(population, std::move(fractions));
  Allocation allocation(population, std::move(counts));
  return Scenario(std::move(population), std::move(distribution), std::move(allocation));
}

// ---------------------------------------------------------------------------
// Allocation classes

enum class AllocationClass { All, ThreeQuarters, Proportional, Admissible };

constexpr std::string_view to_string(AllocationClass cls) {
  switch (cls) {
    case AllocationClass::All: return "all";
    case AllocationClass::ThreeQuarters: return "three-quarters";
    case AllocationClass::Proportional: return "proportional";
    case AllocationClass::Admissible: return "admissible";
  }
  return "unknown";
}

inline AllocationClass parse_allocation_class(std::string_view text) {
  for (auto cls : {AllocationClass::All, AllocationClass::ThreeQuarters,
                   AllocationClass::Proportional, AllocationClass::Admissible})
    if (text == to_string(cls)) return cls;
  throw Error(ErrorKind::InvalidArgument, "unknown allocation class '" + std::string(text) + "'");
}

/// n_j N == n N_j for every stratum.
inline bool is_proportional(const StratifiedPopulation& population, const Allocation& allocation) {
  for (std::size_t j = 0; j < population.m(); ++j)
    if (allocation.count(j) * population.N() != allocation.n() * population.size(j)) return false;
  return true;
}

/// n_j <= (3/4) N_j for every stratum.
inline bool is_three_quarters(const StratifiedPopulation& population, const Allocation& allocation) {
  for (std::size_t j = 0; j < population.m(); ++j)
    if (4 * allocation.count(j) > 3 * population.size(j)) return false;
  return true;
}

inline bool in_class(const StratifiedPopulation& population, const Allocation& allocation,
                     AllocationClass cls) {
  switch (cls) {
    case AllocationClass::All: return true;
    case AllocationClass::ThreeQuarters: return is_three_quarters(population, allocation);
    case AllocationClass::Proportional: return is_proportional(population, allocation);
    case AllocationClass::Admissible:
      return is_three_quarters(population, allocation) || is_proportional(population, allocation);
  }
  return false;
}

/// The exactly proportional allocation n_j = n N_j / N. Never rounds.
inline Allocation proportional_allocation(const StratifiedPopulation& population, Count n) {
  if (n < 0 || n > population.N())
    throw Error(ErrorKind::InvalidArgument,
                "sample size " + std::to_string(n) + " outside [1, " + std::to_string(population.N()) + "]");
  std::vector<Count> counts(population.m());
  for (std::size_t j = 0; j < population.m(); ++j) {
    const Count scaled = n * population.size(j);
    if (scaled % population.N() != 0)
      throw Error(ErrorKind::NotProportionable,
                  "n N_j / N = " + std::to_string(scaled) + "/" + std::to_string(population.N()) +
                      " is not an integer for stratum " + std::to_string(j),
                  j);
    counts[j] = scaled / population.N();
    if (counts[j] == 0)
      throw Error(ErrorKind::ZeroStratum, "stratum " + std::to_string(j) + " would receive no sample", j);
  }
  return Allocation(population, std::move(counts));
}

// ---------------------------------------------------------------------------
// Bounded compositions

namespace detail {

/// Number of integer vectors x with lo <= x <= hi componentwise summing to
/// total, saturating at `saturate`.
inline std::uint64_t count_bounded_compositions(std::span<const Count> lo, std::span<const Count> hi,
                                                Count total, std::uint64_t saturate) {
  if (total < 0) return 0;
  std::vector<std::uint64_t> ways(static_cast<std::size_t>(total) + 1, 0);
  ways[0] = 1;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    std::vector<std::uint64_t> next(ways.size(), 0);
    for (Count s = 0; s <= total; ++s) {
      if (ways[static_cast<std::size_t>(s)] == 0) continue;
      for (Count v = lo[j]; v <= hi[j] && s + v <= total; ++v) {
        auto& slot = next[static_cast<std::size_t>(s + v)];
        slot = std::min(saturate, slot + ways[static_cast<std::size_t>(s)]);
      }
    }
    ways = std::move(next);
  }
  return ways[static_cast<std::size_t>(total)];
}

/// Visits compositions in lexicographic order. When `first` is set only the
/// branch with x_0 == *first is visited.
inline void for_each_bounded_composition(std::span<const Count> lo, std::span<const Count> hi,
                                         Count total,
                                         const std::function<void(std::span<const Count>)>& visit,
                                         std::optional<Count> first = std::nullopt) {
  const std::size_t m = lo.size();
  std::vector<Count> suffix_lo(m + 1, 0), suffix_hi(m + 1, 0);
  for (std::size_t j = m; j-- > 0;) {
    suffix_lo[j] = suffix_lo[j + 1] + lo[j];
    suffix_hi[j] = suffix_hi[j + 1] + hi[j];
  }
  if (total < suffix_lo[0] || total > suffix_hi[0]) return;

  std::vector<Count> current(m, 0);
  std::function<void(std::size_t, Count)> recurse = [&](std::size_t j, Count remaining) {
    if (j == m) {
      visit(current);
      return;
    }
    Count from = std::max(lo[j], remaining - suffix_hi[j + 1]);
    Count to = std::min(hi[j], remaining - suffix_lo[j + 1]);
    if (j == 0 && first) {
      from = std::max(from, *first);
      to = std::min(to, *first);
    }
    for (Count v = from; v <= to; ++v) {
      current[j] = v;
      recurse(j + 1, remaining - v);
    }
  };
  recurse(0, total);
}

inline void check_cap(std::uint64_t count, const SearchLimits& limits, std::string_view what) {
  if (count > limits.max_items)
    throw Error(ErrorKind::SearchSpaceExceeded,
                std::string(what) + " search space exceeds cap of " + std::to_string(limits.max_items));
}

}  // namespace detail

/// Number of integer-mode distributions of `total_red` balls over the strata.
inline std::uint64_t count_distributions(const StratifiedPopulation& population, Count total_red,
                                         std::uint64_t saturate = std::numeric_limits<std::uint64_t>::max()) {
  std::vector<Count> lo(population.m(), 0);
  std::vector<Count> hi(population.sizes().begin(), population.sizes().end());
  return detail::count_bounded_compositions(lo, hi, total_red, saturate);
}

/// Visits every integer-mode distribution of `total_red` red balls exactly
/// once, lexicographically ascending.
inline void for_each_distribution(const StratifiedPopulation& population, Count total_red,
                                  const std::function<void(const RedDistribution&)>& visit,
                                  const SearchLimits& limits = {}) {
  if (total_red < 0 || total_red > population.N())
    throw Error(ErrorKind::InvalidArgument,
                "red total " + std::to_string(total_red) + " outside [0, " + std::to_string(population.N()) + "]");
  detail::check_cap(count_distributions(population, total_red, limits.max_items + 1), limits, "distribution");
  std::vector<Count> lo(population.m(), 0);
  std::vector<Count> hi(population.sizes().begin(), population.sizes().end());
  detail::for_each_bounded_composition(lo, hi, total_red, [&](std::span<const Count> reds) {
    visit(RedDistribution::from_counts(population, {reds.begin(), reds.end()}));
  });
}

inline std::vector<RedDistribution> enumerate_distributions(const StratifiedPopulation& population,
                                                            Count total_red, const SearchLimits& limits = {}) {
  std::vector<RedDistribution> out;
  for_each_distribution(population, total_red, [&](const RedDistribution& d) { out.push_back(d); }, limits);
  return out;
}

namespace detail {

inline std::vector<Count> class_upper_bounds(const StratifiedPopulation& population, AllocationClass cls) {
  std::vector<Count> hi(population.sizes().begin(), population.sizes().end());
  if (cls == AllocationClass::ThreeQuarters || cls == AllocationClass::Admissible)
    for (auto& h : hi) h = (3 * h) / 4;
  return hi;
}

inline std::optional<Allocation> try_proportional(const StratifiedPopulation& population, Count n) {
  try {
    return proportional_allocation(population, n);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Number of allocations of total n in the class.
inline std::uint64_t count_allocations(const StratifiedPopulation& population, Count n, AllocationClass cls,
                                       std::uint64_t saturate = std::numeric_limits<std::uint64_t>::max()) {
  if (cls == AllocationClass::Proportional) return detail::try_proportional(population, n) ? 1 : 0;
  std::vector<Count> lo(population.m(), 1);
  const auto hi = detail::class_upper_bounds(population, cls);
  std::uint64_t count = detail::count_bounded_compositions(lo, hi, n, saturate);
  if (cls == AllocationClass::Admissible) {
    if (auto prop = detail::try_proportional(population, n); prop && !is_three_quarters(population, *prop))
      count = std::min(saturate, count + 1);
  }
  return count;
}

/// Visits every allocation of total n in the class exactly once,
/// lexicographically ascending. Throws EmptyClass when nothing qualifies.
inline void for_each_allocation(const StratifiedPopulation& population, Count n, AllocationClass cls,
                                const std::function<void(const Allocation&)>& visit,
                                const SearchLimits& limits = {}) {
  if (n < static_cast<Count>(population.m()) || n > population.N())
    throw Error(ErrorKind::InvalidArgument, "sample size " + std::to_string(n) + " outside [" +
                                                std::to_string(population.m()) + ", " +
                                                std::to_string(population.N()) + "]");
  const std::uint64_t count = count_allocations(population, n, cls, limits.max_items + 1);
  detail::check_cap(count, limits, "allocation");
  if (count == 0)
    throw Error(ErrorKind::EmptyClass, "no " + std::string(to_string(cls)) + " allocation with n = " +
                                           std::to_string(n));

  if (cls == AllocationClass::Proportional) {
    visit(proportional_allocation(population, n));
    return;
  }

  std::optional<Allocation> extra;
  if (cls == AllocationClass::Admissible) {
    extra = detail::try_proportional(population, n);
    if (extra && is_three_quarters(population, *extra)) extra.reset();
  }

  std::vector<Count> lo(population.m(), 1);
  const auto hi = detail::class_upper_bounds(population, cls);
  detail::for_each_bounded_composition(lo, hi, n, [&](std::span<const Count> counts) {
    if (extra && std::lexicographical_compare(extra->counts().begin(), extra->counts().end(), counts.begin(),
                                              counts.end())) {
      visit(*extra);
      extra.reset();
    }
    visit(Allocation(population, {counts.begin(), counts.end()}));
  });
  if (extra) visit(*extra);
}

inline std::vector<Allocation> enumerate_allocations(const StratifiedPopulation& population, Count n,
                                                     AllocationClass cls, const SearchLimits& limits = {}) {
  std::vector<Allocation> out;
  for_each_allocation(population, n, cls, [&](const Allocation& a) { out.push_back(a); }, limits);
  return out;
}

}  // namespace stratvar

#endif  // STRATVAR_MODEL_HPP
