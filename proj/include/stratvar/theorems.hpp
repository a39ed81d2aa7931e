#ifndef STRATVAR_THEOREMS_HPP
#define STRATVAR_THEOREMS_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stratvar/error.hpp"
#include "stratvar/model.hpp"
#include "stratvar/oracle.hpp"
#include "stratvar/ratio.hpp"
#include "stratvar/variance.hpp"

namespace stratvar {

/// One..Five are the comparison theorems; ProportionalIdentity is the
/// with-replacement decomposition under proportional allocation and
/// IncreaseByOne the "one more ball per stratum" corollary.
enum class TheoremId { One, Two, Three, Four, Five, ProportionalIdentity, IncreaseByOne };

constexpr std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::One: return "1";
    case TheoremId::Two: return "2";
    case TheoremId::Three: return "3";
    case TheoremId::Four: return "4";
    case TheoremId::Five: return "5";
    case TheoremId::ProportionalIdentity: return "E2";
    case TheoremId::IncreaseByOne: return "INC";
  }
  return "?";
}

inline TheoremId parse_theorem_id(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto id : {TheoremId::One, TheoremId::Two, TheoremId::Three, TheoremId::Four, TheoremId::Five,
                  TheoremId::ProportionalIdentity, TheoremId::IncreaseByOne})
    if (upper == to_string(id)) return id;
  throw Error(ErrorKind::UnknownTheoremId, "unknown theorem id '" + std::string(text) + "'");
}

/// Inclusive sweep bounds, stride 1. Populations are every ordered tuple of
/// stratum sizes (each >= 2) with N in [min_N, max_N] and m in [min_m, max_m].
struct SweepRanges {
  Count min_N = 4;
  Count max_N = 12;
  std::size_t min_m = 2;
  std::size_t max_m = 3;
  /// Upper limit on N_j for the equal-strata sweeps (4 and INC); 0 means
  /// only max_N applies.
  Count max_stratum = 0;
  /// Common red fraction used by the rational-mode sweeps (1, 2, 3).
  std::vector<Ratio> fractions{Ratio(1, 4), Ratio(1, 2), Ratio(3, 4)};
  /// Also visit instances outside the hypotheses and record where the
  /// conclusion breaks; such probes never count as failures.
  bool adversarial = false;
};

struct Probe {
  Scenario scenario;
  Ratio value;
  Ratio bound;
  std::string note;
};

struct TheoremReport {
  TheoremId id;
  SweepRanges ranges;
  std::uint64_t instances = 0;
  std::uint64_t failures = 0;
  std::optional<Scenario> counterexample;
  std::string failure_detail;
  std::vector<Scenario> equality_witnesses;
  std::vector<Probe> probes;

  bool holds() const noexcept { return failures == 0; }
};

namespace detail {

inline void for_each_ordered_sizes(Count N, std::size_t m, const std::function<void(std::vector<Count>)>& visit) {
  std::vector<Count> lo(m, 2), hi(m, N);
  for_each_bounded_composition(lo, hi, N, [&](std::span<const Count> s) { visit({s.begin(), s.end()}); });
}

inline void for_each_population(const SweepRanges& r, const std::function<void(const StratifiedPopulation&)>& visit) {
  for (Count N = std::max<Count>(r.min_N, 4); N <= r.max_N; ++N)
    for (std::size_t m = std::max<std::size_t>(r.min_m, 2); m <= r.max_m && static_cast<Count>(2 * m) <= N; ++m)
      for_each_ordered_sizes(N, m, [&](std::vector<Count> sizes) { visit(StratifiedPopulation(std::move(sizes))); });
}

/// Every allocation (n_j in [1, N_j]) regardless of total.
inline void for_each_any_allocation(const StratifiedPopulation& pop, const std::function<void(const Allocation&)>& visit) {
  for (Count n = static_cast<Count>(pop.m()); n <= pop.N(); ++n)
    for_each_allocation(pop, n, AllocationClass::All, visit);
}

inline bool all_equal_split(const StratifiedPopulation& pop, const Allocation& alloc) {
  const Count m = static_cast<Count>(pop.m());
  for (std::size_t j = 0; j < pop.m(); ++j)
    if (alloc.count(j) * m != alloc.n() || pop.size(j) * m != pop.N()) return false;
  return true;
}

inline bool equal_sizes(const StratifiedPopulation& pop) {
  return std::adjacent_find(pop.sizes().begin(), pop.sizes().end(), std::not_equal_to<>()) == pop.sizes().end();
}

class Tally {
 public:
  explicit Tally(TheoremReport& report) : report_(report) {}

  void check(bool ok, const Scenario& scenario, const std::string& detail) {
    ++report_.instances;
    if (ok) return;
    ++report_.failures;
    if (!report_.counterexample) {
      report_.counterexample = scenario;
      report_.failure_detail = detail;
    }
  }

 private:
  TheoremReport& report_;
};

inline Scenario equal_fraction_scenario(const StratifiedPopulation& pop, const Ratio& p, const Allocation& alloc) {
  return Scenario(pop, RedDistribution::from_fractions(pop, std::vector<Ratio>(pop.m(), p)), alloc);
}

inline void check_one(TheoremReport& report, const SearchOptions&) {
  Tally tally(report);
  for_each_population(report.ranges, [&](const StratifiedPopulation& pop) {
    for_each_any_allocation(pop, [&](const Allocation& alloc) {
      const bool proportional = is_proportional(pop, alloc);
      for (const auto& p : report.ranges.fractions) {
        if (p <= 0 || p >= 1) continue;
        const auto s = equal_fraction_scenario(pop, p, alloc);
        const Ratio strat = var_strat_with(s);
        const Ratio simple = var_simple_with(p, alloc.n());
        if (proportional) {
          // equality exactly at proportional allocations
          tally.check(strat == simple, s, "proportional allocation but strat-with " + to_string(strat) +
                                              " != simple-with " + to_string(simple));
          if (strat == simple) report.equality_witnesses.push_back(s);
        } else {
          tally.check(strat > simple, s, "strat-with " + to_string(strat) + " <= simple-with " + to_string(simple));
        }
      }
    });
  });
}

inline void check_two(TheoremReport& report, const SearchOptions&) {
  Tally tally(report);
  for_each_population(report.ranges, [&](const StratifiedPopulation& pop) {
    for (Count n = static_cast<Count>(pop.m()); n < pop.N(); ++n) {
      for_each_allocation(pop, n, AllocationClass::All, [&](const Allocation& alloc) {
        for (const auto& p : report.ranges.fractions) {
          if (p <= 0 || p >= 1) continue;
          const auto s = equal_fraction_scenario(pop, p, alloc);
          const Ratio strat = var_strat_without(s);
          const Ratio simple = var_simple_without(pop.N(), p, n);
          tally.check(strat > simple, s,
                      "strat-without " + to_string(strat) + " <= simple-without " + to_string(simple));
        }
      });
    }
  });
}

inline void check_three(TheoremReport& report, const SearchOptions&) {
  Tally tally(report);
  for_each_population(report.ranges, [&](const StratifiedPopulation& pop) {
    const Count N = pop.N();
    const Count m = static_cast<Count>(pop.m());
    for (Count n = m; n < N; ++n) {
      for_each_allocation(pop, n, AllocationClass::All, [&](const Allocation& alloc) {
        const bool hypotheses = is_three_quarters(pop, alloc) || is_proportional(pop, alloc) || equal_sizes(pop);
        if (!hypotheses && !report.ranges.adversarial) return;
        for (const auto& p : report.ranges.fractions) {
          if (p <= 0 || p >= 1) continue;
          const auto s = equal_fraction_scenario(pop, p, alloc);
          const Ratio strat = var_strat_without(s);
          const Ratio bound = bound_B(N, m, n, p);
          if (!hypotheses) {
            if (strat < bound)
              report.probes.push_back({s, strat, bound, "below B outside (c1)/(c2)/(c3), as expected"});
            continue;
          }
          const bool equal_case = all_equal_split(pop, alloc);
          tally.check(strat >= bound, s, "strat-without " + to_string(strat) + " < B " + to_string(bound));
          if (strat == bound) {
            if (!equal_case) {
              tally.check(false, s, "equality with B outside n_j = n/m, N_j = N/m");
            } else {
              report.equality_witnesses.push_back(s);
            }
          } else if (equal_case) {
            tally.check(false, s, "n_j = n/m, N_j = N/m but strat-without " + to_string(strat) + " != B " +
                                      to_string(bound));
          }
        }
      });
    }
  });
}

/// Equal strata N_j = N/m and equal allocation n_j = n/m with n < N.
inline void for_each_equal_setting(const SweepRanges& r,
                                   const std::function<void(const StratifiedPopulation&, const Allocation&)>& visit) {
  for (std::size_t m = std::max<std::size_t>(r.min_m, 2); m <= r.max_m; ++m) {
    for (Count size = 2;; ++size) {
      const Count N = size * static_cast<Count>(m);
      if (N > r.max_N || (r.max_stratum > 0 && size > r.max_stratum)) break;
      if (N < r.min_N) continue;
      StratifiedPopulation pop(std::vector<Count>(m, size));
      for (Count k = 1; k < size; ++k) visit(pop, Allocation(pop, std::vector<Count>(m, k)));
    }
  }
}

inline void check_four(TheoremReport& report, const SearchOptions& options) {
  Tally tally(report);
  for_each_equal_setting(report.ranges, [&](const StratifiedPopulation& pop, const Allocation& alloc) {
    const Count N = pop.N();
    const Count m = static_cast<Count>(pop.m());
    for (Count R = 0; R <= N; ++R) {
      const auto maximizers = nature_maximizers(pop, alloc, R, options);
      const Ratio value = var_strat_without(Scenario(pop, maximizers.front(), alloc));
      const Ratio bound = bound_B(N, m, alloc.n(), ratio(R, N));
      const Scenario s(pop, maximizers.front(), alloc);
      if (R % m == 0) {
        const auto split = RedDistribution::from_counts(pop, std::vector<Count>(pop.m(), R / m));
        tally.check(value == bound, s, "max " + to_string(value) + " != B " + to_string(bound));
        tally.check(maximizers.size() == 1 && maximizers.front() == split, s,
                    "maximizer set is not exactly the equal split");
        if (value == bound) report.equality_witnesses.push_back(s);
      } else {
        // no equal split exists, so the maximum must stay strictly below B
        tally.check(value < bound, s, "max " + to_string(value) + " >= B " + to_string(bound) +
                                          " without an equal split");
      }
    }
  });
}

inline void check_increase_by_one(TheoremReport& report, const SearchOptions&) {
  Tally tally(report);
  for_each_equal_setting(report.ranges, [&](const StratifiedPopulation& pop, const Allocation& alloc) {
    const Count N = pop.N();
    const Count m = static_cast<Count>(pop.m());
    const Count n = alloc.n();
    std::vector<Count> bumped(pop.m(), alloc.count(0) + 1);
    const Allocation next(pop, bumped);
    for (Count R = 0; R <= N; ++R) {
      const Ratio p = ratio(R, N);
      const Ratio after = bound_B(N, m, n + m, p);
      const Ratio before = var_simple_without(N, p, n);
      const Scenario s(pop, RedDistribution::from_fractions(pop, std::vector<Ratio>(pop.m(), p)), next);
      tally.check(after <= before, s, "B at n+m " + to_string(after) + " > simple-without at n " + to_string(before));
    }
  });
}

inline void check_proportional_identity(TheoremReport& report, const SearchOptions& options) {
  Tally tally(report);
  for_each_population(report.ranges, [&](const StratifiedPopulation& pop) {
    for (Count n = static_cast<Count>(pop.m()); n <= pop.N(); ++n) {
      std::optional<Allocation> alloc;
      try {
        alloc = proportional_allocation(pop, n);
      } catch (const Error&) {
        continue;
      }
      for (Count R = 0; R <= pop.N(); ++R) {
        for_each_distribution(
            pop, R,
            [&](const RedDistribution& d) {
              const Scenario s(pop, d, *alloc);
              const auto parts = proportional_decomposition(s);
              const Ratio direct = var_strat_with(s);
              const auto fr = d.fractions();
              const bool homogeneous = std::adjacent_find(fr.begin(), fr.end(), std::not_equal_to<>()) == fr.end();
              tally.check(direct == parts.simple_with - parts.heterogeneity, s,
                          "strat-with " + to_string(direct) + " != " + to_string(parts.simple_with) + " - " +
                              to_string(parts.heterogeneity));
              tally.check(parts.heterogeneity >= 0 && (parts.heterogeneity == 0) == homogeneous, s,
                          "heterogeneity term " + to_string(parts.heterogeneity) + " has the wrong sign or zero set");
            },
            options.limits);
      }
    }
  });
}

inline void check_five(TheoremReport& report, const SearchOptions& options) {
  Tally tally(report);
  for_each_population(report.ranges, [&](const StratifiedPopulation& pop) {
    const Count N = pop.N();
    const Count m = static_cast<Count>(pop.m());
    for (Count n = m; n < N; ++n) {
      for (Count R = 1; R < N; ++R) {
        if (!minimax_hypotheses_hold(pop, n, R)) continue;
        const Ratio p = ratio(R, N);
        const auto result = minimax_value(pop, n, R, AllocationClass::Admissible, options);
        const Scenario s(pop, result.distribution, result.allocation);
        const Ratio& lower = *result.lower_bound;
        const Ratio& upper = *result.upper_bound;
        tally.check(lower <= result.value, s, "minimax " + to_string(result.value) + " < B " + to_string(lower));
        tally.check(result.value <= upper, s,
                    "minimax " + to_string(result.value) + " > upper bound " + to_string(upper));
        if (!equal_sizes(pop))
          tally.check(lower < result.value, s, "unequal strata but minimax equals B " + to_string(lower));
        else if (lower == result.value)
          report.equality_witnesses.push_back(s);

        // Nature's maximum under the proportional allocation already meets the bound.
        const auto prop = proportional_allocation(pop, n);
        const auto worst = worst_nature(pop, prop, R, options);
        tally.check(worst.value <= upper, Scenario(pop, *worst.distribution, prop),
                    "proportional max " + to_string(worst.value) + " > upper bound " + to_string(upper));
        tally.check(worst.value <= nature_relaxed_max(pop, prop, p).value, Scenario(pop, *worst.distribution, prop),
                    "whole-ball maximum exceeds the relaxed maximum");

        if (4 * n <= 3 * N) {
          const Ratio simple = var_simple_with(p, n);
          tally.check(upper <= simple, s, "upper bound " + to_string(upper) + " > p(1-p)/n " + to_string(simple));
        }
      }
    }
  });
}

}  // namespace detail

/// Sweeps every instance in `ranges` that satisfies the theorem's
/// hypotheses and records the first violation, if any.
inline TheoremReport check_theorem(TheoremId id, const SweepRanges& ranges, const SearchOptions& options = {}) {
  TheoremReport report;
  report.id = id;
  report.ranges = ranges;
  switch (id) {
    case TheoremId::One: detail::check_one(report, options); break;
    case TheoremId::Two: detail::check_two(report, options); break;
    case TheoremId::Three: detail::check_three(report, options); break;
    case TheoremId::Four: detail::check_four(report, options); break;
    case TheoremId::Five: detail::check_five(report, options); break;
    case TheoremId::ProportionalIdentity: detail::check_proportional_identity(report, options); break;
    case TheoremId::IncreaseByOne: detail::check_increase_by_one(report, options); break;
  }
  return report;
}

}  // namespace stratvar

#endif  // STRATVAR_THEOREMS_HPP
