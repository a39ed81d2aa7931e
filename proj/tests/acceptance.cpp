// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "stratvar.hpp"

using namespace stratvar;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string theorem_detail(const TheoremReport& r) {
  std::ostringstream os;
  os << r.instances << " checks, " << r.failures << " failures";
  if (r.counterexample) os << "; first: " << r.failure_detail;
  return os.str();
}

Outcome theorem(TheoremId id, const SweepRanges& ranges) {
  const auto r = check_theorem(id, ranges, {SearchLimits{}, 4});
  return {r.holds() && r.instances > 0, theorem_detail(r)};
}

SweepRanges ranges(Count max_N, std::size_t max_m, Count max_stratum = 0) {
  SweepRanges r;
  r.max_N = max_N;
  r.max_m = max_m;
  r.max_stratum = max_stratum;
  return r;
}

// Simple-without variance equals the hypergeometric variance of Y/n.
Outcome hypergeometric_link() {
  std::size_t checked = 0;
  for (Count N = 2; N <= 30; ++N)
    for (Count red = 0; red <= N; ++red)
      for (Count n = 1; n <= N; ++n) {
        ++checked;
        if (var_simple_without(N, red, n) != brute::hypergeometric_variance(N, red, n))
          return {false, "N=" + std::to_string(N) + " red=" + std::to_string(red) + " n=" + std::to_string(n)};
        if (n < N && N > 1 && var_simple_without(N, red, n) > var_simple_with(ratio(red, N), n))
          return {false, "finite population correction increased the variance"};
      }
  return {true, std::to_string(checked) + " (N, red, n) triples"};
}

Outcome exhaustive_link() {
  std::size_t checked = 0;
  for (Count N = 2; N <= 12; ++N)
    for (Count red = 0; red <= N; ++red)
      for (Count n = 1; n <= N; ++n) {
        ++checked;
        if (exhaustive_variance_Y(N, red, n) != var_simple_without(N, red, n))
          return {false, "N=" + std::to_string(N) + " red=" + std::to_string(red) + " n=" + std::to_string(n)};
      }
  return {true, std::to_string(checked) + " triples enumerated subset by subset"};
}

Outcome counterexample() {
  const auto s = build_scenario({2, 5}, std::vector<Ratio>{Ratio(1, 2), Ratio(1, 2)}, {2, 4});
  const Ratio v = var_strat_without(s);
  const Ratio b = bound_B(7, 2, 6, Ratio(1, 2));
  const bool pass = v == Ratio(25, 3136) && b == Ratio(1, 120) && v < b && v > Ratio(1, 144);
  return {pass, "variance " + to_string(v) + ", B " + to_string(b)};
}

Outcome monte_carlo() {
  struct Case {
    Scenario scenario;
    EstimatorKind kind;
    std::uint64_t trials, seed;
  };
  const std::vector<Case> cases{
      {build_scenario({5, 5}, std::vector<Count>{2, 2}, {2, 2}), EstimatorKind::StratWithout, 1'000'000, 1},
      {build_scenario({4, 6}, std::vector<Count>{1, 4}, {2, 3}), EstimatorKind::StratWithout, 400'000, 2},
      {build_scenario({3, 7, 5}, std::vector<Count>{1, 3, 5}, {2, 4, 1}), EstimatorKind::StratWith, 400'000, 3},
      {build_scenario({3, 4}, std::vector<Count>{1, 2}, {3, 3}), EstimatorKind::SimpleWithout, 400'000, 4},
      {build_scenario({6, 6}, std::vector<Count>{2, 3}, {3, 3}), EstimatorKind::SimpleWith, 400'000, 5},
  };
  std::ostringstream os;
  bool pass = true;
  for (const auto& c : cases) {
    SimConfig config{c.scenario, c.kind, c.trials, c.seed, 1};
    const auto one = estimate(config);
    bool identical = true;
    for (unsigned w : {2u, 8u}) {
      config.workers = w;
      const auto many = estimate(config);
      identical = identical && std::memcmp(&one.mean, &many.mean, sizeof(double)) == 0 &&
                  std::memcmp(&one.variance, &many.variance, sizeof(double)) == 0;
    }
    const bool ok = std::abs(one.z) <= 4 && std::abs(one.mean_z) <= 4 && identical;
    pass = pass && ok;
    os << to_string(c.kind) << " z=" << format_decimal(std::round(one.z * 100) / 100) << (identical ? "" : " (worker drift)")
       << "; ";
  }
  return {pass, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"simple-without variance matches the hypergeometric law, N<=30", hypergeometric_link},
      {"exhaustive subset enumeration matches closed form, N<=12", exhaustive_link},
      {"proportional decomposition identity, N<=20, m<=3",
       [] { return theorem(TheoremId::ProportionalIdentity, ranges(20, 3)); }},
      {"theorem 1: proportional beats simple without replacement, N<=16, m<=3",
       [] { return theorem(TheoremId::One, ranges(16, 3)); }},
      {"theorem 2: without replacement beats with replacement, N<=14, m<=3",
       [] { return theorem(TheoremId::Two, ranges(14, 3)); }},
      {"theorem 3: equal-fraction lower bound B with equality characterised, N<=14, m<=3",
       [] { return theorem(TheoremId::Three, ranges(14, 3)); }},
      {"counterexample (2,5)/(2,4) at p=1/2 is 25/3136, below B=1/120 and above 1/144", counterexample},
      {"theorem 4: equal strata worst case is B, strata up to 7, m<=4",
       [] { return theorem(TheoremId::Four, ranges(28, 4, 7)); }},
      {"theorem 5: minimax sandwich and upper bound, N<=14",
       [] { return theorem(TheoremId::Five, ranges(14, 7)); }},
      {"increasing every stratum by one sample never beats simple sampling, strata up to 7",
       [] { return theorem(TheoremId::IncreaseByOne, ranges(28, 4, 7)); }},
      {"Monte Carlo agrees with exact variances and is worker-count invariant", monte_carlo},
  };

  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << index << "] " << name << " -- " << o.detail << " ("
              << std::round(secs * 10) / 10 << "s)" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed ? 1 : 0;
}
