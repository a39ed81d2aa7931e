#ifndef STRATVAR_CLI_HPP
#define STRATVAR_CLI_HPP

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stratvar/error.hpp"
#include "stratvar/io.hpp"
#include "stratvar/model.hpp"
#include "stratvar/oracle.hpp"
#include "stratvar/simulate.hpp"
#include "stratvar/theorems.hpp"
#include "stratvar/variance.hpp"

namespace stratvar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPropertyFailure = 2;

/// Environment variable holding the enumeration cap; --cap overrides it.
inline constexpr const char* kCapEnv = "STRATVAR_CAP";

struct Options {
  std::string scenario_file;
  std::string sizes, reds, alloc;
  std::string format = "table";
  std::optional<std::uint64_t> cap;
  unsigned threads = 1;

  std::string kind;
  std::string cls = "admissible";
  std::optional<Count> n, total_red;

  std::string theorem_id = "all";
  Count min_N = 4, max_N = 12, max_stratum = 0;
  std::size_t min_m = 2, max_m = 3;
  std::string fractions = "1/4,1/2,3/4";
  bool adversarial = false;

  std::uint64_t trials = 100'000, seed = 0;
  unsigned workers = 1;
};

namespace detail {

inline SearchLimits limits_from(const Options& o) {
  SearchLimits limits;
  if (const char* env = std::getenv(kCapEnv); env && *env) {
    try {
      limits.max_items = std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, std::string(kCapEnv) + " is not a number: '" + env + "'");
    }
  }
  if (o.cap) limits.max_items = *o.cap;
  return limits;
}

inline SearchOptions search_from(const Options& o) { return {limits_from(o), o.threads}; }

/// Scenario file first, then any flags on top of it.
inline ScenarioInput input_from(const Options& o) {
  ScenarioInput in;
  if (!o.scenario_file.empty()) in = read_scenario_file(o.scenario_file);
  if (!o.sizes.empty()) in.sizes = parse_count_list(o.sizes);
  if (!o.reds.empty()) in.reds = parse_reds_list(o.reds);
  if (!o.alloc.empty()) in.alloc = parse_count_list(o.alloc);
  if (in.sizes.empty()) throw Error(ErrorKind::InvalidArgument, "stratum sizes are required (--sizes or --scenario)");
  return in;
}

inline Count require(const std::optional<Count>& v, const char* flag) {
  if (!v) throw Error(ErrorKind::InvalidArgument, std::string(flag) + " is required");
  return *v;
}

inline void emit_json(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

inline std::vector<EstimatorKind> kinds_from(const std::string& text) {
  if (text.empty() || text == "all")
    return {EstimatorKind::SimpleWith, EstimatorKind::SimpleWithout, EstimatorKind::StratWith,
            EstimatorKind::StratWithout};
  return {parse_estimator_kind(text)};
}

inline int cmd_variance(const Options& o, std::ostream& out) {
  const auto scenario = input_from(o).scenario();
  const auto kinds = kinds_from(o.kind);
  std::vector<VarianceReport> reports;
  for (auto k : kinds) reports.push_back(variance_report(k, scenario));
  if (o.format == "json") {
    if (reports.size() == 1) {
      emit_json(out, to_json(reports.front()));
    } else {
      Json all = Json::array();
      for (const auto& r : reports) all.push_back(to_json(r));
      emit_json(out, all);
    }
  } else if (o.format == "csv") {
    out << kVarianceCsvHeader << '\n';
    for (const auto& r : reports) out << csv_row(r) << '\n';
  } else {
    Table t;
    t.row("sizes", join_plain(scenario.population().sizes()))
        .row("reds", reds_plain(scenario.distribution()))
        .row("alloc", join_plain(scenario.allocation().counts()));
    for (const auto& r : reports) t.exact(std::string(to_string(r.kind)), r.exact);
    out << t;
  }
  return kExitOk;
}

inline int cmd_decompose(const Options& o, std::ostream& out) {
  const auto scenario = input_from(o).scenario();
  const auto parts = proportional_decomposition(scenario);
  const Ratio strat = var_strat_with(scenario);
  const bool identity = strat == parts.simple_with - parts.heterogeneity;
  if (o.format == "json") {
    Json j;
    j["scenario"] = scenario_json(scenario);
    j["simple_with"] = exact_json(parts.simple_with);
    j["heterogeneity"] = exact_json(parts.heterogeneity);
    j["strat_with"] = exact_json(strat);
    j["identity_holds"] = identity;
    emit_json(out, j);
  } else if (o.format == "csv") {
    out << "sizes,reds,alloc,simple_with,heterogeneity,strat_with,identity_holds\n"
        << join_counts(scenario.population().sizes()) << ',' << join_reds(scenario.distribution()) << ','
        << join_counts(scenario.allocation().counts()) << ',' << to_string(parts.simple_with) << ','
        << to_string(parts.heterogeneity) << ',' << to_string(strat) << ',' << (identity ? "true" : "false") << '\n';
  } else {
    Table t;
    t.exact("simple-with", parts.simple_with)
        .exact("heterogeneity", parts.heterogeneity)
        .exact("strat-with", strat)
        .row("identity", identity ? "holds" : "FAILS");
    out << t;
  }
  return identity ? kExitOk : kExitPropertyFailure;
}

inline SweepRanges ranges_from(const Options& o) {
  SweepRanges r;
  r.min_N = o.min_N;
  r.max_N = o.max_N;
  r.min_m = o.min_m;
  r.max_m = o.max_m;
  r.max_stratum = o.max_stratum;
  r.adversarial = o.adversarial;
  r.fractions.clear();
  for (const auto& item : stratvar::detail::split_list(o.fractions)) r.fractions.push_back(parse_ratio(item));
  return r;
}

inline int cmd_theorems(const Options& o, std::ostream& out) {
  std::vector<TheoremId> ids;
  if (o.theorem_id == "all")
    ids = {TheoremId::One,  TheoremId::Two,  TheoremId::Three, TheoremId::Four,
           TheoremId::Five, TheoremId::ProportionalIdentity, TheoremId::IncreaseByOne};
  else
    ids = {parse_theorem_id(o.theorem_id)};
  const auto ranges = ranges_from(o);
  const auto search = search_from(o);
  std::vector<TheoremReport> reports;
  for (auto id : ids) reports.push_back(check_theorem(id, ranges, search));

  bool all_hold = true;
  for (const auto& r : reports) all_hold = all_hold && r.holds();
  if (o.format == "json") {
    if (reports.size() == 1) {
      emit_json(out, to_json(reports.front()));
    } else {
      Json all = Json::array();
      for (const auto& r : reports) all.push_back(to_json(r));
      emit_json(out, all);
    }
  } else if (o.format == "csv") {
    out << "id,instances,failures,verdict,equality_witnesses,probes\n";
    for (const auto& r : reports)
      out << to_string(r.id) << ',' << r.instances << ',' << r.failures << ',' << (r.holds() ? "holds" : "fails")
          << ',' << r.equality_witnesses.size() << ',' << r.probes.size() << '\n';
  } else {
    for (const auto& r : reports) {
      out << "theorem " << to_string(r.id) << ": " << (r.holds() ? "holds" : "FAILS") << ", " << r.failures
          << " failures, " << r.instances << " checks, " << r.equality_witnesses.size() << " equality witnesses";
      if (!r.probes.empty()) out << ", " << r.probes.size() << " out-of-hypothesis probes below the bound";
      out << '\n';
      if (r.counterexample)
        out << "  counterexample: sizes " << join_plain(r.counterexample->population().sizes()) << " reds "
            << reds_plain(r.counterexample->distribution()) << " alloc "
            << join_plain(r.counterexample->allocation().counts()) << ": " << r.failure_detail << '\n';
    }
  }
  return all_hold ? kExitOk : kExitPropertyFailure;
}

inline int cmd_minimax(const Options& o, std::ostream& out) {
  const auto pop = input_from(o).population();
  const auto result = minimax_value(pop, require(o.n, "--n"), require(o.total_red, "--R"),
                                    parse_allocation_class(o.cls), search_from(o));
  if (o.format == "json") {
    emit_json(out, to_json(result));
  } else if (o.format == "csv") {
    out << "sizes,n,R,class,allocation,distribution,exact,decimal,lower_bound,upper_bound,sandwich_holds\n"
        << join_counts(pop.sizes()) << ',' << result.allocation.n() << ',' << *o.total_red << ','
        << to_string(result.cls) << ',' << join_counts(result.allocation.counts()) << ','
        << join_reds(result.distribution) << ',' << to_string(result.value) << ','
        << format_decimal(to_double(result.value)) << ',' << (result.lower_bound ? to_string(*result.lower_bound) : "")
        << ',' << (result.upper_bound ? to_string(*result.upper_bound) : "") << ','
        << (result.sandwich_holds ? (*result.sandwich_holds ? "true" : "false") : "") << '\n';
  } else {
    Table t;
    t.row("class", std::string(to_string(result.cls)))
        .row("allocation", join_plain(result.allocation.counts()))
        .row("worst reds", reds_plain(result.distribution))
        .exact("minimax", result.value)
        .row("examined", std::to_string(result.examined));
    if (result.lower_bound) t.exact("lower bound B", *result.lower_bound);
    if (result.upper_bound) t.exact("upper bound", *result.upper_bound);
    if (result.sandwich_holds) t.row("sandwich", *result.sandwich_holds ? "holds" : "FAILS");
    if (!result.lower_bound) t.row("bounds", "n/a (divisibility hypotheses not met)");
    out << t;
  }
  return result.sandwich_holds.value_or(true) ? kExitOk : kExitPropertyFailure;
}

inline int cmd_worst_nature(const Options& o, std::ostream& out) {
  const auto in = input_from(o);
  const auto pop = in.population();
  const auto alloc = in.allocation();
  const Count R = require(o.total_red, "--R");
  const auto result = worst_nature(pop, alloc, R, search_from(o));
  std::optional<RelaxedMax> relaxed;
  try {
    relaxed = nature_relaxed_max(pop, alloc, ratio(R, pop.N()));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ExhaustedStratum) throw;
  }
  if (o.format == "json") {
    Json j = to_json(result);
    if (relaxed) {
      Json argmax = Json::array();
      for (const auto& a : relaxed->argmax) argmax.push_back(to_string(a));
      j["relaxed_max"] = Json{{"exact", to_string(relaxed->value)}, {"decimal", to_double(relaxed->value)},
                              {"argmax", argmax}};
    } else {
      j["relaxed_max"] = nullptr;
    }
    emit_json(out, j);
  } else if (o.format == "csv") {
    out << "sizes,alloc,R,distribution,exact,decimal,examined,relaxed_max\n"
        << join_counts(pop.sizes()) << ',' << join_counts(alloc.counts()) << ',' << R << ','
        << join_reds(*result.distribution) << ',' << to_string(result.value) << ','
        << format_decimal(to_double(result.value)) << ',' << result.examined << ','
        << (relaxed ? to_string(relaxed->value) : "") << '\n';
  } else {
    Table t;
    t.row("allocation", join_plain(alloc.counts()))
        .row("worst reds", reds_plain(*result.distribution))
        .exact("max variance", result.value)
        .row("examined", std::to_string(result.examined));
    if (relaxed)
      t.exact("relaxed max", relaxed->value);
    else
      t.row("relaxed max", "n/a (exhausted stratum)");
    out << t;
  }
  return kExitOk;
}

inline int cmd_best_alloc(const Options& o, std::ostream& out) {
  const auto in = input_from(o);
  const auto result = best_allocation(in.population(), in.distribution(), require(o.n, "--n"),
                                      parse_allocation_class(o.cls), search_from(o));
  if (o.format == "json") {
    emit_json(out, to_json(result));
  } else if (o.format == "csv") {
    out << "sizes,reds,class,allocation,exact,decimal,examined\n"
        << join_counts(in.population().sizes()) << ',' << join_reds(*result.distribution) << ','
        << to_string(*result.cls) << ',' << join_counts(result.allocation->counts()) << ','
        << to_string(result.value) << ',' << format_decimal(to_double(result.value)) << ',' << result.examined
        << '\n';
  } else {
    Table t;
    t.row("class", std::string(to_string(*result.cls)))
        .row("best allocation", join_plain(result.allocation->counts()))
        .exact("variance", result.value)
        .row("examined", std::to_string(result.examined));
    out << t;
  }
  return kExitOk;
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
  SimConfig config{input_from(o).scenario(), o.kind.empty() ? EstimatorKind::StratWithout : parse_estimator_kind(o.kind),
                   o.trials, o.seed, o.workers};
  const auto r = estimate(config);
  if (o.format == "json") {
    emit_json(out, to_json(r, config.scenario));
  } else if (o.format == "csv") {
    out << kSimCsvHeader << '\n' << csv_row(r, config.scenario) << '\n';
  } else {
    Table t;
    t.row("kind", std::string(to_string(r.kind)))
        .row("seed", std::to_string(r.seed))
        .row("trials", std::to_string(r.trials))
        .row("mean", format_decimal(r.mean) + "  (se " + format_decimal(r.mean_stderr) + ")")
        .exact("p", r.p)
        .row("variance", format_decimal(r.variance) + "  (se " + format_decimal(r.variance_stderr) + ")")
        .exact("exact variance", r.exact_variance)
        .row("z", format_decimal(r.z))
        .row("mean z", format_decimal(r.mean_z));
    out << t;
  }
  return kExitOk;
}

/// Every population in range, every whole-ball distribution, every
/// allocation: one row per (instance, estimator).
inline int cmd_sweep(const Options& o, std::ostream& out) {
  SweepRanges ranges;
  ranges.min_N = o.min_N;
  ranges.max_N = o.max_N;
  ranges.min_m = o.min_m;
  ranges.max_m = o.max_m;
  const auto kinds = kinds_from(o.kind);
  const auto limits = limits_from(o);
  std::vector<VarianceReport> rows;
  stratvar::detail::for_each_population(ranges, [&](const StratifiedPopulation& pop) {
    for (Count R = 0; R <= pop.N(); ++R)
      for_each_distribution(pop, R, [&](const RedDistribution& d) {
        stratvar::detail::for_each_any_allocation(pop, [&](const Allocation& a) {
          const Scenario s(pop, d, a);
          for (auto k : kinds) {
            if (rows.size() >= limits.max_items)
              throw Error(ErrorKind::SearchSpaceExceeded,
                          "sweep exceeds cap of " + std::to_string(limits.max_items) + " rows");
            rows.push_back(variance_report(k, s));
          }
        });
      }, limits);
  });
  if (o.format == "json") {
    Json all = Json::array();
    for (const auto& r : rows) all.push_back(to_json(r));
    emit_json(out, all);
  } else {
    const char sep = o.format == "csv" ? ',' : ' ';
    out << (o.format == "csv" ? std::string(kVarianceCsvHeader) : "sizes reds alloc kind exact decimal") << '\n';
    for (const auto& r : rows) {
      std::string line = csv_row(r);
      if (sep != ',') std::replace(line.begin(), line.end(), ',', sep);
      out << line << '\n';
    }
  }
  return kExitOk;
}

inline void add_scenario_flags(CLI::App* cmd, Options& o, bool reds, bool alloc) {
  cmd->add_option("--scenario", o.scenario_file, "JSON scenario file (sizes, reds, alloc)");
  cmd->add_option("--sizes", o.sizes, "stratum sizes, e.g. 5,5");
  if (reds) cmd->add_option("--reds", o.reds, "red counts (2,2) or exact fractions (1/2,1/2)");
  if (alloc) cmd->add_option("--alloc", o.alloc, "per-stratum sample sizes");
}

inline void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "table | json | csv")->check(CLI::IsMember({"table", "json", "csv"}));
  cmd->add_option("--cap", o.cap, "enumeration cap (overrides STRATVAR_CAP)");
  cmd->add_option("--threads", o.threads, "search threads")->check(CLI::Range(1u, 256u));
}

inline void add_sweep_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--min-N", o.min_N, "smallest population size");
  cmd->add_option("--max-N", o.max_N, "largest population size");
  cmd->add_option("--min-m", o.min_m, "fewest strata");
  cmd->add_option("--max-m", o.max_m, "most strata");
}

}  // namespace detail

/// Parses argv, runs one subcommand, and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact variances, bounds and minimax allocations for stratified sampling of red and black balls"};
  app.require_subcommand(1);
  app.name("stratvar");

  using Handler = std::function<int(const Options&, std::ostream&)>;
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto add = [&](const char* name, const char* help, Handler h) {
    auto* cmd = app.add_subcommand(name, help);
    detail::add_common_flags(cmd, o);
    commands.emplace_back(cmd, std::move(h));
    return cmd;
  };

  auto* variance = add("variance", "exact variances of the four estimators", detail::cmd_variance);
  detail::add_scenario_flags(variance, o, true, true);
  variance->add_option("--kind", o.kind, "simple-with | simple-without | strat-with | strat-without | all");

  auto* decompose = add("decompose", "split the stratified with-replacement variance under proportional allocation",
                        detail::cmd_decompose);
  detail::add_scenario_flags(decompose, o, true, true);

  auto* theorems = add("theorems", "verify the comparison theorems by exhaustive sweep", detail::cmd_theorems);
  theorems->add_option("--id", o.theorem_id, "1 | 2 | 3 | 4 | 5 | E2 | INC | all");
  detail::add_sweep_flags(theorems, o);
  theorems->add_option("--max-stratum", o.max_stratum, "largest stratum size in equal-strata sweeps (0: no limit)");
  theorems->add_option("--fractions", o.fractions, "common red fractions for the rational sweeps");
  theorems->add_flag("--adversarial", o.adversarial, "also probe instances outside the hypotheses");

  auto* minimax = add("minimax", "min over allocations of max over red distributions", detail::cmd_minimax);
  detail::add_scenario_flags(minimax, o, false, false);
  minimax->add_option("--n", o.n, "total sample size");
  minimax->add_option("--R", o.total_red, "total red balls");
  minimax->add_option("--class", o.cls, "all | three-quarters | proportional | admissible");

  auto* worst = add("worst-nature", "red distribution maximising the variance for an allocation",
                    detail::cmd_worst_nature);
  detail::add_scenario_flags(worst, o, false, true);
  worst->add_option("--R", o.total_red, "total red balls");

  auto* best = add("best-alloc", "allocation minimising the variance for a red distribution", detail::cmd_best_alloc);
  detail::add_scenario_flags(best, o, true, false);
  best->add_option("--n", o.n, "total sample size");
  best->add_option("--class", o.cls, "all | three-quarters | proportional | admissible");

  auto* simulate = add("simulate", "Monte Carlo check of an exact variance", detail::cmd_simulate);
  detail::add_scenario_flags(simulate, o, true, true);
  simulate->add_option("--kind", o.kind, "estimator (default strat-without)");
  simulate->add_option("--trials", o.trials, "replications")->check(CLI::Range(std::uint64_t{2}, UINT64_MAX));
  simulate->add_option("--seed", o.seed, "64-bit master seed");
  simulate->add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1u, 256u));

  auto* sweep = add("sweep", "tabulate variances over every small instance", detail::cmd_sweep);
  detail::add_sweep_flags(sweep, o);
  sweep->add_option("--kind", o.kind, "estimator or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (auto& [cmd, handler] : commands)
      if (cmd->parsed()) return handler(o, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("stratvar");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace stratvar::cli

#endif  // STRATVAR_CLI_HPP
