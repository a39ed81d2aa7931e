#ifndef STRATVAR_IO_HPP
#define STRATVAR_IO_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "stratvar/error.hpp"
#include "stratvar/model.hpp"
#include "stratvar/oracle.hpp"
#include "stratvar/ratio.hpp"
#include "stratvar/simulate.hpp"
#include "stratvar/theorems.hpp"
#include "stratvar/variance.hpp"

// JSON, CSV and plain-table renderings. Exact values are always written as
// "num/den" strings next to a decimal that is for display only.

namespace stratvar {

using Json = nlohmann::ordered_json;

/// Shortest decimal that round-trips to the same double.
inline std::string format_decimal(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "?";
  return std::string(buf, end);
}

inline Json exact_json(const Ratio& r) { return Json{{"exact", to_string(r)}, {"decimal", to_double(r)}}; }

inline Json counts_json(std::span<const Count> counts) { return Json(std::vector<Count>(counts.begin(), counts.end())); }

inline Json reds_json(const RedDistribution& d) {
  if (d.mode() == RedMode::Integer) return counts_json(d.counts());
  Json out = Json::array();
  for (const auto& f : d.fractions()) out.push_back(to_string(f));
  return out;
}

inline Json scenario_json(const Scenario& s) {
  return Json{{"sizes", counts_json(s.population().sizes())},
              {"reds", reds_json(s.distribution())},
              {"alloc", counts_json(s.allocation().counts())}};
}

// ---------------------------------------------------------------------------
// Scenario input

/// Raw scenario fields before validation. Everything except sizes is
/// optional because several commands need only part of a scenario.
struct ScenarioInput {
  std::vector<Count> sizes;
  std::optional<std::variant<std::vector<Count>, std::vector<Ratio>>> reds;
  std::optional<std::vector<Count>> alloc;

  StratifiedPopulation population() const { return StratifiedPopulation(sizes); }

  RedDistribution distribution() const {
    if (!reds) throw Error(ErrorKind::InvalidArgument, "red counts are required");
    const auto pop = population();
    if (const auto* counts = std::get_if<std::vector<Count>>(&*reds)) return RedDistribution::from_counts(pop, *counts);
    return RedDistribution::from_fractions(pop, std::get<std::vector<Ratio>>(*reds));
  }

  Allocation allocation() const {
    if (!alloc) throw Error(ErrorKind::InvalidArgument, "an allocation is required");
    return Allocation(population(), *alloc);
  }

  Scenario scenario() const { return Scenario(population(), distribution(), allocation()); }
};

namespace detail {

inline std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    std::string item(text.substr(start, end - start));
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    out.push_back(first == std::string::npos ? std::string() : item.substr(first, last - first + 1));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline Count parse_count(std::string_view text) {
  Count value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw Error(ErrorKind::ParseError, "malformed integer '" + std::string(text) + "'");
  return value;
}

}  // namespace detail

inline std::vector<Count> parse_count_list(std::string_view text) {
  std::vector<Count> out;
  for (const auto& item : detail::split_list(text)) out.push_back(detail::parse_count(item));
  return out;
}

/// "2,2" gives whole red counts; "1/2,1/2" (any entry with a slash) gives
/// exact fractions.
inline std::variant<std::vector<Count>, std::vector<Ratio>> parse_reds_list(std::string_view text) {
  if (text.find('/') == std::string_view::npos) return parse_count_list(text);
  std::vector<Ratio> out;
  for (const auto& item : detail::split_list(text)) out.push_back(parse_ratio(item));
  return out;
}

inline ScenarioInput scenario_input_from_json(const Json& doc) {
  auto counts = [](const Json& v, std::string_view field) {
    if (!v.is_array()) throw Error(ErrorKind::ParseError, "field '" + std::string(field) + "' must be an array");
    std::vector<Count> out;
    for (const auto& x : v) {
      if (!x.is_number_integer())
        throw Error(ErrorKind::ParseError, "field '" + std::string(field) + "' must hold integers");
      out.push_back(x.get<Count>());
    }
    return out;
  };
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "scenario file must hold a JSON object");
  if (!doc.contains("sizes")) throw Error(ErrorKind::ParseError, "scenario file lacks 'sizes'");
  ScenarioInput in;
  in.sizes = counts(doc["sizes"], "sizes");
  if (doc.contains("reds")) {
    const auto& reds = doc["reds"];
    if (!reds.is_array()) throw Error(ErrorKind::ParseError, "field 'reds' must be an array");
    const bool rational = !reds.empty() && reds.front().is_string();
    if (rational) {
      std::vector<Ratio> fractions;
      for (const auto& x : reds) {
        if (!x.is_string()) throw Error(ErrorKind::ParseError, "field 'reds' mixes strings and integers");
        fractions.push_back(parse_ratio(x.get<std::string>()));
      }
      in.reds = std::move(fractions);
    } else {
      in.reds = counts(reds, "reds");
    }
  }
  if (doc.contains("alloc") && !doc["alloc"].is_null()) in.alloc = counts(doc["alloc"], "alloc");
  return in;
}

inline ScenarioInput read_scenario_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorKind::ParseError, "cannot open scenario file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "scenario file '" + path + "': " + e.what());
  }
  return scenario_input_from_json(doc);
}

// ---------------------------------------------------------------------------
// Report serialization

inline Json to_json(const VarianceReport& r) {
  Json out{{"kind", std::string(to_string(r.kind))}};
  const Json exact = exact_json(r.exact);
  out["exact"] = exact["exact"];
  out["decimal"] = exact["decimal"];
  out["scenario"] = scenario_json(r.inputs);
  return out;
}

inline Json to_json(const SearchResult& r) {
  Json out;
  out["allocation"] = r.allocation ? counts_json(r.allocation->counts()) : Json(nullptr);
  out["distribution"] = r.distribution ? reds_json(*r.distribution) : Json(nullptr);
  out["exact"] = to_string(r.value);
  out["decimal"] = to_double(r.value);
  out["examined"] = r.examined;
  out["class"] = r.cls ? Json(std::string(to_string(*r.cls))) : Json(nullptr);
  return out;
}

inline Json to_json(const MinimaxResult& r) {
  Json out;
  out["allocation"] = counts_json(r.allocation.counts());
  out["distribution"] = reds_json(r.distribution);
  out["exact"] = to_string(r.value);
  out["decimal"] = to_double(r.value);
  out["examined"] = r.examined;
  out["class"] = std::string(to_string(r.cls));
  out["lower_bound"] = r.lower_bound ? exact_json(*r.lower_bound) : Json(nullptr);
  out["upper_bound"] = r.upper_bound ? exact_json(*r.upper_bound) : Json(nullptr);
  out["sandwich_holds"] = r.sandwich_holds ? Json(*r.sandwich_holds) : Json(nullptr);
  return out;
}

inline Json to_json(const SweepRanges& r) {
  Json fractions = Json::array();
  for (const auto& f : r.fractions) fractions.push_back(to_string(f));
  return Json{{"min_N", r.min_N},       {"max_N", r.max_N},         {"min_m", r.min_m},
              {"max_m", r.max_m},       {"max_stratum", r.max_stratum}, {"fractions", fractions},
              {"adversarial", r.adversarial}};
}

inline Json to_json(const TheoremReport& r) {
  Json out;
  out["id"] = std::string(to_string(r.id));
  out["ranges"] = to_json(r.ranges);
  out["instances"] = r.instances;
  out["failures"] = r.failures;
  out["verdict"] = r.holds() ? "holds" : "fails";
  if (r.counterexample)
    out["counterexample"] = Json{{"scenario", scenario_json(*r.counterexample)}, {"detail", r.failure_detail}};
  else
    out["counterexample"] = nullptr;
  Json witnesses = Json::array();
  for (const auto& s : r.equality_witnesses) witnesses.push_back(scenario_json(s));
  out["equality_witnesses"] = witnesses;
  Json probes = Json::array();
  for (const auto& p : r.probes)
    probes.push_back(Json{{"scenario", scenario_json(p.scenario)},
                          {"value", to_string(p.value)},
                          {"bound", to_string(p.bound)},
                          {"note", p.note}});
  out["probes"] = probes;
  return out;
}

inline Json to_json(const SimResult& r, const Scenario& scenario) {
  Json out;
  out["kind"] = std::string(to_string(r.kind));
  out["seed"] = r.seed;
  out["trials"] = r.trials;
  out["scenario"] = scenario_json(scenario);
  out["mean"] = r.mean;
  out["variance"] = r.variance;
  out["variance_stderr"] = r.variance_stderr;
  out["mean_stderr"] = r.mean_stderr;
  out["exact_variance"] = exact_json(r.exact_variance);
  out["p"] = exact_json(r.p);
  out["z"] = std::isfinite(r.z) ? Json(r.z) : Json(format_decimal(r.z));
  out["mean_z"] = std::isfinite(r.mean_z) ? Json(r.mean_z) : Json(format_decimal(r.mean_z));
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string join_counts(std::span<const Count> counts) {
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) out += (i ? ";" : "") + std::to_string(counts[i]);
  return out;
}

inline std::string join_reds(const RedDistribution& d) {
  if (d.mode() == RedMode::Integer) return join_counts(d.counts());
  std::string out;
  for (std::size_t i = 0; i < d.m(); ++i) out += (i ? ";" : "") + to_string(d.fraction(i));
  return out;
}

inline constexpr std::string_view kVarianceCsvHeader = "sizes,reds,alloc,kind,exact,decimal";

inline std::string csv_row(const VarianceReport& r) {
  return join_counts(r.inputs.population().sizes()) + "," + join_reds(r.inputs.distribution()) + "," +
         join_counts(r.inputs.allocation().counts()) + "," + std::string(to_string(r.kind)) + "," +
         to_string(r.exact) + "," + format_decimal(r.decimal);
}

inline constexpr std::string_view kSimCsvHeader =
    "sizes,reds,alloc,kind,seed,trials,mean,variance,variance_stderr,exact,decimal,z,mean_z";

inline std::string csv_row(const SimResult& r, const Scenario& s) {
  return join_counts(s.population().sizes()) + "," + join_reds(s.distribution()) + "," +
         join_counts(s.allocation().counts()) + "," + std::string(to_string(r.kind)) + "," + std::to_string(r.seed) +
         "," + std::to_string(r.trials) + "," + format_decimal(r.mean) + "," + format_decimal(r.variance) + "," +
         format_decimal(r.variance_stderr) + "," + to_string(r.exact_variance) + "," +
         format_decimal(to_double(r.exact_variance)) + "," + format_decimal(r.z) + "," + format_decimal(r.mean_z);
}

// ---------------------------------------------------------------------------
// Plain tables

/// Two-column key/value table with the keys padded to a common width.
class Table {
 public:
  Table& row(std::string key, std::string value) {
    width_ = std::max(width_, key.size());
    rows_.emplace_back(std::move(key), std::move(value));
    return *this;
  }

  Table& exact(const std::string& key, const Ratio& r) {
    return row(key, to_string(r) + "  (" + format_decimal(to_double(r)) + ")");
  }

  friend std::ostream& operator<<(std::ostream& os, const Table& t) {
    for (const auto& [k, v] : t.rows_) os << k << std::string(t.width_ - k.size() + 2, ' ') << v << '\n';
    return os;
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
  std::size_t width_ = 0;
};

inline std::string join_plain(std::span<const Count> counts) {
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) out += (i ? "," : "") + std::to_string(counts[i]);
  return out;
}

inline std::string reds_plain(const RedDistribution& d) {
  if (d.mode() == RedMode::Integer) return join_plain(d.counts());
  std::string out;
  for (std::size_t i = 0; i < d.m(); ++i) out += (i ? "," : "") + to_string(d.fraction(i));
  return out;
}

}  // namespace stratvar

#endif  // STRATVAR_IO_HPP
