#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "stratvar/io.hpp"

using namespace stratvar;

TEST(ScenarioJson, IntegerReds) {
  const auto in = scenario_input_from_json(Json::parse(R"({"sizes":[5,5],"reds":[2,2],"alloc":[2,2]})"));
  const auto s = in.scenario();
  EXPECT_EQ(s, build_scenario({5, 5}, std::vector<Count>{2, 2}, {2, 2}));
  EXPECT_EQ(var_strat_without(s), Ratio(9, 200));
}

TEST(ScenarioJson, RationalReds) {
  const auto in = scenario_input_from_json(Json::parse(R"({"sizes":[2,5],"reds":["1/2","1/2"],"alloc":[2,4]})"));
  const auto s = in.scenario();
  EXPECT_EQ(s.distribution().mode(), RedMode::Rational);
  EXPECT_EQ(var_strat_without(s), Ratio(25, 3136));
}

TEST(ScenarioJson, PartialAndMalformed) {
  const auto in = scenario_input_from_json(Json::parse(R"({"sizes":[4,6]})"));
  EXPECT_EQ(in.population().N(), 10);
  EXPECT_THROW(in.distribution(), Error);
  EXPECT_THROW(in.allocation(), Error);
  for (const char* doc : {R"([1,2])", R"({"reds":[1]})", R"({"sizes":"5,5"})", R"({"sizes":[5,5.5]})",
                          R"({"sizes":[5,5],"reds":["1/2",1]})", R"({"sizes":[5,5],"reds":["x","1/2"]})"}) {
    try {
      scenario_input_from_json(Json::parse(doc));
      ADD_FAILURE() << doc;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError) << doc;
    }
  }
  EXPECT_THROW(read_scenario_file("/nonexistent/scenario.json"), Error);
}

TEST(Lists, Parse) {
  EXPECT_EQ(parse_count_list("5, 5,7"), (std::vector<Count>{5, 5, 7}));
  EXPECT_THROW(parse_count_list("5,,5"), Error);
  EXPECT_THROW(parse_count_list("5,x"), Error);
  EXPECT_EQ(std::get<std::vector<Count>>(parse_reds_list("2,2")), (std::vector<Count>{2, 2}));
  EXPECT_EQ(std::get<std::vector<Ratio>>(parse_reds_list("1/2,1")), (std::vector<Ratio>{Ratio(1, 2), Ratio(1)}));
  EXPECT_THROW(parse_reds_list("1/0,1/2"), Error);
}

TEST(Render, Decimals) {
  EXPECT_EQ(format_decimal(0.045), "0.045");
  EXPECT_EQ(format_decimal(0.0), "0");
  EXPECT_EQ(format_decimal(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(to_string(Ratio(0)), "0/1");
}

TEST(Render, VarianceReportJsonAndCsv) {
  const auto s = build_scenario({5, 5}, std::vector<Count>{2, 2}, {2, 2});
  const auto r = variance_report(EstimatorKind::StratWithout, s);
  const auto j = to_json(r);
  EXPECT_EQ(j["kind"], "strat-without");
  EXPECT_EQ(j["exact"], "9/200");
  EXPECT_EQ(j["decimal"].get<double>(), 0.045);
  EXPECT_NE(j.dump().find(R"("exact":"9/200")"), std::string::npos);
  EXPECT_EQ(csv_row(r), "5;5,2;2,2;2,strat-without,9/200,0.045");

  const auto rational = variance_report(
      EstimatorKind::StratWithout, build_scenario({2, 5}, std::vector<Ratio>{Ratio(1, 2), Ratio(1, 2)}, {2, 4}));
  EXPECT_EQ(csv_row(rational), "2;5,1/2;1/2,2;4,strat-without,25/3136," + format_decimal(25.0 / 3136.0));
}

TEST(Render, ScenarioRoundTrip) {
  brute::Gen gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = static_cast<std::size_t>(gen.uniform(2, 5));
    const auto sizes = gen.sizes(m, 9);
    std::vector<Count> alloc;
    for (auto s : sizes) alloc.push_back(gen.uniform(1, s));
    Scenario s = [&] {
      if (trial % 2 == 0) {
        std::vector<Count> reds;
        for (auto size : sizes) reds.push_back(gen.uniform(0, size));
        return build_scenario(sizes, reds, alloc);
      }
      std::vector<Ratio> fractions;
      for (std::size_t j = 0; j < m; ++j) fractions.emplace_back(gen.uniform(0, 12), 12);
      return build_scenario(sizes, fractions, alloc);
    }();
    const auto text = scenario_json(s).dump();
    const auto back = scenario_input_from_json(Json::parse(text)).scenario();
    EXPECT_EQ(back, s) << text;
    for (auto kind : {EstimatorKind::SimpleWith, EstimatorKind::StratWith, EstimatorKind::StratWithout}) {
      const auto j = Json::parse(to_json(variance_report(kind, s)).dump());
      EXPECT_EQ(parse_ratio(j["exact"].get<std::string>()), evaluate(kind, s));
      EXPECT_EQ(scenario_input_from_json(j["scenario"]).scenario(), s);
    }
  }
}

TEST(Render, TheoremReportJson) {
  TheoremReport report;
  report.id = TheoremId::Three;
  report.instances = 4;
  report.probes.push_back({build_scenario({2, 5}, std::vector<Ratio>{Ratio(1, 2), Ratio(1, 2)}, {2, 4}),
                           Ratio(25, 3136), Ratio(1, 120), "below B"});
  const auto j = to_json(report);
  EXPECT_EQ(j["verdict"], "holds");
  EXPECT_TRUE(j["counterexample"].is_null());
  EXPECT_EQ(j["probes"][0]["value"], "25/3136");
  EXPECT_EQ(j["probes"][0]["bound"], "1/120");
}

TEST(Render, Table) {
  Table t;
  t.row("a", "1").exact("long key", Ratio(1, 4));
  std::ostringstream os;
  os << t;
  EXPECT_EQ(os.str(), "a         1\nlong key  1/4  (0.25)\n");
}
