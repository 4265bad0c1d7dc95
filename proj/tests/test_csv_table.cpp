#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "repo_vitality/csv.hpp"
#include "repo_vitality/table.hpp"

using namespace rv;
using namespace rv::test;

TEST(Csv, QuotingRoundTrip) {
  const std::vector<csv::Row> rows{{"plain", "with,comma", "with \"quote\"", "multi\nline", ""}, {"a", "b", "c", "d", "e"}};
  std::string text;
  for (const auto& r : rows) text += csv::format_row(r);
  EXPECT_EQ(csv::format_row(rows[0]), "plain,\"with,comma\",\"with \"\"quote\"\"\",\"multi\nline\",\n");
  EXPECT_EQ(csv::parse(text), rows);
}

TEST(Csv, UnterminatedQuote) { EXPECT_RV_ERROR(csv::parse("a,b\n\"c,d\n"), ErrorKind::parse_error); }

TEST(Csv, NumbersRoundTrip) {
  EXPECT_EQ(csv::format_number(3.0), "3");
  EXPECT_EQ(csv::format_number(0.1), "0.1");
  EXPECT_EQ(csv::format_number(-2.5), "-2.5");
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(g);
    EXPECT_EQ(csv::parse_number(csv::format_number(v)), v);
  }
  EXPECT_RV_ERROR(csv::parse_number("12x"), ErrorKind::parse_error);
  EXPECT_RV_ERROR(csv::parse_number(""), ErrorKind::parse_error);
}

TEST(Table, WriteReadRoundTrip) {
  TempDir dir;
  FeatureTable t;
  t.row_ids = {"a/x", "b,y"};
  t.columns = {"Commits@T_{1,3}", "Forks@T_{1,3}"};
  t.values.resize(2, 2);
  t.values << 1, 0.25, 1e-9, 42;
  write_table(t, dir / "t.csv");
  EXPECT_TRUE(slurp(dir / "t.csv").starts_with("repo_id,\"Commits@T_{1,3}\",\"Forks@T_{1,3}\"\n"));
  const auto back = read_table(dir / "t.csv");
  EXPECT_EQ(back.row_ids, t.row_ids);
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.values, t.values);
  EXPECT_EQ(back.column_index("Forks@T_{1,3}"), 1);
  EXPECT_RV_ERROR(back.column_index("Nope"), ErrorKind::missing_feature);
}

TEST(Table, SelectColumns) {
  FeatureTable t;
  t.row_ids = {"r"};
  t.columns = {"a", "b", "c"};
  t.values.resize(1, 3);
  t.values << 1, 2, 3;
  const auto s = select_columns(t, {"c", "a"});
  EXPECT_EQ(s.columns, (std::vector<std::string>{"c", "a"}));
  EXPECT_EQ(s.values(0, 0), 3);
  EXPECT_EQ(s.values(0, 1), 1);
  EXPECT_RV_ERROR(select_columns(t, {"z"}), ErrorKind::missing_feature);
}

TEST(Table, JoinLabelsDropsUnlabeledRows) {
  FeatureTable t;
  t.row_ids = {"a/1", "a/2", "a/3"};
  t.columns = {"x"};
  t.values.resize(3, 1);
  t.values << 10, 20, 30;
  const auto ts = join_labels(t, {{"a/3", Label::active, LabelSource::recent_release}, {"a/1", Label::unmaintained, LabelSource::archived}});
  EXPECT_EQ(ts.row_ids, (std::vector<std::string>{"a/1", "a/3"}));
  EXPECT_EQ(ts.y, (std::vector<Label>{Label::unmaintained, Label::active}));
  EXPECT_EQ(ts.X(1, 0), 30);
}

TEST(Table, MakeTableRejectsMixedScenarios) {
  const auto s = SnapshotBuilder().commit(day(2015, 1, 1)).commit(day(2018, 1, 1)).build();
  EXPECT_RV_ERROR(make_table({extract_vector(s, {24, 3}), extract_vector(s, {12, 3})}), ErrorKind::inconsistent_inputs);
  EXPECT_EQ(make_table({extract_vector(s, {24, 3})}).cols(), 13 * 8);
}

TEST(Table, InferScenario) {
  const auto s = SnapshotBuilder().commit(day(2015, 1, 1)).commit(day(2018, 1, 1)).build();
  for (int n = 1; n <= 10; ++n) {
    const auto sc = scenario_by_number(n);
    EXPECT_EQ(infer_scenario(extract_vector(s, sc).names), sc) << n;
  }
  EXPECT_EQ(infer_scenario({"Commits@T_{1,3}", "Commits@T_{4,6}"}), (ScenarioConfig{6, 3}));
  EXPECT_FALSE(infer_scenario({"bogus"}));
  EXPECT_FALSE(infer_scenario({"Commits@T_{1,3}", "Commits@T_{1,6}"}));
}
