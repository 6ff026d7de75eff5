// Copyright 2026 The SeedForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seedforge/eval_stats.h"

#include <random>

#include "gtest/gtest.h"
#include "oracles.h"
#include "seedforge/stats_tables.h"
#include "test_support.h"

namespace seedforge {
namespace {

using ::seedforge::testing::EnumeratedWilcoxonP;

// Reference values below were computed once with scipy.stats 1.11
// (wilcoxon(..., alternative=..., method="exact") and t.interval).

TEST(WilcoxonTest, AllPositiveFive) {
  auto r = WilcoxonSignedRank({1, 2, 3, 4, 5}, Alternative::kGreater);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->p_value, 0.03125);
  EXPECT_EQ(r->w_plus, 15);
  EXPECT_EQ(r->n, 5u);
  EXPECT_TRUE(r->exact);
  auto less = WilcoxonSignedRank({1, 2, 3, 4, 5}, Alternative::kLess);
  ASSERT_TRUE(less.ok());
  EXPECT_EQ(less->p_value, 1.0);
}

TEST(WilcoxonTest, MixedSigns) {
  auto r = WilcoxonSignedRank({3, -1, 4, -1.5, 5, 9, -2, 6},
                              Alternative::kGreater);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->p_value, 0.0546875, 1e-15);
  EXPECT_EQ(r->w_plus, 30);
}

TEST(WilcoxonTest, PairsUseXMinusY) {
  std::vector<std::pair<double, double>> pairs = {
      {10, 9}, {12, 10}, {13, 10}, {14, 10}, {15, 10}};
  auto r = WilcoxonSignedRank(pairs, Alternative::kGreater);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->p_value, 0.03125);
}

TEST(WilcoxonTest, ZerosDroppedAndDegenerateRejected) {
  auto r = WilcoxonSignedRank({0, 1, 2, 0, 3, 4, 5}, Alternative::kGreater);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->n, 5u);
  EXPECT_EQ(r->p_value, 0.03125);
  auto degenerate = WilcoxonSignedRank({0, 0, 0}, Alternative::kGreater);
  EXPECT_EQ(degenerate.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(WilcoxonSignedRank(std::vector<double>{}, Alternative::kLess)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(WilcoxonTest, TiesMatchEnumeration) {
  const std::vector<double> d = {1, 1, -1, 2, 2, 3, -3, 3};
  for (bool greater : {true, false}) {
    auto r = WilcoxonSignedRank(
        d, greater ? Alternative::kGreater : Alternative::kLess,
        WilcoxonMethod::kExact);
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r->p_value, EnumeratedWilcoxonP(d, greater), 1e-12);
  }
}

TEST(WilcoxonTest, RandomSmallSamplesMatchEnumeration) {
  std::mt19937_64 rng(2026);
  int checked = 0;
  while (checked < 300) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<double> d;
    for (int i = 0; i < n; ++i) {
      d.push_back(static_cast<double>(static_cast<int>(rng() % 11) - 5));
    }
    const bool greater = rng() & 1;
    auto r = WilcoxonSignedRank(
        d, greater ? Alternative::kGreater : Alternative::kLess);
    if (!r.ok()) {
      EXPECT_EQ(r.status().code(), absl::StatusCode::kInvalidArgument);
      continue;
    }
    EXPECT_NEAR(r->p_value, EnumeratedWilcoxonP(d, greater), 1e-12);
    ++checked;
  }
}

TEST(WilcoxonTest, NormalApproximationIsClose) {
  // n = 30 distinct magnitudes: the normal path with continuity correction
  // is within a few thousandths of the exact tail.
  std::vector<double> d;
  for (int i = 1; i <= 30; ++i) d.push_back(i % 3 == 0 ? -i : i);
  auto normal = WilcoxonSignedRank(d, Alternative::kGreater);
  auto exact =
      WilcoxonSignedRank(d, Alternative::kGreater, WilcoxonMethod::kExact);
  ASSERT_TRUE(normal.ok());
  ASSERT_TRUE(exact.ok());
  EXPECT_FALSE(normal->exact);
  EXPECT_TRUE(exact->exact);
  EXPECT_NEAR(normal->p_value, exact->p_value, 5e-3);
}

TEST(AverageRanksTest, TiesShareTheMean) {
  EXPECT_EQ(AverageRanks({3, 1, 1, 2}),
            (std::vector<double>{4, 1.5, 1.5, 3}));
}

TEST(ConfidenceIntervalTest, MatchesStudentT) {
  auto ci = ConfidenceInterval95({1, 2, 3, 4, 5});
  ASSERT_TRUE(ci.ok());
  EXPECT_NEAR(ci->low, 1.0367568385224393, 1e-12);
  EXPECT_NEAR(ci->high, 4.9632431614775605, 1e-12);
  EXPECT_DOUBLE_EQ(ci->mean, 3);

  auto ci2 = ConfidenceInterval95({2.5, 3.1, 2.9, 4.0, 3.3, 2.2, 3.8});
  ASSERT_TRUE(ci2.ok());
  EXPECT_NEAR(ci2->low, 2.5115289619985544, 1e-12);
  EXPECT_NEAR(ci2->high, 3.7170424665728743, 1e-12);
}

TEST(ConfidenceIntervalTest, NeedsTwoSamples) {
  EXPECT_EQ(ConfidenceInterval95({1}).status().code(),
            absl::StatusCode::kInvalidArgument);
  auto flat = ConfidenceInterval95({7, 7, 7});
  ASSERT_TRUE(flat.ok());
  EXPECT_EQ(flat->low, 7);
  EXPECT_EQ(flat->high, 7);
}

TEST(EventLogTest, MergesAndCarriesForward) {
  auto s = ParseEventLog(
      "# header\n"
      "0 coverage 100\n"
      "10 bugs_reached 1\n"
      "10 coverage 150\n"
      "20 bugs_triggered 1 # inline\n",
      "seedforge", "libpng", 1);
  ASSERT_TRUE(s.ok()) << s.status();
  ASSERT_EQ(s->points.size(), 3u);
  EXPECT_EQ(s->points[1].elapsed, 10);
  EXPECT_EQ(s->points[1].coverage, 150);
  EXPECT_EQ(s->points[1].bugs_reached, 1);
  EXPECT_EQ(s->Final()->coverage, 150);
  EXPECT_EQ(s->Final()->bugs_triggered, 1);
}

TEST(EventLogTest, RejectsBadInput) {
  EXPECT_FALSE(ParseEventLog("0 coverage\n", "a", "t", 1).ok());
  EXPECT_FALSE(ParseEventLog("0 speed 3\n", "a", "t", 1).ok());
  EXPECT_FALSE(
      ParseEventLog("0 coverage 10\n5 coverage 9\n", "a", "t", 1).ok());
  EXPECT_FALSE(ParseEventLog("x coverage 10\n", "a", "t", 1).ok());
}

TEST(NormalizeTest, DividesByBaselineMeanFinal) {
  TrialSeries base1{"base", "t", 1, {{0, 0, 0, 400}, {60, 0, 0, 500}}};
  TrialSeries base2{"base", "t", 2, {{60, 0, 0, 500}}};
  TrialSeries ours{"ours", "t", 1, {{30, 0, 0, 225}, {60, 0, 0, 450}}};
  TrialSeries orphan{"ours", "u", 1, {{60, 0, 0, 10}}};
  NormalizedCoverage n =
      NormalizeCoverage({base1, base2, ours, orphan}, {base1, base2});
  bool found = false;
  for (const NormalizedSeries &s : n.series) {
    if (s.corpus != "ours" || s.target != "t") continue;
    found = true;
    ASSERT_EQ(s.points.size(), 2u);
    EXPECT_DOUBLE_EQ(s.points[0].second, 0.45);
    EXPECT_DOUBLE_EQ(s.points[1].second, 0.9);
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(n.target_errors.count("u"), 1u);
}

TEST(FinalValuesTest, GroupsByCorpusAndTarget) {
  std::vector<TrialSeries> series = {
      {"a", "t", 1, {{1, 2, 1, 10}}},
      {"a", "t", 2, {{1, 3, 2, 20}}},
      {"b", "t", 1, {{1, 1, 0, 5}}},
  };
  auto finals = FinalValues(series, Metric::kBugsReached);
  EXPECT_EQ((finals[{"a", "t"}]), (std::vector<double>{2, 3}));
  EXPECT_EQ((finals[{"b", "t"}]), (std::vector<double>{1}));
}

TEST(StatsTablesTest, PairsCsvRoundTrip) {
  auto rows = ParsePairsCsv("target,x,y\nt1,11,10\nt2,12,10\nt3,13,10\n"
                            "t4,14,10\nt5,15,10\n");
  ASSERT_TRUE(rows.ok()) << rows.status();
  ASSERT_EQ(rows->size(), 5u);
  auto table = PairsTable(*rows);
  ASSERT_TRUE(table.ok());
  EXPECT_EQ(*table, "n,w_plus,method,p_greater,p_less\n5,15,exact,0.03125,1\n");
  EXPECT_FALSE(ParsePairsCsv("a,b\n").ok());
  EXPECT_FALSE(ParsePairsCsv("t,1,2\nt,x,3\n").ok());
}

TEST(StatsTablesTest, CompareFlagsDegenerateMetrics) {
  std::vector<TrialSeries> series;
  for (int t = 0; t < 5; ++t) {
    const std::string target = "t" + std::to_string(t);
    series.push_back({"a", target, 1, {{1, 1, 0, 100.0 + t + 1}}});
    series.push_back({"b", target, 1, {{1, 1, 0, 100.0}}});
  }
  const std::string table = CompareTable(series, "a", "b", Aggregate::kMean);
  EXPECT_NE(table.find("bugs_reached,5,,,degenerate,degenerate"),
            std::string::npos)
      << table;
  EXPECT_NE(table.find("coverage,5,15,exact,0.03125,1"), std::string::npos)
      << table;
}

TEST(StatsTablesTest, LoadSeriesDir) {
  testing::TempDir dir;
  testing::WriteFile(dir / "ours/libpng/1.log", "0 coverage 10\n5 coverage 20\n");
  testing::WriteFile(dir / "ours/libpng/2.log", "0 coverage 30\n");
  auto series = LoadSeriesDir(dir.path());
  ASSERT_TRUE(series.ok()) << series.status();
  ASSERT_EQ(series->size(), 2u);
  const std::string summary = SummaryTable(*series);
  EXPECT_NE(summary.find("ours,libpng,coverage,2,25,"), std::string::npos)
      << summary;
}

}  // namespace
}  // namespace seedforge
