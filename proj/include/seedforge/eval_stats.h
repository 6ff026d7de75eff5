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

// Statistics for comparing seed corpora across fuzzing campaigns: the
// one-sided Wilcoxon signed-rank test, t-based 95% confidence intervals, and
// coverage normalized against a baseline corpus.

#ifndef SEEDFORGE_EVAL_STATS_H_
#define SEEDFORGE_EVAL_STATS_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace seedforge {

// kGreater: the alternative is median(X) > median(Y), with d = x - y.
enum class Alternative { kGreater, kLess };

enum class WilcoxonMethod {
  kAuto,    // exact when n <= kWilcoxonExactLimit
  kExact,
  kNormal,  // continuity and tie corrected
};

inline constexpr size_t kWilcoxonExactLimit = 25;

struct WilcoxonResult {
  double w_plus = 0;  // sum of ranks of positive differences
  size_t n = 0;       // nonzero differences
  bool exact = false;
  double p_value = 1;
};

// Zero differences are dropped and tied magnitudes get average ranks.
// InvalidArgument ("degenerate sample") when every difference is zero.
absl::StatusOr<WilcoxonResult> WilcoxonSignedRank(
    const std::vector<double> &differences, Alternative alternative,
    WilcoxonMethod method = WilcoxonMethod::kAuto);

absl::StatusOr<WilcoxonResult> WilcoxonSignedRank(
    const std::vector<std::pair<double, double>> &pairs,
    Alternative alternative, WilcoxonMethod method = WilcoxonMethod::kAuto);

// 1-based ranks of non-negative magnitudes, ties averaged, in input order.
std::vector<double> AverageRanks(const std::vector<double> &magnitudes);

struct Interval {
  double low = 0;
  double high = 0;
  double mean = 0;
};

// mean ± t(0.975, n-1) · s/√n. InvalidArgument ("insufficient samples")
// when n < 2.
absl::StatusOr<Interval> ConfidenceInterval95(const std::vector<double> &xs);

struct TrialPoint {
  double elapsed = 0;  // seconds
  double bugs_reached = 0;
  double bugs_triggered = 0;
  double coverage = 0;
};

struct TrialSeries {
  std::string corpus;
  std::string target;
  int trial = 0;
  std::vector<TrialPoint> points;  // strictly increasing elapsed

  const TrialPoint *Final() const {
    return points.empty() ? nullptr : &points.back();
  }
};

// Builds a series from a "<elapsed> <metric> <value>" event log. Metrics are
// bugs_reached, bugs_triggered and coverage; '#' starts a comment. Events at
// the same time merge into one point; unmentioned metrics carry forward.
// InvalidArgument on malformed lines, unknown metrics, or decreasing values.
absl::StatusOr<TrialSeries> ParseEventLog(std::string_view text,
                                          std::string corpus,
                                          std::string target, int trial);

// Reads <dir>/<corpus>/<target>/<trial>.log for every file present.
absl::StatusOr<std::vector<TrialSeries>> LoadSeriesDir(const std::string &dir);

struct NormalizedSeries {
  std::string corpus;
  std::string target;
  int trial = 0;
  std::vector<std::pair<double, double>> points;  // (elapsed, coverage ratio)
};

struct NormalizedCoverage {
  std::vector<NormalizedSeries> series;
  std::map<std::string, absl::Status> target_errors;  // by target
};

// Divides coverage by the baseline's mean final coverage for the same target.
// Targets without a positive baseline get an error entry and are skipped.
NormalizedCoverage NormalizeCoverage(const std::vector<TrialSeries> &series,
                                     const std::vector<TrialSeries> &baseline);

enum class Metric { kBugsReached, kBugsTriggered, kCoverage };
std::string_view MetricName(Metric metric);
double MetricValue(const TrialPoint &point, Metric metric);

// Final values of `metric` for each (corpus, target), in trial order.
std::map<std::pair<std::string, std::string>, std::vector<double>>
FinalValues(const std::vector<TrialSeries> &series, Metric metric);

}  // namespace seedforge

#endif  // SEEDFORGE_EVAL_STATS_H_
