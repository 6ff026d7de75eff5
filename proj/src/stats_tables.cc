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

#include "seedforge/stats_tables.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "absl/status/status.h"
#include "fmt/format.h"
#include "seedforge/strings.h"

namespace seedforge {
namespace {

constexpr Metric kMetrics[] = {Metric::kBugsReached, Metric::kBugsTriggered,
                               Metric::kCoverage};

double Aggregated(std::vector<double> xs, Aggregate aggregate) {
  if (aggregate == Aggregate::kMean) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) /
           static_cast<double>(xs.size());
  }
  std::sort(xs.begin(), xs.end());
  const size_t mid = xs.size() / 2;
  return xs.size() % 2 ? xs[mid] : (xs[mid - 1] + xs[mid]) / 2;
}

std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string FormatNumber(double value) { return fmt::format("{}", value); }

absl::StatusOr<std::vector<PairRow>> ParsePairsCsv(std::string_view text) {
  std::vector<PairRow> rows;
  size_t line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields = SplitTrimmed(line, ',');
    std::optional<double> x =
        fields.size() == 3 ? ParseDouble(fields[1]) : std::nullopt;
    std::optional<double> y =
        fields.size() == 3 ? ParseDouble(fields[2]) : std::nullopt;
    if (!x || !y) {
      if (rows.empty() && fields.size() == 3 && line_no == 1) continue;
      return absl::InvalidArgumentError(
          fmt::format("line {}: expected \"target,x,y\"", line_no));
    }
    rows.push_back({fields[0], *x, *y});
  }
  return rows;
}

absl::StatusOr<std::string> PairsTable(const std::vector<PairRow> &rows) {
  std::vector<std::pair<double, double>> pairs;
  for (const PairRow &row : rows) pairs.emplace_back(row.x, row.y);
  absl::StatusOr<WilcoxonResult> greater =
      WilcoxonSignedRank(pairs, Alternative::kGreater);
  if (!greater.ok()) return greater.status();
  absl::StatusOr<WilcoxonResult> less =
      WilcoxonSignedRank(pairs, Alternative::kLess);
  if (!less.ok()) return less.status();
  return fmt::format("n,w_plus,method,p_greater,p_less\n{},{},{},{},{}\n",
                     greater->n, FormatNumber(greater->w_plus),
                     greater->exact ? "exact" : "normal",
                     FormatNumber(greater->p_value),
                     FormatNumber(less->p_value));
}

std::string SummaryTable(const std::vector<TrialSeries> &series) {
  std::string out = "corpus,target,metric,trials,mean,ci_low,ci_high\n";
  for (Metric metric : kMetrics) {
    for (const auto &[key, values] : FinalValues(series, metric)) {
      absl::StatusOr<Interval> ci = ConfidenceInterval95(values);
      const double mean = Aggregated(values, Aggregate::kMean);
      out += fmt::format("{},{},{},{},{},{},{}\n", CsvField(key.first),
                         CsvField(key.second), MetricName(metric),
                         values.size(), FormatNumber(mean),
                         ci.ok() ? FormatNumber(ci->low) : "",
                         ci.ok() ? FormatNumber(ci->high) : "");
    }
  }
  return out;
}

std::string NormalizedTable(const NormalizedCoverage &normalized) {
  std::string out = "corpus,target,trial,elapsed,normalized_coverage\n";
  for (const NormalizedSeries &s : normalized.series) {
    for (const auto &[elapsed, value] : s.points) {
      out += fmt::format("{},{},{},{},{}\n", CsvField(s.corpus),
                         CsvField(s.target), s.trial, FormatNumber(elapsed),
                         FormatNumber(value));
    }
  }
  return out;
}

std::string CompareTable(const std::vector<TrialSeries> &series,
                         const std::string &corpus_a,
                         const std::string &corpus_b, Aggregate aggregate) {
  std::string out = "metric,n,w_plus,method,p_greater,p_less\n";
  for (Metric metric : kMetrics) {
    const auto finals = FinalValues(series, metric);
    std::set<std::string> targets;
    for (const auto &[key, values] : finals) {
      if (key.first == corpus_a) targets.insert(key.second);
    }
    std::vector<std::pair<double, double>> pairs;
    for (const std::string &target : targets) {
      auto b = finals.find({corpus_b, target});
      if (b == finals.end()) continue;
      pairs.emplace_back(Aggregated(finals.at({corpus_a, target}), aggregate),
                         Aggregated(b->second, aggregate));
    }
    absl::StatusOr<WilcoxonResult> greater =
        WilcoxonSignedRank(pairs, Alternative::kGreater);
    absl::StatusOr<WilcoxonResult> less =
        WilcoxonSignedRank(pairs, Alternative::kLess);
    if (!greater.ok() || !less.ok()) {
      out += fmt::format("{},{},,,degenerate,degenerate\n", MetricName(metric),
                         pairs.size());
      continue;
    }
    out += fmt::format("{},{},{},{},{},{}\n", MetricName(metric), greater->n,
                       FormatNumber(greater->w_plus),
                       greater->exact ? "exact" : "normal",
                       FormatNumber(greater->p_value),
                       FormatNumber(less->p_value));
  }
  return out;
}

}  // namespace seedforge
