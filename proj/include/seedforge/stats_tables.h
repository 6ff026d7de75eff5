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

// CSV tables behind `seedforge stats`.

#ifndef SEEDFORGE_STATS_TABLES_H_
#define SEEDFORGE_STATS_TABLES_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/eval_stats.h"

namespace seedforge {

struct PairRow {
  std::string target;
  double x = 0;
  double y = 0;
};

// "target,x,y" lines; a non-numeric first row is taken as a header.
absl::StatusOr<std::vector<PairRow>> ParsePairsCsv(std::string_view text);

// n,w_plus,method,p_greater,p_less
absl::StatusOr<std::string> PairsTable(const std::vector<PairRow> &rows);

// corpus,target,metric,trials,mean,ci_low,ci_high (CI blank below 2 trials)
std::string SummaryTable(const std::vector<TrialSeries> &series);

// corpus,target,trial,elapsed,normalized_coverage
std::string NormalizedTable(const NormalizedCoverage &normalized);

enum class Aggregate { kMean, kMedian };

// Per metric, pairs the two corpora by target on the aggregated final values
// and reports metric,n,w_plus,method,p_greater,p_less (p of "a beats b").
// Metrics whose differences are all zero get "degenerate" in place of p.
std::string CompareTable(const std::vector<TrialSeries> &series,
                         const std::string &corpus_a,
                         const std::string &corpus_b, Aggregate aggregate);

// Shortest round-trip decimal form.
std::string FormatNumber(double value);

}  // namespace seedforge

#endif  // SEEDFORGE_STATS_TABLES_H_
