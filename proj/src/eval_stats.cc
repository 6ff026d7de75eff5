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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "fmt/format.h"
#include "seedforge/strings.h"

namespace seedforge {
namespace {

namespace fs = std::filesystem;

// Upper tail P(W+ >= w) under the null, counting sign vectors over the
// doubled ranks (integers even with averaged ties).
double ExactUpperTail(const std::vector<double> &ranks, double w_plus) {
  std::vector<long> doubled;
  long total = 0;
  for (double r : ranks) {
    doubled.push_back(std::lround(2 * r));
    total += doubled.back();
  }
  std::vector<double> ways(static_cast<size_t>(total) + 1, 0.0);
  ways[0] = 1;
  long reach = 0;
  for (long r : doubled) {
    for (long s = reach; s >= 0; --s) {
      if (ways[s] != 0) ways[s + r] += ways[s];
    }
    reach += r;
  }
  const long threshold = std::lround(2 * w_plus);
  double hits = 0;
  for (long s = threshold; s <= total; ++s) hits += ways[s];
  return std::ldexp(hits, -static_cast<int>(ranks.size()));
}

double NormalUpperTail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::optional<Metric> ParseMetric(std::string_view name) {
  for (Metric m : {Metric::kBugsReached, Metric::kBugsTriggered,
                   Metric::kCoverage}) {
    if (MetricName(m) == name) return m;
  }
  return std::nullopt;
}

void SetMetric(TrialPoint &point, Metric metric, double value) {
  switch (metric) {
    case Metric::kBugsReached:
      point.bugs_reached = value;
      break;
    case Metric::kBugsTriggered:
      point.bugs_triggered = value;
      break;
    case Metric::kCoverage:
      point.coverage = value;
      break;
  }
}

double Mean(const std::vector<double> &xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

}  // namespace

std::vector<double> AverageRanks(const std::vector<double> &magnitudes) {
  std::vector<size_t> order(magnitudes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return magnitudes[a] < magnitudes[b];
  });
  std::vector<double> ranks(magnitudes.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() &&
           magnitudes[order[j + 1]] == magnitudes[order[i]]) {
      ++j;
    }
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

absl::StatusOr<WilcoxonResult> WilcoxonSignedRank(
    const std::vector<double> &differences, Alternative alternative,
    WilcoxonMethod method) {
  std::vector<double> nonzero;
  for (double d : differences) {
    if (std::isnan(d)) return absl::InvalidArgumentError("NaN difference");
    if (d != 0) nonzero.push_back(d);
  }
  if (nonzero.empty()) {
    return absl::InvalidArgumentError(
        "degenerate sample: every paired difference is zero");
  }
  std::vector<double> magnitudes;
  for (double d : nonzero) magnitudes.push_back(std::fabs(d));
  const std::vector<double> ranks = AverageRanks(magnitudes);

  WilcoxonResult result;
  result.n = nonzero.size();
  for (size_t i = 0; i < nonzero.size(); ++i) {
    if (nonzero[i] > 0) result.w_plus += ranks[i];
  }
  const double n = static_cast<double>(result.n);
  const double total = n * (n + 1) / 2;
  result.exact = method == WilcoxonMethod::kExact ||
                 (method == WilcoxonMethod::kAuto &&
                  result.n <= kWilcoxonExactLimit);
  if (result.exact) {
    // P(W+ <= w) equals P(W+ >= total - w) by symmetry of the null.
    result.p_value = alternative == Alternative::kGreater
                         ? ExactUpperTail(ranks, result.w_plus)
                         : ExactUpperTail(ranks, total - result.w_plus);
  } else {
    double tie_term = 0;
    std::vector<double> sorted = magnitudes;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size();) {
      size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
    const double mean = total / 2;
    const double variance = n * (n + 1) * (2 * n + 1) / 24 - tie_term / 48;
    const double sd = std::sqrt(variance);
    if (sd == 0) {
      result.p_value = 1;
    } else if (alternative == Alternative::kGreater) {
      result.p_value = NormalUpperTail((result.w_plus - mean - 0.5) / sd);
    } else {
      result.p_value = NormalUpperTail((mean - result.w_plus - 0.5) / sd);
    }
  }
  result.p_value = std::clamp(result.p_value, 0.0, 1.0);
  return result;
}

absl::StatusOr<WilcoxonResult> WilcoxonSignedRank(
    const std::vector<std::pair<double, double>> &pairs,
    Alternative alternative, WilcoxonMethod method) {
  std::vector<double> differences;
  differences.reserve(pairs.size());
  for (const auto &[x, y] : pairs) differences.push_back(x - y);
  return WilcoxonSignedRank(differences, alternative, method);
}

absl::StatusOr<Interval> ConfidenceInterval95(const std::vector<double> &xs) {
  if (xs.size() < 2) {
    return absl::InvalidArgumentError(fmt::format(
        "insufficient samples: need at least 2, got {}", xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  const double mean = Mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1));
  boost::math::students_t dist(n - 1);
  const double t = boost::math::quantile(dist, 0.975);
  const double half = t * sd / std::sqrt(n);
  return Interval{mean - half, mean + half, mean};
}

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kBugsReached:
      return "bugs_reached";
    case Metric::kBugsTriggered:
      return "bugs_triggered";
    case Metric::kCoverage:
      return "coverage";
  }
  return "coverage";
}

double MetricValue(const TrialPoint &point, Metric metric) {
  switch (metric) {
    case Metric::kBugsReached:
      return point.bugs_reached;
    case Metric::kBugsTriggered:
      return point.bugs_triggered;
    case Metric::kCoverage:
      return point.coverage;
  }
  return 0;
}

absl::StatusOr<TrialSeries> ParseEventLog(std::string_view text,
                                          std::string corpus,
                                          std::string target, int trial) {
  struct Event {
    double elapsed;
    Metric metric;
    double value;
    size_t line;
  };
  std::vector<Event> events;
  size_t line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    for (std::string_view f : Split(line, ' ')) {
      if (!Trim(f).empty()) fields.emplace_back(Trim(f));
    }
    if (fields.size() == 1) {
      // Tab-separated logs are accepted too.
      fields.clear();
      for (std::string_view f : Split(line, '\t')) {
        if (!Trim(f).empty()) fields.emplace_back(Trim(f));
      }
    }
    std::optional<double> elapsed =
        fields.size() == 3 ? ParseDouble(fields[0]) : std::nullopt;
    std::optional<Metric> metric =
        fields.size() == 3 ? ParseMetric(fields[1]) : std::nullopt;
    std::optional<double> value =
        fields.size() == 3 ? ParseDouble(fields[2]) : std::nullopt;
    if (!elapsed || !metric || !value || *elapsed < 0) {
      return absl::InvalidArgumentError(
          fmt::format("line {}: expected \"<elapsed> <metric> <value>\"",
                      line_no));
    }
    events.push_back({*elapsed, *metric, *value, line_no});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event &a, const Event &b) {
                     return a.elapsed < b.elapsed;
                   });
  TrialSeries series{std::move(corpus), std::move(target), trial, {}};
  TrialPoint current;
  for (size_t i = 0; i < events.size(); ++i) {
    const Event &e = events[i];
    if (e.value < MetricValue(current, e.metric)) {
      return absl::InvalidArgumentError(fmt::format(
          "line {}: {} decreases", e.line, MetricName(e.metric)));
    }
    SetMetric(current, e.metric, e.value);
    current.elapsed = e.elapsed;
    if (i + 1 == events.size() || events[i + 1].elapsed != e.elapsed) {
      series.points.push_back(current);
    }
  }
  return series;
}

absl::StatusOr<std::vector<TrialSeries>> LoadSeriesDir(const std::string &dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    return absl::NotFoundError(fmt::format("{} is not a directory", dir));
  }
  std::vector<fs::path> logs;
  for (const fs::directory_entry &entry :
       fs::recursive_directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".log") {
      logs.push_back(entry.path());
    }
  }
  std::sort(logs.begin(), logs.end());
  std::vector<TrialSeries> out;
  for (const fs::path &path : logs) {
    const fs::path rel = fs::relative(path, dir, ec);
    std::vector<std::string> parts;
    for (const fs::path &p : rel) parts.push_back(p.string());
    if (parts.size() != 3) {
      return absl::InvalidArgumentError(fmt::format(
          "{}: expected <corpus>/<target>/<trial>.log", rel.string()));
    }
    std::optional<int> trial = ParseInt<int>(path.stem().string());
    if (!trial) {
      return absl::InvalidArgumentError(
          fmt::format("{}: trial name must be an integer", rel.string()));
    }
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    absl::StatusOr<TrialSeries> series =
        ParseEventLog(text.str(), parts[0], parts[1], *trial);
    if (!series.ok()) {
      return absl::InvalidArgumentError(fmt::format(
          "{}: {}", rel.string(), std::string(series.status().message())));
    }
    out.push_back(*std::move(series));
  }
  std::sort(out.begin(), out.end(),
            [](const TrialSeries &a, const TrialSeries &b) {
              return std::tie(a.corpus, a.target, a.trial) <
                     std::tie(b.corpus, b.target, b.trial);
            });
  return out;
}

NormalizedCoverage NormalizeCoverage(const std::vector<TrialSeries> &series,
                                     const std::vector<TrialSeries> &baseline) {
  std::map<std::string, std::vector<double>> finals;
  for (const TrialSeries &s : baseline) {
    if (const TrialPoint *last = s.Final()) {
      finals[s.target].push_back(last->coverage);
    }
  }
  std::map<std::string, double> divisor;
  for (const auto &[target, values] : finals) {
    divisor[target] = Mean(values);
  }
  NormalizedCoverage out;
  for (const TrialSeries &s : series) {
    auto it = divisor.find(s.target);
    if (it == divisor.end() || !(it->second > 0)) {
      if (!out.target_errors.count(s.target)) {
        out.target_errors[s.target] = absl::FailedPreconditionError(
            it == divisor.end()
                ? fmt::format("no baseline trials for target {}", s.target)
                : fmt::format("baseline final coverage for {} is not positive",
                              s.target));
      }
      continue;
    }
    NormalizedSeries n{s.corpus, s.target, s.trial, {}};
    for (const TrialPoint &p : s.points) {
      n.points.emplace_back(p.elapsed, p.coverage / it->second);
    }
    out.series.push_back(std::move(n));
  }
  return out;
}

std::map<std::pair<std::string, std::string>, std::vector<double>>
FinalValues(const std::vector<TrialSeries> &series, Metric metric) {
  std::vector<const TrialSeries *> ordered;
  for (const TrialSeries &s : series) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const TrialSeries *a, const TrialSeries *b) {
                     return a->trial < b->trial;
                   });
  std::map<std::pair<std::string, std::string>, std::vector<double>> out;
  for (const TrialSeries *s : ordered) {
    if (const TrialPoint *last = s->Final()) {
      out[{s->corpus, s->target}].push_back(MetricValue(*last, metric));
    }
  }
  return out;
}

}  // namespace seedforge
