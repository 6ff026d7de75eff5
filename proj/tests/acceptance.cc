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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include <glog/logging.h>

#include "fmt/format.h"
#include "json.hpp"
#include "oracles.h"
#include "seedforge/assembly.h"
#include "seedforge/eval_stats.h"
#include "seedforge/query_gen.h"
#include "seedforge/signature_table.h"
#include "seedforge/target.h"
#include "signature_fixtures.h"
#include "test_support.h"

namespace seedforge {
namespace {

namespace fs = std::filesystem;
using namespace ::seedforge::testing;

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict Pass(std::string detail) { return {true, std::move(detail)}; }
Verdict Fail(std::string detail) { return {false, std::move(detail)}; }

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

bool SameSelection(const std::vector<SeedFile> &a,
                   const std::vector<SeedFile> &b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].digest != b[i].digest ||
        a[i].source_module != b[i].source_module) {
      return false;
    }
  }
  return true;
}

// 1. Selection equals the water-filling oracle on 1,000 random instances.
Verdict SelectionOracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<SeedFile> files = RandomCandidates(rng, 10000, 5);
    const uint64_t pick = rng() % 51;
    const size_t cap = pick == 50 ? 40000 : pick + 1;
    std::shuffle(files.begin(), files.end(), rng);
    if (!SameSelection(SelectBalanced(files, cap), OracleSelect(files, cap))) {
      return Fail(fmt::format("instance {} (n={}, cap={}) differs", i,
                              files.size(), cap));
    }
  }
  const double elapsed = Seconds(start);
  if (elapsed >= 60) return Fail(fmt::format("took {:.1f}s", elapsed));
  return Pass(fmt::format("1000 instances in {:.1f}s", elapsed));
}

// 2. Counts among non-exhausted modules differ by at most one.
Verdict BalanceProperty() {
  std::mt19937_64 rng(2);
  int over_cap = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<SeedFile> files = RandomCandidates(rng, 200, 5);
    const size_t cap = 1 + rng() % 60;
    if (files.size() <= cap) continue;
    ++over_cap;
    std::map<SourceModule, size_t> supply, taken;
    for (const SeedFile &f : files) ++supply[f.source_module];
    const std::vector<SeedFile> selected = SelectBalanced(files, cap);
    if (selected.size() != cap) return Fail(fmt::format("trial {} size", i));
    for (const SeedFile &f : selected) ++taken[f.source_module];
    size_t lo = SIZE_MAX, hi = 0;
    for (const auto &[m, n] : supply) {
      if (taken[m] == n) continue;  // exhausted
      lo = std::min(lo, taken[m]);
      hi = std::max(hi, taken[m]);
    }
    if (hi > lo + 1) return Fail(fmt::format("trial {}: {} vs {}", i, lo, hi));
  }
  return Pass(fmt::format("10000 trials, {} over cap", over_cap));
}

// 3. 2^20 bytes survives, 2^20 + 1 does not.
Verdict SizeBoundary() {
  const uint64_t mib = uint64_t{1} << 20;
  std::vector<SeedFile> files = {
      MakeSeedFile(std::string(mib, 'a'), SourceModule::kWeb, "a",
                   ValidationKind::kByExtension),
      MakeSeedFile(std::string(mib + 1, 'b'), SourceModule::kWeb, "b",
                   ValidationKind::kByExtension)};
  MergeResult r = MergeAndFilter(files);
  if (r.candidates.size() == 1 && r.candidates[0].size_bytes == mib &&
      r.dropped.size() == 1 && r.dropped[0].size_bytes == mib + 1 &&
      r.dropped[0].dropped_reason == DropReason::kOversize) {
    return Pass("1048576 kept, 1048577 dropped as Oversize");
  }
  return Fail("boundary handled incorrectly");
}

// 4. Unique digests and idempotence over random multisets.
Verdict DedupProperty() {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    std::vector<SeedFile> files;
    const int n = static_cast<int>(rng() % 100);
    std::set<std::string> expected;
    for (int j = 0; j < n; ++j) {
      files.push_back(MakeSeedFile(std::string(rng() % 30, 'd'),
                                   kAllSourceModules[rng() % 6],
                                   fmt::format("u{}", rng() % 4),
                                   ValidationKind::kByMagic));
      expected.insert(files.back().digest);
    }
    MergeResult once = MergeAndFilter(files);
    std::map<std::string, int> multiplicity;
    for (const SeedFile &f : once.candidates) ++multiplicity[f.digest];
    for (const auto &[d, k] : multiplicity) {
      if (k != 1) return Fail(fmt::format("case {}: multiplicity {}", i, k));
    }
    if (multiplicity.size() != expected.size()) {
      return Fail(fmt::format("case {}: lost digests", i));
    }
    MergeResult twice = MergeAndFilter(once.candidates);
    if (!SameSelection(twice.candidates, once.candidates) ||
        !twice.dropped.empty()) {
      return Fail(fmt::format("case {}: not idempotent", i));
    }
  }
  return Pass("1000 cases");
}

// 5. Accept/reject matrix over catalogued signatures.
Verdict MagicValidation() {
  const std::vector<SignatureSample> samples = PublishedSamples();
  int checks = 0, wrong = 0;
  std::string first_wrong;
  for (const SignatureSample &type : samples) {
    auto spec = SignatureTable::Bundled().SpecForExtension(type.extension);
    if (!spec.ok()) return Fail("no spec for " + type.extension);
    for (const SignatureSample &file : samples) {
      const bool want = file.extension == type.extension;
      const ValidationResult got = ValidateFile(file.content, "sample", *spec);
      ++checks;
      if (want != (got == ValidationKind::kByMagic) ||
          (!want && got.has_value())) {
        ++wrong;
        if (first_wrong.empty()) first_wrong = file.label + " as " + type.label;
      }
    }
  }
  if (wrong) return Fail(fmt::format("{} of {} wrong, e.g. {}", wrong, checks,
                                     first_wrong));
  return Pass(fmt::format("{} signatures, {} checks", samples.size(), checks));
}

// 6. Exact p-values equal full 2^n enumeration.
Verdict WilcoxonExactness() {
  auto five = WilcoxonSignedRank({1, 2, 3, 4, 5}, Alternative::kGreater);
  if (!five.ok() || five->p_value != 0.03125) {
    return Fail("n=5 all-positive case is not 0.03125");
  }
  std::mt19937_64 rng(6);
  int done = 0;
  double worst = 0;
  while (done < 500) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<double> d;
    for (int i = 0; i < n; ++i) d.push_back(static_cast<int>(rng() % 13) - 6);
    const bool greater = rng() & 1;
    auto r = WilcoxonSignedRank(
        d, greater ? Alternative::kGreater : Alternative::kLess);
    if (!r.ok()) continue;  // all zero
    worst = std::max(worst,
                     std::fabs(r->p_value - EnumeratedWilcoxonP(d, greater)));
    ++done;
  }
  if (worst > 1e-12) return Fail(fmt::format("max error {}", worst));
  return Pass(fmt::format("500 instances, max error {}", worst));
}

// 7. Plan sizes under the replaying stub.
Verdict QueryCounts() {
  TempDir dir;
  const FileTypeSpec spec = *SignatureTable::Bundled().SpecForExtension("png");
  auto stub = [&](const std::string &prompt, const std::string &prefix, int n) {
    std::string reply;
    for (int i = 1; i <= n; ++i) reply += fmt::format("{}. {} {}\n", i, prefix, i);
    WriteFile(dir / (StubLlmClient::PromptKey(prompt) + ".txt"), reply);
  };
  stub(GithubPrompt(spec, kGithubQueryCount), "gh", 50);
  stub(WebPrompt(spec, kWebQueryCount), "web", 20);
  stub(FeatureDescriptorPrompt(spec, kFeatureDescriptorCount), "feat", 33);
  for (int i = 1; i <= 33; ++i) {
    const std::string d = fmt::format("feat {}", i);
    stub(FeatureExpansionPrompt(spec, d, kQueriesPerFeature), d + " q", 3);
  }
  StubLlmClient client(dir.path());
  QueryGenOptions options;
  Budget budget;
  auto gh = GenGithubQueries(spec, client, options, budget);
  auto web = GenWebQueries(spec, client, options, budget);
  auto feat = GenFeatureDescriptors(spec, client, options, budget);
  if (!gh.ok() || !web.ok() || !feat.ok()) return Fail("stub replay failed");
  const QueryPlan expanded =
      ExpandFeatures(spec, feat->queries, client, options, budget);
  const std::string counts =
      fmt::format("github={} web={} descriptors={} expanded={}",
                  gh->queries.size(), web->queries.size(),
                  feat->queries.size(), expanded.queries.size());
  if (gh->queries.size() == 50 && web->queries.size() == 20 &&
      feat->queries.size() == 33 && expanded.queries.size() == 99) {
    return Pass(counts);
  }
  return Fail(counts);
}

std::string MakeFixtureDir(const TempDir &dir,
                           std::vector<std::string> extra = {}) {
  std::vector<std::string> argv = {SEEDFORGE_MAKE_FIXTURE, "--out",
                                   dir / "fixture"};
  argv.insert(argv.end(), extra.begin(), extra.end());
  RunOutcome r = RunCommand(argv);
  return r.exit_code == 0 ? dir / "fixture" : "";
}

// 8. End-to-end fixture run reproduces the golden manifest.
Verdict EndToEnd() {
  TempDir dir;
  const std::string fixture = MakeFixtureDir(dir);
  if (fixture.empty()) return Fail("fixture generation failed");
  RunOutcome r = RunCommand({SEEDFORGE_CLI, "gen", "--ext", "png", "--fixtures",
                      fixture, "--out", dir / "out", "--module-budget", "60"});
  if (r.exit_code != 0) return Fail(fmt::format("exit {}", r.exit_code));
  if (r.elapsed >= std::chrono::seconds(120)) return Fail("over 120 s");
  const std::string manifest = ReadFile(dir / "out/manifest.json");
  if (manifest != ReadFile(SEEDFORGE_GOLDEN_DIR "/png_manifest.json")) {
    return Fail("manifest differs from the golden file");
  }
  const nlohmann::json doc = nlohmann::json::parse(manifest);
  uint64_t sum = doc["totals"]["selected"];
  for (const auto &[k, v] : doc["totals"]["dropped"].items()) {
    sum += v.get<uint64_t>();
  }
  const uint64_t harvested = doc["totals"]["harvested"];
  if (sum != harvested || doc["files"].size() != harvested) {
    return Fail("accounting identity violated");
  }
  return Pass(fmt::format("{:.1f}s, {} harvested, {} selected",
                          r.elapsed.count() / 1000.0, harvested,
                          doc["totals"]["selected"].get<uint64_t>()));
}

// 9. Stalling services: modules stop within budget plus grace and the fast
// module still yields a corpus.
Verdict BudgetEnforcement() {
  TempDir dir;
  const std::string fixture = MakeFixtureDir(
      dir, {"--stall-seconds", "10", "--stall-hosts",
            "search.fixture,api.github.fixture,bugzilla.fixture,"
            "api.launchpad.fixture"});
  if (fixture.empty()) return Fail("fixture generation failed");
  RunOutcome r = RunCommand({SEEDFORGE_CLI, "gen", "--ext", "png", "--fixtures",
                      fixture, "--out", dir / "out", "--module-budget", "3"});
  if (r.exit_code != 0) return Fail(fmt::format("exit {}", r.exit_code));
  const nlohmann::json report =
      nlohmann::json::parse(ReadFile(dir / "out/report.json"));
  int64_t slowest = 0;
  for (const auto &[name, m] : report["modules"].items()) {
    slowest = std::max(slowest, m["elapsed_ms"].get<int64_t>());
  }
  if (slowest > 63000) return Fail(fmt::format("a module ran {} ms", slowest));
  const int files = report["corpus_files"];
  if (files <= 0) return Fail("empty corpus");
  return Pass(fmt::format("slowest module {} ms, {} seeds", slowest, files));
}

// 10. Internal minimizer: coverage preserved, survivors equal the oracle.
Verdict InternalMinimizer() {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = rng() % 21;
    std::vector<SeedFile> seeds;
    absl::flat_hash_map<std::string, std::vector<uint32_t>> maps;
    std::set<uint32_t> all;
    for (size_t i = 0; i < n; ++i) {
      seeds.push_back(MakeSeedFile(fmt::format("{}:{}", i, std::string(rng() % 8, 's')),
                                   SourceModule::kWeb, "",
                                   ValidationKind::kByMagic));
      std::vector<uint32_t> edges;
      for (uint64_t k = rng() % 9; k > 0; --k) edges.push_back(rng() % 64);
      all.insert(edges.begin(), edges.end());
      maps[seeds.back().digest] = edges;
    }
    FixtureCoverageRunner runner(maps);
    Budget budget;
    MinimizeResult got = MinimizeInternal(seeds, runner, 3, budget);
    // Oracle: order by (size, digest), then greedy from the definition.
    std::vector<SeedFile> ordered = seeds;
    std::sort(ordered.begin(), ordered.end(),
              [](const SeedFile &a, const SeedFile &b) {
                return std::tie(a.size_bytes, a.digest) <
                       std::tie(b.size_bytes, b.digest);
              });
    std::vector<std::vector<uint32_t>> ordered_maps;
    for (const SeedFile &s : ordered) ordered_maps.push_back(maps[s.digest]);
    std::set<std::string> want;
    for (size_t i : OracleGreedyCover(ordered_maps)) {
      want.insert(ordered[i].digest);
    }
    std::set<std::string> have;
    std::set<uint32_t> covered;
    for (const SeedFile &s : got.survivors) {
      have.insert(s.digest);
      covered.insert(maps[s.digest].begin(), maps[s.digest].end());
    }
    if (have != want) return Fail(fmt::format("case {}: survivors differ", trial));
    if (covered != all) return Fail(fmt::format("case {}: coverage lost", trial));
  }
  return Pass("200 cases");
}

// 11. Crash filter drops exactly the predicated seeds and keeps timeouts.
Verdict CrashFilterPredicate() {
  TempDir dir;
  WriteExecutable(dir / "target.sh", R"sh(#!/bin/sh
first=$(head -c 1 "$1" | od -An -tx1 | tr -d ' \n')
case "$first" in
  ff) kill -SEGV $$ ;;
  ee) sleep 30 ;;
esac
exit 0
)sh");
  std::mt19937_64 rng(11);
  std::vector<SeedFile> seeds;
  std::set<std::string> crashers, hangs;
  for (int i = 0; i < 40; ++i) {
    std::string content = fmt::format("seed{}", i);
    const int kind = static_cast<int>(rng() % 5);
    if (kind == 0) content.insert(content.begin(), '\xff');
    if (kind == 1 && hangs.size() < 2) content.insert(content.begin(), '\xee');
    seeds.push_back(MakeSeedFile(content, SourceModule::kWeb, "",
                                 ValidationKind::kByMagic));
    if (content[0] == '\xff') crashers.insert(seeds.back().digest);
    if (content[0] == '\xee') hangs.insert(seeds.back().digest);
  }
  CrashFilterOptions options;
  options.target.argv = {dir / "target.sh", "@@"};
  options.per_seed_timeout = std::chrono::milliseconds(500);
  options.work_dir = dir / "work";
  Budget budget;
  auto result = CrashFilter(seeds, options, budget);
  if (!result.ok()) return Fail(result.status().ToString());
  std::set<std::string> dropped, kept, timed_out(result->timed_out.begin(),
                                                 result->timed_out.end());
  for (const SeedFile &f : result->crashers) dropped.insert(f.digest);
  for (const SeedFile &f : result->kept) kept.insert(f.digest);
  if (dropped != crashers) return Fail("dropped set differs from predicate");
  for (const std::string &h : hangs) {
    if (!kept.count(h) || !timed_out.count(h)) return Fail("timeout seed lost");
  }
  if (kept.size() + dropped.size() != seeds.size()) return Fail("seed lost");
  return Pass(fmt::format("{} crashers dropped, {} timeouts kept",
                          dropped.size(), hangs.size()));
}

}  // namespace
}  // namespace seedforge

int main(int argc, char **argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_logtostderr = true;
  FLAGS_minloglevel = google::FATAL;
  using seedforge::Verdict;
  const std::pair<const char *, std::function<Verdict()>> criteria[] = {
      {"selection equals water-filling oracle", seedforge::SelectionOracle},
      {"balance across non-exhausted modules", seedforge::BalanceProperty},
      {"size filter boundary", seedforge::SizeBoundary},
      {"dedup uniqueness and idempotence", seedforge::DedupProperty},
      {"magic-number validation", seedforge::MagicValidation},
      {"wilcoxon exact p-values", seedforge::WilcoxonExactness},
      {"query plan counts", seedforge::QueryCounts},
      {"end-to-end golden manifest", seedforge::EndToEnd},
      {"budget enforcement under stalls", seedforge::BudgetEnforcement},
      {"internal minimizer", seedforge::InternalMinimizer},
      {"crash filter", seedforge::CrashFilterPredicate},
  };
  int failures = 0;
  int index = 0;
  for (const auto &[name, check] : criteria) {
    ++index;
    const Verdict v = check();
    failures += !v.pass;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << index << ". " << name
              << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
