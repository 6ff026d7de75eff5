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

#include "seedforge/assembly.h"

#include <map>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "json.hpp"
#include "oracles.h"
#include "test_support.h"

namespace seedforge {
namespace {

using ::seedforge::testing::FakeDigest;
using ::seedforge::testing::FakeSeed;
using ::seedforge::testing::OracleSelect;
using ::seedforge::testing::RandomCandidates;

std::vector<std::string> DigestsOf(const std::vector<SeedFile> &files) {
  std::vector<std::string> out;
  for (const SeedFile &f : files) out.push_back(f.digest);
  return out;
}

SeedFile Real(std::string content, SourceModule module = SourceModule::kWeb) {
  return MakeSeedFile(std::move(content), module, "https://h/f",
                      ValidationKind::kByMagic);
}

TEST(MergeAndFilterTest, SharedDigestAppearsOnce) {
  Subcorpus a{SourceModule::kGithub, {Real("same", SourceModule::kGithub)}, {}};
  Subcorpus b{SourceModule::kWeb, {Real("same"), Real("other")}, {}};
  MergeResult r = MergeAndFilter(std::vector<Subcorpus>{a, b});
  ASSERT_EQ(r.candidates.size(), 2u);
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].dropped_reason, DropReason::kDuplicate);
  EXPECT_EQ(r.dropped[0].source_module, SourceModule::kWeb);
}

TEST(MergeAndFilterTest, SizeBoundaryIsStrict) {
  const uint64_t max = uint64_t{1} << 20;
  std::vector<SeedFile> files = {Real(std::string(max, 'a')),
                                 Real(std::string(max + 1, 'b'))};
  MergeResult r = MergeAndFilter(files, max);
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].size_bytes, max);
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].size_bytes, max + 1);
  EXPECT_EQ(r.dropped[0].dropped_reason, DropReason::kOversize);
}

TEST(MergeAndFilterTest, ExactlyTheOversizeFilesAreDropped) {
  std::vector<SeedFile> files;
  std::set<std::string> oversize;
  for (int i = 0; i < 12; ++i) {
    const bool big = i % 4 == 1;
    files.push_back(Real(std::string(big ? 101 + i : 10 + i, 'a' + i)));
    if (big) oversize.insert(files.back().digest);
  }
  ASSERT_EQ(oversize.size(), 3u);
  MergeResult r = MergeAndFilter(files, 100);
  EXPECT_EQ(r.candidates.size(), 9u);
  std::set<std::string> dropped;
  for (const ManifestEntry &e : r.dropped) {
    EXPECT_EQ(e.dropped_reason, DropReason::kOversize);
    dropped.insert(e.digest);
  }
  EXPECT_EQ(dropped, oversize);
}

TEST(MergeAndFilterTest, PropertyDedupAndIdempotence) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<SeedFile> files;
    const int n = static_cast<int>(rng() % 80);
    for (int i = 0; i < n; ++i) {
      files.push_back(Real(std::string(rng() % 40, 'q'),
                           kAllSourceModules[rng() % 5]));
    }
    const uint64_t max = rng() % 50;
    MergeResult once = MergeAndFilter(files, max);
    std::set<std::string> seen;
    for (const SeedFile &f : once.candidates) {
      EXPECT_TRUE(seen.insert(f.digest).second);
      EXPECT_LE(f.size_bytes, max);
    }
    EXPECT_EQ(once.candidates.size() + once.dropped.size(), files.size());
    MergeResult twice = MergeAndFilter(once.candidates, max);
    EXPECT_EQ(DigestsOf(twice.candidates), DigestsOf(once.candidates));
    EXPECT_TRUE(twice.dropped.empty());
  }
}

TEST(SelectBalancedTest, UnderCapKeepsEverything) {
  std::vector<SeedFile> files;
  for (int i = 0; i < 10; ++i) {
    files.push_back(FakeSeed(SourceModule::kWeb, 10 - i, FakeDigest(i)));
  }
  EXPECT_EQ(SelectBalanced(files, 40000).size(), 10u);
}

TEST(SelectBalancedTest, EvenModules) {
  // A(3), B(3), cap 4: the two smallest of each.
  std::vector<SeedFile> files = {
      FakeSeed(SourceModule::kGithub, 30, "a3"),
      FakeSeed(SourceModule::kGithub, 10, "a1"),
      FakeSeed(SourceModule::kGithub, 20, "a2"),
      FakeSeed(SourceModule::kWeb, 5, "b1"),
      FakeSeed(SourceModule::kWeb, 50, "b3"),
      FakeSeed(SourceModule::kWeb, 7, "b2"),
  };
  std::vector<std::string> got = DigestsOf(SelectBalanced(files, 4));
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<std::string>{"a1", "a2", "b1", "b2"}));
  EXPECT_EQ(DigestsOf(SelectBalanced(files, 4)),
            DigestsOf(OracleSelect(files, 4)));
}

TEST(SelectBalancedTest, ExhaustedModuleIsSkipped) {
  // A(5), B(1), cap 4: B's one file and A's three smallest.
  std::vector<SeedFile> files = {
      FakeSeed(SourceModule::kGithub, 1, "a1"),
      FakeSeed(SourceModule::kGithub, 2, "a2"),
      FakeSeed(SourceModule::kGithub, 3, "a3"),
      FakeSeed(SourceModule::kGithub, 4, "a4"),
      FakeSeed(SourceModule::kGithub, 5, "a5"),
      FakeSeed(SourceModule::kWeb, 100, "b1"),
  };
  std::vector<std::string> got = DigestsOf(SelectBalanced(files, 4));
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<std::string>{"a1", "a2", "a3", "b1"}));
}

TEST(SelectBalancedTest, LeftoverGoesToEarlierModulesInRotation) {
  std::vector<SeedFile> files;
  for (SourceModule m : {SourceModule::kCommonCrawl, SourceModule::kWeb,
                         SourceModule::kGithub}) {
    for (int i = 0; i < 3; ++i) {
      files.push_back(FakeSeed(
          m, 1, std::string(SourceModuleName(m)) + std::to_string(i)));
    }
  }
  std::map<SourceModule, int> counts;
  for (const SeedFile &f : SelectBalanced(files, 5)) ++counts[f.source_module];
  EXPECT_EQ(counts[SourceModule::kGithub], 2);
  EXPECT_EQ(counts[SourceModule::kWeb], 2);
  EXPECT_EQ(counts[SourceModule::kCommonCrawl], 1);
}

TEST(SelectBalancedTest, MatchesOracleAndIgnoresInputOrder) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SeedFile> files = RandomCandidates(rng, 300, 5);
    const size_t cap = 1 + rng() % 60;
    const std::vector<std::string> expected =
        DigestsOf(OracleSelect(files, cap));
    EXPECT_EQ(DigestsOf(SelectBalanced(files, cap)), expected);
    std::shuffle(files.begin(), files.end(), rng);
    EXPECT_EQ(DigestsOf(SelectBalanced(files, cap)), expected);
    EXPECT_EQ(expected.size(), std::min(files.size(), cap));
  }
}

TEST(ManifestTest, EveryHarvestedFileAppearsOnce) {
  std::vector<Subcorpus> subcorpora(2);
  subcorpora[0].module = SourceModule::kGithub;
  subcorpora[1].module = SourceModule::kWeb;
  for (int i = 0; i < 6; ++i) {
    subcorpora[0].files.push_back(
        Real(std::string(i + 1, 'g'), SourceModule::kGithub));
    subcorpora[1].files.push_back(Real(std::string(i + 3, 'g')));
  }
  subcorpora[1].files.push_back(Real(std::string(500, 'z')));
  AssemblyOptions options;
  options.cap = 5;
  options.max_file_size = 100;
  Budget budget;
  auto result = Assemble(subcorpora, options, budget);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_EQ(result->entries.size(), 13u);
  ManifestCounts counts = CountManifest(result->entries);
  EXPECT_EQ(counts.harvested, 13u);
  EXPECT_EQ(counts.selected, 5u);
  EXPECT_EQ(counts.by_reason[static_cast<int>(DropReason::kDuplicate)], 4u);
  EXPECT_EQ(counts.by_reason[static_cast<int>(DropReason::kOversize)], 1u);
  EXPECT_EQ(counts.by_reason[static_cast<int>(DropReason::kNotSelected)], 3u);
  uint64_t sum = counts.selected;
  for (uint64_t c : counts.by_reason) sum += c;
  EXPECT_EQ(sum, counts.harvested);
  for (const ManifestEntry &e : result->entries) {
    EXPECT_EQ(e.selected, !e.dropped_reason.has_value());
  }
  EXPECT_EQ(result->corpus.size(), 5u);
}

TEST(ManifestTest, SerializationIsDeterministic) {
  std::vector<ManifestEntry> entries = {
      {"bb", 2, SourceModule::kWeb, "https://b", true, std::nullopt},
      {"aa", 1, SourceModule::kWeb, "https://a", false, DropReason::kDuplicate},
      {"aa", 1, SourceModule::kGithub, "https://a", true, std::nullopt},
  };
  std::vector<ModuleReport> modules = {
      {SourceModule::kGithub, true, "OK", 1, {3, 1, 2, 77}},
      {SourceModule::kWeb, true, "OK", 2, {}},
  };
  const nlohmann::json config = {{"cap", 5}};
  const std::string text = SerializeManifest(entries, config, modules);
  std::vector<ManifestEntry> reversed(entries.rbegin(), entries.rend());
  EXPECT_EQ(SerializeManifest(reversed, config, modules), text);
  ASSERT_FALSE(text.empty());
  EXPECT_EQ(text.back(), '\n');

  const nlohmann::json doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc["schema_version"], kManifestSchemaVersion);
  ASSERT_EQ(doc["files"].size(), 3u);
  EXPECT_EQ(doc["files"][0]["source_module"], "github");
  EXPECT_EQ(doc["files"][1]["dropped_reason"], "Duplicate");
  EXPECT_TRUE(doc["files"][0]["dropped_reason"].is_null());
  EXPECT_EQ(doc["totals"]["harvested"], 3);
  EXPECT_EQ(doc["totals"]["selected"], 2);
  EXPECT_EQ(doc["modules"]["github"]["fetched"], 3);
  EXPECT_FALSE(doc["modules"]["github"].contains("bytes_downloaded"));
}

TEST(MinimizerKindTest, NamesRoundTrip) {
  for (MinimizerKind k : {MinimizerKind::kAuto, MinimizerKind::kExternal,
                          MinimizerKind::kInternal, MinimizerKind::kOff}) {
    EXPECT_EQ(ParseMinimizerKind(MinimizerKindName(k)), k);
  }
  EXPECT_EQ(ParseMinimizerKind("cmin"), std::nullopt);
}

TEST(AssembleTest, InternalMinimizerDropsRedundantSeeds) {
  Subcorpus sub;
  sub.module = SourceModule::kWeb;
  sub.files = {Real("1234567890"), Real("abcdefghij"), Real(std::string(30, 'x'))};
  absl::flat_hash_map<std::string, std::vector<uint32_t>> maps = {
      {sub.files[0].digest, {1, 2}},
      {sub.files[1].digest, {2, 3}},
      {sub.files[2].digest, {1, 2, 3}},
  };
  FixtureCoverageRunner runner(maps);
  AssemblyOptions options;
  options.minimizer = MinimizerKind::kInternal;
  options.coverage = &runner;
  Budget budget;
  auto result = Assemble({sub}, options, budget);
  ASSERT_TRUE(result.ok());
  ASSERT_EQ(result->corpus.size(), 2u);
  for (const SeedFile &f : result->corpus) EXPECT_EQ(f.size_bytes, 10u);
  ManifestCounts counts = CountManifest(result->entries);
  EXPECT_EQ(counts.by_reason[static_cast<int>(DropReason::kMinimizedOut)], 1u);
}

TEST(AssembleTest, MissingCrashTargetFailsBeforeRunning) {
  AssemblyOptions options;
  options.crash_filter.emplace();
  options.crash_filter->target.argv = {"/nonexistent/seedforge-target"};
  Budget budget;
  auto result = Assemble({}, options, budget);
  EXPECT_EQ(result.status().code(), absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace seedforge
