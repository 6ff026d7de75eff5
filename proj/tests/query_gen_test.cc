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

#include "seedforge/query_gen.h"

#include <set>

#include "fmt/format.h"
#include "gtest/gtest.h"
#include "seedforge/signature_table.h"
#include "test_support.h"

namespace seedforge {
namespace {

using ::seedforge::testing::TempDir;
using ::seedforge::testing::WriteFile;

FileTypeSpec Png() { return *SignatureTable::Bundled().SpecForExtension("png"); }

std::string Lines(const std::string &prefix, int n) {
  std::string out;
  for (int i = 1; i <= n; ++i) out += fmt::format("{}. {} {}\n", i, prefix, i);
  return out;
}

void Stub(const std::string &dir, const std::string &prompt,
          const std::string &reply, int repeat = 0) {
  const std::string key = StubLlmClient::PromptKey(prompt);
  WriteFile(dir + "/" + key + (repeat ? fmt::format(".{}", repeat) : "") +
                ".txt",
            reply);
}

TEST(ParseQueryLinesTest, StripsDecoration) {
  std::vector<std::string> warnings;
  auto lines = ParseQueryLines(
      "```\n1. first query\n- \"second query\"\n* third\n\n  2) fourth  \n"
      "First Query\n```\n",
      warnings);
  EXPECT_EQ(lines, (std::vector<std::string>{"first query", "second query",
                                             "third", "fourth"}));
}

TEST(ParseQueryLinesTest, TruncatesLongEntries) {
  std::vector<std::string> warnings;
  auto lines = ParseQueryLines(std::string(400, 'q'), warnings);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].size(), kMaxQueryLength);
  EXPECT_FALSE(warnings.empty());
}

TEST(PromptTest, InterpolatesExtensionOrDescription) {
  const std::string by_ext = GithubPrompt(Png(), 50);
  EXPECT_NE(by_ext.find(".png"), std::string::npos);
  EXPECT_NE(by_ext.find("50"), std::string::npos);
  auto desc = MakeDescriptionSpec("php_serialize");
  ASSERT_TRUE(desc.ok());
  const std::string by_desc = WebPrompt(*desc, 20);
  EXPECT_NE(by_desc.find("php_serialize"), std::string::npos);
  EXPECT_EQ(by_desc.find(".png"), std::string::npos);
  EXPECT_NE(FeatureExpansionPrompt(Png(), "interlaced", 3).find("interlaced"),
            std::string::npos);
}

TEST(StubLlmClientTest, ReplaysAndPrefersNumberedRepeats) {
  TempDir dir;
  Stub(dir.path(), "hello", "one\n");
  Stub(dir.path(), "hello", "two\n", 1);
  StubLlmClient client(dir.path());
  Budget budget;
  EXPECT_EQ(*client.Complete("hello", {}, budget), "one\n");
  EXPECT_EQ(*client.Complete("hello", {}, budget), "two\n");
  EXPECT_EQ(*client.Complete("hello", {}, budget), "one\n");
  EXPECT_FALSE(client.Complete("unknown", {}, budget).ok());
  EXPECT_EQ(client.calls(), 4);
}

TEST(QueryPlanTest, CountsUnderStub) {
  TempDir dir;
  const FileTypeSpec spec = Png();
  QueryGenOptions options;
  Stub(dir.path(), GithubPrompt(spec, 50), Lines("github", 50));
  Stub(dir.path(), WebPrompt(spec, 20), Lines("web", 20));
  Stub(dir.path(), FeatureDescriptorPrompt(spec, 33), Lines("feature", 33));
  for (int i = 1; i <= 33; ++i) {
    const std::string descriptor = fmt::format("feature {}", i);
    Stub(dir.path(), FeatureExpansionPrompt(spec, descriptor, 3),
         Lines(descriptor + " query", 3));
  }
  StubLlmClient client(dir.path());
  Budget budget;
  auto github = GenGithubQueries(spec, client, options, budget);
  ASSERT_TRUE(github.ok()) << github.status();
  EXPECT_EQ(github->queries.size(), 50u);
  EXPECT_EQ(github->model_name, "gpt-4.1");
  auto web = GenWebQueries(spec, client, options, budget);
  ASSERT_TRUE(web.ok());
  EXPECT_EQ(web->queries.size(), 20u);
  EXPECT_EQ(web->model_name, "gpt-4o");
  auto descriptors = GenFeatureDescriptors(spec, client, options, budget);
  ASSERT_TRUE(descriptors.ok());
  EXPECT_EQ(descriptors->queries.size(), 33u);
  QueryPlan expanded =
      ExpandFeatures(spec, descriptors->queries, client, options, budget);
  EXPECT_EQ(expanded.queries.size(), 99u);
  EXPECT_EQ(std::set<std::string>(expanded.queries.begin(),
                                  expanded.queries.end())
                .size(),
            99u);
}

TEST(QueryPlanTest, ShortfallRetriesOnceThenWarns) {
  TempDir dir;
  const FileTypeSpec spec = Png();
  const std::string prompt = WebPrompt(spec, 20);
  Stub(dir.path(), prompt, Lines("web", 12));
  Stub(dir.path(), prompt, Lines("web", 15), 1);
  StubLlmClient client(dir.path());
  Budget budget;
  auto plan = GenWebQueries(spec, client, QueryGenOptions{}, budget);
  ASSERT_TRUE(plan.ok());
  EXPECT_EQ(plan->queries.size(), 15u);
  EXPECT_EQ(client.calls(), 2);
  EXPECT_FALSE(plan->warnings.empty());
}

TEST(QueryPlanTest, FailingDescriptorIsSkipped) {
  TempDir dir;
  const FileTypeSpec spec = Png();
  Stub(dir.path(), FeatureExpansionPrompt(spec, "a", 3), Lines("a", 3));
  StubLlmClient client(dir.path());
  Budget budget;
  QueryPlan plan = ExpandFeatures(spec, {"a", "b"}, client, {}, budget);
  EXPECT_EQ(plan.queries.size(), 3u);
  EXPECT_FALSE(plan.warnings.empty());
}

}  // namespace
}  // namespace seedforge
