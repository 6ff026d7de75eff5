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

// Search-query generation: prompt templates for each harvesting module, a
// line-oriented response parser, and the language-model client interface
// with a chat-completion implementation and a replaying stub.

#ifndef SEEDFORGE_QUERY_GEN_H_
#define SEEDFORGE_QUERY_GEN_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/budget.h"
#include "seedforge/corpus_model.h"
#include "seedforge/http_client.h"

namespace seedforge {

struct ModelParams {
  std::string model_name;
  double temperature = 1.0;
  int max_output_tokens = 4096;
};

// Implementations must be safe for concurrent calls.
class LlmClient {
 public:
  virtual ~LlmClient() = default;

  // Returns the completion text. Error codes:
  //   DataLoss           - the endpoint answered but the reply is malformed
  //   Unauthenticated    - credentials rejected
  //   anything else      - transport or client failure
  virtual absl::StatusOr<std::string> Complete(const std::string &prompt,
                                               const ModelParams &params,
                                               const Budget &budget) = 0;
};

// Replays canned completions from `dir`. The response to a prompt lives in
// <dir>/<sha256(prompt)>.txt; the n-th repeat of the same prompt (n >= 1)
// prefers <dir>/<sha256(prompt)>.<n>.txt when present.
class StubLlmClient : public LlmClient {
 public:
  explicit StubLlmClient(std::string dir);

  absl::StatusOr<std::string> Complete(const std::string &prompt,
                                       const ModelParams &params,
                                       const Budget &budget) override;

  static std::string PromptKey(std::string_view prompt);
  int calls() const;

 private:
  std::string dir_;
  mutable std::mutex mu_;
  std::map<std::string, int> repeats_;
  int calls_ = 0;
};

// OpenAI-style chat-completions endpoint: POST {base_url}/chat/completions.
class ChatCompletionClient : public LlmClient {
 public:
  ChatCompletionClient(std::string base_url, std::string api_key,
                       HttpClient &http);

  absl::StatusOr<std::string> Complete(const std::string &prompt,
                                       const ModelParams &params,
                                       const Budget &budget) override;

 private:
  std::string base_url_;
  std::string api_key_;
  HttpClient &http_;
};

struct QueryPlan {
  SourceModule module = SourceModule::kExternal;
  std::vector<std::string> queries;
  std::string prompt_used;
  std::string model_name;
  std::vector<std::string> warnings;
};

inline constexpr int kGithubQueryCount = 50;
inline constexpr int kWebQueryCount = 20;
inline constexpr int kFeatureDescriptorCount = 33;
inline constexpr int kQueriesPerFeature = 3;
inline constexpr int kBugTrackerQueryCount = 20;
inline constexpr size_t kMaxQueryLength = 256;

struct QueryGenOptions {
  int github_count = kGithubQueryCount;
  int web_count = kWebQueryCount;
  int feature_count = kFeatureDescriptorCount;
  int queries_per_feature = kQueriesPerFeature;
  int bugtracker_count = kBugTrackerQueryCount;
  ModelParams github_model{"gpt-4.1"};
  ModelParams web_model{"gpt-4o"};
  ModelParams feature_model{"gpt-4.1"};
  ModelParams bugtracker_model{"gpt-4o"};
};

// Prompt templates. Each interpolates the extension or the description of
// `spec`, never both.
std::string GithubPrompt(const FileTypeSpec &spec, int count);
std::string WebPrompt(const FileTypeSpec &spec, int count);
std::string FeatureDescriptorPrompt(const FileTypeSpec &spec, int count);
std::string FeatureExpansionPrompt(const FileTypeSpec &spec,
                                   std::string_view descriptor, int count);
std::string BugTrackerPrompt(const FileTypeSpec &spec, int count);

// Splits a completion into one entry per line: strips bullets, numbering,
// surrounding quotes and code fences; drops blank lines; truncates entries
// over kMaxQueryLength. Case-insensitive duplicates are dropped. Notes for
// the caller go to `warnings`.
std::vector<std::string> ParseQueryLines(std::string_view response,
                                         std::vector<std::string> &warnings);

// Runs `prompt` and returns up to `count` distinct lines. When fewer come
// back, the prompt is issued once more and the results are merged; any
// remaining shortfall is accepted with a warning. Malformed replies are
// retried once. Other client errors are returned.
absl::StatusOr<QueryPlan> GeneratePlan(SourceModule module,
                                       const std::string &prompt, int count,
                                       const ModelParams &params,
                                       LlmClient &client, const Budget &budget);

absl::StatusOr<QueryPlan> GenGithubQueries(const FileTypeSpec &spec,
                                           LlmClient &client,
                                           const QueryGenOptions &options,
                                           const Budget &budget);
absl::StatusOr<QueryPlan> GenWebQueries(const FileTypeSpec &spec,
                                        LlmClient &client,
                                        const QueryGenOptions &options,
                                        const Budget &budget);
// The plan's queries are the feature descriptors.
absl::StatusOr<QueryPlan> GenFeatureDescriptors(const FileTypeSpec &spec,
                                                LlmClient &client,
                                                const QueryGenOptions &options,
                                                const Budget &budget);
// Expands every descriptor into `queries_per_feature` queries. A failing
// descriptor is skipped with a warning. The result is the concatenation,
// deduplicated with order preserved.
QueryPlan ExpandFeatures(const FileTypeSpec &spec,
                         const std::vector<std::string> &descriptors,
                         LlmClient &client, const QueryGenOptions &options,
                         const Budget &budget);
absl::StatusOr<QueryPlan> GenBugTrackerQueries(const FileTypeSpec &spec,
                                               LlmClient &client,
                                               const QueryGenOptions &options,
                                               const Budget &budget);

}  // namespace seedforge

#endif  // SEEDFORGE_QUERY_GEN_H_
