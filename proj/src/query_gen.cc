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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include <glog/logging.h>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "fmt/format.h"
#include "json.hpp"
#include "json_util.h"
#include "seedforge/strings.h"

namespace seedforge {
namespace {

// The only part of a prompt that depends on the spec.
std::string TypePhrase(const FileTypeSpec &spec) {
  if (spec.is_description()) {
    return fmt::format("files described as \"{}\"", spec.description);
  }
  return fmt::format("files with the extension \".{}\"", spec.primary_extension);
}

constexpr std::string_view kOneQueryPerLine =
    "Output exactly one query per line, with no numbering, bullets, quotes "
    "or commentary.";

void Warn(QueryPlan &plan, std::string message) {
  LOG(WARNING) << SourceModuleName(plan.module) << " queries: " << message;
  plan.warnings.push_back(std::move(message));
}

std::optional<std::string> ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Strips one leading list marker: "-", "*", "•", "1.", "1)", "(1)".
std::string_view StripListMarker(std::string_view line) {
  if (line.starts_with("- ") || line.starts_with("* ") ||
      line.starts_with("+ ")) {
    return Trim(line.substr(2));
  }
  if (line.starts_with("\xE2\x80\xA2")) return Trim(line.substr(3));
  size_t i = line.starts_with("(") ? 1 : 0;
  const size_t digits_start = i;
  while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
  if (i > digits_start && i < line.size() &&
      (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
    if (i + 1 == line.size() || IsSpace(line[i + 1])) {
      return Trim(line.substr(i + 1));
    }
  }
  return line;
}

std::string_view StripQuotes(std::string_view line) {
  while (line.size() >= 2) {
    const char a = line.front(), b = line.back();
    if ((a == '"' && b == '"') || (a == '\'' && b == '\'') ||
        (a == '`' && b == '`')) {
      line = Trim(line.substr(1, line.size() - 2));
      continue;
    }
    if (line.starts_with("\xE2\x80\x9C") && line.ends_with("\xE2\x80\x9D") &&
        line.size() >= 6) {
      line = Trim(line.substr(3, line.size() - 6));
      continue;
    }
    break;
  }
  return line;
}

// Appends the entries of `more` not already present, case-insensitively.
void MergeDistinct(std::vector<std::string> &into,
                   const std::vector<std::string> &more,
                   absl::flat_hash_set<std::string> &seen) {
  for (const std::string &q : more) {
    if (seen.insert(ToLower(q)).second) into.push_back(q);
  }
}

}  // namespace

StubLlmClient::StubLlmClient(std::string dir) : dir_(std::move(dir)) {}

std::string StubLlmClient::PromptKey(std::string_view prompt) {
  return ContentDigest(prompt);
}

int StubLlmClient::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_;
}

absl::StatusOr<std::string> StubLlmClient::Complete(const std::string &prompt,
                                                    const ModelParams &,
                                                    const Budget &) {
  const std::string key = PromptKey(prompt);
  int repeat;
  {
    std::lock_guard<std::mutex> lock(mu_);
    repeat = repeats_[key]++;
    ++calls_;
  }
  const std::filesystem::path dir(dir_);
  if (repeat > 0) {
    if (auto text = ReadFile(dir / fmt::format("{}.{}.txt", key, repeat))) {
      return *text;
    }
  }
  if (auto text = ReadFile(dir / (key + ".txt"))) return *text;
  return absl::NotFoundError(
      fmt::format("no canned response {}.txt in {}", key, dir_));
}

ChatCompletionClient::ChatCompletionClient(std::string base_url,
                                           std::string api_key,
                                           HttpClient &http)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)),
      http_(http) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

absl::StatusOr<std::string> ChatCompletionClient::Complete(
    const std::string &prompt, const ModelParams &params,
    const Budget &budget) {
  nlohmann::json body = {
      {"model", params.model_name},
      {"temperature", params.temperature},
      {"max_tokens", params.max_output_tokens},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
  };
  HttpRequest request;
  request.url = base_url_ + "/chat/completions";
  request.method = "POST";
  request.content_type = "application/json";
  request.body = body.dump();
  request.max_body_bytes = 4 << 20;
  if (!api_key_.empty()) {
    request.headers.emplace_back("Authorization", "Bearer " + api_key_);
  }
  absl::StatusOr<HttpResponse> response = http_.Fetch(request, budget);
  if (!response.ok()) return response.status();
  if (response->status == 401 || response->status == 403) {
    return absl::UnauthenticatedError(
        fmt::format("chat completion: HTTP {}", response->status));
  }
  if (response->status == 429) {
    return absl::ResourceExhaustedError("chat completion: rate limited");
  }
  if (response->status != 200) {
    return absl::UnavailableError(
        fmt::format("chat completion: HTTP {}", response->status));
  }
  nlohmann::json reply = nlohmann::json::parse(response->body, nullptr,
                                               /*allow_exceptions=*/false);
  if (reply.is_discarded() || !reply.contains("choices") ||
      !reply["choices"].is_array() || reply["choices"].empty()) {
    return absl::DataLossError("chat completion: malformed reply");
  }
  const nlohmann::json &message = Member(reply["choices"][0], "message");
  if (!message.is_object() || !message.contains("content") ||
      !message["content"].is_string()) {
    return absl::DataLossError("chat completion: reply has no content");
  }
  return message["content"].get<std::string>();
}

std::string GithubPrompt(const FileTypeSpec &spec, int count) {
  return fmt::format(
      "We are building a seed corpus for fuzzing a parser of {type}.\n"
      "Write {n} diverse GitHub repository search queries. Target "
      "repositories that are likely to contain many such files and that are "
      "either broadly used or directly relevant to software testing: test "
      "suites, conformance samples, example collections, fuzzing corpora "
      "and regression inputs. Vary the wording and the angle of each "
      "query.\n{rule}",
      fmt::arg("type", TypePhrase(spec)), fmt::arg("n", count),
      fmt::arg("rule", kOneQueryPerLine));
}

std::string WebPrompt(const FileTypeSpec &spec, int count) {
  return fmt::format(
      "We are building a seed corpus for fuzzing a parser of {type}.\n"
      "Write a mix of {n} distinct web search queries for finding such files "
      "to download. About half should describe the typical content or use "
      "of the format (the way someone looking for clipart, ebooks or sample "
      "recordings would search). The rest should look explicitly for "
      "existing test files, sample files or fuzzing seed files of this "
      "type.\n{rule}",
      fmt::arg("type", TypePhrase(spec)), fmt::arg("n", count),
      fmt::arg("rule", kOneQueryPerLine));
}

std::string FeatureDescriptorPrompt(const FileTypeSpec &spec, int count) {
  return fmt::format(
      "We are building a seed corpus for fuzzing a parser of {type}.\n"
      "List {n} distinct features such a file can have: optional structures, "
      "encodings, embedded metadata, unusual sizes or layouts, and other "
      "properties that exercise different code in a parser.\n"
      "Example: for image files, one feature is \"image with a visible "
      "watermark\" and another is \"image containing embedded GPS location "
      "metadata\".\n"
      "Output exactly one feature per line, with no numbering, bullets, "
      "quotes or commentary.",
      fmt::arg("type", TypePhrase(spec)), fmt::arg("n", count));
}

std::string FeatureExpansionPrompt(const FileTypeSpec &spec,
                                   std::string_view descriptor, int count) {
  return fmt::format(
      "We are collecting {type} for a fuzzing seed corpus.\n"
      "Feature: {feature}\n"
      "Write {n} complete web search queries that would find downloadable "
      "files with this feature.\n{rule}",
      fmt::arg("type", TypePhrase(spec)), fmt::arg("feature", descriptor),
      fmt::arg("n", count), fmt::arg("rule", kOneQueryPerLine));
}

std::string BugTrackerPrompt(const FileTypeSpec &spec, int count) {
  return fmt::format(
      "We are building a seed corpus for fuzzing a parser of {type}.\n"
      "Write {n} search queries for the Ubuntu Launchpad and Red Hat "
      "Bugzilla bug trackers that find bug reports about handling such files "
      "and that are likely to carry a reproducing test file as an "
      "attachment (crashes, rendering errors, parse failures). Every query "
      "must name the file type. Keep each query to a few keywords.\n{rule}",
      fmt::arg("type", TypePhrase(spec)), fmt::arg("n", count),
      fmt::arg("rule", kOneQueryPerLine));
}

std::vector<std::string> ParseQueryLines(std::string_view response,
                                         std::vector<std::string> &warnings) {
  std::vector<std::string> out;
  absl::flat_hash_set<std::string> seen;
  int duplicates = 0;
  for (std::string_view line : Split(response, '\n')) {
    line = Trim(line);
    if (line.empty() || line.starts_with("```")) continue;
    line = StripQuotes(StripListMarker(line));
    if (line.empty()) continue;
    std::string query(line);
    if (query.size() > kMaxQueryLength) {
      size_t cut = kMaxQueryLength;
      // Do not split a UTF-8 sequence.
      while (cut > 0 && (static_cast<unsigned char>(query[cut]) & 0xC0) == 0x80) {
        --cut;
      }
      query = std::string(Trim(std::string_view(query).substr(0, cut)));
      warnings.push_back(
          fmt::format("truncated a query to {} characters", kMaxQueryLength));
    }
    if (!seen.insert(ToLower(query)).second) {
      ++duplicates;
      continue;
    }
    out.push_back(std::move(query));
  }
  if (duplicates > 0) {
    warnings.push_back(fmt::format("dropped {} duplicate line(s)", duplicates));
  }
  return out;
}

absl::StatusOr<QueryPlan> GeneratePlan(SourceModule module,
                                       const std::string &prompt, int count,
                                       const ModelParams &params,
                                       LlmClient &client,
                                       const Budget &budget) {
  QueryPlan plan;
  plan.module = module;
  plan.prompt_used = prompt;
  plan.model_name = params.model_name;
  absl::flat_hash_set<std::string> seen;
  // At most two successful completions; a malformed reply costs one attempt.
  int completions = 0;
  bool retried_malformed = false;
  while (completions < 2 && static_cast<int>(plan.queries.size()) < count) {
    absl::StatusOr<std::string> text = client.Complete(prompt, params, budget);
    if (!text.ok()) {
      if (absl::IsDataLoss(text.status()) && !retried_malformed) {
        retried_malformed = true;
        Warn(plan, fmt::format("malformed reply, retrying: {}",
                               std::string(text.status().message())));
        continue;
      }
      if (absl::IsDataLoss(text.status())) {
        Warn(plan, "malformed reply again; accepting shortfall");
        break;
      }
      return text.status();
    }
    ++completions;
    std::vector<std::string> parse_warnings;
    std::vector<std::string> lines = ParseQueryLines(*text, parse_warnings);
    for (std::string &w : parse_warnings) Warn(plan, std::move(w));
    MergeDistinct(plan.queries, lines, seen);
    if (completions == 1 && static_cast<int>(plan.queries.size()) < count) {
      Warn(plan, fmt::format("got {} of {} queries; prompting once more",
                             plan.queries.size(), count));
    }
  }
  if (static_cast<int>(plan.queries.size()) > count) {
    plan.queries.resize(count);
  } else if (static_cast<int>(plan.queries.size()) < count) {
    Warn(plan, fmt::format("accepting {} of {} queries", plan.queries.size(),
                           count));
  }
  return plan;
}

absl::StatusOr<QueryPlan> GenGithubQueries(const FileTypeSpec &spec,
                                           LlmClient &client,
                                           const QueryGenOptions &options,
                                           const Budget &budget) {
  return GeneratePlan(SourceModule::kGithub,
                      GithubPrompt(spec, options.github_count),
                      options.github_count, options.github_model, client,
                      budget);
}

absl::StatusOr<QueryPlan> GenWebQueries(const FileTypeSpec &spec,
                                        LlmClient &client,
                                        const QueryGenOptions &options,
                                        const Budget &budget) {
  return GeneratePlan(SourceModule::kWeb, WebPrompt(spec, options.web_count),
                      options.web_count, options.web_model, client, budget);
}

absl::StatusOr<QueryPlan> GenFeatureDescriptors(const FileTypeSpec &spec,
                                                LlmClient &client,
                                                const QueryGenOptions &options,
                                                const Budget &budget) {
  return GeneratePlan(SourceModule::kFeature,
                      FeatureDescriptorPrompt(spec, options.feature_count),
                      options.feature_count, options.feature_model, client,
                      budget);
}

QueryPlan ExpandFeatures(const FileTypeSpec &spec,
                         const std::vector<std::string> &descriptors,
                         LlmClient &client, const QueryGenOptions &options,
                         const Budget &budget) {
  QueryPlan plan;
  plan.module = SourceModule::kFeature;
  plan.model_name = options.feature_model.model_name;
  absl::flat_hash_set<std::string> seen;
  for (const std::string &descriptor : descriptors) {
    const std::string prompt =
        FeatureExpansionPrompt(spec, descriptor, options.queries_per_feature);
    if (plan.prompt_used.empty()) plan.prompt_used = prompt;
    absl::StatusOr<QueryPlan> part =
        GeneratePlan(SourceModule::kFeature, prompt,
                     options.queries_per_feature, options.feature_model,
                     client, budget);
    if (!part.ok()) {
      Warn(plan, fmt::format("skipping feature \"{}\": {}", descriptor,
                             std::string(part.status().message())));
      continue;
    }
    plan.warnings.insert(plan.warnings.end(), part->warnings.begin(),
                         part->warnings.end());
    MergeDistinct(plan.queries, part->queries, seen);
  }
  return plan;
}

absl::StatusOr<QueryPlan> GenBugTrackerQueries(const FileTypeSpec &spec,
                                               LlmClient &client,
                                               const QueryGenOptions &options,
                                               const Budget &budget) {
  return GeneratePlan(SourceModule::kBugTracker,
                      BugTrackerPrompt(spec, options.bugtracker_count),
                      options.bugtracker_count, options.bugtracker_model,
                      client, budget);
}

}  // namespace seedforge
