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

// Repository harvesting: repository search with generated queries, shallow
// clones of the top hits, and a sweep of each working tree for files of the
// target type.

#ifndef SEEDFORGE_GITHUB_SEARCH_H_
#define SEEDFORGE_GITHUB_SEARCH_H_

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/budget.h"
#include "seedforge/corpus_model.h"
#include "seedforge/http_client.h"
#include "seedforge/module_result.h"
#include "seedforge/query_gen.h"

namespace seedforge {

struct RepoRef {
  std::string full_name;  // "owner/name"
  std::string clone_url;
  std::string html_url;
  std::string matched_query;
  uint64_t size_kib = 0;  // as reported by the API; 0 if unknown
};

struct GithubOptions {
  std::string api_base = "https://api.github.com";
  std::string token;
  int results_per_query = 10;
  int clone_workers = 4;
  uint64_t max_clone_bytes = uint64_t{200} << 20;
  uint64_t max_file_size = uint64_t{1} << 20;
  // Rate-limit handling: wait initial, 2*initial, 4*initial, then skip.
  std::chrono::milliseconds backoff_initial{2000};
  int backoff_retries = 3;
  std::string git_binary = "git";
  std::string work_dir;  // empty: a fresh directory under the system tmp
  // When set, clone from "<clone_root>/<owner>/<name>" (a local path is
  // turned into a file:// URL) instead of the API's clone_url.
  std::string clone_root;
  QueryGenOptions queries;
};

// One search request. Error codes:
//   Unauthenticated    - 401; the caller aborts the module
//   ResourceExhausted  - still rate limited after all retries; skip query
//   anything else      - skip query
absl::StatusOr<std::vector<RepoRef>> SearchRepos(const std::string &query,
                                                 const GithubOptions &options,
                                                 HttpClient &http,
                                                 const Budget &budget);

// Shallow-clones `repo` into a scratch directory, sweeps the working tree and
// removes the clone. A failed clone yields an empty fragment.
Subcorpus HarvestRepo(const RepoRef &repo, const FileTypeSpec &spec,
                      const GithubOptions &options, const Budget &budget);

// Sweeps an already checked-out tree (skipping .git). Exposed for tests.
Subcorpus SweepTree(const std::string &root, const std::string &url_prefix,
                    const FileTypeSpec &spec, uint64_t max_file_size,
                    const Budget &budget);

ModuleResult RunGithubSearch(const FileTypeSpec &spec, LlmClient &llm,
                             HttpClient &http, const GithubOptions &options,
                             const Budget &budget);

}  // namespace seedforge

#endif  // SEEDFORGE_GITHUB_SEARCH_H_
