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

#ifndef SEEDFORGE_SEARCH_ENGINE_H_
#define SEEDFORGE_SEARCH_ENGINE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/budget.h"
#include "seedforge/http_client.h"

namespace seedforge {

class SearchEngine {
 public:
  virtual ~SearchEngine() = default;

  // Result URLs in engine order, at most `limit`, without duplicates.
  // ResourceExhausted means the quota is gone and no further query will
  // succeed.
  virtual absl::StatusOr<std::vector<std::string>> Search(
      const std::string &query, int limit, const Budget &budget) = 0;
};

enum class SearchApiFlavor {
  kGoogleCse,  // GET {base}/customsearch/v1?key&cx&q&num&start -> items[].link
  kSerpApi,    // GET {base}/search.json?engine=google&api_key&q&num&start
               //   -> organic_results[].link
};

std::optional<SearchApiFlavor> ParseSearchApiFlavor(std::string_view name);

struct JsonSearchEngineOptions {
  SearchApiFlavor flavor = SearchApiFlavor::kGoogleCse;
  std::string base_url = "https://www.googleapis.com";
  std::string api_key;
  std::string engine_id;  // "cx"; Google CSE only
};

class JsonApiSearchEngine : public SearchEngine {
 public:
  JsonApiSearchEngine(JsonSearchEngineOptions options, HttpClient &http);

  absl::StatusOr<std::vector<std::string>> Search(
      const std::string &query, int limit, const Budget &budget) override;

 private:
  std::string PageUrl(const std::string &query, int num, int start) const;

  JsonSearchEngineOptions options_;
  HttpClient &http_;
};

struct SearchRun {
  std::vector<std::string> urls;  // across all queries, first occurrence kept
  int queries_run = 0;
  int queries_failed = 0;
  bool quota_exhausted = false;
};

// Runs every query in order with `limit` results each, stopping early when
// the engine reports an exhausted quota or the budget runs out.
SearchRun RunSearches(SearchEngine &engine,
                      const std::vector<std::string> &queries, int limit,
                      const Budget &budget);

}  // namespace seedforge

#endif  // SEEDFORGE_SEARCH_ENGINE_H_
