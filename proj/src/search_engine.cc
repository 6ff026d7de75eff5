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

#include "seedforge/search_engine.h"

#include <algorithm>
#include <utility>

#include <glog/logging.h>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "fmt/format.h"
#include "json.hpp"
#include "seedforge/url.h"

namespace seedforge {

std::optional<SearchApiFlavor> ParseSearchApiFlavor(std::string_view name) {
  if (name == "google" || name == "google-cse") {
    return SearchApiFlavor::kGoogleCse;
  }
  if (name == "serpapi") return SearchApiFlavor::kSerpApi;
  return std::nullopt;
}

JsonApiSearchEngine::JsonApiSearchEngine(JsonSearchEngineOptions options,
                                         HttpClient &http)
    : options_(std::move(options)), http_(http) {
  while (!options_.base_url.empty() && options_.base_url.back() == '/') {
    options_.base_url.pop_back();
  }
}

std::string JsonApiSearchEngine::PageUrl(const std::string &query, int num,
                                         int start) const {
  switch (options_.flavor) {
    case SearchApiFlavor::kGoogleCse:
      return fmt::format("{}/customsearch/v1?key={}&cx={}&q={}&num={}&start={}",
                         options_.base_url, UrlEncode(options_.api_key),
                         UrlEncode(options_.engine_id), UrlEncode(query), num,
                         start);
    case SearchApiFlavor::kSerpApi:
      return fmt::format(
          "{}/search.json?engine=google&api_key={}&q={}&num={}&start={}",
          options_.base_url, UrlEncode(options_.api_key), UrlEncode(query), num,
          start - 1);
  }
  return "";
}

absl::StatusOr<std::vector<std::string>> JsonApiSearchEngine::Search(
    const std::string &query, int limit, const Budget &budget) {
  std::vector<std::string> urls;
  absl::flat_hash_set<std::string> seen;
  const char *const list_key =
      options_.flavor == SearchApiFlavor::kGoogleCse ? "items"
                                                     : "organic_results";
  // Both APIs serve at most 10 results per page.
  for (int start = 1; static_cast<int>(urls.size()) < limit && start <= 91;
       start += 10) {
    HttpRequest request;
    request.url = PageUrl(query, std::min(10, limit), start);
    request.max_body_bytes = 4 << 20;
    absl::StatusOr<HttpResponse> response = http_.Fetch(request, budget);
    if (!response.ok()) return response.status();
    if (response->status == 429 ||
        (response->status == 403 &&
         response->body.find("uota") != std::string::npos)) {
      return absl::ResourceExhaustedError(
          fmt::format("search quota exhausted (HTTP {})", response->status));
    }
    if (response->status != 200) {
      return absl::UnavailableError(
          fmt::format("search HTTP {} for \"{}\"", response->status, query));
    }
    nlohmann::json page = nlohmann::json::parse(response->body, nullptr,
                                                /*allow_exceptions=*/false);
    if (page.is_discarded() || !page.is_object()) {
      return absl::DataLossError("search: malformed JSON");
    }
    auto items = page.find(list_key);
    if (items == page.end() || !items->is_array() || items->empty()) break;
    for (const nlohmann::json &item : *items) {
      if (!item.is_object() || !item.contains("link") ||
          !item["link"].is_string()) {
        continue;
      }
      std::string link = item["link"].get<std::string>();
      if (seen.insert(link).second) urls.push_back(std::move(link));
      if (static_cast<int>(urls.size()) >= limit) break;
    }
    if (items->size() < 10) break;
  }
  return urls;
}

SearchRun RunSearches(SearchEngine &engine,
                      const std::vector<std::string> &queries, int limit,
                      const Budget &budget) {
  SearchRun run;
  absl::flat_hash_set<std::string> seen;
  for (const std::string &query : queries) {
    if (budget.Exhausted()) break;
    absl::StatusOr<std::vector<std::string>> urls =
        engine.Search(query, limit, budget);
    ++run.queries_run;
    if (!urls.ok()) {
      ++run.queries_failed;
      if (absl::IsResourceExhausted(urls.status())) {
        LOG(WARNING) << "search quota exhausted after " << run.queries_run - 1
                     << " queries; continuing with collected results";
        run.quota_exhausted = true;
        break;
      }
      LOG(WARNING) << "search \"" << query << "\": " << urls.status();
      continue;
    }
    for (std::string &url : *urls) {
      if (seen.insert(url).second) run.urls.push_back(std::move(url));
    }
  }
  return run;
}

}  // namespace seedforge
