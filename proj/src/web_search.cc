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

#include "seedforge/web_search.h"

#include <utility>

#include <glog/logging.h>

#include "fmt/format.h"

namespace seedforge {
namespace {

void CrawlResults(const SearchRun &search, const FileTypeSpec &spec,
                  const CrawlOptions &crawl, HttpClient &http,
                  const Budget &budget, ModuleResult &result) {
  if (search.quota_exhausted) {
    result.warnings.push_back(fmt::format(
        "search quota exhausted after {} queries", search.queries_run - 1));
  }
  if (search.urls.empty()) {
    result.warnings.push_back("search returned no result URLs");
    return;
  }
  result.subcorpus = Crawl(search.urls, spec, crawl, http, budget);
}

}  // namespace

ModuleResult RunWebSearch(const FileTypeSpec &spec, LlmClient &llm,
                          SearchEngine &engine, HttpClient &http,
                          const WebSearchOptions &options,
                          const Budget &budget) {
  ModuleResult result;
  result.subcorpus.module = SourceModule::kWeb;
  absl::StatusOr<QueryPlan> plan =
      GenWebQueries(spec, llm, options.queries, budget);
  if (!plan.ok()) {
    result.status = plan.status();
    return result;
  }
  result.plans.push_back(*plan);
  SearchRun search =
      RunSearches(engine, plan->queries, options.results_per_query, budget);
  CrawlOptions crawl = options.crawl;
  crawl.module = SourceModule::kWeb;
  crawl.max_depth = 3;
  CrawlResults(search, spec, crawl, http, budget, result);
  return result;
}

ModuleResult RunFeatureSearch(const FileTypeSpec &spec, LlmClient &llm,
                              SearchEngine &engine, HttpClient &http,
                              const WebSearchOptions &options,
                              const Budget &budget) {
  ModuleResult result;
  result.subcorpus.module = SourceModule::kFeature;
  absl::StatusOr<QueryPlan> descriptors =
      GenFeatureDescriptors(spec, llm, options.queries, budget);
  if (!descriptors.ok()) {
    result.status = descriptors.status();
    return result;
  }
  result.plans.push_back(*descriptors);
  if (descriptors->queries.empty()) {
    result.warnings.push_back("model produced no feature descriptors");
    return result;
  }
  QueryPlan expanded = ExpandFeatures(spec, descriptors->queries, llm,
                                      options.queries, budget);
  result.plans.push_back(expanded);
  SearchRun search =
      RunSearches(engine, expanded.queries, options.results_per_query, budget);
  CrawlOptions crawl = options.crawl;
  crawl.module = SourceModule::kFeature;
  crawl.max_depth = std::nullopt;
  CrawlResults(search, spec, crawl, http, budget, result);
  return result;
}

}  // namespace seedforge
