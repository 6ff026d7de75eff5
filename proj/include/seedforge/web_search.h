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

// The two search-engine driven modules. Web search crawls the results of 20
// generated queries to depth 3; feature search expands 33 feature
// descriptors into three queries each and crawls with no depth limit.

#ifndef SEEDFORGE_WEB_SEARCH_H_
#define SEEDFORGE_WEB_SEARCH_H_

#include "seedforge/budget.h"
#include "seedforge/corpus_model.h"
#include "seedforge/crawler.h"
#include "seedforge/http_client.h"
#include "seedforge/module_result.h"
#include "seedforge/query_gen.h"
#include "seedforge/search_engine.h"

namespace seedforge {

struct WebSearchOptions {
  int results_per_query = 10;
  // module and max_depth are set by the Run* functions.
  CrawlOptions crawl;
  QueryGenOptions queries;
};

ModuleResult RunWebSearch(const FileTypeSpec &spec, LlmClient &llm,
                          SearchEngine &engine, HttpClient &http,
                          const WebSearchOptions &options,
                          const Budget &budget);

ModuleResult RunFeatureSearch(const FileTypeSpec &spec, LlmClient &llm,
                              SearchEngine &engine, HttpClient &http,
                              const WebSearchOptions &options,
                              const Budget &budget);

}  // namespace seedforge

#endif  // SEEDFORGE_WEB_SEARCH_H_
