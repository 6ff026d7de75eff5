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

// Breadth-first, multi-worker web crawler. Seeds and every discovered link
// are fetched at most once; HTML pages are parsed for further links, and any
// resource accepted by ValidateFile becomes a SeedFile.

#ifndef SEEDFORGE_CRAWLER_H_
#define SEEDFORGE_CRAWLER_H_

#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "seedforge/budget.h"
#include "seedforge/corpus_model.h"
#include "seedforge/http_client.h"

namespace seedforge {

struct CrawlOptions {
  SourceModule module = SourceModule::kWeb;
  // Seeds are depth 0. nullopt: no depth limit, only the budget stops us.
  std::optional<int> max_depth = 3;
  int parallelism = 16;
  std::chrono::milliseconds politeness_delay{1000};
  bool honor_robots = true;
  std::string user_agent = HttpClientOptions().user_agent;
  uint64_t max_file_size = uint64_t{1} << 20;
  uint64_t max_page_size = uint64_t{8} << 20;  // HTML pages only
};

// Frontier state. Exposed for tests; Crawl() owns one internally.
class CrawlFrontier {
 public:
  struct Entry {
    std::string url;  // canonical
    int depth = 0;
  };

  // Returns false when the URL was already seen (or does not parse).
  bool Add(const std::string &url, int depth);
  // Marks a URL fetched under another name (a redirect target).
  void MarkVisited(const std::string &canonical_url) {
    visited_.insert(canonical_url);
  }
  std::optional<Entry> Pop();
  bool Empty() const { return queue_.empty(); }
  size_t visited_count() const { return visited_.size(); }
  bool Visited(const std::string &canonical_url) const {
    return visited_.contains(canonical_url);
  }

 private:
  std::deque<Entry> queue_;
  absl::flat_hash_set<std::string> visited_;
};

Subcorpus Crawl(const std::vector<std::string> &seed_urls,
                const FileTypeSpec &spec, const CrawlOptions &options,
                HttpClient &http, const Budget &budget);

}  // namespace seedforge

#endif  // SEEDFORGE_CRAWLER_H_
