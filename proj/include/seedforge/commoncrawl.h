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

// Archived-crawl harvesting without a language model: look up index rows
// whose recorded mime type equals one of the spec's mime types, then range
// fetch and unpack each archived response.

#ifndef SEEDFORGE_COMMONCRAWL_H_
#define SEEDFORGE_COMMONCRAWL_H_

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/budget.h"
#include "seedforge/corpus_model.h"
#include "seedforge/http_client.h"
#include "seedforge/module_result.h"

namespace seedforge {

struct CrawlRecordRef {
  std::string archive_path;  // relative to the data base URL
  uint64_t byte_offset = 0;
  uint64_t record_length = 0;
  std::string url;
  std::string content_mime_type;

  bool operator==(const CrawlRecordRef &) const = default;
};

struct CommonCrawlOptions {
  std::string index_base = "https://index.commoncrawl.org";
  std::string data_base = "https://data.commoncrawl.org";
  std::string crawl_id = "CC-MAIN-2025-08";
  // The index API needs a URL pattern per lookup; each is tried in order
  // until the per-mime limit is reached.
  std::vector<std::string> url_patterns = {"*.org", "*.com", "*.net",
                                           "*.edu", "*.gov"};
  int per_mime_limit = 5000;
  int fetch_workers = 8;
  uint64_t max_file_size = uint64_t{1} << 20;
  int index_attempts = 3;
  std::chrono::milliseconds index_retry_delay{1000};
};

class CrawlIndex {
 public:
  virtual ~CrawlIndex() = default;
  // Rows whose mime equals `mime` exactly, at most `limit`.
  virtual absl::StatusOr<std::vector<CrawlRecordRef>> Lookup(
      const std::string &mime, int limit, const Budget &budget) = 0;
};

// CDX-style HTTP index: GET {index_base}/{crawl_id}-index?url=PATTERN
//   &filter==mime:MIME&output=json&limit=N, one JSON object per line.
class CdxIndex : public CrawlIndex {
 public:
  CdxIndex(CommonCrawlOptions options, HttpClient &http);
  absl::StatusOr<std::vector<CrawlRecordRef>> Lookup(
      const std::string &mime, int limit, const Budget &budget) override;

 private:
  absl::StatusOr<std::string> FetchWithRetry(const std::string &url,
                                             const Budget &budget);

  CommonCrawlOptions options_;
  HttpClient &http_;
};

// Parses CDX JSON lines, keeping rows whose mime equals `mime`.
std::vector<CrawlRecordRef> ParseCdxLines(std::string_view text,
                                          const std::string &mime);

// Range-fetches one record and validates its payload. Error codes:
//   ResourceExhausted - payload over max_file_size
//   DataLoss          - corrupt or truncated record
//   FailedPrecondition- not a 200 response record
//   InvalidArgument   - payload rejected by validation
absl::StatusOr<SeedFile> FetchRecord(const CrawlRecordRef &ref,
                                     const FileTypeSpec &spec,
                                     const CommonCrawlOptions &options,
                                     HttpClient &http, const Budget &budget);

ModuleResult RunCommonCrawlSearch(const FileTypeSpec &spec, CrawlIndex &index,
                                  HttpClient &http,
                                  const CommonCrawlOptions &options,
                                  const Budget &budget);

}  // namespace seedforge

#endif  // SEEDFORGE_COMMONCRAWL_H_
