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

#include "seedforge/commoncrawl.h"

#include <algorithm>
#include <mutex>
#include <thread>
#include <utility>

#include <glog/logging.h>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "fmt/format.h"
#include "json.hpp"
#include "json_util.h"
#include "seedforge/strings.h"
#include "seedforge/url.h"
#include "seedforge/warc.h"

namespace seedforge {
namespace {

std::string StripSlash(std::string s) {
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

// CDX fields are strings even when numeric.
std::optional<uint64_t> NumberField(const nlohmann::json &row,
                                    const char *key) {
  const nlohmann::json &v = Member(row, key);
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_string()) return ParseInt<uint64_t>(v.get<std::string>());
  return std::nullopt;
}

// Headers plus slack on top of the payload cap for the inflated record.
constexpr uint64_t kRecordOverhead = 256 * 1024;

}  // namespace

std::vector<CrawlRecordRef> ParseCdxLines(std::string_view text,
                                          const std::string &mime) {
  std::vector<CrawlRecordRef> refs;
  for (std::string_view line : Split(text, '\n')) {
    line = Trim(line);
    if (line.empty()) continue;
    nlohmann::json row =
        nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (row.is_discarded() || !row.is_object()) continue;
    CrawlRecordRef ref;
    ref.archive_path = StringField(row, "filename");
    ref.url = StringField(row, "url");
    ref.content_mime_type = StringField(row, "mime");
    std::optional<uint64_t> offset = NumberField(row, "offset");
    std::optional<uint64_t> length = NumberField(row, "length");
    if (ref.archive_path.empty() || ref.url.empty() || !offset || !length ||
        *length == 0) {
      continue;
    }
    // The server-side filter is trusted only as far as it agrees.
    if (ref.content_mime_type != mime) continue;
    const std::string status = StringField(row, "status");
    if (!status.empty() && status != "200") continue;
    ref.byte_offset = *offset;
    ref.record_length = *length;
    refs.push_back(std::move(ref));
  }
  return refs;
}

CdxIndex::CdxIndex(CommonCrawlOptions options, HttpClient &http)
    : options_(std::move(options)), http_(http) {
  options_.index_base = StripSlash(options_.index_base);
}

absl::StatusOr<std::string> CdxIndex::FetchWithRetry(const std::string &url,
                                                     const Budget &budget) {
  absl::Status last;
  for (int attempt = 0; attempt < std::max(1, options_.index_attempts);
       ++attempt) {
    if (attempt > 0 && !budget.SleepFor(options_.index_retry_delay)) break;
    HttpRequest request;
    request.url = url;
    request.max_body_bytes = 64 << 20;
    absl::StatusOr<HttpResponse> response = http_.Fetch(request, budget);
    if (!response.ok()) {
      last = response.status();
    } else if (response->status == 200) {
      return std::move(response->body);
    } else if (response->status == 404) {
      return std::string();  // "no captures found"
    } else {
      last = absl::UnavailableError(
          fmt::format("index HTTP {} for {}", response->status, url));
    }
    LOG(WARNING) << "index lookup attempt " << attempt + 1 << ": " << last;
  }
  if (last.ok()) last = absl::DeadlineExceededError("budget exhausted");
  return last;
}

absl::StatusOr<std::vector<CrawlRecordRef>> CdxIndex::Lookup(
    const std::string &mime, int limit, const Budget &budget) {
  std::vector<CrawlRecordRef> refs;
  absl::flat_hash_set<std::string> seen;
  for (const std::string &pattern : options_.url_patterns) {
    if (static_cast<int>(refs.size()) >= limit || budget.Exhausted()) break;
    const int want = limit - static_cast<int>(refs.size());
    const std::string url = fmt::format(
        "{}/{}-index?url={}&filter={}&output=json&limit={}",
        options_.index_base, options_.crawl_id, UrlEncode(pattern),
        UrlEncode("=mime:" + mime), want);
    absl::StatusOr<std::string> body = FetchWithRetry(url, budget);
    if (!body.ok()) return body.status();
    for (CrawlRecordRef &ref : ParseCdxLines(*body, mime)) {
      if (static_cast<int>(refs.size()) >= limit) break;
      const std::string key =
          fmt::format("{}@{}", ref.archive_path, ref.byte_offset);
      if (seen.insert(key).second) refs.push_back(std::move(ref));
    }
  }
  return refs;
}

absl::StatusOr<SeedFile> FetchRecord(const CrawlRecordRef &ref,
                                     const FileTypeSpec &spec,
                                     const CommonCrawlOptions &options,
                                     HttpClient &http, const Budget &budget) {
  if (ref.record_length == 0) return absl::InvalidArgumentError("empty range");
  HttpRequest request;
  request.url = fmt::format("{}/{}", StripSlash(options.data_base),
                            ref.archive_path);
  request.range = {ref.byte_offset, ref.byte_offset + ref.record_length - 1};
  request.max_body_bytes = ref.record_length;
  absl::StatusOr<HttpResponse> response = http.Fetch(request, budget);
  if (!response.ok()) return response.status();
  if (response->status != 206 && response->status != 200) {
    return absl::UnavailableError(
        fmt::format("range fetch HTTP {}", response->status));
  }
  if (response->body.size() != ref.record_length) {
    return absl::DataLossError(
        fmt::format("range fetch returned {} of {} bytes",
                    response->body.size(), ref.record_length));
  }
  absl::StatusOr<std::string> raw =
      GunzipMember(response->body, options.max_file_size + kRecordOverhead);
  if (!raw.ok()) return raw.status();
  absl::StatusOr<WarcRecord> record = ParseWarcRecord(*raw);
  if (!record.ok()) return record.status();
  if (record->Header("warc-type") != "response") {
    return absl::FailedPreconditionError(
        fmt::format("record type {}", record->Header("warc-type")));
  }
  if (!record->Header("warc-truncated").empty()) {
    return absl::DataLossError(fmt::format(
        "record truncated by the crawler ({})",
        record->Header("warc-truncated")));
  }
  absl::StatusOr<ArchivedResponse> archived =
      ParseArchivedResponse(record->block, options.max_file_size);
  if (!archived.ok()) return archived.status();
  if (archived->status != 200) {
    return absl::FailedPreconditionError(
        fmt::format("archived HTTP status {}", archived->status));
  }
  std::string path = ref.url;
  if (std::optional<Url> url = Url::Parse(ref.url)) path = url->path;
  ValidationResult validation = ValidateFile(archived->payload, path, spec);
  if (!validation) {
    return absl::InvalidArgumentError("payload fails validation");
  }
  return MakeSeedFile(std::move(archived->payload), SourceModule::kCommonCrawl,
                      ref.url, *validation);
}

ModuleResult RunCommonCrawlSearch(const FileTypeSpec &spec, CrawlIndex &index,
                                  HttpClient &http,
                                  const CommonCrawlOptions &options,
                                  const Budget &budget) {
  ModuleResult result;
  result.subcorpus.module = SourceModule::kCommonCrawl;
  if (spec.mime_types.empty()) {
    result.status = absl::FailedPreconditionError(
        "the file type has no mime types to look up");
    return result;
  }
  std::vector<CrawlRecordRef> refs;
  for (const std::string &mime : spec.mime_types) {
    if (budget.Exhausted()) break;
    absl::StatusOr<std::vector<CrawlRecordRef>> found =
        index.Lookup(mime, options.per_mime_limit, budget);
    if (!found.ok()) {
      LOG(WARNING) << "index lookup for " << mime << " failed; aborting: "
                   << found.status();
      result.status = found.status();
      return result;
    }
    LOG(INFO) << "commoncrawl: " << found->size() << " records for " << mime;
    refs.insert(refs.end(), found->begin(), found->end());
  }

  std::mutex mu;
  size_t next = 0;
  auto worker = [&] {
    while (true) {
      size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= refs.size() || budget.Exhausted()) return;
        i = next++;
      }
      absl::StatusOr<SeedFile> file =
          FetchRecord(refs[i], spec, options, http, budget);
      std::lock_guard<std::mutex> lock(mu);
      ++result.subcorpus.stats.fetched;
      result.subcorpus.stats.bytes_downloaded += refs[i].record_length;
      if (file.ok()) {
        ++result.subcorpus.stats.validated;
        result.subcorpus.files.push_back(*std::move(file));
      } else {
        ++result.subcorpus.stats.rejected;
        VLOG(1) << "record " << refs[i].url << ": " << file.status();
      }
    }
  };
  std::vector<std::thread> threads;
  const int n = std::max(
      1, std::min<int>(options.fetch_workers, static_cast<int>(refs.size())));
  for (int i = 0; i < n; ++i) threads.emplace_back(worker);
  for (std::thread &t : threads) t.join();
  NormalizeSubcorpusFiles(result.subcorpus.files);
  return result;
}

}  // namespace seedforge
