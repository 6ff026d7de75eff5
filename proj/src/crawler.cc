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

#include "seedforge/crawler.h"

#include <algorithm>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>

#include <glog/logging.h>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "seedforge/html_links.h"
#include "seedforge/robots.h"
#include "seedforge/strings.h"
#include "seedforge/url.h"

namespace seedforge {

bool CrawlFrontier::Add(const std::string &url, int depth) {
  std::optional<Url> parsed = Url::Parse(url);
  if (!parsed || (parsed->scheme != "http" && parsed->scheme != "https")) {
    return false;
  }
  std::string canonical = CanonicalizeUrl(*parsed);
  if (!visited_.insert(canonical).second) return false;
  queue_.push_back({std::move(canonical), depth});
  return true;
}

std::optional<CrawlFrontier::Entry> CrawlFrontier::Pop() {
  if (queue_.empty()) return std::nullopt;
  Entry entry = std::move(queue_.front());
  queue_.pop_front();
  return entry;
}

namespace {

bool IsHtmlResponse(const HttpResponse &response) {
  const std::string mime = response.MimeType();
  if (mime == "text/html" || mime == "application/xhtml+xml") return true;
  return mime.empty() && LooksLikeHtml(response.body);
}

bool IsHtmlHeaders(const HttpHeaders &headers) {
  auto it = headers.find("content-type");
  if (it == headers.end()) return true;  // unknown yet; allow page-sized body
  const std::string mime = ToLower(
      Trim(std::string_view(it->second).substr(0, it->second.find(';'))));
  return mime == "text/html" || mime == "application/xhtml+xml";
}

class CrawlRun {
 public:
  CrawlRun(const FileTypeSpec &spec, const CrawlOptions &options,
           HttpClient &http, const Budget &budget)
      : spec_(spec), options_(options), http_(http), budget_(budget) {
    result_.module = options.module;
  }

  Subcorpus Run(const std::vector<std::string> &seeds) {
    for (const std::string &seed : seeds) frontier_.Add(seed, 0);
    const int workers = std::max(1, options_.parallelism);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int i = 0; i < workers; ++i) {
      threads.emplace_back([this] { WorkerLoop(); });
    }
    for (std::thread &t : threads) t.join();
    NormalizeSubcorpusFiles(result_.files);
    return std::move(result_);
  }

 private:
  struct Outcome {
    std::vector<std::string> links;
    std::string final_canonical;
    std::optional<SeedFile> file;
    SubcorpusStats stats;
  };

  void WorkerLoop() {
    while (true) {
      std::optional<CrawlFrontier::Entry> entry;
      {
        std::unique_lock<std::mutex> lock(mu_);
        while (true) {
          if (budget_.Exhausted()) {
            cv_.notify_all();
            return;
          }
          if (!frontier_.Empty()) break;
          if (in_flight_ == 0) {
            cv_.notify_all();
            return;
          }
          cv_.wait_for(lock, std::chrono::milliseconds(50));
        }
        entry = frontier_.Pop();
        ++in_flight_;
      }
      Outcome outcome = Process(*entry);
      {
        std::lock_guard<std::mutex> lock(mu_);
        if (!outcome.final_canonical.empty()) {
          frontier_.MarkVisited(outcome.final_canonical);
        }
        for (const std::string &link : outcome.links) {
          frontier_.Add(link, entry->depth + 1);
        }
        if (outcome.file) result_.files.push_back(*std::move(outcome.file));
        result_.stats += outcome.stats;
        --in_flight_;
      }
      cv_.notify_all();
    }
  }

  // Reserves the next request slot for `host` and sleeps until it. Returns
  // false if the budget ran out while waiting.
  bool WaitForHostSlot(const std::string &host) {
    Clock::time_point slot;
    {
      std::lock_guard<std::mutex> lock(politeness_mu_);
      Clock::time_point &next = next_request_[host];
      slot = std::max(Clock::now(), next);
      next = slot + options_.politeness_delay;
    }
    const Clock::duration wait = slot - Clock::now();
    if (wait > Clock::duration::zero()) return budget_.SleepFor(wait);
    return !budget_.Exhausted();
  }

  const RobotsRules &RobotsFor(const Url &url) {
    const std::string origin = url.Origin();
    std::unique_lock<std::mutex> lock(robots_mu_);
    while (true) {
      auto it = robots_.find(origin);
      if (it == robots_.end()) break;
      if (it->second) return *it->second;
      // Another worker is fetching it.
      robots_cv_.wait_for(lock, std::chrono::milliseconds(50));
      if (budget_.Exhausted()) return allow_all_;
    }
    robots_[origin] = nullptr;
    lock.unlock();

    auto rules = std::make_unique<RobotsRules>();
    if (WaitForHostSlot(url.Authority())) {
      HttpRequest request;
      request.url = origin + "/robots.txt";
      request.max_body_bytes = 512 * 1024;
      absl::StatusOr<HttpResponse> response = http_.Fetch(request, budget_);
      if (response.ok() && response->status == 200) {
        *rules = RobotsRules::Parse(response->body, options_.user_agent);
      } else if (!response.ok()) {
        VLOG(1) << "robots.txt for " << origin << ": " << response.status();
      }
    }
    lock.lock();
    std::unique_ptr<RobotsRules> &slot = robots_[origin];
    slot = std::move(rules);
    robots_cv_.notify_all();
    return *slot;
  }

  Outcome Process(const CrawlFrontier::Entry &entry) {
    Outcome outcome;
    std::optional<Url> url = Url::Parse(entry.url);
    if (!url) return outcome;
    if (options_.honor_robots && !RobotsFor(*url).Allowed(url->PathAndQuery())) {
      VLOG(1) << "robots.txt disallows " << entry.url;
      return outcome;
    }
    if (!WaitForHostSlot(url->Authority())) return outcome;

    HttpRequest request;
    request.url = entry.url;
    const uint64_t file_cap = options_.max_file_size;
    const uint64_t page_cap = std::max(options_.max_page_size, file_cap);
    request.body_cap = [file_cap, page_cap](int status,
                                            const HttpHeaders &headers) {
      if (status != 200) return uint64_t{64} << 10;
      return IsHtmlHeaders(headers) ? page_cap : file_cap;
    };
    absl::StatusOr<HttpResponse> response = http_.Fetch(request, budget_);
    ++outcome.stats.fetched;
    if (!response.ok()) {
      if (absl::IsResourceExhausted(response.status())) ++outcome.stats.rejected;
      VLOG(1) << "fetch " << entry.url << ": " << response.status();
      return outcome;
    }
    outcome.stats.bytes_downloaded += response->body.size();
    if (std::optional<std::string> final_url =
            CanonicalizeUrl(response->final_url);
        final_url && *final_url != entry.url) {
      outcome.final_canonical = *final_url;
    }
    if (response->status != 200) {
      VLOG(1) << "HTTP " << response->status << " for " << entry.url;
      return outcome;
    }

    const bool is_html = IsHtmlResponse(*response);
    std::optional<Url> final_url = Url::Parse(response->final_url);
    if (!final_url) final_url = url;
    ValidationResult validation =
        ValidateFile(response->body, final_url->path, spec_);
    if (!validation && final_url->path != url->path) {
      validation = ValidateFile(response->body, url->path, spec_);
    }
    const bool capture = validation.has_value() &&
                         response->body.size() <= options_.max_file_size &&
                         !(spec_.is_description() && is_html);
    if (capture) {
      ++outcome.stats.validated;
      outcome.file = MakeSeedFile(response->body, options_.module,
                                  CanonicalizeUrl(*final_url), *validation);
    } else if (!is_html) {
      ++outcome.stats.rejected;
    }

    const bool may_descend =
        !options_.max_depth.has_value() || entry.depth < *options_.max_depth;
    if (is_html && may_descend) {
      ExtractedLinks extracted = ExtractLinks(response->body);
      Url base = *final_url;
      if (!extracted.base_href.empty()) {
        if (std::optional<Url> b = final_url->Resolve(extracted.base_href)) {
          base = *b;
        }
      }
      for (const std::string &link : extracted.links) {
        std::optional<Url> target = base.Resolve(link);
        if (!target) continue;
        if (target->scheme != "http" && target->scheme != "https") continue;
        outcome.links.push_back(CanonicalizeUrl(*target));
      }
    }
    return outcome;
  }

  const FileTypeSpec &spec_;
  const CrawlOptions &options_;
  HttpClient &http_;
  const Budget &budget_;

  std::mutex mu_;
  std::condition_variable cv_;
  CrawlFrontier frontier_;
  int in_flight_ = 0;
  Subcorpus result_;

  std::mutex politeness_mu_;
  absl::flat_hash_map<std::string, Clock::time_point> next_request_;

  std::mutex robots_mu_;
  std::condition_variable robots_cv_;
  std::map<std::string, std::unique_ptr<RobotsRules>> robots_;
  const RobotsRules allow_all_;
};

}  // namespace

Subcorpus Crawl(const std::vector<std::string> &seed_urls,
                const FileTypeSpec &spec, const CrawlOptions &options,
                HttpClient &http, const Budget &budget) {
  CrawlRun run(spec, options, http, budget);
  Subcorpus subcorpus = run.Run(seed_urls);
  LOG(INFO) << SourceModuleName(options.module) << " crawl: "
            << subcorpus.stats.fetched << " fetched, "
            << subcorpus.files.size() << " files";
  return subcorpus;
}

}  // namespace seedforge
