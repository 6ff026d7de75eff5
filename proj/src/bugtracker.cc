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

#include "seedforge/bugtracker.h"

#include <algorithm>
#include <mutex>
#include <thread>
#include <utility>

#include <glog/logging.h>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/strings/escaping.h"
#include "fmt/format.h"
#include "json.hpp"
#include "json_util.h"
#include "seedforge/url.h"

namespace seedforge {
namespace {

using nlohmann::json;

std::string StripSlash(std::string s) {
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

absl::StatusOr<json> FetchJson(HttpClient &http, const std::string &url,
                               const Budget &budget,
                               uint64_t max_bytes = 16 << 20) {
  HttpRequest request;
  request.url = url;
  request.headers = {{"Accept", "application/json"}};
  request.max_body_bytes = max_bytes;
  absl::StatusOr<HttpResponse> response = http.Fetch(request, budget);
  if (!response.ok()) return response.status();
  if (response->status != 200) {
    return absl::UnavailableError(
        fmt::format("HTTP {} for {}", response->status, url));
  }
  json body = json::parse(response->body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded()) {
    return absl::DataLossError(fmt::format("malformed JSON from {}", url));
  }
  return body;
}

// JSON ids may be numbers or strings.
std::optional<std::string> IdString(const json &value) {
  if (value.is_number_integer()) return std::to_string(value.get<int64_t>());
  if (value.is_string() && !value.get<std::string>().empty()) {
    return value.get<std::string>();
  }
  return std::nullopt;
}

std::string LastPathSegment(std::string_view url) {
  while (!url.empty() && url.back() == '/') url.remove_suffix(1);
  const size_t slash = url.rfind('/');
  return std::string(slash == std::string_view::npos ? url
                                                     : url.substr(slash + 1));
}

}  // namespace

std::string_view TrackerKindName(TrackerKind kind) {
  return kind == TrackerKind::kLaunchpad ? "launchpad" : "bugzilla";
}

BugzillaClient::BugzillaClient(std::string base_url, HttpClient &http,
                               int page_size)
    : base_url_(StripSlash(std::move(base_url))), http_(http),
      page_size_(std::max(1, page_size)) {}

absl::StatusOr<std::vector<BugReportRef>> BugzillaClient::Search(
    const std::string &query, int limit, const Budget &budget) {
  std::vector<BugReportRef> refs;
  const std::string q = UrlEncode(query);
  for (int offset = 0; static_cast<int>(refs.size()) < limit;) {
    const int want = std::min(page_size_, limit - static_cast<int>(refs.size()));
    const std::string url = fmt::format(
        "{}/rest/bug?j_top=OR&f1=short_desc&o1=allwordssubstr&v1={}"
        "&f2=longdesc&o2=allwordssubstr&v2={}&limit={}&offset={}"
        "&include_fields=id,summary",
        base_url_, q, q, want, offset);
    absl::StatusOr<json> page = FetchJson(http_, url, budget);
    if (!page.ok()) {
      if (refs.empty()) return page.status();
      break;  // keep what the earlier pages gave
    }
    const json &bugs = Member(*page, "bugs");
    if (!bugs.is_array() || bugs.empty()) break;
    for (const json &bug : bugs) {
      if (static_cast<int>(refs.size()) >= limit) break;
      if (!bug.is_object() || !bug.contains("id")) continue;
      std::optional<std::string> id = IdString(bug["id"]);
      if (!id) continue;
      BugReportRef ref;
      ref.tracker = TrackerKind::kBugzilla;
      ref.bug_id = *id;
      ref.title = StringField(bug, "summary");
      ref.bug_url = fmt::format("{}/show_bug.cgi?id={}", base_url_, *id);
      refs.push_back(std::move(ref));
    }
    offset += static_cast<int>(bugs.size());
    if (static_cast<int>(bugs.size()) < want) break;
  }
  for (BugReportRef &ref : refs) {
    if (budget.Exhausted()) break;
    absl::StatusOr<json> meta = FetchJson(
        http_,
        fmt::format("{}/rest/bug/{}/attachment?exclude_fields=data", base_url_,
                    ref.bug_id),
        budget);
    if (!meta.ok()) {
      VLOG(1) << "bugzilla attachments of " << ref.bug_id << ": "
              << meta.status();
      continue;
    }
    const json &list = Member(Member(*meta, "bugs"), ref.bug_id.c_str());
    if (!list.is_array()) continue;
    for (const json &a : list) {
      if (!a.is_object() || !a.contains("id")) continue;
      std::optional<std::string> aid = IdString(a["id"]);
      if (!aid) continue;
      if (TruthyField(a, "is_obsolete")) continue;
      AttachmentRef attachment;
      attachment.id = *aid;
      attachment.filename = StringField(a, "file_name");
      attachment.declared_mime = StringField(a, "content_type");
      if (a.contains("size") && a["size"].is_number_integer() &&
          a["size"].get<int64_t>() >= 0) {
        attachment.size = a["size"].get<uint64_t>();
      }
      ref.attachment_refs.push_back(std::move(attachment));
    }
  }
  return refs;
}

absl::StatusOr<std::string> BugzillaClient::FetchAttachment(
    const BugReportRef &, const AttachmentRef &attachment, uint64_t max_bytes,
    const Budget &budget) {
  // Base64 inflates by 4/3; leave room for the JSON envelope.
  const uint64_t envelope_cap = max_bytes / 3 * 4 + 64 * 1024;
  absl::StatusOr<json> body = FetchJson(
      http_,
      fmt::format("{}/rest/bug/attachment/{}?include_fields=data", base_url_,
                  attachment.id),
      budget, envelope_cap);
  if (!body.ok()) return body.status();
  const json &data = Member(
      Member(Member(*body, "attachments"), attachment.id.c_str()), "data");
  if (!data.is_string()) {
    return absl::DataLossError("attachment reply without data");
  }
  std::string decoded;
  if (!absl::Base64Unescape(data.get<std::string>(), &decoded)) {
    return absl::DataLossError("attachment data is not base64");
  }
  if (decoded.size() > max_bytes) {
    return absl::ResourceExhaustedError("attachment over the size cap");
  }
  return decoded;
}

LaunchpadClient::LaunchpadClient(std::string api_base, HttpClient &http,
                                 std::string distribution, int page_size)
    : api_base_(StripSlash(std::move(api_base))), http_(http),
      distribution_(std::move(distribution)),
      page_size_(std::max(1, page_size)) {}

absl::StatusOr<std::vector<BugReportRef>> LaunchpadClient::Search(
    const std::string &query, int limit, const Budget &budget) {
  std::vector<std::string> bug_links;
  absl::flat_hash_set<std::string> seen;
  for (int start = 0; static_cast<int>(bug_links.size()) < limit;) {
    const std::string url = fmt::format(
        "{}/1.0/{}?ws.op=searchTasks&search_text={}&ws.size={}&ws.start={}",
        api_base_, distribution_, UrlEncode(query), page_size_, start);
    absl::StatusOr<json> page = FetchJson(http_, url, budget);
    if (!page.ok()) {
      if (bug_links.empty()) return page.status();
      break;
    }
    const json &entries = Member(*page, "entries");
    if (!entries.is_array() || entries.empty()) break;
    for (const json &task : entries) {
      if (static_cast<int>(bug_links.size()) >= limit) break;
      if (!task.is_object() || !task.contains("bug_link") ||
          !task["bug_link"].is_string()) {
        continue;
      }
      std::string link = task["bug_link"].get<std::string>();
      if (seen.insert(link).second) bug_links.push_back(std::move(link));
    }
    start += static_cast<int>(entries.size());
    if (Member(*page, "next_collection_link").is_null()) break;
  }
  std::vector<BugReportRef> refs;
  for (const std::string &link : bug_links) {
    if (budget.Exhausted()) break;
    absl::StatusOr<json> bug = FetchJson(http_, link, budget);
    if (!bug.ok() || !bug->is_object()) continue;
    BugReportRef ref;
    ref.tracker = TrackerKind::kLaunchpad;
    std::optional<std::string> id =
        bug->contains("id") ? IdString((*bug)["id"]) : std::nullopt;
    ref.bug_id = id ? *id : LastPathSegment(link);
    ref.title = StringField(*bug, "title");
    ref.bug_url = StringField(*bug, "web_link");
    if (ref.bug_url.empty()) {
      ref.bug_url = "https://bugs.launchpad.net/bugs/" + ref.bug_id;
    }
    const std::string attachments_link =
        StringField(*bug, "attachments_collection_link");
    if (!attachments_link.empty()) {
      absl::StatusOr<json> attachments =
          FetchJson(http_, attachments_link, budget);
      if (attachments.ok() && Member(*attachments, "entries").is_array()) {
        for (const json &a : Member(*attachments, "entries")) {
          if (!a.is_object()) continue;
          AttachmentRef attachment;
          attachment.data_url = StringField(a, "data_link");
          if (attachment.data_url.empty()) continue;
          attachment.id = LastPathSegment(StringField(a, "self_link").empty() ? attachment.data_url
                                              : StringField(a, "self_link"));
          attachment.filename = StringField(a, "title");
          attachment.declared_mime = StringField(a, "content_type");
          ref.attachment_refs.push_back(std::move(attachment));
        }
      }
    }
    refs.push_back(std::move(ref));
  }
  return refs;
}

absl::StatusOr<std::string> LaunchpadClient::FetchAttachment(
    const BugReportRef &, const AttachmentRef &attachment, uint64_t max_bytes,
    const Budget &budget) {
  HttpRequest request;
  request.url = attachment.data_url;
  request.max_body_bytes = max_bytes;
  absl::StatusOr<HttpResponse> response = http_.Fetch(request, budget);
  if (!response.ok()) return response.status();
  if (response->status != 200) {
    return absl::UnavailableError(
        fmt::format("HTTP {} for {}", response->status, attachment.data_url));
  }
  return std::move(response->body);
}

Subcorpus FetchAttachments(TrackerClient &client,
                           const std::vector<BugReportRef> &refs,
                           const FileTypeSpec &spec,
                           const BugTrackerOptions &options,
                           const Budget &budget) {
  Subcorpus out;
  out.module = SourceModule::kBugTracker;
  struct Job {
    const BugReportRef *bug;
    const AttachmentRef *attachment;
  };
  std::vector<Job> jobs;
  absl::flat_hash_set<std::string> seen;
  for (const BugReportRef &bug : refs) {
    for (const AttachmentRef &attachment : bug.attachment_refs) {
      const std::string key =
          fmt::format("{}:{}", TrackerKindName(bug.tracker), attachment.id);
      if (!seen.insert(key).second) continue;
      if (attachment.size && *attachment.size > options.max_file_size) {
        ++out.stats.rejected;
        VLOG(1) << "skipping attachment " << attachment.id << " ("
                << *attachment.size << " bytes)";
        continue;
      }
      jobs.push_back({&bug, &attachment});
    }
  }
  std::mutex mu;
  size_t next = 0;
  auto worker = [&] {
    while (true) {
      Job job;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= jobs.size() || budget.Exhausted()) return;
        job = jobs[next++];
      }
      SubcorpusStats stats;
      std::optional<SeedFile> file;
      absl::StatusOr<std::string> data = client.FetchAttachment(
          *job.bug, *job.attachment, options.max_file_size, budget);
      ++stats.fetched;
      if (!data.ok()) {
        if (absl::IsResourceExhausted(data.status())) ++stats.rejected;
        VLOG(1) << "attachment " << job.attachment->id << ": "
                << data.status();
      } else {
        stats.bytes_downloaded += data->size();
        ValidationResult validation =
            ValidateFile(*data, job.attachment->filename, spec);
        if (validation) {
          ++stats.validated;
          file = MakeSeedFile(*std::move(data), SourceModule::kBugTracker,
                              job.bug->bug_url, *validation);
        } else {
          ++stats.rejected;
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      out.stats += stats;
      if (file) out.files.push_back(*std::move(file));
    }
  };
  std::vector<std::thread> threads;
  const int n = std::max(
      1, std::min<int>(options.download_workers, static_cast<int>(jobs.size())));
  for (int i = 0; i < n; ++i) threads.emplace_back(worker);
  for (std::thread &t : threads) t.join();
  NormalizeSubcorpusFiles(out.files);
  return out;
}

ModuleResult RunBugTrackerSearch(const FileTypeSpec &spec, LlmClient &llm,
                                 const std::vector<TrackerClient *> &trackers,
                                 const BugTrackerOptions &options,
                                 const Budget &budget) {
  ModuleResult result;
  result.subcorpus.module = SourceModule::kBugTracker;
  absl::StatusOr<QueryPlan> plan =
      GenBugTrackerQueries(spec, llm, options.queries, budget);
  if (!plan.ok()) {
    result.status = plan.status();
    return result;
  }
  result.plans.push_back(*plan);

  std::vector<Subcorpus> parts(trackers.size());
  std::vector<std::vector<std::string>> warnings(trackers.size());
  std::vector<std::thread> threads;
  for (size_t i = 0; i < trackers.size(); ++i) {
    threads.emplace_back([&, i] {
      TrackerClient &tracker = *trackers[i];
      std::vector<BugReportRef> refs;
      for (const std::string &query : plan->queries) {
        if (budget.Exhausted()) break;
        absl::StatusOr<std::vector<BugReportRef>> found =
            tracker.Search(query, options.results_per_query, budget);
        if (!found.ok()) {
          LOG(WARNING) << TrackerKindName(tracker.kind()) << " search \""
                       << query << "\": " << found.status();
          warnings[i].push_back(fmt::format("{} query \"{}\": {}",
                                            TrackerKindName(tracker.kind()),
                                            query,
                                            std::string(
                                                found.status().message())));
          continue;
        }
        for (BugReportRef &ref : *found) refs.push_back(std::move(ref));
      }
      parts[i] = FetchAttachments(tracker, refs, spec, options, budget);
    });
  }
  for (std::thread &t : threads) t.join();
  for (size_t i = 0; i < parts.size(); ++i) {
    result.subcorpus.stats += parts[i].stats;
    for (SeedFile &file : parts[i].files) {
      result.subcorpus.files.push_back(std::move(file));
    }
    result.warnings.insert(result.warnings.end(), warnings[i].begin(),
                           warnings[i].end());
  }
  NormalizeSubcorpusFiles(result.subcorpus.files);
  return result;
}

}  // namespace seedforge
