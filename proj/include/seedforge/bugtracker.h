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

// Bug tracker harvesting: search Bugzilla- and Launchpad-style trackers for
// reports with attachments and keep the attachments of the target type.

#ifndef SEEDFORGE_BUGTRACKER_H_
#define SEEDFORGE_BUGTRACKER_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/budget.h"
#include "seedforge/corpus_model.h"
#include "seedforge/http_client.h"
#include "seedforge/module_result.h"
#include "seedforge/query_gen.h"

namespace seedforge {

enum class TrackerKind { kLaunchpad, kBugzilla };

std::string_view TrackerKindName(TrackerKind kind);

struct AttachmentRef {
  std::string id;
  std::string filename;
  std::string declared_mime;
  std::optional<uint64_t> size;  // when the tracker reports it
  std::string data_url;          // Launchpad only
};

struct BugReportRef {
  TrackerKind tracker = TrackerKind::kBugzilla;
  std::string bug_id;
  std::string title;
  std::string bug_url;  // human-facing page
  std::vector<AttachmentRef> attachment_refs;
};

class TrackerClient {
 public:
  virtual ~TrackerClient() = default;
  virtual TrackerKind kind() const = 0;

  // Bug reports matching `query`, at most `limit`, with attachment metadata
  // filled in. Malformed records are skipped.
  virtual absl::StatusOr<std::vector<BugReportRef>> Search(
      const std::string &query, int limit, const Budget &budget) = 0;

  // Attachment bytes. ResourceExhausted when larger than `max_bytes`.
  virtual absl::StatusOr<std::string> FetchAttachment(
      const BugReportRef &bug, const AttachmentRef &attachment,
      uint64_t max_bytes, const Budget &budget) = 0;
};

// Bugzilla REST API (/rest/bug, /rest/bug/{id}/attachment,
// /rest/bug/attachment/{id}). Summary and comments are searched.
class BugzillaClient : public TrackerClient {
 public:
  BugzillaClient(std::string base_url, HttpClient &http, int page_size = 50);
  TrackerKind kind() const override { return TrackerKind::kBugzilla; }
  absl::StatusOr<std::vector<BugReportRef>> Search(
      const std::string &query, int limit, const Budget &budget) override;
  absl::StatusOr<std::string> FetchAttachment(
      const BugReportRef &bug, const AttachmentRef &attachment,
      uint64_t max_bytes, const Budget &budget) override;

 private:
  std::string base_url_;
  HttpClient &http_;
  int page_size_;
};

// Launchpad web service (searchTasks on a distribution, then each bug's
// attachments collection).
class LaunchpadClient : public TrackerClient {
 public:
  LaunchpadClient(std::string api_base, HttpClient &http,
                  std::string distribution = "ubuntu", int page_size = 50);
  TrackerKind kind() const override { return TrackerKind::kLaunchpad; }
  absl::StatusOr<std::vector<BugReportRef>> Search(
      const std::string &query, int limit, const Budget &budget) override;
  absl::StatusOr<std::string> FetchAttachment(
      const BugReportRef &bug, const AttachmentRef &attachment,
      uint64_t max_bytes, const Budget &budget) override;

 private:
  std::string api_base_;
  HttpClient &http_;
  std::string distribution_;
  int page_size_;
};

struct BugTrackerOptions {
  int results_per_query = 50;
  int download_workers = 8;
  uint64_t max_file_size = uint64_t{1} << 20;
  QueryGenOptions queries;
};

// Downloads each attachment at most once per (tracker, attachment id) across
// `refs`; oversize attachments (by metadata or by stream) are skipped.
Subcorpus FetchAttachments(TrackerClient &client,
                           const std::vector<BugReportRef> &refs,
                           const FileTypeSpec &spec,
                           const BugTrackerOptions &options,
                           const Budget &budget);

// Generates the plan, queries every tracker concurrently and merges the
// attachments.
ModuleResult RunBugTrackerSearch(const FileTypeSpec &spec, LlmClient &llm,
                                 const std::vector<TrackerClient *> &trackers,
                                 const BugTrackerOptions &options,
                                 const Budget &budget);

}  // namespace seedforge

#endif  // SEEDFORGE_BUGTRACKER_H_
