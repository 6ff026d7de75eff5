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

#include "seedforge/github_search.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
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
#include "seedforge/subprocess.h"
#include "seedforge/url.h"

namespace seedforge {
namespace {

namespace fs = std::filesystem;

bool IsRateLimited(const HttpResponse &response) {
  if (response.status == 429) return true;
  return response.status == 403 &&
         (response.Header("x-ratelimit-remaining") == "0" ||
          response.body.find("rate limit") != std::string::npos);
}

uint64_t TreeBytes(const fs::path &root) {
  uint64_t total = 0;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(root, ec), end; !ec && it != end;
       it.increment(ec)) {
    std::error_code size_ec;
    if (it->is_regular_file(size_ec)) {
      const uintmax_t size = it->file_size(size_ec);
      if (!size_ec) total += size;
    }
  }
  return total;
}

std::optional<std::string> ReadPrefix(const fs::path &path, uint64_t max) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string data(max, '\0');
  in.read(data.data(), static_cast<std::streamsize>(max));
  data.resize(static_cast<size_t>(in.gcount()));
  return data;
}

size_t MagicWindow(const FileTypeSpec &spec) {
  size_t window = 0;
  for (const MagicSignature &sig : spec.magic_signatures) {
    window = std::max(window, sig.end());
  }
  return window;
}

fs::path ScratchRoot(const GithubOptions &options) {
  if (!options.work_dir.empty()) return options.work_dir;
  static std::atomic<int> counter{0};
  return fs::temp_directory_path() /
         fmt::format("seedforge-github-{}-{}", getpid(), counter++);
}

}  // namespace

absl::StatusOr<std::vector<RepoRef>> SearchRepos(const std::string &query,
                                                 const GithubOptions &options,
                                                 HttpClient &http,
                                                 const Budget &budget) {
  std::string base = options.api_base;
  while (!base.empty() && base.back() == '/') base.pop_back();
  HttpRequest request;
  request.url = fmt::format("{}/search/repositories?q={}&per_page={}", base,
                            UrlEncode(query), options.results_per_query);
  request.headers = {{"Accept", "application/vnd.github+json"},
                     {"X-GitHub-Api-Version", "2022-11-28"}};
  if (!options.token.empty()) {
    request.headers.emplace_back("Authorization", "Bearer " + options.token);
  }
  request.max_body_bytes = 8 << 20;

  std::chrono::milliseconds delay = options.backoff_initial;
  for (int attempt = 0;; ++attempt) {
    absl::StatusOr<HttpResponse> response = http.Fetch(request, budget);
    if (!response.ok()) return response.status();
    if (response->status == 401) {
      return absl::UnauthenticatedError("repository search: HTTP 401");
    }
    if (IsRateLimited(*response)) {
      if (attempt >= options.backoff_retries) {
        return absl::ResourceExhaustedError(fmt::format(
            "rate limited; skipping query after {} retries", attempt));
      }
      LOG(INFO) << "repository search rate limited; retrying in "
                << delay.count() << " ms";
      if (!budget.SleepFor(delay)) {
        return absl::DeadlineExceededError("budget ran out during backoff");
      }
      delay *= 2;
      continue;
    }
    if (response->status != 200) {
      return absl::UnavailableError(
          fmt::format("repository search: HTTP {}", response->status));
    }
    nlohmann::json body = nlohmann::json::parse(response->body, nullptr,
                                                /*allow_exceptions=*/false);
    if (body.is_discarded() || !body.contains("items") ||
        !body["items"].is_array()) {
      return absl::DataLossError("repository search: malformed reply");
    }
    std::vector<RepoRef> repos;
    for (const nlohmann::json &item : body["items"]) {
      if (static_cast<int>(repos.size()) >= options.results_per_query) break;
      if (!item.is_object() || !item.contains("full_name") ||
          !item["full_name"].is_string()) {
        continue;
      }
      RepoRef repo;
      repo.full_name = item["full_name"].get<std::string>();
      repo.clone_url = StringField(item, "clone_url");
      repo.html_url = StringField(item, "html_url");
      if (repo.html_url.empty()) {
        repo.html_url = "https://github.com/" + repo.full_name;
      }
      if (repo.clone_url.empty()) repo.clone_url = repo.html_url + ".git";
      if (item.contains("size") && item["size"].is_number_unsigned()) {
        repo.size_kib = item["size"].get<uint64_t>();
      }
      repo.matched_query = query;
      repos.push_back(std::move(repo));
    }
    return repos;
  }
}

Subcorpus SweepTree(const std::string &root, const std::string &url_prefix,
                    const FileTypeSpec &spec, uint64_t max_file_size,
                    const Budget &budget) {
  Subcorpus out;
  out.module = SourceModule::kGithub;
  const size_t window = MagicWindow(spec);
  std::vector<fs::path> files;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, ec), end;
  for (; !ec && it != end; it.increment(ec)) {
    if (it->path().filename() == ".git") {
      it.disable_recursion_pending();
      continue;
    }
    std::error_code type_ec;
    if (it->is_symlink(type_ec) || !it->is_regular_file(type_ec)) continue;
    files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path &path : files) {
    if (budget.Exhausted()) break;
    const std::string rel = fs::relative(path, root, ec).generic_string();
    std::error_code size_ec;
    const uint64_t size = fs::file_size(path, size_ec);
    if (size_ec) continue;
    ++out.stats.fetched;
    if (size > max_file_size) {
      ++out.stats.rejected;
      continue;
    }
    // Decide from the name or the magic window before reading everything.
    ValidationResult validation = ValidateFile({}, rel, spec);
    if (!validation && window > 0) {
      std::optional<std::string> head = ReadPrefix(path, window);
      if (head) validation = ValidateFile(*head, rel, spec);
    }
    if (!validation) {
      ++out.stats.rejected;
      continue;
    }
    std::optional<std::string> content = ReadPrefix(path, max_file_size + 1);
    if (!content || content->size() > max_file_size) {
      ++out.stats.rejected;
      continue;
    }
    ++out.stats.validated;
    out.files.push_back(MakeSeedFile(*std::move(content), SourceModule::kGithub,
                                     url_prefix + "/" + rel, *validation));
  }
  return out;
}

Subcorpus HarvestRepo(const RepoRef &repo, const FileTypeSpec &spec,
                      const GithubOptions &options, const Budget &budget) {
  Subcorpus out;
  out.module = SourceModule::kGithub;
  if (budget.Exhausted()) return out;
  if (repo.size_kib > 0 && repo.size_kib * 1024 > options.max_clone_bytes) {
    LOG(INFO) << "skipping " << repo.full_name << ": reported size "
              << repo.size_kib << " KiB over the clone cap";
    return out;
  }
  std::string source = repo.clone_url;
  if (!options.clone_root.empty()) {
    source = options.clone_root + "/" + repo.full_name;
    if (source.find("://") == std::string::npos) {
      source = "file://" + fs::absolute(source).string();
    }
  }
  const fs::path scratch = ScratchRoot(options);
  const bool own_scratch = options.work_dir.empty();
  std::error_code ec;
  fs::create_directories(scratch, ec);
  std::string dir_name = repo.full_name;
  std::replace(dir_name.begin(), dir_name.end(), '/', '_');
  const fs::path dest = scratch / dir_name;
  fs::remove_all(dest, ec);

  SubprocessOptions clone;
  clone.argv = {options.git_binary, "clone",  "--depth", "1",
                "--single-branch",  "--no-tags", "--quiet", source,
                dest.string()};
  clone.env = {{"GIT_TERMINAL_PROMPT", "0"}, {"GIT_LFS_SKIP_SMUDGE", "1"}};
  clone.capture_output = true;
  clone.max_output_bytes = 16 << 10;
  clone.budget = &budget;
  Clock::time_point next_check = Clock::now();
  bool oversize = false;
  clone.keep_running = [&] {
    if (Clock::now() < next_check) return true;
    next_check = Clock::now() + std::chrono::milliseconds(250);
    if (TreeBytes(dest) > options.max_clone_bytes) {
      oversize = true;
      return false;
    }
    return true;
  };
  absl::StatusOr<SubprocessResult> result = RunSubprocess(clone);
  if (!result.ok() || !result->ok()) {
    if (oversize) {
      LOG(WARNING) << "clone of " << repo.full_name << " aborted over "
                   << options.max_clone_bytes << " bytes";
    } else if (!result.ok()) {
      LOG(WARNING) << "clone of " << repo.full_name << ": " << result.status();
    } else {
      LOG(WARNING) << "clone of " << repo.full_name << " failed: "
                   << Trim(result->output);
    }
    fs::remove_all(own_scratch ? scratch : dest, ec);
    return out;
  }
  const uint64_t cloned_bytes = TreeBytes(dest);
  out = SweepTree(dest.string(), repo.html_url, spec, options.max_file_size,
                  budget);
  out.stats.bytes_downloaded += cloned_bytes;
  fs::remove_all(own_scratch ? scratch : dest, ec);
  return out;
}

ModuleResult RunGithubSearch(const FileTypeSpec &spec, LlmClient &llm,
                             HttpClient &http, const GithubOptions &options,
                             const Budget &budget) {
  ModuleResult result;
  result.subcorpus.module = SourceModule::kGithub;
  if (options.token.empty()) {
    result.status = absl::FailedPreconditionError(
        "no repository search token (SEEDFORGE_GITHUB_TOKEN)");
    return result;
  }
  absl::StatusOr<QueryPlan> plan =
      GenGithubQueries(spec, llm, options.queries, budget);
  if (!plan.ok()) {
    result.status = plan.status();
    return result;
  }
  result.plans.push_back(*plan);

  std::vector<RepoRef> repos;
  absl::flat_hash_set<std::string> seen;
  for (const std::string &query : plan->queries) {
    if (budget.Exhausted()) break;
    absl::StatusOr<std::vector<RepoRef>> found =
        SearchRepos(query, options, http, budget);
    if (!found.ok()) {
      if (absl::IsUnauthenticated(found.status())) {
        result.status = found.status();
        return result;
      }
      result.warnings.push_back(
          fmt::format("query \"{}\": {}", query,
                      std::string(found.status().message())));
      LOG(WARNING) << "repository search \"" << query
                   << "\": " << found.status();
      continue;
    }
    for (RepoRef &repo : *found) {
      if (seen.insert(ToLower(repo.full_name)).second) {
        repos.push_back(std::move(repo));
      }
    }
  }
  LOG(INFO) << "github: " << repos.size() << " distinct repositories";

  GithubOptions harvest = options;
  if (harvest.work_dir.empty()) harvest.work_dir = ScratchRoot(options).string();
  std::mutex mu;
  size_t next = 0;
  std::vector<Subcorpus> fragments(repos.size());
  std::vector<std::thread> workers;
  const int n = std::max(1, std::min<int>(options.clone_workers, repos.size()));
  for (int w = 0; w < n; ++w) {
    workers.emplace_back([&] {
      while (true) {
        size_t index;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= repos.size() || budget.Exhausted()) return;
          index = next++;
        }
        fragments[index] = HarvestRepo(repos[index], spec, harvest, budget);
      }
    });
  }
  for (std::thread &t : workers) t.join();
  for (Subcorpus &fragment : fragments) {
    result.subcorpus.stats += fragment.stats;
    for (SeedFile &file : fragment.files) {
      result.subcorpus.files.push_back(std::move(file));
    }
  }
  NormalizeSubcorpusFiles(result.subcorpus.files);
  if (options.work_dir.empty()) {
    std::error_code ec;
    fs::remove_all(harvest.work_dir, ec);
  }
  return result;
}

}  // namespace seedforge
