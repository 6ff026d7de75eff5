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

#include "seedforge/fixture_server.h"

#include <stdlib.h>

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <glog/logging.h>

#include "absl/status/status.h"
#include "absl/strings/escaping.h"
#include "fmt/format.h"
#include "httplib.h"
#include "json_util.h"
#include "seedforge/strings.h"
#include "seedforge/subprocess.h"

namespace seedforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<std::string> ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json ReadJson(const fs::path &path, json fallback) {
  std::optional<std::string> text = ReadFile(path);
  if (!text) return fallback;
  json doc = json::parse(*text, nullptr, false);
  if (doc.is_discarded()) {
    LOG(WARNING) << "fixture: cannot parse " << path;
    return fallback;
  }
  return doc;
}

// Rejects empty, absolute and dot-dot paths.
std::optional<fs::path> SafeRelative(std::string_view path) {
  fs::path out;
  for (std::string_view part : Split(path, '/')) {
    if (part.empty() || part == ".") continue;
    if (part == "..") return std::nullopt;
    out /= std::string(part);
  }
  return out;
}

std::string ContentTypeFor(const fs::path &path) {
  static const std::map<std::string, std::string> kTypes = {
      {".html", "text/html; charset=utf-8"},
      {".htm", "text/html; charset=utf-8"},
      {".txt", "text/plain"},
      {".json", "application/json"},
      {".xml", "application/xml"},
      {".png", "image/png"},
      {".jpg", "image/jpeg"},
      {".jpeg", "image/jpeg"},
      {".gif", "image/gif"},
      {".pdf", "application/pdf"},
  };
  auto it = kTypes.find(ToLower(path.extension().string()));
  return it == kTypes.end() ? "application/octet-stream" : it->second;
}

void JsonReply(httplib::Response &res, const json &body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void NotFound(httplib::Response &res) {
  res.status = 404;
  res.set_content("not found", "text/plain");
}

// Host header without any port.
std::string HostOf(const httplib::Request &req) {
  std::string host = ToLower(req.get_header_value("Host"));
  if (size_t colon = host.rfind(':'); colon != std::string::npos &&
                                      host.find(']') == std::string::npos) {
    host.resize(colon);
  }
  return host;
}

int IntParam(const httplib::Request &req, const char *name, int fallback) {
  if (!req.has_param(name)) return fallback;
  return ParseInt<int>(req.get_param_value(name)).value_or(fallback);
}

const json &Lookup(const json &table, const std::string &query) {
  static const json kEmpty = json::array();
  if (!table.is_object()) return kEmpty;
  if (auto it = table.find(query); it != table.end()) return *it;
  if (auto it = table.find("*"); it != table.end()) return *it;
  return kEmpty;
}

// "*.org" matches hosts ending in ".org"; anything else matches exactly.
bool UrlMatchesPattern(const std::string &url, const std::string &pattern) {
  std::string_view rest = url;
  if (size_t scheme = rest.find("://"); scheme != std::string_view::npos) {
    rest.remove_prefix(scheme + 3);
  }
  std::string host(rest.substr(0, rest.find_first_of("/:?#")));
  host = ToLower(host);
  if (pattern.starts_with("*.")) {
    return host.ends_with(pattern.substr(1));
  }
  return host == ToLower(pattern);
}

absl::Status RunGit(const std::vector<std::string> &args,
                    const std::string &cwd) {
  SubprocessOptions run;
  run.argv = {"git"};
  run.argv.insert(run.argv.end(), args.begin(), args.end());
  run.cwd = cwd;
  run.capture_output = true;
  run.timeout = std::chrono::seconds(60);
  run.env = {{"GIT_AUTHOR_NAME", "fixture"},
             {"GIT_AUTHOR_EMAIL", "fixture@example.invalid"},
             {"GIT_COMMITTER_NAME", "fixture"},
             {"GIT_COMMITTER_EMAIL", "fixture@example.invalid"},
             {"GIT_AUTHOR_DATE", "2025-01-01T00:00:00Z"},
             {"GIT_COMMITTER_DATE", "2025-01-01T00:00:00Z"},
             {"GIT_CONFIG_NOSYSTEM", "1"},
             {"HOME", cwd}};
  absl::StatusOr<SubprocessResult> result = RunSubprocess(run);
  if (!result.ok()) return result.status();
  if (!result->ok()) {
    return absl::InternalError(
        fmt::format("git {} failed: {}", args.empty() ? "" : args[0],
                    result->output));
  }
  return absl::OkStatus();
}

}  // namespace

FixtureKnobs FixtureKnobs::FromJson(const json &doc) {
  FixtureKnobs knobs;
  if (!doc.is_object()) return knobs;
  if (const json &v = Member(doc, "politeness_ms"); v.is_number_integer()) {
    knobs.politeness_ms = v.get<int>();
  }
  if (const json &v = Member(doc, "stall_seconds"); v.is_number()) {
    knobs.stall_seconds = v.get<double>();
  }
  if (const json &v = Member(doc, "stall_hosts"); v.is_array()) {
    for (const json &h : v) {
      if (h.is_string()) knobs.stall_hosts.insert(ToLower(h.get<std::string>()));
    }
  }
  if (const json &v = Member(doc, "search_quota_after"); v.is_number_integer()) {
    knobs.search_quota_after = v.get<int>();
  }
  if (const json &v = Member(doc, "github_rate_limited_queries"); v.is_array()) {
    for (const json &q : v) {
      if (q.is_string()) knobs.github_rate_limited_queries.insert(q);
    }
  }
  return knobs;
}

class FixtureServer::Impl {
 public:
  Impl(const std::string &dir, const FixtureKnobs &knobs) : knobs_(knobs) {
    const fs::path root(dir);
    github_search_ = ReadJson(root / "github" / "search.json", json::object());
    search_results_ = ReadJson(root / "search" / "results.json", json::object());
    bugzilla_ = ReadJson(root / "bugzilla" / "bugs.json", json::array());
    launchpad_ = ReadJson(root / "launchpad" / "bugs.json", json::array());
    if (std::optional<std::string> index =
            ReadFile(root / "commoncrawl" / "index.ndjson")) {
      for (std::string_view line : Split(*index, '\n')) {
        json row = json::parse(Trim(line), nullptr, false);
        if (row.is_object()) index_.push_back(std::move(row));
      }
    }
    root_ = root;
  }

  absl::Status Start() {
    server_.new_task_queue = [] { return new httplib::ThreadPool(64); };
    auto handler = [this](const httplib::Request &req,
                          httplib::Response &res) { Handle(req, res); };
    server_.Get(".*", handler);
    server_.Post(".*", handler);
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) return absl::UnavailableError("fixture server: bind failed");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return absl::OkStatus();
  }

  void Stop() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

  std::vector<FixtureRequest> requests() const {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_;
  }

 private:
  void Handle(const httplib::Request &req, httplib::Response &res) {
    const std::string host = HostOf(req);
    std::string target = req.path;
    if (!req.params.empty()) {
      std::string query;
      for (const auto &[k, v] : req.params) {
        query += (query.empty() ? "?" : "&") + k + "=" + v;
      }
      target += query;
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      requests_.push_back({std::chrono::steady_clock::now(), host, target});
    }
    if (knobs_.stall_seconds > 0 &&
        (knobs_.stall_hosts.count("*") || knobs_.stall_hosts.count(host))) {
      std::unique_lock<std::mutex> lock(mu_);
      cv_.wait_for(lock,
                   std::chrono::duration<double>(knobs_.stall_seconds),
                   [this] { return stopping_; });
    }
    if (host == kFixtureGithubHost) return Github(req, res);
    if (host == kFixtureSearchHost) return Search(req, res);
    if (host == kFixtureBugzillaHost) return Bugzilla(req, res);
    if (host == kFixtureLaunchpadHost) return Launchpad(req, res);
    if (host == kFixtureIndexHost) return Index(req, res);
    if (host == kFixtureDataHost) {
      return Static(root_ / "commoncrawl", req.path, res, false);
    }
    return Static(root_ / "web" / host, req.path, res, true);
  }

  void Static(const fs::path &base, const std::string &path,
              httplib::Response &res, bool index_pages) {
    std::optional<fs::path> rel = SafeRelative(path);
    if (!rel) return NotFound(res);
    fs::path file = base / *rel;
    std::error_code ec;
    if (index_pages && (path.empty() || path.back() == '/' ||
                        fs::is_directory(file, ec))) {
      file /= "index.html";
    }
    if (!fs::is_regular_file(file, ec)) return NotFound(res);
    std::optional<std::string> body = ReadFile(file);
    if (!body) return NotFound(res);
    // Status left unset so httplib answers Range requests with 206.
    res.set_content(*body, ContentTypeFor(file));
  }

  void Github(const httplib::Request &req, httplib::Response &res) {
    if (req.path != "/search/repositories") return NotFound(res);
    const std::string q = req.get_param_value("q");
    if (knobs_.github_rate_limited_queries.count(q)) {
      res.set_header("x-ratelimit-remaining", "0");
      return JsonReply(res, {{"message", "API rate limit exceeded"}}, 403);
    }
    const int per_page = std::max(1, IntParam(req, "per_page", 30));
    json items = json::array();
    for (const json &repo : Lookup(github_search_, q)) {
      if (static_cast<int>(items.size()) >= per_page) break;
      const std::string name = StringField(repo, "full_name");
      if (name.empty()) continue;
      json item;
      item["full_name"] = name;
      item["html_url"] = "https://github.com/" + name;
      item["clone_url"] = "https://github.com/" + name + ".git";
      const json &size = Member(repo, "size");
      item["size"] = size.is_number_unsigned() ? size.get<uint64_t>() : 1;
      items.push_back(std::move(item));
    }
    JsonReply(res, {{"total_count", items.size()}, {"items", items}});
  }

  void Search(const httplib::Request &req, httplib::Response &res) {
    if (req.path != "/customsearch/v1") return NotFound(res);
    if (knobs_.search_quota_after >= 0 &&
        search_count_.fetch_add(1) >= knobs_.search_quota_after) {
      return JsonReply(res, {{"error", {{"message", "Quota exceeded"}}}}, 429);
    }
    const std::string q = req.get_param_value("q");
    const int start = std::max(1, IntParam(req, "start", 1));
    const int num = std::clamp(IntParam(req, "num", 10), 1, 10);
    const json &links = Lookup(search_results_, q);
    json items = json::array();
    for (int i = start - 1; i < start - 1 + num &&
                            i < static_cast<int>(links.size());
         ++i) {
      if (links[i].is_string()) items.push_back({{"link", links[i]}});
    }
    json body = json::object();
    if (!items.empty()) body["items"] = items;
    JsonReply(res, body);
  }

  const json *FindBug(const json &bugs, const std::string &id) const {
    for (const json &bug : bugs) {
      const json &v = Member(bug, "id");
      if ((v.is_number_integer() && std::to_string(v.get<int64_t>()) == id) ||
          (v.is_string() && v.get<std::string>() == id)) {
        return &bug;
      }
    }
    return nullptr;
  }

  static std::string IdOf(const json &obj) {
    const json &v = Member(obj, "id");
    if (v.is_number_integer()) return std::to_string(v.get<int64_t>());
    return v.is_string() ? v.get<std::string>() : std::string();
  }

  void Bugzilla(const httplib::Request &req, httplib::Response &res) {
    const std::vector<std::string_view> parts = Split(req.path, '/');
    // "", "rest", "bug", ...
    if (parts.size() < 3 || parts[1] != "rest" || parts[2] != "bug") {
      return NotFound(res);
    }
    if (parts.size() == 3) {
      const int limit = std::max(1, IntParam(req, "limit", 50));
      const int offset = std::max(0, IntParam(req, "offset", 0));
      json bugs = json::array();
      for (int i = offset; i < offset + limit &&
                           i < static_cast<int>(bugzilla_.size());
           ++i) {
        bugs.push_back({{"id", Member(bugzilla_[i], "id")},
                        {"summary", StringField(bugzilla_[i], "summary")}});
      }
      return JsonReply(res, {{"bugs", bugs}});
    }
    if (parts.size() == 5 && parts[4] == "attachment") {
      const std::string id(parts[3]);
      const json *bug = FindBug(bugzilla_, id);
      if (bug == nullptr) return NotFound(res);
      json list = json::array();
      for (const json &a : Member(*bug, "attachments")) {
        std::optional<std::string> data =
            ReadFile(root_ / "bugzilla" / "files" / StringField(a, "file"));
        list.push_back({{"id", Member(a, "id")},
                        {"file_name", StringField(a, "file_name")},
                        {"content_type", StringField(a, "content_type")},
                        {"size", data ? data->size() : 0},
                        {"is_obsolete", TruthyField(a, "is_obsolete") ? 1 : 0}});
      }
      return JsonReply(res, {{"bugs", {{id, list}}}});
    }
    if (parts.size() == 5 && parts[3] == "attachment") {
      const std::string aid(parts[4]);
      for (const json &bug : bugzilla_) {
        for (const json &a : Member(bug, "attachments")) {
          if (IdOf(a) != aid) continue;
          std::optional<std::string> data =
              ReadFile(root_ / "bugzilla" / "files" / StringField(a, "file"));
          if (!data) return NotFound(res);
          std::string encoded;
          absl::Base64Escape(*data, &encoded);
          return JsonReply(res,
                           {{"attachments", {{aid, {{"data", encoded}}}}}});
        }
      }
    }
    NotFound(res);
  }

  void Launchpad(const httplib::Request &req, httplib::Response &res) {
    const std::string api = fmt::format("https://{}", kFixtureLaunchpadHost);
    const std::vector<std::string_view> parts = Split(req.path, '/');
    if (req.path == "/1.0/ubuntu" &&
        req.get_param_value("ws.op") == "searchTasks") {
      const int size = std::max(1, IntParam(req, "ws.size", 75));
      const int start = std::max(0, IntParam(req, "ws.start", 0));
      json entries = json::array();
      for (int i = start;
           i < start + size && i < static_cast<int>(launchpad_.size()); ++i) {
        entries.push_back(
            {{"bug_link",
              fmt::format("{}/1.0/bugs/{}", api, IdOf(launchpad_[i]))}});
      }
      json body = {{"entries", entries}};
      if (start + size < static_cast<int>(launchpad_.size())) {
        body["next_collection_link"] = fmt::format(
            "{}/1.0/ubuntu?ws.op=searchTasks&ws.size={}&ws.start={}", api,
            size, start + size);
      }
      return JsonReply(res, body);
    }
    if (parts.size() >= 4 && parts[1] == "1.0" && parts[2] == "bugs") {
      const std::string id(parts[3]);
      const json *bug = FindBug(launchpad_, id);
      if (bug == nullptr) return NotFound(res);
      if (parts.size() == 4) {
        return JsonReply(
            res, {{"id", Member(*bug, "id")},
                  {"title", StringField(*bug, "title")},
                  {"web_link",
                   fmt::format("https://bugs.launchpad.fixture/bugs/{}", id)},
                  {"attachments_collection_link",
                   fmt::format("{}/1.0/bugs/{}/attachments", api, id)}});
      }
      if (parts.size() == 5 && parts[4] == "attachments") {
        json entries = json::array();
        for (const json &a : Member(*bug, "attachments")) {
          entries.push_back(
              {{"self_link", fmt::format("{}/1.0/bugs/{}/+attachment/{}", api,
                                         id, IdOf(a))},
               {"data_link",
                fmt::format("{}/files/{}", api, StringField(a, "file"))},
               {"title", StringField(a, "title")},
               {"content_type", StringField(a, "content_type")}});
        }
        return JsonReply(res, {{"entries", entries}});
      }
    }
    if (req.path.starts_with("/files/")) {
      return Static(root_ / "launchpad" / "files", req.path.substr(7), res,
                    false);
    }
    NotFound(res);
  }

  void Index(const httplib::Request &req, httplib::Response &res) {
    if (!req.path.ends_with("-index")) return NotFound(res);
    const std::string pattern = req.get_param_value("url");
    std::string filter = req.get_param_value("filter");
    std::string mime;
    if (filter.starts_with("=mime:")) mime = filter.substr(6);
    const int limit = std::max(1, IntParam(req, "limit", 1000));
    std::string body;
    int n = 0;
    for (const json &row : index_) {
      if (n >= limit) break;
      if (!mime.empty() && StringField(row, "mime") != mime) continue;
      if (!pattern.empty() &&
          !UrlMatchesPattern(StringField(row, "url"), pattern)) {
        continue;
      }
      body += row.dump() + "\n";
      ++n;
    }
    if (n == 0) {
      res.status = 404;
      res.set_content("{\"message\": \"No Captures found\"}\n",
                      "application/json");
      return;
    }
    res.status = 200;
    res.set_content(body, "text/x-ndjson");
  }

  FixtureKnobs knobs_;
  fs::path root_;
  json github_search_, search_results_, bugzilla_, launchpad_;
  std::vector<json> index_;
  std::atomic<int> search_count_{0};

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::vector<FixtureRequest> requests_;
};

FixtureServer::FixtureServer(std::string dir, FixtureKnobs knobs)
    : dir_(std::move(dir)), knobs_(std::move(knobs)) {}

FixtureServer::~FixtureServer() {
  Stop();
  if (!git_root_.empty()) {
    std::error_code ec;
    fs::remove_all(git_root_, ec);
  }
}

absl::StatusOr<std::unique_ptr<FixtureServer>> FixtureServer::Create(
    const std::string &dir) {
  return Create(dir, FixtureKnobs::FromJson(
                         ReadJson(fs::path(dir) / "fixture.json", json())));
}

absl::StatusOr<std::unique_ptr<FixtureServer>> FixtureServer::Create(
    const std::string &dir, FixtureKnobs knobs) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    return absl::NotFoundError(
        fmt::format("fixture directory {} does not exist", dir));
  }
  std::unique_ptr<FixtureServer> server(
      new FixtureServer(fs::absolute(dir).string(), std::move(knobs)));
  std::string scratch =
      (fs::temp_directory_path() / "seedforge-fixture-git-XXXXXX").string();
  if (mkdtemp(scratch.data()) == nullptr) {
    return absl::InternalError("cannot create fixture git directory");
  }
  server->git_root_ = scratch;
  const fs::path repos = fs::path(dir) / "github" / "repos";
  if (fs::is_directory(repos, ec)) {
    std::vector<fs::path> owners;
    for (const auto &e : fs::directory_iterator(repos)) owners.push_back(e.path());
    std::sort(owners.begin(), owners.end());
    for (const fs::path &owner : owners) {
      if (!fs::is_directory(owner)) continue;
      std::vector<fs::path> names;
      for (const auto &e : fs::directory_iterator(owner)) names.push_back(e.path());
      std::sort(names.begin(), names.end());
      for (const fs::path &name : names) {
        if (!fs::is_directory(name)) continue;
        const fs::path dest =
            fs::path(scratch) / owner.filename() / name.filename();
        fs::create_directories(dest.parent_path());
        fs::copy(name, dest, fs::copy_options::recursive, ec);
        if (ec) {
          return absl::InternalError(
              fmt::format("copying {}: {}", name.string(), ec.message()));
        }
        const std::string cwd = dest.string();
        for (const std::vector<std::string> &args :
             {std::vector<std::string>{"init", "-q"},
              std::vector<std::string>{"add", "-A"},
              std::vector<std::string>{"commit", "-q", "-m", "fixture"}}) {
          if (absl::Status status = RunGit(args, cwd); !status.ok()) {
            return status;
          }
        }
      }
    }
  }
  server->impl_ = std::make_unique<Impl>(server->dir_, server->knobs_);
  return server;
}

absl::Status FixtureServer::Start() { return impl_->Start(); }

void FixtureServer::Stop() {
  if (impl_) impl_->Stop();
}

std::string FixtureServer::origin() const {
  return fmt::format("http://127.0.0.1:{}", impl_->port());
}

std::vector<FixtureRequest> FixtureServer::requests() const {
  return impl_->requests();
}

}  // namespace seedforge
