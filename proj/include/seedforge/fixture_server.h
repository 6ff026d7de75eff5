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

// A loopback HTTP server that stands in for every remote service, driven by
// a fixture directory. Clients reach it through HttpClientOptions::
// host_override and are routed by the Host header:
//
//   api.github.fixture        github/search.json, github/repos/<o>/<n>/
//   search.fixture            search/results.json (custom-search JSON API)
//   bugzilla.fixture          bugzilla/bugs.json, bugzilla/files/
//   api.launchpad.fixture     launchpad/bugs.json, launchpad/files/
//   index.commoncrawl.fixture commoncrawl/index.ndjson
//   data.commoncrawl.fixture  commoncrawl/<archive> (byte ranges)
//   any other host            web/<host>/<path>
//
// Search tables map a query to results, with "*" as the fallback. Optional
// knobs live in fixture.json; see FixtureKnobs.

#ifndef SEEDFORGE_FIXTURE_SERVER_H_
#define SEEDFORGE_FIXTURE_SERVER_H_

#include <chrono>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace seedforge {

inline constexpr char kFixtureGithubHost[] = "api.github.fixture";
inline constexpr char kFixtureSearchHost[] = "search.fixture";
inline constexpr char kFixtureBugzillaHost[] = "bugzilla.fixture";
inline constexpr char kFixtureLaunchpadHost[] = "api.launchpad.fixture";
inline constexpr char kFixtureIndexHost[] = "index.commoncrawl.fixture";
inline constexpr char kFixtureDataHost[] = "data.commoncrawl.fixture";

struct FixtureKnobs {
  int politeness_ms = 0;       // crawler delay to use against the fixture
  double stall_seconds = 0;    // delay before answering
  std::set<std::string> stall_hosts;  // "*" stalls every host
  int search_quota_after = -1;  // answer 429 after this many searches
  std::set<std::string> github_rate_limited_queries;

  static FixtureKnobs FromJson(const nlohmann::json &doc);
};

struct FixtureRequest {
  std::chrono::steady_clock::time_point at;
  std::string host;
  std::string path;  // with query
};

class FixtureServer {
 public:
  // Loads the directory and builds git repositories for github/repos in a
  // scratch directory. Call Start() to begin serving.
  static absl::StatusOr<std::unique_ptr<FixtureServer>> Create(
      const std::string &dir, FixtureKnobs knobs);
  static absl::StatusOr<std::unique_ptr<FixtureServer>> Create(
      const std::string &dir);  // knobs from dir/fixture.json

  ~FixtureServer();
  FixtureServer(const FixtureServer &) = delete;
  FixtureServer &operator=(const FixtureServer &) = delete;

  absl::Status Start();
  void Stop();

  // "http://127.0.0.1:PORT"
  std::string origin() const;
  // Parent of the <owner>/<name> git repositories.
  const std::string &git_root() const { return git_root_; }
  const std::string &dir() const { return dir_; }
  const FixtureKnobs &knobs() const { return knobs_; }

  std::vector<FixtureRequest> requests() const;

 private:
  class Impl;
  FixtureServer(std::string dir, FixtureKnobs knobs);

  std::string dir_;
  FixtureKnobs knobs_;
  std::string git_root_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace seedforge

#endif  // SEEDFORGE_FIXTURE_SERVER_H_
