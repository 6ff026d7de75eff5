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

// Blocking HTTP(S) client used by every harvesting module. Requests obey a
// shared Budget: socket timeouts never exceed the remaining budget, and
// bodies stream into memory under a size cap so oversize downloads are
// aborted mid-stream.

#ifndef SEEDFORGE_HTTP_CLIENT_H_
#define SEEDFORGE_HTTP_CLIENT_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/budget.h"

namespace seedforge {

// Lowercased header name -> value (last one wins).
using HttpHeaders = std::map<std::string, std::string>;

struct HttpRequest {
  std::string url;
  std::string method = "GET";
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::string content_type;  // for POST bodies
  // Inclusive byte range, sent as "Range: bytes=first-last".
  std::optional<std::pair<uint64_t, uint64_t>> range;
  uint64_t max_body_bytes = std::numeric_limits<uint64_t>::max();
  // Optional per-response cap chosen once headers are known (e.g. a larger
  // cap for HTML pages than for candidate files). Overrides max_body_bytes.
  std::function<uint64_t(int status, const HttpHeaders &)> body_cap;
  bool follow_redirects = true;
};

struct HttpResponse {
  int status = 0;
  HttpHeaders headers;
  std::string body;
  std::string final_url;  // after redirects

  std::string Header(const std::string &lower_name) const;
  // Media type of Content-Type without parameters, lowercased.
  std::string MimeType() const;
};

struct HttpClientOptions {
  std::string user_agent = "seedforge/1.0 (+fuzzing seed corpus builder)";
  std::chrono::milliseconds connect_timeout{10000};
  std::chrono::milliseconds read_timeout{30000};
  int max_redirects = 5;
  // When set (e.g. "http://127.0.0.1:8080"), every request connects here
  // instead of the URL's host; the original authority is sent in Host.
  std::string host_override;
};

class HttpClient {
 public:
  virtual ~HttpClient() = default;

  // Error codes:
  //   ResourceExhausted - body exceeded its cap (aborted mid-stream)
  //   DeadlineExceeded  - the budget ran out or the socket timed out
  //   Unavailable       - connection failures
  //   InvalidArgument   - unparseable or unsupported URL
  // HTTP error statuses are not errors; callers inspect `status`.
  virtual absl::StatusOr<HttpResponse> Fetch(const HttpRequest &request,
                                             const Budget &budget) = 0;
};

// cpp-httplib backed implementation; safe for concurrent use.
class DefaultHttpClient : public HttpClient {
 public:
  explicit DefaultHttpClient(HttpClientOptions options = {});

  absl::StatusOr<HttpResponse> Fetch(const HttpRequest &request,
                                     const Budget &budget) override;

  const HttpClientOptions &options() const { return options_; }

 private:
  absl::StatusOr<HttpResponse> FetchOnce(const HttpRequest &request,
                                         const std::string &url,
                                         const Budget &budget);

  HttpClientOptions options_;
};

}  // namespace seedforge

#endif  // SEEDFORGE_HTTP_CLIENT_H_
