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

#include "seedforge/http_client.h"

#include <algorithm>
#include <memory>

#include "absl/status/status.h"
#include "fmt/format.h"
#include "httplib.h"
#include "seedforge/strings.h"
#include "seedforge/url.h"

namespace seedforge {
namespace {

using std::chrono::duration_cast;
using std::chrono::microseconds;

void SetTimeout(httplib::Client &client, Clock::duration timeout,
                void (httplib::Client::*setter)(time_t, time_t)) {
  const auto us = std::max<int64_t>(
      1000, duration_cast<microseconds>(timeout).count());
  (client.*setter)(us / 1000000, us % 1000000);
}

bool IsRedirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 ||
         status == 308;
}

}  // namespace

std::string HttpResponse::Header(const std::string &lower_name) const {
  auto it = headers.find(lower_name);
  return it == headers.end() ? std::string() : it->second;
}

std::string HttpResponse::MimeType() const {
  const std::string type = Header("content-type");
  return ToLower(Trim(std::string_view(type).substr(0, type.find(';'))));
}

DefaultHttpClient::DefaultHttpClient(HttpClientOptions options)
    : options_(std::move(options)) {}

absl::StatusOr<HttpResponse> DefaultHttpClient::Fetch(
    const HttpRequest &request, const Budget &budget) {
  std::string url = request.url;
  for (int hop = 0;; ++hop) {
    absl::StatusOr<HttpResponse> response = FetchOnce(request, url, budget);
    if (!response.ok()) return response;
    if (!request.follow_redirects || !IsRedirect(response->status) ||
        response->Header("location").empty()) {
      return response;
    }
    if (hop >= options_.max_redirects) {
      return absl::FailedPreconditionError(
          "too many redirects fetching " + request.url);
    }
    std::optional<Url> base = Url::Parse(url);
    std::optional<Url> next =
        base ? base->Resolve(response->Header("location")) : std::nullopt;
    if (!next) {
      return absl::InvalidArgumentError(fmt::format(
          "bad redirect location '{}'", response->Header("location")));
    }
    next->fragment.clear();
    url = next->ToString();
  }
}

absl::StatusOr<HttpResponse> DefaultHttpClient::FetchOnce(
    const HttpRequest &request, const std::string &url_text,
    const Budget &budget) {
  std::optional<Url> url = Url::Parse(url_text);
  if (!url || (url->scheme != "http" && url->scheme != "https")) {
    return absl::InvalidArgumentError(
        fmt::format("unsupported URL '{}'", url_text));
  }
  if (budget.Exhausted()) {
    return absl::DeadlineExceededError("budget exhausted");
  }
  const std::string origin =
      options_.host_override.empty() ? url->Origin() : options_.host_override;
  httplib::Client client(origin);
  SetTimeout(client, budget.RemainingOr(options_.connect_timeout),
             &httplib::Client::set_connection_timeout);
  SetTimeout(client, budget.RemainingOr(options_.read_timeout),
             &httplib::Client::set_read_timeout);
  SetTimeout(client, budget.RemainingOr(options_.read_timeout),
             &httplib::Client::set_write_timeout);
  client.set_follow_location(false);
  client.set_keep_alive(false);

  httplib::Request req;
  req.method = request.method;
  req.path = url->PathAndQuery();
  req.headers.emplace("User-Agent", options_.user_agent);
  req.headers.emplace("Accept", "*/*");
  if (!options_.host_override.empty()) {
    req.headers.emplace("Host", url->Authority());
  }
  for (const auto &[name, value] : request.headers) {
    req.headers.emplace(name, value);
  }
  if (request.range) {
    req.headers.emplace("Range", fmt::format("bytes={}-{}", request.range->first,
                                             request.range->second));
  }
  if (!request.body.empty() || request.method == "POST") {
    req.body = request.body;
    req.headers.emplace("Content-Type", request.content_type.empty()
                                            ? "application/octet-stream"
                                            : request.content_type);
  }

  HttpResponse response;
  response.final_url = url_text;
  uint64_t cap = request.max_body_bytes;
  bool over_cap = false;
  req.response_handler = [&](const httplib::Response &res) {
    response.status = res.status;
    for (const auto &[name, value] : res.headers) {
      response.headers[ToLower(name)] = value;
    }
    if (request.body_cap) cap = request.body_cap(res.status, response.headers);
    const std::string length = response.Header("content-length");
    if (std::optional<uint64_t> declared = ParseInt<uint64_t>(length);
        declared && *declared > cap) {
      over_cap = true;
      return false;
    }
    return true;
  };
  req.content_receiver = [&](const char *data, size_t size, uint64_t,
                             uint64_t) {
    if (response.body.size() + size > cap) {
      over_cap = true;
      return false;
    }
    if (budget.Exhausted()) return false;
    response.body.append(data, size);
    return true;
  };

  httplib::Result result = client.send(req);
  if (over_cap) {
    return absl::ResourceExhaustedError(
        fmt::format("response body over {} bytes: {}", cap, url_text));
  }
  if (!result) {
    if (budget.Exhausted()) {
      return absl::DeadlineExceededError(
          "budget exhausted fetching " + url_text);
    }
    const httplib::Error error = result.error();
    const std::string what =
        fmt::format("{} fetching {}", httplib::to_string(error), url_text);
    if (error == httplib::Error::Read || error == httplib::Error::Write ||
        error == httplib::Error::ConnectionTimeout) {
      return absl::DeadlineExceededError(what);
    }
    return absl::UnavailableError(what);
  }
  if (response.status == 0) response.status = result->status;
  return response;
}

}  // namespace seedforge
