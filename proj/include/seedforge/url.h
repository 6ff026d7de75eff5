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

#ifndef SEEDFORGE_URL_H_
#define SEEDFORGE_URL_H_

#include <optional>
#include <string>
#include <string_view>

namespace seedforge {

// An absolute hierarchical URL, split per RFC 3986. Only the pieces the
// crawler needs are kept; userinfo is dropped.
struct Url {
  std::string scheme;  // lowercase
  std::string host;    // lowercase
  int port = 0;        // 0: scheme default
  std::string path;    // begins with '/' (or is empty before normalization)
  std::string query;   // without '?'; has_query distinguishes "?" from none
  bool has_query = false;
  std::string fragment;

  static std::optional<Url> Parse(std::string_view text);

  int EffectivePort() const;
  // "host" or "host:port" when the port is not the scheme default.
  std::string Authority() const;
  // "scheme://authority"
  std::string Origin() const;
  // path plus "?query" when present; what goes on the request line.
  std::string PathAndQuery() const;
  std::string ToString() const;

  // RFC 3986 section 5.2 reference resolution against this base.
  std::optional<Url> Resolve(std::string_view reference) const;
};

// Lowercase scheme/host, default port dropped, dot segments removed,
// fragment removed, empty path -> "/". The crawler's visited-set key.
std::string CanonicalizeUrl(const Url &url);
std::optional<std::string> CanonicalizeUrl(std::string_view text);

std::string RemoveDotSegments(std::string_view path);

// Percent-encodes every byte outside the RFC 3986 unreserved set.
// UrlDecode also reads '+' as a space, as forms send it.
std::string UrlEncode(std::string_view text);
std::string UrlDecode(std::string_view text);

}  // namespace seedforge

#endif  // SEEDFORGE_URL_H_
