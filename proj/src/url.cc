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

#include "seedforge/url.h"

#include <cstdio>

#include "absl/strings/ascii.h"
#include "seedforge/strings.h"

namespace seedforge {
namespace {

int DefaultPort(std::string_view scheme) {
  if (scheme == "http") return 80;
  if (scheme == "https") return 443;
  return 0;
}

bool IsSchemeChar(char c, bool first) {
  if (absl::ascii_isalpha(c)) return true;
  if (first) return false;
  return absl::ascii_isdigit(c) || c == '+' || c == '-' || c == '.';
}

// Returns the scheme length if `text` starts with "scheme:", else 0.
size_t SchemeLength(std::string_view text) {
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == ':') return i;
    if (!IsSchemeChar(text[i], i == 0)) return 0;
  }
  return 0;
}

struct Parts {
  std::optional<std::string_view> scheme;
  std::optional<std::string_view> authority;
  std::string_view path;
  std::optional<std::string_view> query;
  std::optional<std::string_view> fragment;
};

Parts SplitReference(std::string_view ref) {
  Parts parts;
  if (size_t hash = ref.find('#'); hash != std::string_view::npos) {
    parts.fragment = ref.substr(hash + 1);
    ref = ref.substr(0, hash);
  }
  if (size_t q = ref.find('?'); q != std::string_view::npos) {
    parts.query = ref.substr(q + 1);
    ref = ref.substr(0, q);
  }
  if (size_t len = SchemeLength(ref); len > 0) {
    parts.scheme = ref.substr(0, len);
    ref.remove_prefix(len + 1);
  }
  if (ref.substr(0, 2) == "//") {
    ref.remove_prefix(2);
    const size_t end = ref.find('/');
    parts.authority = ref.substr(0, end);
    ref = end == std::string_view::npos ? std::string_view() : ref.substr(end);
  }
  parts.path = ref;
  return parts;
}

bool ParseAuthority(std::string_view authority, Url &url) {
  if (size_t at = authority.rfind('@'); at != std::string_view::npos) {
    authority.remove_prefix(at + 1);
  }
  std::string_view host = authority;
  std::string_view port;
  if (!authority.empty() && authority.front() == '[') {
    const size_t close = authority.find(']');
    if (close == std::string_view::npos) return false;
    host = authority.substr(0, close + 1);
    std::string_view rest = authority.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':') return false;
      port = rest.substr(1);
    }
  } else if (size_t colon = authority.rfind(':');
             colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    port = authority.substr(colon + 1);
  }
  if (host.empty()) return false;
  url.host = ToLower(host);
  url.port = 0;
  if (!port.empty()) {
    std::optional<int> value = ParseInt<int>(port);
    if (!value || *value <= 0 || *value > 65535) return false;
    url.port = *value == DefaultPort(url.scheme) ? 0 : *value;
  }
  return true;
}

std::string MergePaths(const Url &base, std::string_view ref_path) {
  if (!base.host.empty() && base.path.empty()) {
    return "/" + std::string(ref_path);
  }
  const size_t slash = base.path.rfind('/');
  if (slash == std::string::npos) return std::string(ref_path);
  return base.path.substr(0, slash + 1) + std::string(ref_path);
}

}  // namespace

std::string RemoveDotSegments(std::string_view input) {
  std::string output;
  while (!input.empty()) {
    if (input.substr(0, 3) == "../") {
      input.remove_prefix(3);
    } else if (input.substr(0, 2) == "./") {
      input.remove_prefix(2);
    } else if (input.substr(0, 3) == "/./") {
      input.remove_prefix(2);
    } else if (input == "/.") {
      input = "/";
    } else if (input.substr(0, 4) == "/../" || input == "/..") {
      input = input.size() == 3 ? std::string_view("/") : input.substr(3);
      const size_t slash = output.rfind('/');
      output.erase(slash == std::string::npos ? 0 : slash);
    } else if (input == "." || input == "..") {
      input = {};
    } else {
      size_t end = input.find('/', input.front() == '/' ? 1 : 0);
      if (end == std::string_view::npos) end = input.size();
      output.append(input.substr(0, end));
      input.remove_prefix(end);
    }
  }
  return output;
}

std::optional<Url> Url::Parse(std::string_view text) {
  text = Trim(text);
  Parts parts = SplitReference(text);
  if (!parts.scheme || !parts.authority) return std::nullopt;
  Url url;
  url.scheme = ToLower(*parts.scheme);
  if (!ParseAuthority(*parts.authority, url)) return std::nullopt;
  url.path = std::string(parts.path);
  if (parts.query) {
    url.has_query = true;
    url.query = std::string(*parts.query);
  }
  if (parts.fragment) url.fragment = std::string(*parts.fragment);
  return url;
}

int Url::EffectivePort() const {
  return port != 0 ? port : DefaultPort(scheme);
}

std::string Url::Authority() const {
  if (port == 0) return host;
  return host + ":" + std::to_string(port);
}

std::string Url::Origin() const {
  return scheme + "://" + Authority();
}

std::string Url::PathAndQuery() const {
  std::string out = path.empty() ? "/" : path;
  if (has_query) out += "?" + query;
  return out;
}

std::string Url::ToString() const {
  std::string out = Origin() + PathAndQuery();
  if (!fragment.empty()) out += "#" + fragment;
  return out;
}

std::optional<Url> Url::Resolve(std::string_view reference) const {
  reference = Trim(reference);
  Parts ref = SplitReference(reference);
  Url target;
  if (ref.scheme) {
    target.scheme = ToLower(*ref.scheme);
    if (!ref.authority) return std::nullopt;  // e.g. mailto:, javascript:
    if (!ParseAuthority(*ref.authority, target)) return std::nullopt;
    target.path = RemoveDotSegments(ref.path);
    if (ref.query) target.query = std::string(*ref.query);
    target.has_query = ref.query.has_value();
  } else {
    target.scheme = scheme;
    if (ref.authority) {
      if (!ParseAuthority(*ref.authority, target)) return std::nullopt;
      target.path = RemoveDotSegments(ref.path);
      if (ref.query) target.query = std::string(*ref.query);
      target.has_query = ref.query.has_value();
    } else {
      target.host = host;
      target.port = port;
      if (ref.path.empty()) {
        target.path = path;
        if (ref.query) {
          target.query = std::string(*ref.query);
          target.has_query = true;
        } else {
          target.query = query;
          target.has_query = has_query;
        }
      } else {
        if (ref.path.front() == '/') {
          target.path = RemoveDotSegments(ref.path);
        } else {
          target.path = RemoveDotSegments(MergePaths(*this, ref.path));
        }
        if (ref.query) target.query = std::string(*ref.query);
        target.has_query = ref.query.has_value();
      }
    }
  }
  if (ref.fragment) target.fragment = std::string(*ref.fragment);
  return target;
}

std::string CanonicalizeUrl(const Url &url) {
  Url canonical = url;
  canonical.path = RemoveDotSegments(url.path);
  if (canonical.path.empty()) canonical.path = "/";
  canonical.fragment.clear();
  return canonical.ToString();
}

std::optional<std::string> CanonicalizeUrl(std::string_view text) {
  std::optional<Url> url = Url::Parse(text);
  if (!url) return std::nullopt;
  return CanonicalizeUrl(*url);
}

std::string UrlEncode(std::string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (unsigned char c : text) {
    if (absl::ascii_isalnum(c) || c == '-' || c == '_' || c == '.' ||
        c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string UrlDecode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '+') {
      out.push_back(' ');
    } else if (text[i] == '%' && i + 2 < text.size() &&
               absl::ascii_isxdigit(text[i + 1]) &&
               absl::ascii_isxdigit(text[i + 2])) {
      out.push_back(static_cast<char>(
          ParseInt<unsigned>(text.substr(i + 1, 2), 16).value_or(0)));
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

}  // namespace seedforge
