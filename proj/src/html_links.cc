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

#include "seedforge/html_links.h"

#include <algorithm>
#include <cstdint>

#include "absl/strings/ascii.h"
#include "seedforge/strings.h"

namespace seedforge {
namespace {

void AppendUtf8(uint32_t cp, std::string &out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Only the references that plausibly appear inside URLs.
std::string DecodeEntities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '&') {
      out.push_back(text[i]);
      continue;
    }
    const size_t semi = text.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    std::string_view name = text.substr(i + 1, semi - i - 1);
    uint32_t cp = 0;
    bool ok = true;
    if (name == "amp") {
      cp = '&';
    } else if (name == "quot") {
      cp = '"';
    } else if (name == "apos") {
      cp = '\'';
    } else if (name == "lt") {
      cp = '<';
    } else if (name == "gt") {
      cp = '>';
    } else if (name == "nbsp") {
      cp = 0xA0;
    } else if (StartsWithIgnoreCase(name, "#x")) {
      std::optional<uint32_t> v = ParseInt<uint32_t>(name.substr(2), 16);
      ok = v.has_value();
      cp = v.value_or(0);
    } else if (!name.empty() && name.front() == '#') {
      std::optional<uint32_t> v = ParseInt<uint32_t>(name.substr(1));
      ok = v.has_value();
      cp = v.value_or(0);
    } else {
      ok = false;
    }
    if (!ok) {
      out.push_back('&');
      continue;
    }
    AppendUtf8(cp, out);
    i = semi;
  }
  return out;
}

bool IsLinkAttribute(std::string_view name) {
  return name == "href" || name == "src" || name == "data" ||
         name == "poster" || name == "action";
}

// Skips to the end of a raw-text element such as <script>.
size_t SkipRawText(std::string_view html, size_t pos, std::string_view tag) {
  const std::string close = "</" + std::string(tag);
  while (pos < html.size()) {
    const size_t lt = html.find("</", pos);
    if (lt == std::string_view::npos) return html.size();
    if (EqualsIgnoreCase(html.substr(lt, close.size()), close)) {
      return lt;
    }
    pos = lt + 2;
  }
  return html.size();
}

}  // namespace

ExtractedLinks ExtractLinks(std::string_view html) {
  ExtractedLinks result;
  size_t pos = 0;
  while (pos < html.size()) {
    const size_t lt = html.find('<', pos);
    if (lt == std::string_view::npos) break;
    pos = lt + 1;
    if (html.substr(lt, 4) == "<!--") {
      const size_t end = html.find("-->", lt + 4);
      pos = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (pos < html.size() && (html[pos] == '/' || html[pos] == '!' ||
                              html[pos] == '?')) {
      const size_t gt = html.find('>', pos);
      pos = gt == std::string_view::npos ? html.size() : gt + 1;
      continue;
    }
    size_t name_end = pos;
    while (name_end < html.size() && absl::ascii_isalnum(html[name_end])) {
      ++name_end;
    }
    if (name_end == pos) continue;
    const std::string tag =
        ToLower(html.substr(pos, name_end - pos));
    pos = name_end;
    // Attributes.
    while (pos < html.size()) {
      while (pos < html.size() &&
             (absl::ascii_isspace(html[pos]) || html[pos] == '/')) {
        ++pos;
      }
      if (pos >= html.size() || html[pos] == '>') {
        ++pos;
        break;
      }
      size_t attr_end = pos;
      while (attr_end < html.size() && !absl::ascii_isspace(html[attr_end]) &&
             html[attr_end] != '=' && html[attr_end] != '>' &&
             html[attr_end] != '/') {
        ++attr_end;
      }
      const std::string attr =
          ToLower(html.substr(pos, attr_end - pos));
      pos = attr_end;
      while (pos < html.size() && absl::ascii_isspace(html[pos])) ++pos;
      if (pos >= html.size() || html[pos] != '=') continue;
      ++pos;
      while (pos < html.size() && absl::ascii_isspace(html[pos])) ++pos;
      std::string_view value;
      if (pos < html.size() && (html[pos] == '"' || html[pos] == '\'')) {
        const char quote = html[pos];
        const size_t close = html.find(quote, pos + 1);
        const size_t end = close == std::string_view::npos ? html.size() : close;
        value = html.substr(pos + 1, end - pos - 1);
        pos = close == std::string_view::npos ? html.size() : close + 1;
      } else {
        size_t end = pos;
        while (end < html.size() && !absl::ascii_isspace(html[end]) &&
               html[end] != '>') {
          ++end;
        }
        value = html.substr(pos, end - pos);
        pos = end;
      }
      if (!IsLinkAttribute(attr)) continue;
      std::string link =
          std::string(Trim(DecodeEntities(value)));
      if (link.empty() || link.front() == '#') continue;
      const std::string lower = ToLower(link.substr(0, 11));
      if (lower.starts_with("javascript:") || lower.starts_with("mailto:") ||
          lower.starts_with("data:") || lower.starts_with("tel:")) {
        continue;
      }
      if (tag == "base" && attr == "href") {
        if (result.base_href.empty()) result.base_href = link;
        continue;
      }
      result.links.push_back(std::move(link));
    }
    if (tag == "script" || tag == "style") pos = SkipRawText(html, pos, tag);
  }
  return result;
}

bool LooksLikeHtml(std::string_view content) {
  std::string_view head =
      Trim(content.substr(0, std::min<size_t>(content.size(), 1024)));
  return StartsWithIgnoreCase(head, "<!doctype html") ||
         StartsWithIgnoreCase(head, "<html") ||
         ToLower(head).find("<body") != std::string::npos;
}

}  // namespace seedforge
