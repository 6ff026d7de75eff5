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

#ifndef SEEDFORGE_HTML_LINKS_H_
#define SEEDFORGE_HTML_LINKS_H_

#include <string>
#include <string_view>
#include <vector>

namespace seedforge {

// Raw (unresolved) link targets from href/src/data attributes of any tag, in
// document order, with character references decoded. A <base href> is
// reported through `base_href` when present. Comments, script and style
// bodies are skipped.
struct ExtractedLinks {
  std::vector<std::string> links;
  std::string base_href;
};

ExtractedLinks ExtractLinks(std::string_view html);

// Heuristic for untyped responses.
bool LooksLikeHtml(std::string_view content);

}  // namespace seedforge

#endif  // SEEDFORGE_HTML_LINKS_H_
