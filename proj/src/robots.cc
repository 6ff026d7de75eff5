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

#include "seedforge/robots.h"

#include "seedforge/strings.h"

namespace seedforge {
namespace {

// Glob match with '*' wildcards and an optional '$' end anchor; patterns
// otherwise match as prefixes.
bool PatternMatches(std::string_view pattern, std::string_view path) {
  bool anchored = false;
  if (!pattern.empty() && pattern.back() == '$') {
    anchored = true;
    pattern.remove_suffix(1);
  }
  // Iterative wildcard matching with backtracking to the last '*'.
  size_t p = 0, s = 0;
  size_t star = std::string_view::npos, star_s = 0;
  while (s < path.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      star_s = s;
    } else if (p < pattern.size() && pattern[p] == path[s]) {
      ++p;
      ++s;
    } else if (p == pattern.size() && !anchored) {
      return true;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      s = ++star_s;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

// The product token of a user agent string: "seedforge/1.0 (...)" ->
// "seedforge".
std::string ProductToken(std::string_view user_agent) {
  user_agent = Trim(user_agent);
  const size_t end = user_agent.find_first_of("/ ");
  return ToLower(user_agent.substr(0, end));
}

}  // namespace

RobotsRules RobotsRules::Parse(std::string_view robots_txt,
                               std::string_view user_agent) {
  const std::string token = ProductToken(user_agent);
  struct Group {
    std::vector<std::string> agents;
    std::vector<Rule> rules;
  };
  std::vector<Group> groups;
  bool last_was_agent = false;
  for (std::string_view line : Split(robots_txt, '\n')) {
    line = line.substr(0, line.find('#'));
    const size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string key =
        ToLower(Trim(line.substr(0, colon)));
    std::string_view value = Trim(line.substr(colon + 1));
    if (key == "user-agent") {
      if (!last_was_agent || groups.empty()) groups.emplace_back();
      groups.back().agents.push_back(ToLower(value));
      last_was_agent = true;
    } else if (key == "allow" || key == "disallow") {
      last_was_agent = false;
      if (groups.empty()) continue;
      // An empty Disallow permits everything and contributes no rule.
      if (value.empty()) continue;
      groups.back().rules.push_back({std::string(value), key == "allow"});
    } else {
      last_was_agent = false;
    }
  }
  RobotsRules result;
  bool matched_specific = false;
  for (const Group &group : groups) {
    for (const std::string &agent : group.agents) {
      if (!token.empty() && agent == token) {
        if (!matched_specific) result.rules_.clear();
        matched_specific = true;
        result.rules_.insert(result.rules_.end(), group.rules.begin(),
                             group.rules.end());
        break;
      }
    }
  }
  if (!matched_specific) {
    for (const Group &group : groups) {
      for (const std::string &agent : group.agents) {
        if (agent == "*") {
          result.rules_.insert(result.rules_.end(), group.rules.begin(),
                               group.rules.end());
          break;
        }
      }
    }
  }
  return result;
}

bool RobotsRules::Allowed(std::string_view path_and_query) const {
  if (path_and_query == "/robots.txt") return true;
  size_t best_length = 0;
  bool best_allow = true;
  bool any = false;
  for (const Rule &rule : rules_) {
    if (!PatternMatches(rule.pattern, path_and_query)) continue;
    const size_t length = rule.pattern.size();
    if (!any || length > best_length ||
        (length == best_length && rule.allow)) {
      best_length = length;
      best_allow = rule.allow;
      any = true;
    }
  }
  return best_allow;
}

}  // namespace seedforge
