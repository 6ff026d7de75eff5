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

#ifndef SEEDFORGE_ROBOTS_H_
#define SEEDFORGE_ROBOTS_H_

#include <string>
#include <string_view>
#include <vector>

namespace seedforge {

// robots.txt rules for one user agent (RFC 9309): the most specific group
// matching the agent (or "*") applies, and the longest matching Allow or
// Disallow pattern wins, Allow on ties. '*' and a trailing '$' are supported.
class RobotsRules {
 public:
  RobotsRules() = default;  // allows everything
  static RobotsRules Parse(std::string_view robots_txt,
                           std::string_view user_agent);

  bool Allowed(std::string_view path_and_query) const;

 private:
  struct Rule {
    std::string pattern;
    bool allow = false;
  };
  std::vector<Rule> rules_;
};

}  // namespace seedforge

#endif  // SEEDFORGE_ROBOTS_H_
