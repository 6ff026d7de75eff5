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

// Non-throwing field access for untrusted JSON replies.

#ifndef SEEDFORGE_SRC_JSON_UTIL_H_
#define SEEDFORGE_SRC_JSON_UTIL_H_

#include <cstdint>
#include <string>

#include "json.hpp"

namespace seedforge {

// The member `key` of `object`, or null when absent or not an object.
inline const nlohmann::json &Member(const nlohmann::json &object,
                                    const char *key) {
  static const nlohmann::json *const kNull = new nlohmann::json();
  if (!object.is_object()) return *kNull;
  auto it = object.find(key);
  return it == object.end() ? *kNull : *it;
}

inline std::string StringField(const nlohmann::json &object, const char *key) {
  if (!object.is_object()) return "";
  auto it = object.find(key);
  if (it == object.end() || !it->is_string()) return "";
  return it->get<std::string>();
}

inline bool TruthyField(const nlohmann::json &object, const char *key) {
  if (!object.is_object()) return false;
  auto it = object.find(key);
  if (it == object.end()) return false;
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_number_integer()) return it->get<int64_t>() != 0;
  return false;
}

}  // namespace seedforge

#endif  // SEEDFORGE_SRC_JSON_UTIL_H_
