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

#include "seedforge/signature_table.h"

#include <fstream>
#include <sstream>
#include <utility>

#include <glog/logging.h>

#include "absl/status/status.h"
#include "fmt/format.h"
#include "seedforge/strings.h"

namespace seedforge {
namespace {

std::vector<std::string> SplitList(std::string_view value) {
  std::vector<std::string> out = SplitTrimmed(value, ',');
  for (std::string &item : out) item = ToLower(item);
  return out;
}

}  // namespace

absl::StatusOr<SignatureTable> SignatureTable::Parse(std::string_view text) {
  SignatureTable table;
  SignatureEntry *current = nullptr;
  int line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    auto error = [&](std::string_view what) {
      return absl::InvalidArgumentError(
          fmt::format("signature table line {}: {}", line_no, what));
    };
    if (line.front() == '[') {
      if (line.back() != ']') return error("unterminated section header");
      std::string name = ToLower(
          Trim(line.substr(1, line.size() - 2)));
      if (name.empty() || name.front() == '.') return error("bad section name");
      if (table.entries_.contains(name)) {
        return error(fmt::format("duplicate section [{}]", name));
      }
      current = &table.entries_[name];
      current->extension = name;
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) return error("expected key = value");
    std::string_view key = Trim(line.substr(0, eq));
    std::string_view value = Trim(line.substr(eq + 1));
    if (current == nullptr) {
      if (key != "version") return error("only 'version' may precede sections");
      std::optional<int> version = ParseInt<int>(value);
      if (!version || *version <= 0) {
        return error("bad version");
      }
      table.version_ = *version;
      continue;
    }
    if (key == "aliases") {
      std::vector<std::string> aliases = SplitList(value);
      current->aliases.insert(current->aliases.end(), aliases.begin(),
                              aliases.end());
    } else if (key == "magic") {
      absl::StatusOr<MagicSignature> sig = ParseMagicSignature(value);
      if (!sig.ok()) return error(std::string(sig.status().message()));
      current->magic.push_back(*std::move(sig));
    } else if (key == "mime") {
      std::vector<std::string> mimes = SplitList(value);
      current->mime_types.insert(current->mime_types.end(), mimes.begin(),
                                 mimes.end());
    } else {
      return error(fmt::format("unknown key '{}'", key));
    }
  }
  if (table.version_ == 0) {
    return absl::InvalidArgumentError("signature table has no version");
  }
  return table;
}

absl::StatusOr<SignatureTable> SignatureTable::LoadFile(
    const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

const SignatureTable &SignatureTable::Bundled() {
  static const SignatureTable *const table = [] {
    absl::StatusOr<SignatureTable> parsed = Parse(BundledSignatureTableText());
    CHECK(parsed.ok()) << "bundled signature table: " << parsed.status();
    return new SignatureTable(*std::move(parsed));
  }();
  return *table;
}

const SignatureEntry *SignatureTable::Find(std::string_view extension) const {
  if (!extension.empty() && extension.front() == '.') extension.remove_prefix(1);
  const std::string ext = ToLower(extension);
  if (auto it = entries_.find(ext); it != entries_.end()) return &it->second;
  for (const auto &[name, entry] : entries_) {
    for (const std::string &alias : entry.aliases) {
      if (alias == ext) return &entry;
    }
  }
  return nullptr;
}

absl::StatusOr<FileTypeSpec> SignatureTable::SpecForExtension(
    std::string_view extension) const {
  FileTypeSpec spec;
  spec.mode = FileTypeMode::kExtension;
  extension = Trim(extension);
  if (!extension.empty() && extension.front() == '.') extension.remove_prefix(1);
  spec.primary_extension = ToLower(Trim(extension));
  if (const SignatureEntry *entry = Find(spec.primary_extension)) {
    if (entry->extension != spec.primary_extension) {
      spec.aliases.push_back(entry->extension);
    }
    for (const std::string &alias : entry->aliases) {
      if (alias != spec.primary_extension) spec.aliases.push_back(alias);
    }
    spec.magic_signatures = entry->magic;
    spec.mime_types = entry->mime_types;
  } else {
    LOG(WARNING) << "no signature entry for '." << spec.primary_extension
                 << "'; validating by extension only";
  }
  if (absl::Status s = CheckFileTypeSpec(spec); !s.ok()) return s;
  return spec;
}

}  // namespace seedforge
