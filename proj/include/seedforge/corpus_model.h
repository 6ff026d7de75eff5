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

// Core value types shared by every harvesting module: the target file type,
// candidate seed files and per-module subcorpora, plus the validation,
// hashing and deduplication rules applied to them.

#ifndef SEEDFORGE_CORPUS_MODEL_H_
#define SEEDFORGE_CORPUS_MODEL_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace seedforge {

using ByteArray = std::string;  // arbitrary bytes; std::string for cheap I/O.

enum class SourceModule {
  kGithub,
  kWeb,
  kFeature,
  kBugTracker,
  kCommonCrawl,
  kExternal,
};

// All modules in the fixed rotation order used by selection and reporting.
inline constexpr SourceModule kAllSourceModules[] = {
    SourceModule::kGithub,     SourceModule::kWeb,
    SourceModule::kFeature,    SourceModule::kBugTracker,
    SourceModule::kCommonCrawl, SourceModule::kExternal,
};

// "github", "web", "feature", "bugtracker", "commoncrawl", "external".
std::string_view SourceModuleName(SourceModule module);
std::optional<SourceModule> ParseSourceModule(std::string_view name);

enum class FileTypeMode { kExtension, kDescription };

// A fixed byte pattern expected at `offset`. Bytes whose mask entry is false
// match anything (written "??" in the signature table).
struct MagicSignature {
  size_t offset = 0;
  ByteArray bytes;
  std::vector<bool> mask;  // empty, or same length as `bytes`.

  size_t end() const { return offset + bytes.size(); }
  bool Matches(std::string_view content) const;
  // "OFFSET:HEX", with "??" for wildcard bytes.
  std::string ToString() const;

  bool operator==(const MagicSignature &) const = default;
};

absl::StatusOr<MagicSignature> ParseMagicSignature(std::string_view text);

struct FileTypeSpec {
  FileTypeMode mode = FileTypeMode::kExtension;
  std::string primary_extension;  // lowercase, no dot; Extension mode only.
  std::vector<std::string> aliases;
  std::vector<MagicSignature> magic_signatures;
  std::vector<std::string> mime_types;
  std::string description;  // Description mode only.

  bool is_description() const { return mode == FileTypeMode::kDescription; }
  // The phrase prompts use for this type: ".png" files or the description.
  std::string DisplayName() const;
  // File name suffix for materialized seeds: ".png", or "" in Description
  // mode.
  std::string MaterializedSuffix() const;
};

absl::Status CheckFileTypeSpec(const FileTypeSpec &spec);

// Builds a Description-mode spec. Fails on an empty description.
absl::StatusOr<FileTypeSpec> MakeDescriptionSpec(std::string_view description);

enum class ValidationKind { kByExtension, kByMagic, kUnfiltered };

std::string_view ValidationKindName(ValidationKind kind);

using ValidationResult = std::optional<ValidationKind>;  // nullopt: rejected.

// Lowercased extension of the last path component of `name_hint`, ignoring
// any query string or fragment. Empty when there is none.
std::string ExtensionOf(std::string_view name_hint);

// Accepts when the name's extension is the spec's extension (or an alias) or
// when any magic signature matches. Description-mode specs accept everything.
ValidationResult ValidateFile(std::string_view content,
                              std::string_view name_hint,
                              const FileTypeSpec &spec);

// Lowercase hex SHA-256 of `content`.
std::string ContentDigest(std::string_view content);

struct SeedFile {
  ByteArray content;
  uint64_t size_bytes = 0;
  std::string digest;
  SourceModule source_module = SourceModule::kExternal;
  std::string origin_url;
  std::chrono::system_clock::time_point retrieved_at;
  ValidationKind validation = ValidationKind::kUnfiltered;
};

// Fills in size, digest and retrieval time from `content`.
SeedFile MakeSeedFile(ByteArray content, SourceModule module,
                      std::string origin_url, ValidationKind validation);

struct SubcorpusStats {
  uint64_t fetched = 0;
  uint64_t validated = 0;
  uint64_t rejected = 0;
  uint64_t bytes_downloaded = 0;

  SubcorpusStats &operator+=(const SubcorpusStats &other);
};

struct Subcorpus {
  SourceModule module = SourceModule::kExternal;
  std::vector<SeedFile> files;  // no two entries share a digest.
  SubcorpusStats stats;
};

// Canonical order: size ascending, then digest; ties between duplicates are
// broken by module rotation order and then origin URL.
bool CanonicalLess(const SeedFile &a, const SeedFile &b);

// One representative per digest (the canonically first), sorted canonically.
std::vector<SeedFile> Dedup(std::vector<SeedFile> files);

// Sorts `files` by origin URL and keeps the first of every digest. Modules use
// this to turn collected results into a deterministic subcorpus.
void NormalizeSubcorpusFiles(std::vector<SeedFile> &files);

}  // namespace seedforge

#endif  // SEEDFORGE_CORPUS_MODEL_H_
