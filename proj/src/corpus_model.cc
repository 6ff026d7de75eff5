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

#include "seedforge/corpus_model.h"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <tuple>
#include <utility>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "fmt/format.h"
#include "seedforge/strings.h"

namespace seedforge {

std::string_view SourceModuleName(SourceModule module) {
  switch (module) {
    case SourceModule::kGithub:
      return "github";
    case SourceModule::kWeb:
      return "web";
    case SourceModule::kFeature:
      return "feature";
    case SourceModule::kBugTracker:
      return "bugtracker";
    case SourceModule::kCommonCrawl:
      return "commoncrawl";
    case SourceModule::kExternal:
      return "external";
  }
  return "unknown";
}

std::optional<SourceModule> ParseSourceModule(std::string_view name) {
  for (SourceModule module : kAllSourceModules) {
    if (SourceModuleName(module) == name) return module;
  }
  return std::nullopt;
}

bool MagicSignature::Matches(std::string_view content) const {
  if (content.size() < end()) return false;
  for (size_t i = 0; i < bytes.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    if (content[offset + i] != bytes[i]) return false;
  }
  return true;
}

std::string MagicSignature::ToString() const {
  std::string out = fmt::format("{}:", offset);
  for (size_t i = 0; i < bytes.size(); ++i) {
    if (!mask.empty() && !mask[i]) {
      out += "??";
    } else {
      out += HexEncode(std::string_view(bytes).substr(i, 1), /*upper=*/true);
    }
  }
  return out;
}

absl::StatusOr<MagicSignature> ParseMagicSignature(std::string_view text) {
  text = Trim(text);
  const size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    return absl::InvalidArgumentError(
        fmt::format("magic signature needs OFFSET:HEX: '{}'", text));
  }
  MagicSignature sig;
  std::optional<size_t> offset = ParseInt<size_t>(text.substr(0, colon));
  if (!offset) {
    return absl::InvalidArgumentError(
        fmt::format("bad magic offset in '{}'", text));
  }
  sig.offset = *offset;
  std::string_view hex = text.substr(colon + 1);
  if (hex.empty() || hex.size() % 2 != 0) {
    return absl::InvalidArgumentError(
        fmt::format("magic bytes must be non-empty pairs of hex: '{}'", text));
  }
  bool any_wildcard = false;
  std::vector<bool> mask;
  for (size_t i = 0; i < hex.size(); i += 2) {
    std::string_view pair = hex.substr(i, 2);
    if (pair == "??") {
      sig.bytes.push_back('\0');
      mask.push_back(false);
      any_wildcard = true;
      continue;
    }
    std::optional<unsigned> byte;
    if (IsHexDigit(pair[0]) && IsHexDigit(pair[1])) {
      byte = ParseInt<unsigned>(pair, 16);
    }
    if (!byte) {
      return absl::InvalidArgumentError(
          fmt::format("bad hex byte '{}' in '{}'", pair, text));
    }
    sig.bytes.push_back(static_cast<char>(*byte));
    mask.push_back(true);
  }
  if (any_wildcard) sig.mask = std::move(mask);
  return sig;
}

std::string FileTypeSpec::DisplayName() const {
  if (is_description()) return description;
  return "." + primary_extension;
}

std::string FileTypeSpec::MaterializedSuffix() const {
  if (is_description()) return "";
  return "." + primary_extension;
}

absl::Status CheckFileTypeSpec(const FileTypeSpec &spec) {
  if (spec.mode == FileTypeMode::kExtension) {
    if (spec.primary_extension.empty()) {
      return absl::InvalidArgumentError("extension mode needs an extension");
    }
    if (spec.primary_extension.front() == '.' ||
        ToLower(spec.primary_extension) !=
            spec.primary_extension) {
      return absl::InvalidArgumentError(
          fmt::format("extension must be lowercase without a dot: '{}'",
                      spec.primary_extension));
    }
  } else {
    if (spec.description.empty()) {
      return absl::InvalidArgumentError("description mode needs a description");
    }
    if (!spec.magic_signatures.empty() || !spec.aliases.empty()) {
      return absl::InvalidArgumentError(
          "description mode takes no aliases or magic signatures");
    }
  }
  for (const MagicSignature &sig : spec.magic_signatures) {
    if (sig.bytes.empty()) {
      return absl::InvalidArgumentError("empty magic signature");
    }
    if (!sig.mask.empty() && sig.mask.size() != sig.bytes.size()) {
      return absl::InvalidArgumentError("magic mask length mismatch");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<FileTypeSpec> MakeDescriptionSpec(std::string_view description) {
  FileTypeSpec spec;
  spec.mode = FileTypeMode::kDescription;
  spec.description = std::string(Trim(description));
  if (absl::Status s = CheckFileTypeSpec(spec); !s.ok()) return s;
  return spec;
}

std::string_view ValidationKindName(ValidationKind kind) {
  switch (kind) {
    case ValidationKind::kByExtension:
      return "extension";
    case ValidationKind::kByMagic:
      return "magic";
    case ValidationKind::kUnfiltered:
      return "unfiltered";
  }
  return "unknown";
}

std::string ExtensionOf(std::string_view name_hint) {
  // Query strings and fragments are not part of a URL-derived name.
  name_hint = name_hint.substr(0, name_hint.find_first_of("?#"));
  const size_t slash = name_hint.find_last_of("/\\");
  if (slash != std::string_view::npos) name_hint.remove_prefix(slash + 1);
  const size_t dot = name_hint.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return "";
  return ToLower(name_hint.substr(dot + 1));
}

ValidationResult ValidateFile(std::string_view content,
                              std::string_view name_hint,
                              const FileTypeSpec &spec) {
  if (spec.is_description()) return ValidationKind::kUnfiltered;
  const std::string ext = ExtensionOf(name_hint);
  if (!ext.empty()) {
    if (ext == spec.primary_extension ||
        std::find(spec.aliases.begin(), spec.aliases.end(), ext) !=
            spec.aliases.end()) {
      return ValidationKind::kByExtension;
    }
  }
  for (const MagicSignature &sig : spec.magic_signatures) {
    if (sig.Matches(content)) return ValidationKind::kByMagic;
  }
  return std::nullopt;
}

std::string ContentDigest(std::string_view content) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int md_len = 0;
  EVP_Digest(content.data(), content.size(), md.data(), &md_len, EVP_sha256(),
             nullptr);
  return HexEncode(
      std::string_view(reinterpret_cast<const char *>(md.data()), md_len));
}

SeedFile MakeSeedFile(ByteArray content, SourceModule module,
                      std::string origin_url, ValidationKind validation) {
  SeedFile file;
  file.size_bytes = content.size();
  file.digest = ContentDigest(content);
  file.content = std::move(content);
  file.source_module = module;
  file.origin_url = std::move(origin_url);
  file.retrieved_at = std::chrono::system_clock::now();
  file.validation = validation;
  return file;
}

SubcorpusStats &SubcorpusStats::operator+=(const SubcorpusStats &other) {
  fetched += other.fetched;
  validated += other.validated;
  rejected += other.rejected;
  bytes_downloaded += other.bytes_downloaded;
  return *this;
}

bool CanonicalLess(const SeedFile &a, const SeedFile &b) {
  return std::tie(a.size_bytes, a.digest, a.source_module, a.origin_url) <
         std::tie(b.size_bytes, b.digest, b.source_module, b.origin_url);
}

std::vector<SeedFile> Dedup(std::vector<SeedFile> files) {
  std::sort(files.begin(), files.end(), CanonicalLess);
  // Equal digests imply equal sizes, so duplicates are adjacent.
  auto last = std::unique(files.begin(), files.end(),
                          [](const SeedFile &a, const SeedFile &b) {
                            return a.digest == b.digest;
                          });
  files.erase(last, files.end());
  return files;
}

void NormalizeSubcorpusFiles(std::vector<SeedFile> &files) {
  std::stable_sort(files.begin(), files.end(),
                   [](const SeedFile &a, const SeedFile &b) {
                     return std::tie(a.origin_url, a.digest) <
                            std::tie(b.origin_url, b.digest);
                   });
  absl::flat_hash_set<std::string> seen;
  std::vector<SeedFile> kept;
  kept.reserve(files.size());
  for (SeedFile &file : files) {
    if (seen.insert(file.digest).second) kept.push_back(std::move(file));
  }
  files = std::move(kept);
}

}  // namespace seedforge
