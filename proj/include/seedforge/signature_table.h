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

#ifndef SEEDFORGE_SIGNATURE_TABLE_H_
#define SEEDFORGE_SIGNATURE_TABLE_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/corpus_model.h"

namespace seedforge {

struct SignatureEntry {
  std::string extension;
  std::vector<std::string> aliases;
  std::vector<MagicSignature> magic;
  std::vector<std::string> mime_types;
};

// Extension -> signatures, loaded from the INI-style table in
// data/signatures.ini. A copy of that file is compiled into the library.
class SignatureTable {
 public:
  static absl::StatusOr<SignatureTable> Parse(std::string_view text);
  static absl::StatusOr<SignatureTable> LoadFile(const std::string &path);
  static const SignatureTable &Bundled();

  int version() const { return version_; }
  const std::map<std::string, SignatureEntry> &entries() const {
    return entries_;
  }

  // Finds an entry by canonical extension or alias (case-insensitive).
  const SignatureEntry *Find(std::string_view extension) const;

  // An Extension-mode spec for `extension`. The requested extension becomes
  // the primary one; the entry's other names become aliases. Unknown
  // extensions yield a spec with no signatures or mime types.
  absl::StatusOr<FileTypeSpec> SpecForExtension(
      std::string_view extension) const;

 private:
  int version_ = 0;
  std::map<std::string, SignatureEntry> entries_;
};

// Raw text of the bundled table.
std::string_view BundledSignatureTableText();

}  // namespace seedforge

#endif  // SEEDFORGE_SIGNATURE_TABLE_H_
