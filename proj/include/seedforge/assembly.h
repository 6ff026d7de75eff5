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

// Turns module subcorpora into the final corpus: merge and dedup, size
// filter, balanced smallest-first selection, optional crash filtering and
// minimization. Every harvested file is accounted for in the manifest.

#ifndef SEEDFORGE_ASSEMBLY_H_
#define SEEDFORGE_ASSEMBLY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "seedforge/budget.h"
#include "seedforge/corpus_model.h"
#include "seedforge/target.h"

namespace seedforge {

inline constexpr uint64_t kDefaultMaxFileSize = uint64_t{1} << 20;
inline constexpr size_t kDefaultCorpusCap = 40000;
inline constexpr int kManifestSchemaVersion = 1;

enum class DropReason {
  kOversize,
  kDuplicate,
  kNotSelected,
  kCrasher,
  kMinimizedOut,
};

// "Oversize", "Duplicate", "NotSelected", "Crasher", "MinimizedOut".
std::string_view DropReasonName(DropReason reason);

struct ManifestEntry {
  std::string digest;
  uint64_t size_bytes = 0;
  SourceModule source_module = SourceModule::kExternal;
  std::string origin_url;
  bool selected = false;
  std::optional<DropReason> dropped_reason;
};

struct MergeResult {
  std::vector<SeedFile> candidates;   // canonical order
  std::vector<ManifestEntry> dropped;  // Duplicate and Oversize
};

// Concatenates, deduplicates (canonically first copy wins), then drops files
// strictly larger than `max_file_size`.
MergeResult MergeAndFilter(std::vector<SeedFile> files,
                           uint64_t max_file_size = kDefaultMaxFileSize);
MergeResult MergeAndFilter(const std::vector<Subcorpus> &subcorpora,
                           uint64_t max_file_size = kDefaultMaxFileSize);

// All candidates when there are at most `cap`. Otherwise round-robin over
// the modules in rotation order, each taking its smallest remaining file by
// (size, digest), until `cap` files are taken. Output is canonical order.
std::vector<SeedFile> SelectBalanced(std::vector<SeedFile> candidates,
                                     size_t cap = kDefaultCorpusCap);

enum class MinimizerKind { kAuto, kExternal, kInternal, kOff };

std::string_view MinimizerKindName(MinimizerKind kind);
std::optional<MinimizerKind> ParseMinimizerKind(std::string_view name);

struct AssemblyOptions {
  uint64_t max_file_size = kDefaultMaxFileSize;
  size_t cap = kDefaultCorpusCap;
  std::optional<CrashFilterOptions> crash_filter;  // nullopt: skipped
  // Already resolved: kAuto is treated as kOff.
  MinimizerKind minimizer = MinimizerKind::kOff;
  ExternalMinimizerOptions external;
  CoverageRunner *coverage = nullptr;  // required for kInternal
  int workers = 4;
};

struct AssemblyResult {
  std::vector<SeedFile> corpus;        // canonical order
  std::vector<ManifestEntry> entries;  // one per harvested file, sorted
  std::vector<std::string> warnings;
  bool minimizer_failed_open = false;
};

// Errors only when the crash filter's target is missing, before anything
// runs. Minimizer failures leave the corpus unminimized with a warning.
absl::StatusOr<AssemblyResult> Assemble(
    const std::vector<Subcorpus> &subcorpora, const AssemblyOptions &options,
    const Budget &budget);

struct ModuleReport {
  SourceModule module = SourceModule::kExternal;
  bool enabled = false;
  std::string status;  // absl status code name, "OK" on success
  uint64_t files = 0;
  SubcorpusStats stats;
};

// Deterministic JSON: sorted keys, entries sorted by (digest, module,
// origin), no timestamps or local paths. Ends with a newline.
std::string SerializeManifest(const std::vector<ManifestEntry> &entries,
                              const nlohmann::json &config,
                              const std::vector<ModuleReport> &modules);

// Counts per dropped_reason (plus "selected") from a manifest's entries.
struct ManifestCounts {
  uint64_t harvested = 0;
  uint64_t selected = 0;
  uint64_t harvested_bytes = 0;
  uint64_t by_reason[5] = {};
};
ManifestCounts CountManifest(const std::vector<ManifestEntry> &entries);

}  // namespace seedforge

#endif  // SEEDFORGE_ASSEMBLY_H_
