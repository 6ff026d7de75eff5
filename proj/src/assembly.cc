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

#include "seedforge/assembly.h"

#include <algorithm>
#include <array>
#include <tuple>
#include <utility>

#include <glog/logging.h>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "fmt/format.h"

namespace seedforge {
namespace {

size_t ModuleRank(SourceModule module) {
  for (size_t i = 0; i < std::size(kAllSourceModules); ++i) {
    if (kAllSourceModules[i] == module) return i;
  }
  return std::size(kAllSourceModules);
}

ManifestEntry EntryFor(const SeedFile &file, bool selected,
                       std::optional<DropReason> reason) {
  ManifestEntry entry;
  entry.digest = file.digest;
  entry.size_bytes = file.size_bytes;
  entry.source_module = file.source_module;
  entry.origin_url = file.origin_url;
  entry.selected = selected;
  entry.dropped_reason = reason;
  return entry;
}

bool EntryLess(const ManifestEntry &a, const ManifestEntry &b) {
  return std::make_tuple(std::string_view(a.digest), ModuleRank(a.source_module),
                         std::string_view(a.origin_url)) <
         std::make_tuple(std::string_view(b.digest), ModuleRank(b.source_module),
                         std::string_view(b.origin_url));
}

absl::flat_hash_set<std::string> Digests(const std::vector<SeedFile> &files) {
  absl::flat_hash_set<std::string> out;
  for (const SeedFile &f : files) out.insert(f.digest);
  return out;
}

}  // namespace

std::string_view DropReasonName(DropReason reason) {
  switch (reason) {
    case DropReason::kOversize:
      return "Oversize";
    case DropReason::kDuplicate:
      return "Duplicate";
    case DropReason::kNotSelected:
      return "NotSelected";
    case DropReason::kCrasher:
      return "Crasher";
    case DropReason::kMinimizedOut:
      return "MinimizedOut";
  }
  return "Unknown";
}

std::string_view MinimizerKindName(MinimizerKind kind) {
  switch (kind) {
    case MinimizerKind::kAuto:
      return "auto";
    case MinimizerKind::kExternal:
      return "external";
    case MinimizerKind::kInternal:
      return "internal";
    case MinimizerKind::kOff:
      return "off";
  }
  return "off";
}

std::optional<MinimizerKind> ParseMinimizerKind(std::string_view name) {
  for (MinimizerKind kind :
       {MinimizerKind::kAuto, MinimizerKind::kExternal,
        MinimizerKind::kInternal, MinimizerKind::kOff}) {
    if (MinimizerKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

MergeResult MergeAndFilter(std::vector<SeedFile> files,
                           uint64_t max_file_size) {
  MergeResult result;
  std::sort(files.begin(), files.end(), CanonicalLess);
  for (size_t i = 0; i < files.size(); ++i) {
    // Sorting puts copies of a digest next to each other, first copy first.
    if (i > 0 && files[i].digest == files[i - 1].digest) {
      result.dropped.push_back(
          EntryFor(files[i], false, DropReason::kDuplicate));
    } else if (files[i].size_bytes > max_file_size) {
      result.dropped.push_back(EntryFor(files[i], false, DropReason::kOversize));
    } else {
      result.candidates.push_back(files[i]);
    }
  }
  return result;
}

MergeResult MergeAndFilter(const std::vector<Subcorpus> &subcorpora,
                           uint64_t max_file_size) {
  std::vector<SeedFile> all;
  for (const Subcorpus &sub : subcorpora) {
    all.insert(all.end(), sub.files.begin(), sub.files.end());
  }
  return MergeAndFilter(std::move(all), max_file_size);
}

std::vector<SeedFile> SelectBalanced(std::vector<SeedFile> candidates,
                                     size_t cap) {
  if (candidates.size() <= cap) {
    std::sort(candidates.begin(), candidates.end(), CanonicalLess);
    return candidates;
  }
  constexpr size_t kModules = std::size(kAllSourceModules);
  std::array<std::vector<SeedFile>, kModules + 1> queues;
  for (SeedFile &file : candidates) {
    queues[ModuleRank(file.source_module)].push_back(std::move(file));
  }
  for (std::vector<SeedFile> &queue : queues) {
    std::sort(queue.begin(), queue.end(),
              [](const SeedFile &a, const SeedFile &b) {
                return std::tie(a.size_bytes, a.digest) <
                       std::tie(b.size_bytes, b.digest);
              });
  }
  std::vector<SeedFile> selected;
  selected.reserve(cap);
  std::array<size_t, kModules + 1> taken = {};
  while (selected.size() < cap) {
    bool any = false;
    for (size_t m = 0; m < queues.size() && selected.size() < cap; ++m) {
      if (taken[m] >= queues[m].size()) continue;
      selected.push_back(std::move(queues[m][taken[m]++]));
      any = true;
    }
    if (!any) break;
  }
  std::sort(selected.begin(), selected.end(), CanonicalLess);
  return selected;
}

absl::StatusOr<AssemblyResult> Assemble(
    const std::vector<Subcorpus> &subcorpora, const AssemblyOptions &options,
    const Budget &budget) {
  if (options.crash_filter) {
    if (absl::Status status = CheckTargetExists(options.crash_filter->target);
        !status.ok()) {
      return status;
    }
  }
  AssemblyResult result;
  MergeResult merged = MergeAndFilter(subcorpora, options.max_file_size);
  result.entries = std::move(merged.dropped);
  const size_t candidate_count = merged.candidates.size();
  std::vector<SeedFile> selected =
      SelectBalanced(merged.candidates, options.cap);
  {
    const absl::flat_hash_set<std::string> chosen = Digests(selected);
    for (const SeedFile &file : merged.candidates) {
      if (!chosen.contains(file.digest)) {
        result.entries.push_back(
            EntryFor(file, false, DropReason::kNotSelected));
      }
    }
  }
  LOG(INFO) << "assembly: " << candidate_count << " candidates, "
            << selected.size() << " selected";

  if (options.crash_filter) {
    absl::StatusOr<CrashFilterResult> filtered =
        CrashFilter(std::move(selected), *options.crash_filter, budget);
    if (!filtered.ok()) return filtered.status();
    for (const SeedFile &file : filtered->crashers) {
      result.entries.push_back(EntryFor(file, false, DropReason::kCrasher));
    }
    result.warnings.insert(result.warnings.end(), filtered->warnings.begin(),
                           filtered->warnings.end());
    LOG(INFO) << "crash filter dropped " << filtered->crashers.size();
    selected = std::move(filtered->kept);
  }

  MinimizeResult minimized;
  switch (options.minimizer) {
    case MinimizerKind::kExternal:
      minimized = MinimizeExternal(selected, options.external, budget);
      break;
    case MinimizerKind::kInternal:
      if (options.coverage == nullptr) {
        minimized.survivors = selected;
        minimized.failed_open = true;
        minimized.warnings.push_back(
            "internal minimizer has no coverage source; corpus left "
            "unminimized");
      } else {
        minimized = MinimizeInternal(selected, *options.coverage,
                                     options.workers, budget);
      }
      break;
    case MinimizerKind::kAuto:
    case MinimizerKind::kOff:
      minimized.survivors = selected;
      break;
  }
  result.warnings.insert(result.warnings.end(), minimized.warnings.begin(),
                         minimized.warnings.end());
  result.minimizer_failed_open = minimized.failed_open;
  {
    const absl::flat_hash_set<std::string> kept = Digests(minimized.survivors);
    for (const SeedFile &file : selected) {
      if (!kept.contains(file.digest)) {
        result.entries.push_back(
            EntryFor(file, false, DropReason::kMinimizedOut));
      }
    }
  }
  result.corpus = std::move(minimized.survivors);
  std::sort(result.corpus.begin(), result.corpus.end(), CanonicalLess);
  for (const SeedFile &file : result.corpus) {
    result.entries.push_back(EntryFor(file, true, std::nullopt));
  }
  std::sort(result.entries.begin(), result.entries.end(), EntryLess);
  return result;
}

ManifestCounts CountManifest(const std::vector<ManifestEntry> &entries) {
  ManifestCounts counts;
  for (const ManifestEntry &entry : entries) {
    ++counts.harvested;
    counts.harvested_bytes += entry.size_bytes;
    if (entry.selected) ++counts.selected;
    if (entry.dropped_reason) {
      ++counts.by_reason[static_cast<int>(*entry.dropped_reason)];
    }
  }
  return counts;
}

std::string SerializeManifest(const std::vector<ManifestEntry> &entries,
                              const nlohmann::json &config,
                              const std::vector<ModuleReport> &modules) {
  std::vector<ManifestEntry> sorted = entries;
  std::sort(sorted.begin(), sorted.end(), EntryLess);
  nlohmann::json files = nlohmann::json::array();
  for (const ManifestEntry &entry : sorted) {
    nlohmann::json record;
    record["digest"] = entry.digest;
    record["size_bytes"] = entry.size_bytes;
    record["source_module"] = std::string(SourceModuleName(entry.source_module));
    record["origin_url"] = entry.origin_url;
    record["selected"] = entry.selected;
    record["dropped_reason"] =
        entry.dropped_reason
            ? nlohmann::json(std::string(DropReasonName(*entry.dropped_reason)))
            : nlohmann::json(nullptr);
    files.push_back(std::move(record));
  }
  nlohmann::json module_stats = nlohmann::json::object();
  for (const ModuleReport &report : modules) {
    nlohmann::json stats;
    stats["enabled"] = report.enabled;
    stats["status"] = report.status;
    stats["files"] = report.files;
    stats["fetched"] = report.stats.fetched;
    stats["validated"] = report.stats.validated;
    stats["rejected"] = report.stats.rejected;
    module_stats[std::string(SourceModuleName(report.module))] =
        std::move(stats);
  }
  const ManifestCounts counts = CountManifest(sorted);
  nlohmann::json totals;
  totals["harvested"] = counts.harvested;
  totals["harvested_bytes"] = counts.harvested_bytes;
  totals["selected"] = counts.selected;
  nlohmann::json dropped = nlohmann::json::object();
  for (int r = 0; r < 5; ++r) {
    dropped[std::string(DropReasonName(static_cast<DropReason>(r)))] =
        counts.by_reason[r];
  }
  totals["dropped"] = std::move(dropped);

  nlohmann::json doc;
  doc["schema_version"] = kManifestSchemaVersion;
  doc["config"] = config;
  doc["modules"] = std::move(module_stats);
  doc["files"] = std::move(files);
  doc["totals"] = std::move(totals);
  return doc.dump(2) + "\n";
}

}  // namespace seedforge
