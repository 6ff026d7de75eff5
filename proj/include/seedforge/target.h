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

// Running a fuzz target on seeds: crash pre-filtering, coverage collection,
// and corpus minimization (external afl-cmin or the built-in greedy cover).

#ifndef SEEDFORGE_TARGET_H_
#define SEEDFORGE_TARGET_H_

#include <chrono>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "seedforge/budget.h"
#include "seedforge/corpus_model.h"

namespace seedforge {

// A target invocation. An argument equal to or containing "@@" is replaced
// by the seed's path; without one, the seed is fed on stdin.
struct TargetCommand {
  std::vector<std::string> argv;

  bool uses_file_argument() const;
  std::vector<std::string> Instantiate(const std::string &input_path) const;
  std::string ToString() const;
};

// Splits a command line with POSIX-shell quoting (single quotes, double
// quotes, backslash escapes). No expansion is performed.
absl::StatusOr<TargetCommand> ParseTargetCommand(std::string_view text);

// NotFound when argv[0] does not name an executable.
absl::Status CheckTargetExists(const TargetCommand &target);

// Writes `seed` as <dir>/<digest><suffix>. Returns the path.
absl::StatusOr<std::string> MaterializeSeed(const SeedFile &seed,
                                            const std::string &dir,
                                            const std::string &suffix);

struct CrashFilterOptions {
  TargetCommand target;
  std::chrono::milliseconds per_seed_timeout{1000};
  // Exit codes the harness uses to report a crash, in addition to death by
  // signal. Sanitizers are asked to abort, so the default set is empty.
  std::set<int> crash_exit_codes;
  int workers = 4;
  std::string work_dir;  // scratch directory; created if missing
  std::string suffix;    // materialized file suffix, e.g. ".png"
};

struct CrashFilterResult {
  std::vector<SeedFile> kept;
  std::vector<SeedFile> crashers;
  std::vector<std::string> timed_out;  // digests; these are kept
  std::vector<std::string> warnings;
};

// Runs every seed once. Returns NotFound before running anything when the
// target binary is missing.
absl::StatusOr<CrashFilterResult> CrashFilter(std::vector<SeedFile> seeds,
                                              const CrashFilterOptions &options,
                                              const Budget &budget);

// Edge ids exercised by one seed.
class CoverageRunner {
 public:
  virtual ~CoverageRunner() = default;
  virtual absl::StatusOr<std::vector<uint32_t>> Edges(const SeedFile &seed,
                                                      const Budget &budget) = 0;
};

// afl-showmap -q -o MAP -t MS -- target: parses "edge:count" lines.
class AflShowmapRunner : public CoverageRunner {
 public:
  struct Options {
    std::string showmap = "afl-showmap";
    TargetCommand target;
    std::chrono::milliseconds per_seed_timeout{1000};
    std::string work_dir;
    std::string suffix;
  };
  explicit AflShowmapRunner(Options options);
  absl::StatusOr<std::vector<uint32_t>> Edges(const SeedFile &seed,
                                              const Budget &budget) override;

 private:
  Options options_;
};

// digest -> edge set, for tests and fixtures. Unknown digests are NotFound.
class FixtureCoverageRunner : public CoverageRunner {
 public:
  explicit FixtureCoverageRunner(
      absl::flat_hash_map<std::string, std::vector<uint32_t>> edges);
  // Reads {"<digest>": [edge, ...], ...}.
  static absl::StatusOr<FixtureCoverageRunner> FromJsonFile(
      const std::string &path);
  absl::StatusOr<std::vector<uint32_t>> Edges(const SeedFile &seed,
                                              const Budget &budget) override;

 private:
  absl::flat_hash_map<std::string, std::vector<uint32_t>> edges_;
};

// Indices of the seeds kept by one greedy pass in the given order: a seed is
// kept iff it covers an edge no earlier kept seed covers.
std::vector<size_t> GreedyCover(const std::vector<std::vector<uint32_t>> &maps);

struct MinimizeResult {
  std::vector<SeedFile> survivors;  // canonical order
  std::vector<std::string> warnings;
  bool failed_open = false;  // minimizer failed; survivors = input
};

// Orders seeds by (size, digest), collects coverage with up to `workers`
// parallel runs, then applies GreedyCover. Seeds whose coverage cannot be
// measured are kept.
MinimizeResult MinimizeInternal(std::vector<SeedFile> seeds,
                                CoverageRunner &runner, int workers,
                                const Budget &budget);

struct ExternalMinimizerOptions {
  std::string cmin = "afl-cmin";
  TargetCommand target;
  std::chrono::milliseconds per_seed_timeout{1000};
  std::string work_dir;
  std::string suffix;
};

// The afl-cmin argv for one run: cmin -i IN -o OUT -t MS -- target...
std::vector<std::string> ExternalMinimizerArgv(
    const ExternalMinimizerOptions &options, const std::string &in_dir,
    const std::string &out_dir);

// Materializes seeds, runs afl-cmin, and maps survivors back by digest. Any
// failure returns the input unchanged with a warning.
MinimizeResult MinimizeExternal(std::vector<SeedFile> seeds,
                                const ExternalMinimizerOptions &options,
                                const Budget &budget);

}  // namespace seedforge

#endif  // SEEDFORGE_TARGET_H_
