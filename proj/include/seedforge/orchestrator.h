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

// The end-to-end pipeline: every enabled harvesting module runs on its own
// thread under its own budget, then assembly builds the corpus and the
// output directory is written:
//
//   OUT/subcorpora/<module>/<digest><suffix>
//   OUT/corpus/<digest><suffix>
//   OUT/manifest.json   deterministic provenance record
//   OUT/report.json     timings, warnings and download volumes

#ifndef SEEDFORGE_ORCHESTRATOR_H_
#define SEEDFORGE_ORCHESTRATOR_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/assembly.h"
#include "seedforge/corpus_model.h"
#include "seedforge/target.h"

namespace seedforge {

// The five harvesting modules, in rotation order.
inline constexpr SourceModule kHarvestModules[] = {
    SourceModule::kGithub, SourceModule::kWeb, SourceModule::kFeature,
    SourceModule::kBugTracker, SourceModule::kCommonCrawl};

struct Credentials {
  std::string github_token;      // SEEDFORGE_GITHUB_TOKEN
  std::string search_api_key;    // SEEDFORGE_SEARCH_API_KEY
  std::string search_engine_id;  // SEEDFORGE_SEARCH_ENGINE_ID
  std::string search_flavor = "google";  // SEEDFORGE_SEARCH_API
  std::string llm_api_key;       // SEEDFORGE_LLM_API_KEY
  std::string llm_base_url = "https://api.openai.com/v1";  // SEEDFORGE_LLM_BASE_URL

  static Credentials FromEnvironment();
};

struct PipelineConfig {
  std::optional<std::string> extension;
  std::optional<std::string> description;
  std::set<SourceModule> modules = {std::begin(kHarvestModules),
                                    std::end(kHarvestModules)};
  std::chrono::milliseconds module_budget{3600 * 1000};
  std::chrono::milliseconds grace{60 * 1000};
  uint64_t max_file_size = kDefaultMaxFileSize;
  size_t cap = kDefaultCorpusCap;
  std::string out_dir = "seedforge-out";
  bool force = false;
  Credentials credentials;
  std::string fixtures_dir;  // non-empty: fixture mode
  MinimizerKind minimizer = MinimizerKind::kAuto;
  std::optional<TargetCommand> target;
  std::string afl_cmin = "afl-cmin";
  std::string afl_showmap = "afl-showmap";
  std::string signature_table_path;  // empty: bundled table
};

// InvalidArgument for configurations the CLI should reject with exit 2.
absl::Status ValidateConfig(const PipelineConfig &config);

struct ModuleOutcome {
  SourceModule module = SourceModule::kExternal;
  bool enabled = false;
  absl::Status status;
  bool hard_stopped = false;  // abandoned by the watchdog
  std::chrono::milliseconds elapsed{0};
  Subcorpus subcorpus;
  std::vector<std::string> warnings;
};

struct PipelineReport {
  int exit_code = 1;
  std::string corpus_dir;
  std::string manifest_path;
  std::vector<ModuleOutcome> modules;
  ManifestCounts counts;
  size_t corpus_files = 0;
  std::string minimizer;  // resolved
  std::vector<std::string> warnings;
};

// Usage problems (invalid config, output directory in use without force)
// come back as errors; everything else is reflected in the report.
absl::StatusOr<PipelineReport> RunPipeline(const PipelineConfig &config);

}  // namespace seedforge

#endif  // SEEDFORGE_ORCHESTRATOR_H_
