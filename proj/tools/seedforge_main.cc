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

// seedforge gen   - build a seed corpus for one file type
// seedforge stats - evaluation statistics over fuzzing trial data
//
// Exit codes: 0 success, 1 empty corpus (or a stats input error), 2 usage.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <glog/logging.h>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "seedforge/assembly.h"
#include "seedforge/eval_stats.h"
#include "seedforge/orchestrator.h"
#include "seedforge/stats_tables.h"
#include "seedforge/strings.h"

namespace {

namespace fs = std::filesystem;
using namespace seedforge;

constexpr int kExitUsage = 2;

struct GenFlags {
  std::string ext;
  std::string desc;
  std::string out = "seedforge-out";
  double module_budget = 3600;
  double grace = 60;
  uint64_t max_file_size = kDefaultMaxFileSize;
  size_t cap = kDefaultCorpusCap;
  std::string modules = "github,web,feature,bugtracker,commoncrawl";
  std::string target;
  std::string minimizer = "auto";
  std::string fixtures;
  std::string signatures;
  bool force = false;
};

struct StatsFlags {
  std::string pairs;
  std::string series;
  std::string baseline;
  std::string compare;
  std::string aggregate = "mean";
  std::string out;
};

int Usage(const std::string &message) {
  std::cerr << "seedforge: " << message << "\n";
  return kExitUsage;
}

int RunGen(const GenFlags &flags) {
  PipelineConfig config;
  if (!flags.ext.empty()) {
    std::string ext = flags.ext;
    if (ext.front() == '.') ext.erase(0, 1);
    config.extension = ToLower(ext);
  }
  if (!flags.desc.empty()) config.description = flags.desc;
  config.out_dir = flags.out;
  if (!(flags.module_budget > 0) || !std::isfinite(flags.module_budget)) {
    return Usage("--module-budget must be a positive number of seconds");
  }
  config.module_budget = std::chrono::milliseconds(
      static_cast<int64_t>(std::llround(flags.module_budget * 1000)));
  if (config.module_budget.count() == 0) config.module_budget = std::chrono::milliseconds(1);
  config.grace = std::chrono::milliseconds(
      static_cast<int64_t>(std::llround(std::max(0.0, flags.grace) * 1000)));
  config.max_file_size = flags.max_file_size;
  config.cap = flags.cap;
  config.modules.clear();
  for (const std::string &name : SplitTrimmed(flags.modules, ',')) {
    if (name.empty()) continue;
    std::optional<SourceModule> module = ParseSourceModule(name);
    if (!module || *module == SourceModule::kExternal) {
      return Usage(fmt::format("unknown module \"{}\"", name));
    }
    config.modules.insert(*module);
  }
  if (config.modules.empty()) return Usage("--modules selects no module");
  if (!flags.target.empty()) {
    absl::StatusOr<TargetCommand> target = ParseTargetCommand(flags.target);
    if (!target.ok()) return Usage(fmt::format("--target: {}", std::string(target.status().message())));
    config.target = *target;
  }
  std::optional<MinimizerKind> minimizer = ParseMinimizerKind(flags.minimizer);
  if (!minimizer) return Usage("--minimizer must be auto, external, internal or off");
  config.minimizer = *minimizer;
  config.fixtures_dir = flags.fixtures;
  config.signature_table_path = flags.signatures;
  config.force = flags.force;
  config.credentials = Credentials::FromEnvironment();
  if (const char *cmin = std::getenv("SEEDFORGE_AFL_CMIN")) config.afl_cmin = cmin;
  if (const char *showmap = std::getenv("SEEDFORGE_AFL_SHOWMAP")) {
    config.afl_showmap = showmap;
  }

  absl::StatusOr<PipelineReport> report = RunPipeline(config);
  if (!report.ok()) {
    const absl::StatusCode code = report.status().code();
    if (code == absl::StatusCode::kInvalidArgument ||
        code == absl::StatusCode::kAlreadyExists) {
      return Usage(std::string(report.status().message()));
    }
    std::cerr << "seedforge: " << report.status() << "\n";
    return 1;
  }
  for (const ModuleOutcome &m : report->modules) {
    if (!m.enabled) continue;
    std::cerr << fmt::format("  {:<12} {:>6} files  {}\n",
                             SourceModuleName(m.module),
                             m.subcorpus.files.size(),
                             m.status.ok() ? "ok" : m.status.ToString());
  }
  for (const std::string &w : report->warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (report->exit_code != 0) {
    std::cerr << "seedforge: the final corpus is empty"
              << (report->counts.harvested == 0 ? " (no module found any files)"
                                                : "")
              << "\n";
  } else {
    std::cout << fmt::format("{} seeds in {}\nmanifest: {}\n",
                             report->corpus_files, report->corpus_dir,
                             report->manifest_path);
  }
  return report->exit_code;
}

absl::StatusOr<std::string> ReadAll(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(fmt::format("cannot read {}", path));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

int Emit(const std::string &out_dir, const std::string &name,
         const std::string &table) {
  if (out_dir.empty()) {
    std::cout << table;
    return 0;
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path path = fs::path(out_dir) / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << table;
  if (!out) {
    std::cerr << "seedforge: cannot write " << path << "\n";
    return 1;
  }
  return 0;
}

int RunStats(const StatsFlags &flags) {
  if (flags.pairs.empty() == flags.series.empty()) {
    return Usage("stats needs exactly one of --pairs and --series");
  }
  if (!flags.pairs.empty()) {
    absl::StatusOr<std::string> text = ReadAll(flags.pairs);
    if (!text.ok()) return Usage(std::string(text.status().message()));
    absl::StatusOr<std::vector<PairRow>> rows = ParsePairsCsv(*text);
    if (!rows.ok()) return Usage(std::string(rows.status().message()));
    absl::StatusOr<std::string> table = PairsTable(*rows);
    if (!table.ok()) {
      std::cerr << "seedforge: " << table.status().message() << "\n";
      return 1;
    }
    return Emit(flags.out, "wilcoxon.csv", *table);
  }
  absl::StatusOr<std::vector<TrialSeries>> series = LoadSeriesDir(flags.series);
  if (!series.ok()) return Usage(std::string(series.status().message()));
  int rc = Emit(flags.out, "summary.csv", SummaryTable(*series));
  if (!flags.baseline.empty()) {
    std::vector<TrialSeries> baseline;
    for (const TrialSeries &s : *series) {
      if (s.corpus == flags.baseline) baseline.push_back(s);
    }
    if (baseline.empty()) {
      return Usage(fmt::format("no trials for baseline \"{}\"", flags.baseline));
    }
    NormalizedCoverage normalized = NormalizeCoverage(*series, baseline);
    for (const auto &[target, status] : normalized.target_errors) {
      std::cerr << "warning: " << target << ": " << status.message() << "\n";
    }
    rc |= Emit(flags.out, "normalized.csv", NormalizedTable(normalized));
  }
  if (!flags.compare.empty()) {
    std::vector<std::string> names = SplitTrimmed(flags.compare, ',');
    if (names.size() != 2 || names[0].empty() || names[1].empty()) {
      return Usage("--compare takes two corpus labels: A,B");
    }
    Aggregate aggregate;
    if (flags.aggregate == "mean") {
      aggregate = Aggregate::kMean;
    } else if (flags.aggregate == "median") {
      aggregate = Aggregate::kMedian;
    } else {
      return Usage("--aggregate must be mean or median");
    }
    rc |= Emit(flags.out, "wilcoxon.csv",
               CompareTable(*series, names[0], names[1], aggregate));
  }
  return rc;
}

}  // namespace

int main(int argc, char **argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_logtostderr = true;
  FLAGS_minloglevel = google::WARNING;

  CLI::App app{"seedforge: fuzzing seed corpus builder"};
  app.require_subcommand(1);
  app.fallthrough();
  int verbose = 0;
  app.add_flag("-v,--verbose", verbose, "More logging (repeat for more)");

  GenFlags gen;
  CLI::App *gen_cmd = app.add_subcommand("gen", "Build a seed corpus");
  auto *ext = gen_cmd->add_option("--ext", gen.ext, "Target file extension, e.g. png");
  auto *desc =
      gen_cmd->add_option("--desc", gen.desc, "Description of a type with no extension");
  ext->excludes(desc);
  gen_cmd->add_option("--out", gen.out, "Output directory")->capture_default_str();
  gen_cmd->add_option("--module-budget", gen.module_budget,
                      "Wall-clock seconds per module")
      ->capture_default_str();
  gen_cmd->add_option("--grace", gen.grace,
                      "Seconds past the budget before a module is abandoned")
      ->capture_default_str();
  gen_cmd->add_option("--max-file-size", gen.max_file_size, "Bytes")
      ->capture_default_str();
  gen_cmd->add_option("--cap", gen.cap, "Maximum corpus size before minimization")
      ->capture_default_str();
  gen_cmd->add_option("--modules", gen.modules, "Comma-separated modules")
      ->capture_default_str();
  gen_cmd->add_option("--target", gen.target,
                      "Target command; @@ is replaced by the seed path");
  gen_cmd->add_option("--minimizer", gen.minimizer, "auto|external|internal|off")
      ->capture_default_str();
  gen_cmd->add_option("--fixtures", gen.fixtures,
                      "Serve every remote service from this fixture directory");
  gen_cmd->add_option("--signatures", gen.signatures,
                      "Signature table to use instead of the bundled one");
  gen_cmd->add_flag("--force", gen.force, "Overwrite a previous run's output");

  StatsFlags stats;
  CLI::App *stats_cmd =
      app.add_subcommand("stats", "Statistics over fuzzing trial data");
  stats_cmd->add_option("--pairs", stats.pairs, "CSV of target,x,y");
  stats_cmd->add_option("--series", stats.series,
                        "Directory of <corpus>/<target>/<trial>.log");
  stats_cmd->add_option("--baseline", stats.baseline,
                        "Corpus label to normalize coverage against");
  stats_cmd->add_option("--compare", stats.compare, "Two corpus labels: A,B");
  stats_cmd->add_option("--aggregate", stats.aggregate,
                        "Per-target aggregation for --compare: mean|median")
      ->capture_default_str();
  stats_cmd->add_option("--out", stats.out,
                        "Write CSV files here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }
  if (verbose >= 1) FLAGS_minloglevel = google::INFO;
  if (verbose >= 2) FLAGS_v = verbose - 1;

  if (*gen_cmd) return RunGen(gen);
  return RunStats(stats);
}
