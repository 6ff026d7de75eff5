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

#include "seedforge/orchestrator.h"

#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>

#include <glog/logging.h>

#include "absl/status/status.h"
#include "fmt/format.h"
#include "json.hpp"
#include "seedforge/bugtracker.h"
#include "seedforge/commoncrawl.h"
#include "seedforge/fixture_server.h"
#include "seedforge/github_search.h"
#include "seedforge/query_gen.h"
#include "seedforge/search_engine.h"
#include "seedforge/signature_table.h"
#include "seedforge/subprocess.h"
#include "seedforge/web_search.h"

namespace seedforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Env(const char *name) {
  const char *value = std::getenv(name);
  return value == nullptr ? std::string() : std::string(value);
}

std::string FixtureUrl(const char *host) { return std::string("https://") + host; }

// Everything a module thread needs, copied so that an abandoned thread never
// touches pipeline state after the watchdog gives up on it.
struct ModuleEnv {
  FileTypeSpec spec;
  Credentials credentials;
  uint64_t max_file_size = kDefaultMaxFileSize;
  bool fixture_mode = false;
  std::string fixtures_dir;
  std::string fixture_origin;
  std::string git_root;
  int politeness_ms = 1000;
  std::string work_dir;
};

absl::StatusOr<std::unique_ptr<LlmClient>> MakeLlm(const ModuleEnv &env,
                                                   HttpClient &http) {
  if (env.fixture_mode) {
    return std::unique_ptr<LlmClient>(
        new StubLlmClient((fs::path(env.fixtures_dir) / "llm").string()));
  }
  if (env.credentials.llm_api_key.empty()) {
    return absl::FailedPreconditionError(
        "SEEDFORGE_LLM_API_KEY is not set; cannot generate queries");
  }
  return std::unique_ptr<LlmClient>(new ChatCompletionClient(
      env.credentials.llm_base_url, env.credentials.llm_api_key, http));
}

absl::StatusOr<std::unique_ptr<SearchEngine>> MakeSearchEngine(
    const ModuleEnv &env, HttpClient &http) {
  JsonSearchEngineOptions options;
  if (env.fixture_mode) {
    options.base_url = FixtureUrl(kFixtureSearchHost);
    options.api_key = "fixture";
    options.engine_id = "fixture";
  } else {
    std::optional<SearchApiFlavor> flavor =
        ParseSearchApiFlavor(env.credentials.search_flavor);
    if (!flavor) {
      return absl::InvalidArgumentError(fmt::format(
          "unknown SEEDFORGE_SEARCH_API \"{}\"", env.credentials.search_flavor));
    }
    options.flavor = *flavor;
    if (*flavor == SearchApiFlavor::kSerpApi) {
      options.base_url = "https://serpapi.com";
    }
    options.api_key = env.credentials.search_api_key;
    options.engine_id = env.credentials.search_engine_id;
    if (options.api_key.empty() ||
        (*flavor == SearchApiFlavor::kGoogleCse && options.engine_id.empty())) {
      return absl::FailedPreconditionError(
          "SEEDFORGE_SEARCH_API_KEY and SEEDFORGE_SEARCH_ENGINE_ID are "
          "required for web search");
    }
  }
  return std::unique_ptr<SearchEngine>(
      new JsonApiSearchEngine(std::move(options), http));
}

ModuleResult Failed(SourceModule module, absl::Status status) {
  ModuleResult result;
  result.subcorpus.module = module;
  result.status = std::move(status);
  return result;
}

ModuleResult RunModule(SourceModule module, const ModuleEnv &env,
                       const Budget &budget) {
  HttpClientOptions http_options;
  if (env.fixture_mode) http_options.host_override = env.fixture_origin;
  DefaultHttpClient http(http_options);

  if (module == SourceModule::kCommonCrawl) {
    CommonCrawlOptions options;
    options.max_file_size = env.max_file_size;
    if (env.fixture_mode) {
      options.index_base = FixtureUrl(kFixtureIndexHost);
      options.data_base = FixtureUrl(kFixtureDataHost);
      options.index_retry_delay = std::chrono::milliseconds(100);
    }
    CdxIndex index(options, http);
    return RunCommonCrawlSearch(env.spec, index, http, options, budget);
  }

  absl::StatusOr<std::unique_ptr<LlmClient>> llm = MakeLlm(env, http);
  if (!llm.ok()) return Failed(module, llm.status());

  switch (module) {
    case SourceModule::kGithub: {
      GithubOptions options;
      options.max_file_size = env.max_file_size;
      options.token = env.credentials.github_token;
      options.work_dir = (fs::path(env.work_dir) / "github").string();
      if (env.fixture_mode) {
        options.api_base = FixtureUrl(kFixtureGithubHost);
        options.token = "fixture-token";
        options.clone_root = env.git_root;
        options.backoff_initial = std::chrono::milliseconds(50);
      }
      return RunGithubSearch(env.spec, **llm, http, options, budget);
    }
    case SourceModule::kWeb:
    case SourceModule::kFeature: {
      absl::StatusOr<std::unique_ptr<SearchEngine>> engine =
          MakeSearchEngine(env, http);
      if (!engine.ok()) return Failed(module, engine.status());
      WebSearchOptions options;
      options.crawl.max_file_size = env.max_file_size;
      options.crawl.politeness_delay =
          std::chrono::milliseconds(env.politeness_ms);
      return module == SourceModule::kWeb
                 ? RunWebSearch(env.spec, **llm, **engine, http, options,
                                budget)
                 : RunFeatureSearch(env.spec, **llm, **engine, http, options,
                                    budget);
    }
    case SourceModule::kBugTracker: {
      BugTrackerOptions options;
      options.max_file_size = env.max_file_size;
      // One client each so the trackers share no connection state.
      DefaultHttpClient launchpad_http(http_options);
      LaunchpadClient launchpad(
          env.fixture_mode ? FixtureUrl(kFixtureLaunchpadHost)
                           : "https://api.launchpad.net",
          launchpad_http);
      BugzillaClient bugzilla(env.fixture_mode
                                  ? FixtureUrl(kFixtureBugzillaHost)
                                  : "https://bugzilla.redhat.com",
                              http);
      std::vector<TrackerClient *> trackers = {&launchpad, &bugzilla};
      return RunBugTrackerSearch(env.spec, **llm, trackers, options, budget);
    }
    default:
      return Failed(module, absl::InvalidArgumentError("not a harvest module"));
  }
}

struct ModuleTask {
  ModuleTask(SourceModule m, Clock::duration limit) : module(m), budget(limit) {}

  SourceModule module;
  Budget budget;
  Clock::time_point started = Clock::now();
  std::mutex mu;
  std::condition_variable cv;
  bool done = false;
  ModuleResult result;
  Clock::time_point finished;
};

absl::StatusOr<FileTypeSpec> ResolveSpec(const PipelineConfig &config) {
  if (config.description) return MakeDescriptionSpec(*config.description);
  if (config.signature_table_path.empty()) {
    return SignatureTable::Bundled().SpecForExtension(*config.extension);
  }
  absl::StatusOr<SignatureTable> table =
      SignatureTable::LoadFile(config.signature_table_path);
  if (!table.ok()) return table.status();
  return table->SpecForExtension(*config.extension);
}

json SpecJson(const FileTypeSpec &spec) {
  json out;
  out["mode"] = spec.is_description() ? "description" : "extension";
  if (spec.is_description()) {
    out["description"] = spec.description;
  } else {
    out["extension"] = spec.primary_extension;
    out["aliases"] = spec.aliases;
    json magic = json::array();
    for (const MagicSignature &sig : spec.magic_signatures) {
      magic.push_back(sig.ToString());
    }
    out["magic_signatures"] = magic;
    out["mime_types"] = spec.mime_types;
  }
  return out;
}

absl::Status WriteText(const fs::path &path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) {
    return absl::InternalError(fmt::format("cannot write {}", path.string()));
  }
  return absl::OkStatus();
}

absl::Status WriteSeeds(const fs::path &dir, const std::vector<SeedFile> &files,
                        const std::string &suffix) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::InternalError(
        fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
  for (const SeedFile &file : files) {
    absl::Status status = WriteText(dir / (file.digest + suffix), file.content);
    if (!status.ok()) return status;
  }
  return absl::OkStatus();
}

// Refuses to reuse a non-empty output directory unless forced; when forced,
// only this tool's artifacts are removed.
absl::Status PrepareOutputDir(const PipelineConfig &config) {
  const fs::path out(config.out_dir);
  std::error_code ec;
  if (fs::exists(out, ec)) {
    if (!fs::is_directory(out, ec)) {
      return absl::InvalidArgumentError(
          fmt::format("{} exists and is not a directory", config.out_dir));
    }
    if (!fs::is_empty(out, ec)) {
      if (!config.force) {
        return absl::AlreadyExistsError(fmt::format(
            "{} is not empty; pass --force to overwrite", config.out_dir));
      }
      for (const char *name :
           {"subcorpora", "corpus", "manifest.json", "report.json", ".work"}) {
        fs::remove_all(out / name, ec);
      }
    }
  }
  fs::create_directories(out, ec);
  if (ec) {
    return absl::InternalError(
        fmt::format("cannot create {}: {}", config.out_dir, ec.message()));
  }
  return absl::OkStatus();
}

std::string StatusCodeName(const absl::Status &status) {
  return absl::StatusCodeToString(status.code());
}

}  // namespace

Credentials Credentials::FromEnvironment() {
  Credentials c;
  c.github_token = Env("SEEDFORGE_GITHUB_TOKEN");
  c.search_api_key = Env("SEEDFORGE_SEARCH_API_KEY");
  c.search_engine_id = Env("SEEDFORGE_SEARCH_ENGINE_ID");
  if (std::string flavor = Env("SEEDFORGE_SEARCH_API"); !flavor.empty()) {
    c.search_flavor = flavor;
  }
  c.llm_api_key = Env("SEEDFORGE_LLM_API_KEY");
  if (std::string base = Env("SEEDFORGE_LLM_BASE_URL"); !base.empty()) {
    c.llm_base_url = base;
  }
  return c;
}

absl::Status ValidateConfig(const PipelineConfig &config) {
  if (config.extension.has_value() == config.description.has_value()) {
    return absl::InvalidArgumentError(
        "exactly one of --ext and --desc is required");
  }
  if (config.extension && config.extension->empty()) {
    return absl::InvalidArgumentError("--ext must not be empty");
  }
  if (config.description && config.description->empty()) {
    return absl::InvalidArgumentError("--desc must not be empty");
  }
  if (config.module_budget <= std::chrono::milliseconds::zero()) {
    return absl::InvalidArgumentError("--module-budget must be positive");
  }
  if (config.cap == 0) return absl::InvalidArgumentError("--cap must be positive");
  if (config.max_file_size == 0) {
    return absl::InvalidArgumentError("--max-file-size must be positive");
  }
  if (config.out_dir.empty()) {
    return absl::InvalidArgumentError("--out must not be empty");
  }
  for (SourceModule m : config.modules) {
    if (m == SourceModule::kExternal) {
      return absl::InvalidArgumentError("\"external\" is not a harvest module");
    }
  }
  if (config.target) {
    if (absl::Status status = CheckTargetExists(*config.target); !status.ok()) {
      return absl::InvalidArgumentError(status.message());
    }
  }
  if (config.minimizer == MinimizerKind::kExternal && !config.target) {
    return absl::InvalidArgumentError("--minimizer external needs --target");
  }
  if (config.minimizer == MinimizerKind::kInternal && !config.target) {
    const bool fixture_coverage =
        !config.fixtures_dir.empty() &&
        fs::exists(fs::path(config.fixtures_dir) / "coverage.json");
    if (!fixture_coverage) {
      return absl::InvalidArgumentError(
          "--minimizer internal needs --target (or fixture coverage)");
    }
  }
  if (!config.fixtures_dir.empty() && !fs::is_directory(config.fixtures_dir)) {
    return absl::InvalidArgumentError(
        fmt::format("fixture directory {} does not exist", config.fixtures_dir));
  }
  return absl::OkStatus();
}

absl::StatusOr<PipelineReport> RunPipeline(const PipelineConfig &config) {
  if (absl::Status status = ValidateConfig(config); !status.ok()) return status;
  absl::StatusOr<FileTypeSpec> spec = ResolveSpec(config);
  if (!spec.ok()) return absl::InvalidArgumentError(spec.status().message());
  if (absl::Status status = PrepareOutputDir(config); !status.ok()) {
    return status;
  }
  const fs::path out(config.out_dir);
  const std::string suffix = spec->MaterializedSuffix();
  PipelineReport report;

  std::unique_ptr<FixtureServer> fixture;
  ModuleEnv env;
  env.spec = *spec;
  env.credentials = config.credentials;
  env.max_file_size = config.max_file_size;
  env.work_dir = (out / ".work").string();
  if (!config.fixtures_dir.empty()) {
    absl::StatusOr<std::unique_ptr<FixtureServer>> server =
        FixtureServer::Create(config.fixtures_dir);
    if (!server.ok()) return server.status();
    fixture = *std::move(server);
    if (absl::Status status = fixture->Start(); !status.ok()) return status;
    env.fixture_mode = true;
    env.fixtures_dir = fixture->dir();
    env.fixture_origin = fixture->origin();
    env.git_root = fixture->git_root();
    env.politeness_ms = fixture->knobs().politeness_ms;
    LOG(INFO) << "fixture mode: serving " << env.fixtures_dir << " at "
              << env.fixture_origin;
  }
  if (!spec->is_description() && spec->magic_signatures.empty() &&
      spec->mime_types.empty()) {
    report.warnings.push_back(fmt::format(
        "extension \"{}\" is not in the signature table; validating by "
        "extension only",
        spec->primary_extension));
  }

  // Harvest.
  std::vector<std::shared_ptr<ModuleTask>> tasks;
  std::vector<std::thread> threads;
  for (SourceModule module : kHarvestModules) {
    if (!config.modules.count(module)) continue;
    auto task = std::make_shared<ModuleTask>(module, config.module_budget);
    tasks.push_back(task);
    LOG(INFO) << "starting module " << SourceModuleName(module);
    threads.emplace_back([task, env] {
      ModuleResult result = RunModule(task->module, env, task->budget);
      std::lock_guard<std::mutex> lock(task->mu);
      task->result = std::move(result);
      task->finished = Clock::now();
      task->done = true;
      task->cv.notify_all();
    });
  }
  for (size_t i = 0; i < tasks.size(); ++i) {
    ModuleTask &task = *tasks[i];
    std::unique_lock<std::mutex> lock(task.mu);
    const bool finished = task.cv.wait_until(
        lock, task.budget.deadline() + config.grace, [&] { return task.done; });
    lock.unlock();
    if (finished) {
      threads[i].join();
    } else {
      LOG(ERROR) << "module " << SourceModuleName(task.module)
                 << " ignored its budget; abandoning it";
      task.budget.Cancel();
      threads[i].detach();
    }
  }

  std::vector<Subcorpus> subcorpora;
  std::vector<ModuleReport> module_reports;
  for (SourceModule module : kHarvestModules) {
    ModuleOutcome outcome;
    outcome.module = module;
    outcome.subcorpus.module = module;
    outcome.enabled = config.modules.count(module) > 0;
    for (const std::shared_ptr<ModuleTask> &task : tasks) {
      if (task->module != module) continue;
      std::lock_guard<std::mutex> lock(task->mu);
      if (task->done) {
        outcome.status = task->result.status;
        outcome.subcorpus = task->result.subcorpus;
        outcome.warnings = task->result.warnings;
        for (const QueryPlan &plan : task->result.plans) {
          outcome.warnings.insert(outcome.warnings.end(), plan.warnings.begin(),
                                  plan.warnings.end());
        }
        outcome.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            task->finished - task->started);
      } else {
        outcome.hard_stopped = true;
        outcome.status = absl::DeadlineExceededError(
            "stopped by the watchdog after budget plus grace");
        outcome.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            Clock::now() - task->started);
      }
    }
    if (outcome.enabled) {
      LOG(INFO) << "module " << SourceModuleName(module) << ": "
                << outcome.subcorpus.files.size() << " files, status "
                << outcome.status;
      if (absl::Status status =
              WriteSeeds(out / "subcorpora" / std::string(SourceModuleName(module)),
                         outcome.subcorpus.files, suffix);
          !status.ok()) {
        return status;
      }
      subcorpora.push_back(outcome.subcorpus);
    }
    ModuleReport mr;
    mr.module = module;
    mr.enabled = outcome.enabled;
    mr.status = outcome.enabled ? StatusCodeName(outcome.status) : "DISABLED";
    mr.files = outcome.subcorpus.files.size();
    mr.stats = outcome.subcorpus.stats;
    module_reports.push_back(mr);
    report.modules.push_back(std::move(outcome));
  }
  if (fixture) fixture->Stop();

  // Assembly.
  AssemblyOptions assembly;
  assembly.max_file_size = config.max_file_size;
  assembly.cap = config.cap;
  const std::string scratch = (out / ".work" / "assembly").string();
  if (config.target) {
    CrashFilterOptions crash;
    crash.target = *config.target;
    crash.work_dir = scratch;
    crash.suffix = suffix;
    assembly.crash_filter = crash;
  }
  std::unique_ptr<CoverageRunner> coverage;
  const fs::path fixture_coverage =
      config.fixtures_dir.empty()
          ? fs::path()
          : fs::path(config.fixtures_dir) / "coverage.json";
  auto use_fixture_coverage = [&]() -> bool {
    if (fixture_coverage.empty() || !fs::exists(fixture_coverage)) return false;
    absl::StatusOr<FixtureCoverageRunner> runner =
        FixtureCoverageRunner::FromJsonFile(fixture_coverage.string());
    if (!runner.ok()) {
      report.warnings.push_back(runner.status().ToString());
      return false;
    }
    coverage = std::make_unique<FixtureCoverageRunner>(*std::move(runner));
    return true;
  };
  auto use_showmap = [&]() {
    AflShowmapRunner::Options options;
    options.showmap = config.afl_showmap;
    options.target = *config.target;
    options.work_dir = scratch;
    options.suffix = suffix;
    coverage = std::make_unique<AflShowmapRunner>(options);
  };
  MinimizerKind minimizer = config.minimizer;
  if (minimizer == MinimizerKind::kAuto) {
    if (use_fixture_coverage()) {
      minimizer = MinimizerKind::kInternal;
    } else if (config.target && !FindExecutable(config.afl_cmin).empty()) {
      minimizer = MinimizerKind::kExternal;
    } else if (config.target && !FindExecutable(config.afl_showmap).empty()) {
      minimizer = MinimizerKind::kInternal;
      use_showmap();
    } else {
      minimizer = MinimizerKind::kOff;
      report.warnings.push_back(
          "no minimizer available (needs --target with afl-cmin or "
          "afl-showmap); corpus left unminimized");
    }
  } else if (minimizer == MinimizerKind::kInternal) {
    if (config.target) {
      use_showmap();
    } else if (!use_fixture_coverage()) {
      minimizer = MinimizerKind::kOff;
    }
  }
  assembly.minimizer = minimizer;
  assembly.coverage = coverage.get();
  if (config.target) {
    assembly.external.cmin = config.afl_cmin;
    assembly.external.target = *config.target;
    assembly.external.work_dir = scratch;
    assembly.external.suffix = suffix;
  }
  report.minimizer = std::string(MinimizerKindName(minimizer));

  Budget assembly_budget;
  absl::StatusOr<AssemblyResult> assembled =
      Assemble(subcorpora, assembly, assembly_budget);
  if (!assembled.ok()) return assembled.status();
  report.warnings.insert(report.warnings.end(), assembled->warnings.begin(),
                         assembled->warnings.end());
  {
    std::error_code ec;
    fs::remove_all(out / ".work", ec);
  }

  if (absl::Status status = WriteSeeds(out / "corpus", assembled->corpus, suffix);
      !status.ok()) {
    return status;
  }
  json snapshot;
  snapshot["file_type"] = SpecJson(*spec);
  json enabled = json::array();
  for (SourceModule module : kHarvestModules) {
    if (config.modules.count(module)) {
      enabled.push_back(std::string(SourceModuleName(module)));
    }
  }
  snapshot["modules"] = enabled;
  snapshot["module_budget_ms"] = config.module_budget.count();
  snapshot["max_file_size"] = config.max_file_size;
  snapshot["cap"] = config.cap;
  snapshot["minimizer"] = report.minimizer;
  snapshot["crash_filter"] = config.target.has_value();
  snapshot["fixture_mode"] = env.fixture_mode;
  const std::string manifest =
      SerializeManifest(assembled->entries, snapshot, module_reports);
  report.manifest_path = (out / "manifest.json").string();
  if (absl::Status status = WriteText(report.manifest_path, manifest);
      !status.ok()) {
    return status;
  }
  report.corpus_dir = (out / "corpus").string();
  report.counts = CountManifest(assembled->entries);
  report.corpus_files = assembled->corpus.size();

  bool any_harvested = false;
  for (const ModuleOutcome &m : report.modules) {
    any_harvested |= !m.subcorpus.files.empty();
  }
  if (!any_harvested) {
    report.warnings.push_back("every module came back empty");
  }
  report.exit_code = report.corpus_files > 0 ? 0 : 1;

  json report_json;
  report_json["exit_code"] = report.exit_code;
  report_json["corpus_files"] = report.corpus_files;
  report_json["minimizer"] = report.minimizer;
  report_json["minimizer_failed_open"] = assembled->minimizer_failed_open;
  report_json["warnings"] = report.warnings;
  json totals;
  totals["harvested"] = report.counts.harvested;
  totals["harvested_bytes"] = report.counts.harvested_bytes;
  totals["selected"] = report.counts.selected;
  report_json["totals"] = totals;
  json modules = json::object();
  for (const ModuleOutcome &m : report.modules) {
    json entry;
    entry["enabled"] = m.enabled;
    entry["status"] = m.enabled ? m.status.ToString() : "DISABLED";
    entry["hard_stopped"] = m.hard_stopped;
    entry["elapsed_ms"] = m.elapsed.count();
    entry["files"] = m.subcorpus.files.size();
    uint64_t bytes = 0;
    for (const SeedFile &f : m.subcorpus.files) bytes += f.size_bytes;
    entry["harvested_bytes"] = bytes;
    entry["fetched"] = m.subcorpus.stats.fetched;
    entry["validated"] = m.subcorpus.stats.validated;
    entry["rejected"] = m.subcorpus.stats.rejected;
    entry["bytes_downloaded"] = m.subcorpus.stats.bytes_downloaded;
    entry["warnings"] = m.warnings;
    modules[std::string(SourceModuleName(m.module))] = std::move(entry);
  }
  report_json["modules"] = std::move(modules);
  if (absl::Status status =
          WriteText(out / "report.json", report_json.dump(2) + "\n");
      !status.ok()) {
    return status;
  }
  return report;
}

}  // namespace seedforge
