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

#include "seedforge/target.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include <glog/logging.h>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "fmt/format.h"
#include "json.hpp"
#include "seedforge/strings.h"
#include "seedforge/subprocess.h"

namespace seedforge {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kFileToken = "@@";

// Sanitized targets report errors by exiting with a small code unless told
// to abort; ask for an abort so crashes always surface as signals. Values
// already present in the environment win.
std::map<std::string, std::string> TargetEnvironment() {
  std::map<std::string, std::string> env;
  auto set_default = [&](const char *name, const char *value) {
    if (std::getenv(name) == nullptr) env[name] = value;
  };
  set_default("ASAN_OPTIONS", "abort_on_error=1:detect_leaks=0:symbolize=0");
  set_default("UBSAN_OPTIONS", "halt_on_error=1:abort_on_error=1");
  set_default("MSAN_OPTIONS", "abort_on_error=1:symbolize=0");
  return env;
}

absl::Status WriteFile(const std::string &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) return absl::InternalError(fmt::format("cannot write {}", path));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(fmt::format("cannot read {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::StatusOr<std::string> MakeScratchDir(const std::string &base,
                                           std::string_view tag) {
  fs::path root = base.empty() ? fs::temp_directory_path() : fs::path(base);
  std::error_code ec;
  fs::create_directories(root, ec);
  std::string pattern = (root / fmt::format("{}-XXXXXX", tag)).string();
  if (mkdtemp(pattern.data()) == nullptr) {
    return absl::InternalError(
        fmt::format("cannot create scratch dir under {}", root.string()));
  }
  return pattern;
}

// Runs `body(i)` for i in [0, n) on up to `workers` threads.
template <typename Fn>
void ParallelFor(size_t n, int workers, Fn body) {
  std::atomic<size_t> next{0};
  auto loop = [&] {
    for (size_t i = next++; i < n; i = next++) body(i);
  };
  const size_t threads_wanted =
      std::min<size_t>(n, static_cast<size_t>(std::max(1, workers)));
  std::vector<std::thread> threads;
  for (size_t t = 1; t < threads_wanted; ++t) threads.emplace_back(loop);
  loop();
  for (std::thread &t : threads) t.join();
}

void SortCanonically(std::vector<SeedFile> &seeds) {
  std::sort(seeds.begin(), seeds.end(), CanonicalLess);
}

}  // namespace

bool TargetCommand::uses_file_argument() const {
  return std::any_of(argv.begin() + (argv.empty() ? 0 : 1), argv.end(),
                     [](const std::string &arg) {
                       return arg.find(kFileToken) != std::string::npos;
                     });
}

std::vector<std::string> TargetCommand::Instantiate(
    const std::string &input_path) const {
  std::vector<std::string> out = argv;
  for (size_t i = 1; i < out.size(); ++i) {
    size_t pos = 0;
    while ((pos = out[i].find(kFileToken, pos)) != std::string::npos) {
      out[i].replace(pos, kFileToken.size(), input_path);
      pos += input_path.size();
    }
  }
  return out;
}

std::string TargetCommand::ToString() const {
  std::string out;
  for (const std::string &arg : argv) {
    if (!out.empty()) out += ' ';
    const bool plain =
        !arg.empty() &&
        std::all_of(arg.begin(), arg.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) ||
                 std::string_view("@%+=:,./_-").find(c) !=
                     std::string_view::npos;
        });
    if (plain) {
      out += arg;
      continue;
    }
    out += '\'';
    for (char c : arg) {
      if (c == '\'') {
        out += "'\\''";
      } else {
        out += c;
      }
    }
    out += '\'';
  }
  return out;
}

absl::StatusOr<TargetCommand> ParseTargetCommand(std::string_view text) {
  TargetCommand command;
  std::string current;
  bool in_word = false;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\'') {
      const size_t close = text.find('\'', i + 1);
      if (close == std::string_view::npos) {
        return absl::InvalidArgumentError("unterminated single quote");
      }
      current.append(text.substr(i + 1, close - i - 1));
      i = close;
      in_word = true;
    } else if (c == '"') {
      size_t j = i + 1;
      for (; j < text.size() && text[j] != '"'; ++j) {
        if (text[j] == '\\' && j + 1 < text.size() &&
            std::string_view("\"\\$`").find(text[j + 1]) !=
                std::string_view::npos) {
          ++j;
        }
        current += text[j];
      }
      if (j >= text.size()) {
        return absl::InvalidArgumentError("unterminated double quote");
      }
      i = j;
      in_word = true;
    } else if (c == '\\') {
      if (i + 1 >= text.size()) {
        return absl::InvalidArgumentError("trailing backslash");
      }
      current += text[++i];
      in_word = true;
    } else if (IsSpace(c)) {
      if (in_word) command.argv.push_back(std::move(current));
      current.clear();
      in_word = false;
    } else {
      current += c;
      in_word = true;
    }
  }
  if (in_word) command.argv.push_back(std::move(current));
  if (command.argv.empty()) {
    return absl::InvalidArgumentError("empty target command");
  }
  return command;
}

absl::Status CheckTargetExists(const TargetCommand &target) {
  if (target.argv.empty()) {
    return absl::InvalidArgumentError("empty target command");
  }
  if (FindExecutable(target.argv[0]).empty()) {
    return absl::NotFoundError(
        fmt::format("target binary not found: {}", target.argv[0]));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> MaterializeSeed(const SeedFile &seed,
                                            const std::string &dir,
                                            const std::string &suffix) {
  const std::string path =
      (fs::path(dir) / (seed.digest + suffix)).string();
  if (absl::Status status = WriteFile(path, seed.content); !status.ok()) {
    return status;
  }
  return path;
}

absl::StatusOr<CrashFilterResult> CrashFilter(std::vector<SeedFile> seeds,
                                              const CrashFilterOptions &options,
                                              const Budget &budget) {
  if (absl::Status status = CheckTargetExists(options.target); !status.ok()) {
    return status;
  }
  CrashFilterResult result;
  if (seeds.empty()) return result;
  absl::StatusOr<std::string> scratch =
      MakeScratchDir(options.work_dir, "crashfilter");
  if (!scratch.ok()) return scratch.status();

  enum class Verdict { kKept, kCrash, kTimeout, kNotRun, kError };
  std::vector<Verdict> verdicts(seeds.size(), Verdict::kNotRun);
  std::vector<std::string> errors(seeds.size());
  const std::map<std::string, std::string> env = TargetEnvironment();
  const bool file_arg = options.target.uses_file_argument();

  ParallelFor(seeds.size(), options.workers, [&](size_t i) {
    if (budget.Exhausted()) return;
    const SeedFile &seed = seeds[i];
    SubprocessOptions run;
    run.env = env;
    run.timeout = options.per_seed_timeout;
    run.budget = &budget;
    std::string path;
    if (file_arg) {
      absl::StatusOr<std::string> written =
          MaterializeSeed(seed, *scratch, options.suffix);
      if (!written.ok()) {
        verdicts[i] = Verdict::kError;
        errors[i] = written.status().ToString();
        return;
      }
      path = *written;
      run.argv = options.target.Instantiate(path);
    } else {
      run.argv = options.target.argv;
      run.stdin_data = seed.content;
    }
    absl::StatusOr<SubprocessResult> outcome = RunSubprocess(run);
    if (!path.empty()) {
      std::error_code ec;
      fs::remove(path, ec);
    }
    if (!outcome.ok()) {
      verdicts[i] = Verdict::kError;
      errors[i] = outcome.status().ToString();
    } else if (outcome->timed_out) {
      verdicts[i] = Verdict::kTimeout;
    } else if (outcome->killed) {
      verdicts[i] = Verdict::kNotRun;  // budget ran out mid-run
    } else if (outcome->signaled() ||
               options.crash_exit_codes.count(outcome->exit_code) > 0) {
      verdicts[i] = Verdict::kCrash;
    } else {
      verdicts[i] = Verdict::kKept;
    }
  });
  std::error_code ec;
  fs::remove_all(*scratch, ec);

  size_t not_run = 0;
  for (size_t i = 0; i < seeds.size(); ++i) {
    switch (verdicts[i]) {
      case Verdict::kCrash:
        result.crashers.push_back(std::move(seeds[i]));
        continue;
      case Verdict::kTimeout:
        LOG(WARNING) << "seed " << seeds[i].digest
                     << " timed out; keeping it";
        result.timed_out.push_back(seeds[i].digest);
        break;
      case Verdict::kNotRun:
        ++not_run;
        break;
      case Verdict::kError:
        result.warnings.push_back(
            fmt::format("seed {} not run: {}", seeds[i].digest, errors[i]));
        break;
      case Verdict::kKept:
        break;
    }
    result.kept.push_back(std::move(seeds[i]));
  }
  if (!result.timed_out.empty()) {
    result.warnings.push_back(fmt::format(
        "{} seed(s) timed out in the crash filter and were kept",
        result.timed_out.size()));
  }
  if (not_run > 0) {
    result.warnings.push_back(fmt::format(
        "budget ran out; {} seed(s) kept without a crash check", not_run));
  }
  return result;
}

AflShowmapRunner::AflShowmapRunner(Options options)
    : options_(std::move(options)) {}

absl::StatusOr<std::vector<uint32_t>> AflShowmapRunner::Edges(
    const SeedFile &seed, const Budget &budget) {
  absl::StatusOr<std::string> scratch =
      MakeScratchDir(options_.work_dir, "showmap");
  if (!scratch.ok()) return scratch.status();
  const std::string map_path = (fs::path(*scratch) / "map").string();
  SubprocessOptions run;
  run.argv = {options_.showmap, "-q", "-o", map_path, "-t",
              std::to_string(options_.per_seed_timeout.count()), "--"};
  std::vector<std::string> target;
  if (options_.target.uses_file_argument()) {
    absl::StatusOr<std::string> path =
        MaterializeSeed(seed, *scratch, options_.suffix);
    if (!path.ok()) return path.status();
    target = options_.target.Instantiate(*path);
  } else {
    target = options_.target.argv;
    run.stdin_data = seed.content;
  }
  run.argv.insert(run.argv.end(), target.begin(), target.end());
  run.env = TargetEnvironment();
  run.timeout = options_.per_seed_timeout * 5 + std::chrono::seconds(1);
  run.budget = &budget;
  run.capture_output = true;
  absl::StatusOr<SubprocessResult> outcome = RunSubprocess(run);
  absl::StatusOr<std::string> map = ReadFile(map_path);
  std::error_code ec;
  fs::remove_all(*scratch, ec);
  if (!outcome.ok()) return outcome.status();
  if (outcome->killed) {
    return absl::DeadlineExceededError("afl-showmap did not finish");
  }
  if (!map.ok()) {
    return absl::InternalError(
        fmt::format("afl-showmap wrote no map (exit {})", outcome->exit_code));
  }
  std::vector<uint32_t> edges;
  for (std::string_view line : Split(*map, '\n')) {
    line = Trim(line);
    if (line.empty()) continue;
    std::optional<uint32_t> edge = ParseInt<uint32_t>(line.substr(0, line.find(':')));
    if (!edge) return absl::DataLossError("malformed afl-showmap line");
    edges.push_back(*edge);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

FixtureCoverageRunner::FixtureCoverageRunner(
    absl::flat_hash_map<std::string, std::vector<uint32_t>> edges)
    : edges_(std::move(edges)) {}

absl::StatusOr<FixtureCoverageRunner> FixtureCoverageRunner::FromJsonFile(
    const std::string &path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  nlohmann::json doc = nlohmann::json::parse(*text, nullptr, false);
  if (!doc.is_object()) {
    return absl::InvalidArgumentError(
        fmt::format("{}: expected an object of edge lists", path));
  }
  absl::flat_hash_map<std::string, std::vector<uint32_t>> edges;
  for (auto &[digest, list] : doc.items()) {
    if (!list.is_array()) {
      return absl::InvalidArgumentError(
          fmt::format("{}: entry {} is not a list", path, digest));
    }
    std::vector<uint32_t> &out = edges[digest];
    for (const nlohmann::json &edge : list) {
      if (!edge.is_number_unsigned()) {
        return absl::InvalidArgumentError(
            fmt::format("{}: entry {} has a non-integer edge", path, digest));
      }
      out.push_back(edge.get<uint32_t>());
    }
  }
  return FixtureCoverageRunner(std::move(edges));
}

absl::StatusOr<std::vector<uint32_t>> FixtureCoverageRunner::Edges(
    const SeedFile &seed, const Budget &) {
  auto it = edges_.find(seed.digest);
  if (it == edges_.end()) {
    return absl::NotFoundError(fmt::format("no coverage for {}", seed.digest));
  }
  return it->second;
}

std::vector<size_t> GreedyCover(const std::vector<std::vector<uint32_t>> &maps) {
  absl::flat_hash_set<uint32_t> covered;
  std::vector<size_t> kept;
  for (size_t i = 0; i < maps.size(); ++i) {
    bool adds = false;
    for (uint32_t edge : maps[i]) {
      if (!covered.contains(edge)) {
        adds = true;
        break;
      }
    }
    if (!adds) continue;
    covered.insert(maps[i].begin(), maps[i].end());
    kept.push_back(i);
  }
  return kept;
}

MinimizeResult MinimizeInternal(std::vector<SeedFile> seeds,
                                CoverageRunner &runner, int workers,
                                const Budget &budget) {
  MinimizeResult result;
  if (seeds.empty()) return result;
  std::sort(seeds.begin(), seeds.end(),
            [](const SeedFile &a, const SeedFile &b) {
              return std::tie(a.size_bytes, a.digest) <
                     std::tie(b.size_bytes, b.digest);
            });
  std::vector<absl::StatusOr<std::vector<uint32_t>>> maps(
      seeds.size(), absl::UnknownError("not run"));
  ParallelFor(seeds.size(), workers, [&](size_t i) {
    if (budget.Exhausted()) {
      maps[i] = absl::DeadlineExceededError("budget exhausted");
      return;
    }
    maps[i] = runner.Edges(seeds[i], budget);
  });

  // Measured seeds compete in the greedy pass; the rest are kept as is.
  std::vector<std::vector<uint32_t>> measured;
  std::vector<size_t> measured_index;
  std::vector<bool> keep(seeds.size(), false);
  size_t unmeasured = 0;
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (maps[i].ok()) {
      measured.push_back(*std::move(maps[i]));
      measured_index.push_back(i);
    } else {
      keep[i] = true;
      ++unmeasured;
      VLOG(1) << "no coverage for " << seeds[i].digest << ": "
              << maps[i].status();
    }
  }
  for (size_t k : GreedyCover(measured)) keep[measured_index[k]] = true;
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (keep[i]) result.survivors.push_back(std::move(seeds[i]));
  }
  if (unmeasured > 0) {
    result.warnings.push_back(fmt::format(
        "coverage unavailable for {} seed(s); kept them", unmeasured));
  }
  SortCanonically(result.survivors);
  return result;
}

std::vector<std::string> ExternalMinimizerArgv(
    const ExternalMinimizerOptions &options, const std::string &in_dir,
    const std::string &out_dir) {
  std::vector<std::string> argv = {
      options.cmin, "-i", in_dir, "-o", out_dir, "-t",
      std::to_string(options.per_seed_timeout.count()), "--"};
  argv.insert(argv.end(), options.target.argv.begin(),
              options.target.argv.end());
  return argv;
}

MinimizeResult MinimizeExternal(std::vector<SeedFile> seeds,
                                const ExternalMinimizerOptions &options,
                                const Budget &budget) {
  MinimizeResult result;
  SortCanonically(seeds);
  if (seeds.empty()) return result;
  auto fail_open = [&](std::string why) {
    LOG(ERROR) << "MINIMIZATION FAILED, keeping the unminimized corpus: "
               << why;
    result.survivors = std::move(seeds);
    result.failed_open = true;
    result.warnings.push_back(
        fmt::format("minimizer failed ({}); corpus left unminimized", why));
    return std::move(result);
  };
  absl::StatusOr<std::string> scratch = MakeScratchDir(options.work_dir, "cmin");
  if (!scratch.ok()) return fail_open(scratch.status().ToString());
  const fs::path in_dir = fs::path(*scratch) / "in";
  const fs::path out_dir = fs::path(*scratch) / "out";
  std::error_code ec;
  fs::create_directories(in_dir, ec);
  absl::flat_hash_map<std::string, size_t> by_digest;
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (absl::StatusOr<std::string> path =
            MaterializeSeed(seeds[i], in_dir.string(), options.suffix);
        !path.ok()) {
      fs::remove_all(*scratch, ec);
      return fail_open(path.status().ToString());
    }
    by_digest[seeds[i].digest] = i;
  }
  SubprocessOptions run;
  run.argv = ExternalMinimizerArgv(options, in_dir.string(), out_dir.string());
  run.env = TargetEnvironment();
  run.budget = &budget;
  run.capture_output = true;
  run.max_output_bytes = 64 * 1024;
  LOG(INFO) << "running " << TargetCommand{run.argv}.ToString();
  absl::StatusOr<SubprocessResult> outcome = RunSubprocess(run);
  std::string failure;
  if (!outcome.ok()) {
    failure = outcome.status().ToString();
  } else if (outcome->killed) {
    failure = "afl-cmin did not finish within the budget";
  } else if (!outcome->ok()) {
    failure = fmt::format("afl-cmin exited with {}: {}", outcome->exit_code,
                          Trim(outcome->output.substr(
                              outcome->output.size() > 400
                                  ? outcome->output.size() - 400
                                  : 0)));
  }
  std::vector<bool> keep(seeds.size(), false);
  size_t survivors = 0;
  if (failure.empty()) {
    for (const fs::directory_entry &entry :
         fs::directory_iterator(out_dir, ec)) {
      if (!entry.is_regular_file()) continue;
      absl::StatusOr<std::string> content = ReadFile(entry.path());
      if (!content.ok()) continue;
      auto it = by_digest.find(ContentDigest(*content));
      if (it != by_digest.end() && !keep[it->second]) {
        keep[it->second] = true;
        ++survivors;
      }
    }
    if (survivors == 0) failure = "afl-cmin kept no seeds";
  }
  fs::remove_all(*scratch, ec);
  if (!failure.empty()) return fail_open(failure);
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (keep[i]) result.survivors.push_back(std::move(seeds[i]));
  }
  return result;
}

}  // namespace seedforge
