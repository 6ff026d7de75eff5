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

#ifndef SEEDFORGE_SUBPROCESS_H_
#define SEEDFORGE_SUBPROCESS_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/budget.h"

namespace seedforge {

struct SubprocessOptions {
  std::vector<std::string> argv;  // argv[0] is looked up in PATH
  std::optional<std::string> stdin_data;  // nullopt: /dev/null
  std::map<std::string, std::string> env;  // added to the inherited environment
  std::string cwd;
  std::chrono::milliseconds timeout{0};    // 0: none
  const Budget *budget = nullptr;          // killed when it runs out
  // Called about every 20 ms while the child runs; returning false kills it.
  std::function<bool()> keep_running;
  bool capture_output = false;  // stdout and stderr, merged
  uint64_t max_output_bytes = 1 << 20;
};

struct SubprocessResult {
  int exit_code = -1;   // -1 when terminated by a signal
  int term_signal = 0;  // 0 when exited normally
  bool timed_out = false;
  bool killed = false;  // by timeout, budget or keep_running
  std::string output;

  bool signaled() const { return term_signal != 0; }
  bool ok() const { return exit_code == 0; }
};

// Runs the child in its own process group and kills the whole group on
// timeout. Returns NotFound when argv[0] cannot be executed.
absl::StatusOr<SubprocessResult> RunSubprocess(const SubprocessOptions &options);

// Looks `program` up like execvp would. Empty when not found.
std::string FindExecutable(const std::string &program);

}  // namespace seedforge

#endif  // SEEDFORGE_SUBPROCESS_H_
