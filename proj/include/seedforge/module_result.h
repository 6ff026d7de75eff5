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

#ifndef SEEDFORGE_MODULE_RESULT_H_
#define SEEDFORGE_MODULE_RESULT_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "seedforge/corpus_model.h"
#include "seedforge/query_gen.h"

namespace seedforge {

// What one harvesting module hands back to the orchestrator. A non-OK status
// means the module stopped early (auth failure, no credentials, ...); the
// subcorpus then holds whatever was collected before that.
struct ModuleResult {
  Subcorpus subcorpus;
  absl::Status status;
  std::vector<QueryPlan> plans;
  std::vector<std::string> warnings;
};

}  // namespace seedforge

#endif  // SEEDFORGE_MODULE_RESULT_H_
