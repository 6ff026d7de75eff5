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

// Reference implementations used as test oracles. Each one is written from
// the definition of the operation, not from the library code, and favours
// obviousness over speed.

#ifndef SEEDFORGE_TESTS_ORACLES_H_
#define SEEDFORGE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fmt/format.h"
#include "seedforge/corpus_model.h"

namespace seedforge::testing {

// A content-free seed with a chosen size and a synthetic digest.
inline SeedFile FakeSeed(SourceModule module, uint64_t size,
                         std::string digest, std::string url = "") {
  SeedFile f;
  f.source_module = module;
  f.size_bytes = size;
  f.digest = std::move(digest);
  f.origin_url = url.empty() ? "fake://" + f.digest : std::move(url);
  return f;
}

inline std::string FakeDigest(uint64_t n) { return fmt::format("{:064x}", n); }

// Water-filling by levels: the largest L with sum(min(n_m, L)) <= cap gives
// every module min(n_m, L) files; the leftover r < (modules still above L)
// goes one each to the first r such modules in rotation order. Each module
// contributes its smallest files by (size, digest).
inline std::vector<SeedFile> OracleSelect(const std::vector<SeedFile> &input,
                                          size_t cap) {
  std::map<int, std::vector<SeedFile>> by_module;
  for (const SeedFile &f : input) {
    by_module[static_cast<int>(f.source_module)].push_back(f);
  }
  auto level_total = [&](size_t level) {
    size_t total = 0;
    for (const auto &[m, files] : by_module) {
      total += std::min(files.size(), level);
    }
    return total;
  };
  std::map<int, size_t> quota;
  if (input.size() <= cap) {
    for (const auto &[m, files] : by_module) quota[m] = files.size();
  } else {
    size_t level = 0;
    while (level_total(level + 1) <= cap) ++level;
    size_t leftover = cap - level_total(level);
    for (const auto &[m, files] : by_module) {
      quota[m] = std::min(files.size(), level);
      if (files.size() > level && leftover > 0) {
        ++quota[m];
        --leftover;
      }
    }
  }
  std::vector<SeedFile> out;
  for (auto &[m, files] : by_module) {
    std::sort(files.begin(), files.end(),
              [](const SeedFile &a, const SeedFile &b) {
                return std::tie(a.size_bytes, a.digest) <
                       std::tie(b.size_bytes, b.digest);
              });
    out.insert(out.end(), files.begin(), files.begin() + quota[m]);
  }
  std::sort(out.begin(), out.end(), [](const SeedFile &a, const SeedFile &b) {
    return std::tie(a.size_bytes, a.digest) < std::tie(b.size_bytes, b.digest);
  });
  return out;
}

// Upper (greater) or lower (less) tail probability of W+ under the null, by
// listing all 2^n sign assignments of the observed rank magnitudes.
inline double EnumeratedWilcoxonP(const std::vector<double> &diffs,
                                  bool greater) {
  std::vector<double> nz;
  for (double d : diffs) {
    if (d != 0) nz.push_back(d);
  }
  const size_t n = nz.size();
  std::vector<double> ranks(n);
  for (size_t i = 0; i < n; ++i) {
    double below = 0, equal = 0;
    for (size_t j = 0; j < n; ++j) {
      if (std::fabs(nz[j]) < std::fabs(nz[i])) ++below;
      if (std::fabs(nz[j]) == std::fabs(nz[i])) ++equal;
    }
    ranks[i] = below + (equal + 1) / 2;
  }
  double observed = 0;
  for (size_t i = 0; i < n; ++i) {
    if (nz[i] > 0) observed += ranks[i];
  }
  uint64_t hits = 0;
  const uint64_t total = uint64_t{1} << n;
  for (uint64_t mask = 0; mask < total; ++mask) {
    double w = 0;
    for (size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) w += ranks[i];
    }
    if (greater ? w >= observed - 1e-9 : w <= observed + 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

// Greedy cover straight from its definition, over std::set.
inline std::vector<size_t> OracleGreedyCover(
    const std::vector<std::vector<uint32_t>> &maps) {
  std::set<uint32_t> covered;
  std::vector<size_t> kept;
  for (size_t i = 0; i < maps.size(); ++i) {
    bool adds = false;
    for (uint32_t e : maps[i]) adds |= !covered.count(e);
    if (!adds) continue;
    kept.push_back(i);
    covered.insert(maps[i].begin(), maps[i].end());
  }
  return kept;
}

// Random candidate set: up to `max_modules` harvesting modules, sizes drawn
// from a small range so ties on size are common.
inline std::vector<SeedFile> RandomCandidates(std::mt19937_64 &rng,
                                              size_t max_files,
                                              int max_modules) {
  static constexpr SourceModule kModules[] = {
      SourceModule::kGithub, SourceModule::kWeb, SourceModule::kFeature,
      SourceModule::kBugTracker, SourceModule::kCommonCrawl};
  const int modules = std::uniform_int_distribution<int>(1, max_modules)(rng);
  std::vector<SourceModule> picked(std::begin(kModules), std::end(kModules));
  std::shuffle(picked.begin(), picked.end(), rng);
  picked.resize(modules);
  const size_t n = std::uniform_int_distribution<size_t>(0, max_files)(rng);
  // Skewed module weights so some modules run dry.
  std::vector<double> weights;
  for (int i = 0; i < modules; ++i) {
    weights.push_back(std::uniform_real_distribution<double>(0.05, 1)(rng));
  }
  std::discrete_distribution<int> which(weights.begin(), weights.end());
  std::uniform_int_distribution<uint64_t> size(1, 64);
  std::vector<SeedFile> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    out.push_back(FakeSeed(picked[which(rng)], size(rng),
                           FakeDigest((rng() >> 20) << 20 | i)));
  }
  return out;
}

}  // namespace seedforge::testing

#endif  // SEEDFORGE_TESTS_ORACLES_H_
