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

#ifndef SEEDFORGE_BUDGET_H_
#define SEEDFORGE_BUDGET_H_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>

namespace seedforge {

using Clock = std::chrono::steady_clock;

// A wall-clock deadline plus a cancellation flag, shared by all workers of a
// module. Workers poll it at fetch boundaries; sleeps wake early on Cancel().
class Budget {
 public:
  Budget() : deadline_(Clock::time_point::max()) {}
  explicit Budget(Clock::duration limit) : deadline_(Clock::now() + limit) {}
  Budget(const Budget &) = delete;
  Budget &operator=(const Budget &) = delete;

  Clock::time_point deadline() const { return deadline_; }

  bool Exhausted() const {
    return cancelled_.load(std::memory_order_relaxed) ||
           Clock::now() >= deadline_;
  }

  Clock::duration Remaining() const {
    if (cancelled_.load(std::memory_order_relaxed)) return {};
    if (deadline_ == Clock::time_point::max()) return Clock::duration::max();
    return std::max(Clock::duration::zero(), deadline_ - Clock::now());
  }

  // Remaining time, clamped to `cap`.
  Clock::duration RemainingOr(Clock::duration cap) const {
    return std::min(Remaining(), cap);
  }

  void Cancel() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      cancelled_ = true;
    }
    cv_.notify_all();
  }

  // Sleeps for `d` or until the budget runs out. Returns false if the budget
  // ran out first.
  bool SleepFor(Clock::duration d) const {
    const Clock::time_point wake = std::min(deadline_, Clock::now() + d);
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait_until(lock, wake, [this] { return cancelled_.load(); });
    return !Exhausted();
  }

 private:
  Clock::time_point deadline_;
  std::atomic<bool> cancelled_{false};
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
};

}  // namespace seedforge

#endif  // SEEDFORGE_BUDGET_H_
