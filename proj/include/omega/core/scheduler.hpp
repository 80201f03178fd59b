#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "omega/core/types.hpp"

namespace omega {

enum class SchedMode { kRoundRobin, kSeededRandom };

inline SchedMode parse_sched_mode(const std::string& s) {
  if (s == "round-robin" || s == "rr") return SchedMode::kRoundRobin;
  if (s == "seeded-random" || s == "random") return SchedMode::kSeededRandom;
  throw Error(ErrorCode::kConfigError, "unknown scheduler mode '" + s + "'");
}

// Picks the next live process. In seeded-random mode every live process is
// picked at least once in any window of `window` consecutive picks (earliest
// deadline first once a process's slack drops to the live count).
class Scheduler {
 public:
  Scheduler(int n, SchedMode mode, std::uint64_t seed = 0, std::uint64_t window = 0)
      : n_(n),
        mode_(mode),
        window_(window == 0 ? 3 * static_cast<std::uint64_t>(n) : window),
        rng_(seed),
        last_(static_cast<std::size_t>(n), kNever) {
    if (window_ < static_cast<std::uint64_t>(n)) {
      throw Error(ErrorCode::kConfigError, "fairness window must be at least n");
    }
  }

  ProcessId next(const FailurePattern& pattern, Time now) {
    live_.clear();
    if (pattern.n() > n_) throw Error(ErrorCode::kConfigError, "pattern has more processes than the scheduler");
    for (int i = 1; i <= pattern.n(); ++i)
      if (!pattern.crashed_at(ProcessId(i), now)) live_.push_back(i);
    if (live_.empty()) throw Error(ErrorCode::kNoLiveProcess, "all processes crashed at t=" + std::to_string(now));

    int pick = 0;
    if (mode_ == SchedMode::kRoundRobin) {
      pick = live_.front();
      for (int i : live_) {
        if (i > cursor_) {
          pick = i;
          break;
        }
      }
    } else {
      pick = most_urgent(now);
      if (pick == 0) pick = live_[rng_() % live_.size()];
    }
    cursor_ = pick;
    last_[static_cast<std::size_t>(pick - 1)] = static_cast<std::int64_t>(picks_);
    ++picks_;
    return ProcessId(pick);
  }

  std::uint64_t window() const { return window_; }
  SchedMode mode() const { return mode_; }

 private:
  static constexpr std::int64_t kNever = -1;

  int most_urgent(Time) const {
    const auto now = static_cast<std::int64_t>(picks_);
    const auto threshold = static_cast<std::int64_t>(live_.size());
    int best = 0;
    std::int64_t best_deadline = std::numeric_limits<std::int64_t>::max();
    for (int i : live_) {
      std::int64_t deadline = last_[static_cast<std::size_t>(i - 1)] + static_cast<std::int64_t>(window_);
      if (deadline - now < threshold && deadline < best_deadline) {
        best = i;
        best_deadline = deadline;
      }
    }
    return best;
  }

  int n_;
  SchedMode mode_;
  std::uint64_t window_;
  std::mt19937_64 rng_;
  std::vector<std::int64_t> last_;  // pick index at which each process last ran
  std::vector<int> live_;
  int cursor_ = 0;
  std::uint64_t picks_ = 0;
};

}  // namespace omega
