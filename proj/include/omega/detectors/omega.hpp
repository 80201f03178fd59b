#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omega/core/types.hpp"

namespace omega {

struct OmegaSpec {
  Time t_stab = 0;
  ProcessId leader{1};
  std::uint64_t pre_noise_seed = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// An Ω history: before t_stab every sample is uniform noise over all n ids
// (faulty ones included); from t_stab on every process outputs the leader.
inline FDHistory make_omega(const FailurePattern& pattern, const OmegaSpec& spec) {
  pattern.check(spec.leader);
  if (!pattern.is_correct(spec.leader)) {
    throw Error(ErrorCode::kInvalidSpec, "leader " + to_string(spec.leader) + " is faulty");
  }
  const int n = pattern.n();
  return FDHistory(n, "omega", [n, spec](ProcessId p, Time t) -> DetectorValue {
    if (t >= spec.t_stab) return spec.leader.index;
    std::uint64_t h = detail::splitmix64(spec.pre_noise_seed ^ detail::splitmix64(t * 1315423911ULL + static_cast<std::uint64_t>(p.index)));
    return static_cast<DetectorValue>(h % static_cast<std::uint64_t>(n)) + 1;
  });
}

// Per-process Ω-output over [0, end), stored as change points.
class OmegaStream {
 public:
  void record(Time t, int value) {
    if (changes_.empty() || changes_.back().second != value) changes_.emplace_back(t, value);
    end_ = t + 1;
  }

  static OmegaStream from_samples(const std::vector<int>& samples) {
    OmegaStream s;
    for (std::size_t t = 0; t < samples.size(); ++t) s.record(t, samples[t]);
    return s;
  }

  bool empty() const { return changes_.empty(); }
  Time end() const { return end_; }
  void extend_to(Time end) { end_ = std::max(end_, end); }

  int at(Time t) const {
    auto it = std::upper_bound(changes_.begin(), changes_.end(), t,
                               [](Time x, const std::pair<Time, int>& c) { return x < c.first; });
    if (it == changes_.begin()) return 0;
    return std::prev(it)->second;
  }

  // True iff the value is constant over [from, end).
  bool constant_since(Time from) const {
    return std::none_of(changes_.begin(), changes_.end(), [&](const auto& c) { return c.first > from; });
  }

  const std::vector<std::pair<Time, int>>& changes() const { return changes_; }

 private:
  std::vector<std::pair<Time, int>> changes_;
  Time end_ = 0;
};

struct OmegaVerdict {
  bool ok = false;
  std::optional<ProcessId> leader;
  std::string reason;
};

// Passes iff one correct ℓ is output by every correct process at every index
// of the final tail window.
inline OmegaVerdict validate_omega_stream(const std::vector<OmegaStream>& outputs, const FailurePattern& pattern,
                                          Time tail_window) {
  if (outputs.empty() || static_cast<int>(outputs.size()) != pattern.n()) {
    throw Error(ErrorCode::kEmptySeries, "expected one stream per process");
  }
  Time horizon = 0;
  for (const auto& s : outputs) horizon = std::max(horizon, s.end());
  OmegaVerdict v;
  std::optional<int> common;
  for (ProcessId p : pattern.correct()) {
    const OmegaStream& s = outputs[static_cast<std::size_t>(p.slot())];
    if (s.empty()) throw Error(ErrorCode::kEmptySeries, "empty stream for " + to_string(p));
    if (s.end() < horizon || s.end() < tail_window) {
      v.reason = to_string(p) + " stream does not cover the run";
      return v;
    }
    Time from = s.end() - tail_window;
    if (!s.constant_since(from)) {
      v.reason = to_string(p) + " output changes inside the tail window";
      return v;
    }
    int value = s.at(from);
    if (common && *common != value) {
      v.reason = "correct processes disagree: p" + std::to_string(*common) + " vs p" + std::to_string(value);
      return v;
    }
    common = value;
  }
  if (!common || *common < 1 || *common > pattern.n() || !pattern.is_correct(ProcessId(*common))) {
    v.reason = "stabilized on a faulty or invalid id p" + std::to_string(common.value_or(0));
    return v;
  }
  v.ok = true;
  v.leader = ProcessId(*common);
  return v;
}

}  // namespace omega
