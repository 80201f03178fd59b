#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "omega/core/step.hpp"

namespace omega {

struct RunClass {
  bool fair = false;
  int max_k_resilience = 0;
  std::vector<ProcessId> tail_procs;
};

// A process counts as appearing infinitely often iff it takes a step in the
// last `tail_window` steps of the finite trace.
inline RunClass classify_run(const std::vector<Step>& steps, const FailurePattern& pattern, std::size_t tail_window) {
  if (tail_window == 0 || tail_window > steps.size()) {
    throw Error(ErrorCode::kUndefinedClassification,
                "tail window " + std::to_string(tail_window) + " vs trace of " + std::to_string(steps.size()));
  }
  std::set<ProcessId> seen;
  for (std::size_t i = steps.size() - tail_window; i < steps.size(); ++i) seen.insert(steps[i].proc);

  RunClass out;
  out.tail_procs.assign(seen.begin(), seen.end());
  out.max_k_resilience = pattern.n() - static_cast<int>(seen.size());
  out.fair = true;
  for (ProcessId p : pattern.correct())
    if (!seen.count(p)) out.fair = false;
  return out;
}

inline RunClass classify_run(const Trace& trace, std::size_t tail_window) {
  return classify_run(trace.steps, trace.pattern, tail_window);
}

// Reference definition: reachability over same-process order and
// write-then-read of the same register. Quadratic; meant for small traces.
inline bool causal_precedes(const std::vector<Step>& steps, std::size_t s, std::size_t s2) {
  if (s >= steps.size() || s2 >= steps.size()) {
    throw Error(ErrorCode::kModelError, "step index out of range");
  }
  if (s >= s2) return false;
  auto direct = [&](std::size_t a, std::size_t b) {
    if (a >= b) return false;
    if (steps[a].proc == steps[b].proc) return true;
    return steps[a].kind == OpKind::kWrite && steps[b].kind == OpKind::kRead && steps[a].reg && steps[b].reg &&
           *steps[a].reg == *steps[b].reg;
  };
  std::vector<char> reached(steps.size(), 0);
  std::vector<std::size_t> frontier{s};
  reached[s] = 1;
  while (!frontier.empty()) {
    std::size_t a = frontier.back();
    frontier.pop_back();
    for (std::size_t b = a + 1; b <= s2; ++b) {
      if (!reached[b] && direct(a, b)) {
        if (b == s2) return true;
        reached[b] = 1;
        frontier.push_back(b);
      }
    }
  }
  return false;
}

inline bool causal_precedes(const Trace& trace, std::size_t s, std::size_t s2) {
  return causal_precedes(trace.steps, s, s2);
}

// Vector clocks for the same relation, linear in trace length.
class CausalClock {
 public:
  CausalClock(const std::vector<Step>& steps, int n) : n_(n) {
    clocks_.reserve(steps.size());
    own_.reserve(steps.size());
    owners_.reserve(steps.size());
    std::vector<std::vector<std::uint32_t>> latest(static_cast<std::size_t>(n), std::vector<std::uint32_t>(static_cast<std::size_t>(n), 0));
    std::map<RegKey, std::vector<std::uint32_t>> last_write;
    for (const Step& st : steps) {
      auto p = static_cast<std::size_t>(st.proc.slot());
      std::vector<std::uint32_t> vc = latest[p];
      if (st.kind == OpKind::kRead && st.reg) {
        auto it = last_write.find(*st.reg);
        if (it != last_write.end())
          for (int k = 0; k < n; ++k) vc[static_cast<std::size_t>(k)] = std::max(vc[static_cast<std::size_t>(k)], it->second[static_cast<std::size_t>(k)]);
      }
      vc[p] += 1;
      own_.push_back(vc[p]);
      owners_.push_back(static_cast<int>(p));
      if (st.kind == OpKind::kWrite && st.reg) last_write[*st.reg] = vc;
      latest[p] = vc;
      clocks_.push_back(std::move(vc));
    }
  }

  bool precedes(std::size_t s, std::size_t s2) const {
    if (s >= s2) return false;
    return clocks_[s2][static_cast<std::size_t>(owners_[s])] >= own_[s];
  }

  // Number of steps of process slot k that causally precede-or-equal step s.
  std::uint32_t seen(std::size_t s, int k) const { return clocks_[s][static_cast<std::size_t>(k)]; }
  // 1-based position of step s within its own process's steps.
  std::uint32_t position(std::size_t s) const { return own_[s]; }
  int n() const { return n_; }

 private:
  int n_;
  std::vector<std::vector<std::uint32_t>> clocks_;
  std::vector<std::uint32_t> own_;
  std::vector<int> owners_;
};

}  // namespace omega
