#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "omega/asim/asim.hpp"
#include "omega/core/analysis.hpp"

namespace omega {

struct Theorem1Report {
  bool legal = true;
  std::optional<std::size_t> first_divergence;
  bool temporal_ok = true;
  std::size_t temporal_violations = 0;
  bool participation_ok = true;
  std::set<ProcessId> participants;
  std::set<ProcessId> expected;
  std::string detail;

  bool ok() const { return legal && temporal_ok && participation_ok; }
};

struct Theorem1Input {
  const std::vector<SimAStep>* steps = nullptr;
  std::vector<int> inputs;            // I'
  const FailurePattern* pattern = nullptr;        // F, of the DAG-building run
  const FDHistory* history = nullptr;             // H
  const Dag* dag = nullptr;                       // G, for d values and sample times
  const FailurePattern* sim_pattern = nullptr;    // F', of the A' run; null skips (c)
  std::size_t tail_window = 0;                    // in A steps
};

// Checks that the simulated A steps form a run of A with failure pattern F:
// (a) replaying them through fresh automata and atomic registers reproduces
// every request and response, with query values taken from the DAG;
// (b) causally ordered queries use vertices with increasing sample times,
// each sample being H at a time its process was alive;
// (c) the processes in the tail are correct(F) ∩ correct(F').
template <Automaton A>
Theorem1Report validate_theorem1(const Theorem1Input& in) {
  Theorem1Report rep;
  const auto& steps = *in.steps;
  const int n = static_cast<int>(in.inputs.size());
  auto diverge = [&](std::size_t k, std::string why) {
    if (rep.legal) {
      rep.legal = false;
      rep.first_divergence = k;
      rep.detail = "step " + std::to_string(k) + ": " + why;
    }
  };

  // (a)
  std::vector<A> autos;
  for (int i = 1; i <= n; ++i) autos.emplace_back(ProcessId(i), n, in.inputs[static_cast<std::size_t>(i - 1)]);
  Memory<Word> mem;
  for (std::size_t k = 0; k < steps.size() && rep.legal; ++k) {
    const SimAStep& s = steps[k];
    if (s.proc.index < 1 || s.proc.index > n) {
      diverge(k, "bad process");
      break;
    }
    A& a = autos[static_cast<std::size_t>(s.proc.slot())];
    const OpRequest<Word> want = a.pending();
    if (!(want == s.op)) {
      diverge(k, std::string("request mismatch: A wants ") + to_string(want.kind) + ", trace has " + to_string(s.op.kind));
      break;
    }
    Response<Word> resp;
    resp.time = s.resp.time;
    switch (want.kind) {
      case OpKind::kRead:
        resp.value = mem.read(want.reg);
        if (resp.value != s.resp.value) diverge(k, "read of " + to_string(want.reg) + " returned a value no write left there");
        break;
      case OpKind::kWrite: mem.write(s.proc, want.reg, want.value); break;
      case OpKind::kQuery: {
        const DagVertex* v = in.dag->find(s.vertex);
        if (!v || v->proc != s.proc.index) {
          diverge(k, "query vertex not in G");
        } else {
          resp.detector = v->d;
          if (s.resp.detector != v->d) diverge(k, "query saw " + std::to_string(s.resp.detector) + " but vertex holds " + std::to_string(v->d));
        }
        break;
      }
      case OpKind::kCons: resp.bit = s.resp.bit; break;
      case OpKind::kLocal:
      case OpKind::kDecide: break;
    }
    if (rep.legal) a.advance(resp);
  }

  // (b)
  std::vector<Step> flat;
  flat.reserve(steps.size());
  for (const SimAStep& s : steps) {
    Step st;
    st.proc = s.proc;
    st.kind = s.op.kind;
    if (s.op.kind == OpKind::kRead || s.op.kind == OpKind::kWrite) st.reg = s.op.reg;
    flat.push_back(st);
  }
  CausalClock clock(flat, n);
  // prefmax[k][m]: max sample time over the first m steps of process k that are queries.
  std::vector<std::vector<Time>> prefmax(static_cast<std::size_t>(n), std::vector<Time>{0});
  std::vector<std::vector<char>> any(static_cast<std::size_t>(n), std::vector<char>{0});
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const SimAStep& s = steps[k];
    const auto slot = static_cast<std::size_t>(s.proc.slot());
    Time mine = 0;
    bool is_query = s.op.kind == OpKind::kQuery;
    if (is_query) {
      const DagVertex* v = in.dag->find(s.vertex);
      if (!v) {
        ++rep.temporal_violations;
        is_query = false;
      } else {
        mine = v->sample_time;
        if (in.pattern->crashed_at(s.proc, mine) || in.history->sample(s.proc, mine) != v->d) ++rep.temporal_violations;
        for (int q = 0; q < n; ++q) {
          const auto qs = static_cast<std::size_t>(q);
          std::uint32_t seen = clock.seen(k, q);
          if (qs == slot) --seen;  // strictly earlier steps of the same process
          if (any[qs][seen] && prefmax[qs][seen] >= mine) {
            ++rep.temporal_violations;
            if (rep.detail.empty()) rep.detail = "step " + std::to_string(k) + ": causally later query uses an earlier sample";
            break;
          }
        }
      }
    }
    prefmax[slot].push_back(is_query ? std::max(prefmax[slot].back(), mine) : prefmax[slot].back());
    any[slot].push_back(static_cast<char>(any[slot].back() || is_query));
  }
  rep.temporal_ok = rep.temporal_violations == 0;

  // (c)
  if (in.sim_pattern && in.tail_window > 0) {
    const std::size_t w = std::min(in.tail_window, steps.size());
    for (std::size_t k = steps.size() - w; k < steps.size(); ++k) rep.participants.insert(steps[k].proc);
    for (ProcessId p : in.pattern->correct())
      if (in.sim_pattern->is_correct(p)) rep.expected.insert(p);
    rep.participation_ok = rep.participants == rep.expected;
    if (!rep.participation_ok && rep.detail.empty()) rep.detail = "tail participation differs from correct(F) ∩ correct(F')";
  }
  return rep;
}

}  // namespace omega
