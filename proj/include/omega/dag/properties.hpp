#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "omega/core/types.hpp"
#include "omega/dag/comm.hpp"
#include "omega/dag/dag.hpp"

namespace omega {

// Snapshots of every process's DAG register, one per write, in time order.
using DagTimeline = std::vector<std::vector<DagSnapshot>>;

struct DagCheckConfig {
  Time budget = 0;    // run length; 0 = last snapshot time + 1
  Time horizon = 0;   // (4)/(5) must be discharged for snapshots older than budget - horizon
};

struct DagPropertyReport {
  std::size_t snapshots = 0;
  std::size_t vertices = 0;
  std::size_t sample_mismatch = 0;   // (1a)
  std::size_t order_inversion = 0;   // (1b)
  std::size_t missing_chain_edge = 0;  // (2)
  std::size_t not_closed = 0;        // (3), including missing predecessors
  std::size_t p4_pending = 0;
  std::size_t p4_pending_old = 0;
  std::size_t p5_pending = 0;
  std::size_t p5_pending_old = 0;
  bool monotone = true;
  bool agree_on_intersection = true;
  bool correct_outgrow_faulty = true;
  std::vector<std::string> messages;

  bool structural_ok() const {
    return sample_mismatch == 0 && order_inversion == 0 && missing_chain_edge == 0 && not_closed == 0 && monotone;
  }
  // "Pending" is only a failure once the run is fair and long enough.
  bool ok(bool fairness_enforced) const {
    bool liveness = !fairness_enforced || (p4_pending_old == 0 && p5_pending_old == 0);
    return structural_ok() && liveness && agree_on_intersection && correct_outgrow_faulty;
  }
};

namespace detail {

inline void note(DagPropertyReport& rep, std::string msg) {
  if (rep.messages.size() < 16) rep.messages.push_back(std::move(msg));
}

inline std::string vname(const DagVertex& v) {
  return "[p" + std::to_string(v.proc) + "," + std::to_string(v.d) + "," + std::to_string(v.seq) + "]";
}

}  // namespace detail

// Checks the vertex-level properties (1a), (1b), (2), (3) of one DAG.
inline void check_dag_structure(const Dag& g, const FailurePattern& pattern, const FDHistory& history,
                                DagPropertyReport& rep) {
  const int n = g.n();
  for (int p = 1; p <= n; ++p) {
    for (int s = 1; s <= g.count(p); ++s) {
      const DagVertex& v = *g.find(p, s);
      ++rep.vertices;
      if (pattern.crashed_at(ProcessId(p), v.sample_time) || history.sample(ProcessId(p), v.sample_time) != v.d) {
        ++rep.sample_mismatch;
        detail::note(rep, "(1a) " + detail::vname(v) + " at t=" + std::to_string(v.sample_time));
      }
      if (v.preds[static_cast<std::size_t>(p - 1)] != s - 1) {
        ++rep.missing_chain_edge;
        detail::note(rep, "(2) " + detail::vname(v) + " lacks edges from earlier p" + std::to_string(p) + " vertices");
      }
      for (int k = 1; k <= n; ++k) {
        const int top = v.preds[static_cast<std::size_t>(k - 1)];
        if (top == 0) continue;
        const DagVertex* u = g.find(k, top);
        if (!u) {
          ++rep.not_closed;
          detail::note(rep, "(3) " + detail::vname(v) + " has a predecessor outside the DAG");
          continue;
        }
        if (!(u->sample_time < v.sample_time)) {
          ++rep.order_inversion;
          detail::note(rep, "(1b) edge " + detail::vname(*u) + "->" + detail::vname(v) + " inverts sample order");
        }
        for (int m = 0; m < n; ++m) {
          if (u->preds[static_cast<std::size_t>(m)] > v.preds[static_cast<std::size_t>(m)]) {
            ++rep.not_closed;
            detail::note(rep, "(3) " + detail::vname(v) + " misses a transitive edge via " + detail::vname(*u));
            break;
          }
        }
      }
    }
  }
}

namespace detail {

inline bool covers(const Dag& big, const Dag& small) {
  for (int k = 1; k <= small.n(); ++k)
    if (big.count(k) < small.count(k)) return false;
  return true;
}

// Property (4): some p_j vertex of `later` succeeds every vertex of `snap`.
inline bool has_dominating_vertex(const Dag& later, const Dag& snap, int j) {
  const int n = snap.n();
  auto dominates = [&](int seq) {
    const DagVertex& w = *later.find(j, seq);
    for (int m = 1; m <= n; ++m)
      if (w.preds[static_cast<std::size_t>(m - 1)] < snap.count(m)) return false;
    return true;
  };
  int lo = 1, hi = later.count(j);
  if (hi == 0 || !dominates(hi)) return false;
  while (lo < hi) {
    int mid = lo + (hi - lo) / 2;
    if (dominates(mid)) hi = mid;
    else lo = mid + 1;
  }
  return true;
}

inline bool same_prefix(const Dag& a, const Dag& b, int p) {
  if (a.shares_chain(b, p)) return true;
  const int common = std::min(a.count(p), b.count(p));
  for (int s = 1; s <= common; ++s)
    if (!(*a.find(p, s) == *b.find(p, s))) return false;
  return true;
}

}  // namespace detail

// Checks DAG properties (1)-(5) plus monotone growth, agreement of correct
// processes' final DAGs and the correct/faulty vertex-count separation.
inline DagPropertyReport check_dag_properties(const DagTimeline& timeline, const FailurePattern& pattern,
                                              const FDHistory& history, const DagCheckConfig& cfg = {}) {
  DagPropertyReport rep;
  const int n = pattern.n();
  Time budget = cfg.budget;
  if (budget == 0)
    for (const auto& snaps : timeline)
      if (!snaps.empty()) budget = std::max(budget, snaps.back().first + 1);
  const Time cutoff = budget > cfg.horizon ? budget - cfg.horizon : 0;

  // Union of all final snapshots holds every vertex any snapshot holds.
  Dag all(n);
  for (const auto& snaps : timeline)
    if (!snaps.empty()) all.unite(snaps.back().second);
  check_dag_structure(all, pattern, history, rep);

  for (std::size_t i = 0; i < timeline.size(); ++i) {
    const auto& snaps = timeline[i];
    const ProcessId pi(static_cast<int>(i) + 1);
    for (std::size_t s = 0; s < snaps.size(); ++s) {
      const Dag& g = snaps[s].second;
      ++rep.snapshots;
      for (int k = 1; k <= n; ++k) {
        if (!detail::same_prefix(g, all, k)) {
          rep.agree_on_intersection = false;
          detail::note(rep, "snapshot of " + to_string(pi) + " diverges from the union on p" + std::to_string(k));
        }
        if (g.count(k) > 0) {
          const DagVertex& last = *g.find(k, g.count(k));
          for (int m = 1; m <= n; ++m)
            if (last.preds[static_cast<std::size_t>(m - 1)] > g.count(m)) ++rep.not_closed;
        }
      }
      if (s > 0 && !detail::covers(g, snaps[s - 1].second)) {
        rep.monotone = false;
        detail::note(rep, "register of " + to_string(pi) + " shrank at t=" + std::to_string(snaps[s].first));
      }
      if (!pattern.is_correct(pi)) continue;
      const bool old = snaps[s].first < cutoff;
      for (ProcessId pj : pattern.correct()) {
        if (!detail::has_dominating_vertex(snaps.back().second, g, pj.index)) {
          ++rep.p4_pending;
          if (old) ++rep.p4_pending_old;
        }
        const auto& other = timeline[static_cast<std::size_t>(pj.slot())];
        if (other.empty() || !detail::covers(other.back().second, g)) {
          ++rep.p5_pending;
          if (old) ++rep.p5_pending_old;
        }
      }
    }
  }

  int max_faulty = 0;
  for (ProcessId p : pattern.faulty()) max_faulty = std::max(max_faulty, all.count(p.index));
  for (ProcessId p : pattern.correct()) {
    if (all.count(p.index) <= max_faulty) {
      rep.correct_outgrow_faulty = false;
      detail::note(rep, to_string(p) + " has no more vertices than a faulty process");
    }
  }
  return rep;
}

// Timeline recorded by comm-only processes.
template <class System>
DagTimeline collect_timeline(const System& sys) {
  DagTimeline out;
  for (int p = 1; p <= sys.n(); ++p) out.push_back(sys.process(ProcessId(p)).comm().snapshots());
  return out;
}

}  // namespace omega
