#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "omega/dag/comm.hpp"
#include "omega/detectors/omega.hpp"
#include "omega/extractor/explorer.hpp"

namespace omega {

// A real process of the reduction: one full DAG-building iteration (n reads,
// query, write), then `explore_per_comm` exploration units as local steps,
// and so on forever.
template <Automaton A>
class ReductionProcess {
 public:
  ReductionProcess(ProcessId self, int n, int explore_per_comm, bool keep_log)
      : comm_(self, n), explorer_(self, n), per_comm_(explore_per_comm), keep_log_(keep_log) {
    if (explore_per_comm < 1) throw Error(ErrorCode::kConfigError, "explore_per_comm must be positive");
  }

  OpRequest<Dag> pending() const { return left_ > 0 ? OpRequest<Dag>::local() : comm_.pending(); }

  void advance(const Response<Dag>& r, StepContext& ctx) {
    if (left_ == 0) {
      if (comm_.advance(r)) left_ = per_comm_;
    } else {
      --left_;
      ProbeRecord rec = explorer_.step(comm_.local(), ctx.cons, ctx.time);
      ++units_;
      if (keep_log_) log_.push_back(rec);
      last_ = rec;
    }
    stream_.record(ctx.time, explorer_.omega_output().index);
  }
  // Exploration needs the shared consensus objects.
  void advance(const Response<Dag>&) { throw Error(ErrorCode::kModelError, "reduction step without a context"); }

  const CommComponent& comm() const { return comm_; }
  const Explorer<A>& explorer() const { return explorer_; }
  const OmegaStream& stream() const { return stream_; }
  OmegaStream& stream() { return stream_; }
  const std::vector<ProbeRecord>& probe_log() const { return log_; }
  const std::optional<ProbeRecord>& last_probe() const { return last_; }
  std::uint64_t units() const { return units_; }

 private:
  CommComponent comm_;
  Explorer<A> explorer_;
  int per_comm_;
  int left_ = 0;
  bool keep_log_;
  std::vector<ProbeRecord> log_;
  std::optional<ProbeRecord> last_;
  std::uint64_t units_ = 0;
  OmegaStream stream_;
};

struct ReductionConfig {
  int n = 3;
  std::vector<std::pair<int, Time>> crashes;  // (pid, t)
  Time t_stab = 300;
  std::optional<int> leader;  // default: first correct process
  std::uint64_t seed = 1;
  std::uint64_t budget = 1'000'000;
  Time tail_window = 10'000;        // Ω-output tail, in event steps
  std::size_t probe_tail = 10'000;  // Lemma-1 tail, in probe-log entries per process
  int explore_per_comm = 20;
  std::uint64_t fairness_window = 0;  // 0 = the scheduler's default of 3n
  bool keep_probe_log = true;
};

inline FailurePattern make_pattern(const ReductionConfig& c) {
  if (c.n < 2) throw Error(ErrorCode::kConfigError, "n must be at least 2");
  if (c.budget == 0 || c.tail_window == 0 || c.probe_tail == 0) throw Error(ErrorCode::kConfigError, "budgets must be positive");
  FailurePattern f(c.n);
  for (auto [p, t] : c.crashes) {
    if (p < 1 || p > c.n) throw Error(ErrorCode::kConfigError, "crash names p" + std::to_string(p));
    f.crash(ProcessId(p), t);
  }
  if (f.correct().empty()) throw Error(ErrorCode::kConfigError, "no correct process");
  return f;
}

struct Lemma1Check {
  bool ok = true;
  std::string reason;
};

struct ReductionResult {
  FailurePattern pattern;
  FDHistory history;
  std::vector<OmegaStream> streams;
  std::vector<std::vector<ProbeRecord>> probes;             // per process
  std::vector<std::vector<ExplorationPoint>> points;        // per process
  std::vector<std::vector<std::uint64_t>> final_counts;     // per process: counts of the final probe's schedule
  std::vector<std::vector<std::uint64_t>> tail_start_counts;
  OmegaVerdict verdict;
  std::uint64_t safety_violations = 0;
  Lemma1Check lemma1;
  bool frozen_ok = true;  // exactly one correct p' frozen in the final probe's schedule tail
  std::string frozen_reason;
  Time steps = 0;
};

// Lemma 1 at desk scale: the last `tail` entries of every correct process
// stay on one (J, σ, q_j) and ρ never shrinks.
inline Lemma1Check check_lemma1(const std::vector<std::vector<ProbeRecord>>& probes,
                                const std::vector<std::vector<ExplorationPoint>>& points, const FailurePattern& f,
                                std::size_t tail) {
  Lemma1Check c;
  for (ProcessId p : f.correct()) {
    const auto& log = probes[static_cast<std::size_t>(p.slot())];
    if (log.size() < tail) {
      c.ok = false;
      c.reason = to_string(p) + " has " + std::to_string(log.size()) + " probe entries, fewer than the tail";
      return c;
    }
    const ProbeRecord& first = log[log.size() - tail];
    std::uint64_t rho = first.rho_len;
    for (std::size_t k = log.size() - tail; k < log.size(); ++k) {
      const ProbeRecord& r = log[k];
      if (r.point != first.point || r.qj != first.qj || r.rho_len < rho) {
        const auto& pts = points[static_cast<std::size_t>(p.slot())];
        c.ok = false;
        c.reason = to_string(p) + " left probe (J=" + std::to_string(first.J[0]) + std::to_string(first.J[1]) +
                   ", σ=" + schedule_string(pts[first.point].sigma) + ", q" + std::to_string(first.qj) +
                   ") inside the tail";
        return c;
      }
      rho = r.rho_len;
    }
  }
  return c;
}

// `on_step` sees every core step as it executes.
template <Automaton A>
ReductionResult run_reduction(const ReductionConfig& c, const std::function<void(const Step&)>& on_step = {}) {
  ReductionResult out;
  out.pattern = make_pattern(c);
  const ProcessId leader = c.leader ? ProcessId(*c.leader) : out.pattern.correct().front();
  out.history = make_omega(out.pattern, {c.t_stab, leader, c.seed});
  std::vector<ReductionProcess<A>> procs;
  for (int i = 1; i <= c.n; ++i) procs.emplace_back(ProcessId(i), c.n, c.explore_per_comm, c.keep_probe_log);
  System<ReductionProcess<A>, Dag> sys(out.pattern, out.history, std::move(procs));
  sys.set_recording(false);
  Scheduler sched(c.n, SchedMode::kSeededRandom, c.seed, c.fairness_window);
  // Counts of each probe schedule at the start of the Ω tail window.
  const Time tail_start = c.budget > c.tail_window ? c.budget - c.tail_window : 0;
  out.tail_start_counts.assign(static_cast<std::size_t>(c.n), {});
  std::vector<std::optional<std::size_t>> tail_point(static_cast<std::size_t>(c.n));
  std::vector<int> tail_q(static_cast<std::size_t>(c.n), 0);
  for (std::uint64_t i = 0; i < c.budget; ++i) {
    if (sys.now() == tail_start) {
      for (int p = 1; p <= c.n; ++p) {
        const auto& ex = sys.process(ProcessId(p)).explorer();
        const auto slot = static_cast<std::size_t>(p - 1);
        if (const auto* st = ex.probe_state()) {
          out.tail_start_counts[slot] = st->counts();
          if (const auto& lp = sys.process(ProcessId(p)).last_probe()) {
            tail_point[slot] = lp->point;
            tail_q[slot] = lp->qj;
          }
        }
      }
    }
    const Step& st = sys.execute_step(sched.next(sys.pattern(), sys.now()));
    if (on_step) on_step(st);
  }
  out.steps = sys.now();
  for (int p = 1; p <= c.n; ++p) {
    auto& proc = sys.process(ProcessId(p));
    const auto slot = static_cast<std::size_t>(p - 1);
    if (out.pattern.is_correct(ProcessId(p))) proc.stream().extend_to(sys.now());
    out.streams.push_back(proc.stream());
    out.probes.push_back(proc.probe_log());
    out.points.push_back(proc.explorer().points());
    out.safety_violations += proc.explorer().safety_violations();
    const auto* st = proc.explorer().probe_state();
    out.final_counts.push_back(st ? st->counts() : std::vector<std::uint64_t>{});
    // The frozen check only applies if the probe did not change over the tail.
    if (!out.pattern.is_correct(ProcessId(p))) continue;
    const auto& lp = proc.last_probe();
    if (!st || !lp || !tail_point[slot] || *tail_point[slot] != lp->point || tail_q[slot] != lp->qj) {
      if (out.frozen_ok) out.frozen_reason = to_string(ProcessId(p)) + " changed probe inside the tail";
      out.frozen_ok = false;
      continue;
    }
    int frozen = 0;
    std::string which;
    for (ProcessId q : out.pattern.correct()) {
      const auto qs = static_cast<std::size_t>(q.slot());
      if (st->counts()[qs] == out.tail_start_counts[slot][qs]) {
        ++frozen;
        which += " " + to_string(q);
      }
    }
    if (frozen != 1) {
      if (out.frozen_ok)
        out.frozen_reason = to_string(ProcessId(p)) + " sees " + std::to_string(frozen) + " frozen correct processes:" + which;
      out.frozen_ok = false;
    }
  }
  out.verdict = validate_omega_stream(out.streams, out.pattern, c.tail_window);
  if (c.keep_probe_log) {
    out.lemma1 = check_lemma1(out.probes, out.points, out.pattern, c.probe_tail);
  } else {
    out.lemma1 = {false, "probe log not kept"};
  }
  return out;
}

}  // namespace omega
