#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "omega/asim/asim.hpp"
#include "omega/bg/safe_agreement.hpp"
#include "omega/core/memory.hpp"

namespace omega {

enum class ActionKind : std::uint8_t { kInit, kRead, kWrite, kCons, kLocal, kDecide };

inline const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::kInit: return "init";
    case ActionKind::kRead: return "read";
    case ActionKind::kWrite: return "write";
    case ActionKind::kCons: return "cons";
    case ActionKind::kLocal: return "local";
    case ActionKind::kDecide: return "decide";
  }
  return "?";
}

// The agreed outcome of one micro-action of a simulated process.
struct BgOutcome {
  ActionKind kind = ActionKind::kLocal;
  Word value;                 // read result
  int bit = -1;               // input bit (init) or consensus result
  std::uint64_t version = 0;  // memory version the read observed

  friend bool operator==(const BgOutcome&, const BgOutcome&) = default;
};

struct BgLogEntry {
  std::uint64_t step_no = 0;
  BgOutcome outcome;

  friend bool operator==(const BgLogEntry&, const BgLogEntry&) = default;
};

enum class MacroResult : std::uint8_t {
  kProposed,  // wrote a level-1 proposal
  kApplied,   // an agreed micro-action was applied
  kPending,   // agreement pending; moved on
  kStalled,   // the agreed action needs a DAG vertex this view lacks; nothing changed
};

inline const char* to_string(MacroResult r) {
  switch (r) {
    case MacroResult::kProposed: return "proposed";
    case MacroResult::kApplied: return "applied";
    case MacroResult::kPending: return "pending";
    case MacroResult::kStalled: return "stalled";
  }
  return "?";
}

// BG simulation of A' by two simulators q1, q2 (indices 0, 1). Each visits
// the simulated processes round-robin and agrees, through one safe-agreement
// object per micro-action, on the action's outcome. One macro-step of q:
//  - if q left a level-1 proposal last time: read, raise or back off,
//    try to resolve, apply if resolved, move on;
//  - else at its cursor process: if q has not proposed on the current
//    action, compute the outcome locally and write it at level 1 (q stops
//    here); otherwise try to resolve, apply if resolved, move on.
// The first action of every p'_i is agreeing on its input; q proposes J[q].
template <Automaton A>
class BGSimulation {
 public:
  BGSimulation(int n, std::array<int, 2> J, bool record = false)
      : n_(n), j_(J), procs_(static_cast<std::size_t>(n)), counts_(static_cast<std::size_t>(n), 0), record_(record) {
    for (int b : J)
      if (b != 0 && b != 1) throw Error(ErrorCode::kConfigError, "simulator inputs must be bits");
  }

  MacroResult macro_step(int q, const Dag& view, ConsRegistry& cons) {
    if (q != 0 && q != 1) throw Error(ErrorCode::kMalformedSchedule, "simulator index " + std::to_string(q));
    Simulator& s = sims_[static_cast<std::size_t>(q)];
    if (s.mid) {
      const int i = *s.mid;
      SafeAgreement<BgOutcome> sa = procs_[static_cast<std::size_t>(i)].sa;
      sa.read_slots(q);
      sa.finish_propose(q);
      auto res = sa.resolve(q);
      if (res && !applicable(i, *res, view)) return MacroResult::kStalled;
      procs_[static_cast<std::size_t>(i)].sa = std::move(sa);
      s.mid.reset();
      s.cursor = (i + 1) % n_;
      if (!res) return MacroResult::kPending;
      apply(i, *res, view);
      return MacroResult::kApplied;
    }
    const int i = s.cursor;
    SimProc& p = procs_[static_cast<std::size_t>(i)];
    if (!p.sa.proposed(q)) {
      p.sa.write_proposal(q, compute(i, q, view, cons));
      s.mid = i;
      return MacroResult::kProposed;
    }
    auto res = p.sa.resolve(q);
    if (res && !applicable(i, *res, view)) return MacroResult::kStalled;
    s.cursor = (i + 1) % n_;
    if (!res) return MacroResult::kPending;
    apply(i, *res, view);
    return MacroResult::kApplied;
  }

  int n() const { return n_; }
  const std::array<int, 2>& inputs() const { return j_; }
  bool decided() const { return decided_value_.has_value(); }
  std::optional<int> decision() const { return decided_value_; }
  std::uint64_t safety_violations() const { return violations_; }

  // A' schedule: the simulated process (1-based) of every applied A' step.
  const AppendLog<std::uint8_t>& sch() const { return sch_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  // Processes whose current action has a proposal stuck at level 1.
  int blocked_count() const {
    return static_cast<int>(std::count_if(procs_.begin(), procs_.end(), [](const SimProc& p) { return p.sa.blocked(); }));
  }
  std::optional<int> mid(int q) const { return sims_[static_cast<std::size_t>(q)].mid; }

  const std::optional<AsimProcState<A>>& process(int i) const { return procs_[static_cast<std::size_t>(i - 1)].st; }
  std::uint64_t applied(int i) const { return procs_[static_cast<std::size_t>(i - 1)].applied; }
  const Memory<Word>& memory() const { return mem_; }

  // Recorded only when constructed with record = true.
  const AppendLog<BgLogEntry>& log(int i) const { return procs_[static_cast<std::size_t>(i - 1)].log; }
  // Simulated A steps, each tagged with a linearization key; sort stably by
  // `order` to obtain a legal sequential order.
  const AppendLog<SimAStep>& a_steps() const { return a_steps_; }
  std::vector<SimAStep> linearized_a_steps() const {
    std::vector<SimAStep> out = a_steps_.to_vector();
    std::stable_sort(out.begin(), out.end(), [](const SimAStep& a, const SimAStep& b) { return a.order < b.order; });
    return out;
  }
  // Inputs adopted by p'_1..p'_n (-1 before the init action).
  std::vector<int> adopted_inputs() const {
    std::vector<int> out;
    for (const auto& p : procs_) out.push_back(p.st ? p.st->inner().input() : -1);
    return out;
  }

 private:
  struct SimProc {
    std::optional<AsimProcState<A>> st;
    SafeAgreement<BgOutcome> sa;
    std::uint64_t applied = 0;
    AppendLog<BgLogEntry> log;
  };
  struct Simulator {
    int cursor = 0;
    std::optional<int> mid;
  };

  BgOutcome compute(int i, int q, const Dag& view, ConsRegistry& cons) {
    const SimProc& p = procs_[static_cast<std::size_t>(i)];
    BgOutcome out;
    if (!p.st) {
      out.kind = ActionKind::kInit;
      out.bit = j_[static_cast<std::size_t>(q)];
      return out;
    }
    const OpRequest<Word> op = p.st->pending(view);
    switch (op.kind) {
      case OpKind::kRead:
        out.kind = ActionKind::kRead;
        out.value = mem_.read(op.reg);
        out.version = mem_.version();
        break;
      case OpKind::kCons:
        out.kind = ActionKind::kCons;
        out.bit = cons.access(op.cons, op.bit);
        break;
      case OpKind::kWrite: out.kind = ActionKind::kWrite; break;
      case OpKind::kDecide: out.kind = ActionKind::kDecide; break;
      case OpKind::kQuery:
      case OpKind::kLocal: out.kind = ActionKind::kLocal; break;
    }
    return out;
  }

  static Response<Word> response_of(const BgOutcome& o) {
    Response<Word> r;
    r.value = o.value;
    r.bit = o.bit;
    return r;
  }

  bool applicable(int i, const BgOutcome& o, const Dag& view) const {
    const SimProc& p = procs_[static_cast<std::size_t>(i)];
    if (!p.st) return true;
    return p.st->can_advance(response_of(o), view);
  }

  void apply(int i, const BgOutcome& o, const Dag& view) {
    SimProc& p = procs_[static_cast<std::size_t>(i)];
    const ProcessId pid(i + 1);
    if (record_) p.log.push_back({p.applied, o});
    ++p.applied;
    p.sa = SafeAgreement<BgOutcome>{};
    if (!p.st) {
      if (o.kind != ActionKind::kInit) throw Error(ErrorCode::kCorruption, "first agreed action is not an input");
      p.st.emplace(pid, n_, A(pid, n_, o.bit));
      return;
    }
    const OpRequest<Word> op = p.st->pending(view);
    std::uint64_t key = 2 * mem_.version() + 1;
    if (op.kind == OpKind::kWrite) {
      mem_.write(pid, op.reg, op.value);
      key = 2 * mem_.version();
    } else if (op.kind == OpKind::kRead) {
      key = 2 * o.version + 1;
    }
    auto a = p.st->advance(response_of(o), view);
    sch_.push_back(static_cast<std::uint8_t>(i + 1));
    ++counts_[static_cast<std::size_t>(i)];
    if (!a) return;
    if (auto d = p.st->inner().decided(); d && a->op.kind == OpKind::kDecide) note_decision(*d);
    if (record_) {
      a->order = key;
      a_steps_.push_back(std::move(*a));
    }
  }

  void note_decision(int v) {
    bool proposed = false;
    for (const auto& p : procs_)
      if (p.st && p.st->inner().input() == v) proposed = true;
    if (!proposed || (decided_value_ && *decided_value_ != v)) ++violations_;
    if (!decided_value_) decided_value_ = v;
  }

  int n_;
  std::array<int, 2> j_;
  std::vector<SimProc> procs_;
  std::array<Simulator, 2> sims_{};
  Memory<Word> mem_;
  AppendLog<std::uint8_t> sch_;
  std::vector<std::uint64_t> counts_;
  AppendLog<SimAStep> a_steps_;
  std::optional<int> decided_value_;
  std::uint64_t violations_ = 0;
  bool record_ = false;
};

}  // namespace omega
