#pragma once

#include <cstdint>
#include <vector>

#include "omega/core/memory.hpp"
#include "omega/core/scheduler.hpp"
#include "omega/core/step.hpp"

namespace omega {

// Shared objects visible to a process during a local step that does internal
// work against the simulated memory (the reduction's exploration units).
struct StepContext {
  ConsRegistry& cons;
  Time time;
};

template <class P, class V>
concept ContextualProcess = requires(P p, const Response<V>& r, StepContext& ctx) { p.advance(r, ctx); };

template <class P>
concept TerminatingProcess = requires(const P p) {
  { p.terminated() } -> std::convertible_to<bool>;
};

// The asynchronous shared-memory system: automata, registers, consensus
// objects, failure pattern and detector history, stepped one atomic operation
// at a time.
template <class Proc, class V = Word>
  requires SimProcess<Proc, V>
class System {
 public:
  System(FailurePattern pattern, FDHistory history, std::vector<Proc> procs, InitialState initial = {})
      : procs_(std::move(procs)) {
    if (static_cast<int>(procs_.size()) != pattern.n()) {
      throw Error(ErrorCode::kConfigError, "process count does not match failure pattern");
    }
    trace_.pattern = std::move(pattern);
    trace_.history = std::move(history);
    trace_.initial = std::move(initial);
  }

  int n() const { return static_cast<int>(procs_.size()); }
  Time now() const { return now_; }
  const FailurePattern& pattern() const { return trace_.pattern; }
  const FDHistory& history() const { return trace_.history; }
  const Trace& trace() const { return trace_; }
  Memory<V>& memory() { return memory_; }
  const Memory<V>& memory() const { return memory_; }
  ConsRegistry& cons() { return cons_; }
  const ConsRegistry& cons() const { return cons_; }
  Proc& process(ProcessId p) { return procs_.at(static_cast<std::size_t>(p.slot())); }
  const Proc& process(ProcessId p) const { return procs_.at(static_cast<std::size_t>(p.slot())); }

  // When off, steps are executed but not appended to the trace.
  void set_recording(bool on) { recording_ = on; }

  bool crashed(ProcessId p) const { return trace_.pattern.crashed_at(p, now_); }

  bool terminated(ProcessId p) const {
    if constexpr (TerminatingProcess<Proc>) {
      return process(p).terminated();
    } else {
      return false;
    }
  }

  const Step& execute_step(ProcessId p) {
    trace_.pattern.check(p);
    if (crashed(p)) {
      throw Error(ErrorCode::kSchedulerBug, to_string(p) + " stepped at t=" + std::to_string(now_) + " after crashing");
    }
    Proc& proc = process(p);
    const OpRequest<V> op = proc.pending();

    Response<V> resp;
    resp.time = now_;
    switch (op.kind) {
      case OpKind::kRead: resp.value = memory_.read(op.reg); break;
      case OpKind::kWrite: memory_.write(p, op.reg, op.value); break;
      case OpKind::kQuery: resp.detector = trace_.history.sample(p, now_); break;
      case OpKind::kCons: resp.bit = cons_.access(op.cons, op.bit); break;
      case OpKind::kLocal:
      case OpKind::kDecide: break;
    }

    cons_.clear_last_access();
    if constexpr (ContextualProcess<Proc, V>) {
      StepContext ctx{cons_, now_};
      proc.advance(resp, ctx);
    } else {
      proc.advance(resp);
    }

    last_ = Step{};
    last_.t = now_;
    last_.proc = p;
    last_.kind = op.kind;
    switch (op.kind) {
      case OpKind::kRead:
        last_.reg = op.reg;
        last_.value = summarize(resp.value);
        break;
      case OpKind::kWrite:
        last_.reg = op.reg;
        last_.value = summarize(op.value);
        break;
      case OpKind::kQuery: last_.fd = resp.detector; break;
      case OpKind::kCons:
        last_.cons_id = op.cons;
        last_.bit = resp.bit;
        break;
      case OpKind::kDecide: last_.bit = op.bit; break;
      case OpKind::kLocal:
        if (cons_.last_access()) {
          last_.kind = OpKind::kCons;
          last_.cons_id = *cons_.last_access();
        }
        break;
    }
    ++now_;
    if (recording_) trace_.steps.push_back(last_);
    return last_;
  }

 private:
  std::vector<Proc> procs_;
  Memory<V> memory_;
  ConsRegistry cons_;
  Trace trace_;
  Step last_;
  Time now_ = 0;
  bool recording_ = true;
};

// Drives the system until the budget is spent or no live process has work.
template <class Proc, class V>
const Trace& run(System<Proc, V>& system, Scheduler& scheduler, std::uint64_t budget) {
  for (std::uint64_t i = 0; i < budget; ++i) {
    bool any = false;
    for (int p = 1; p <= system.n(); ++p) {
      ProcessId id(p);
      if (!system.crashed(id) && !system.terminated(id)) {
        any = true;
        break;
      }
    }
    if (!any) break;
    ProcessId p = scheduler.next(system.pattern(), system.now());
    if (system.terminated(p)) continue;
    system.execute_step(p);
  }
  return system.trace();
}

}  // namespace omega
