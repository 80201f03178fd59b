#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "omega/core/step.hpp"
#include "omega/dag/dag.hpp"

namespace omega {

// One step of the inner algorithm A taken by the simulation, with the DAG
// vertex whose sample stood in for the detector.
struct SimAStep {
  ProcessId proc;
  OpRequest<Word> op;   // as requested by A (kQuery for detector steps)
  Response<Word> resp;  // as delivered to A
  VertexId vertex;
  std::uint64_t order = 0;

  friend bool operator==(const SimAStep&, const SimAStep&) = default;
};

// State of one simulated process p'_i of A' (DAG-based simulation of A):
// collect U from V_1..V_n, then the consensus-gated wait for a vertex
// [p_i, d, ell] succeeding every U[j], write V_i, take one A step with d.
template <Automaton A>
class AsimProcState {
 public:
  static constexpr char kVTag = 'V';

  AsimProcState(ProcessId self, int n, A inner)
      : self_(self.index), n_(n), inner_(std::move(inner)), u_(static_cast<std::size_t>(n)) {}

  static RegKey v_reg(int owner) { return RegKey{owner, kVTag, 0}; }
  static Word encode(VertexId v) { return {v.proc, v.seq}; }

  OpRequest<Word> pending(const Dag& view) const {
    using Op = OpRequest<Word>;
    switch (phase_) {
      case Phase::kCollect: return Op::read(v_reg(idx_));
      case Phase::kWait: return Op::cons_access(cons_key(), view.contains({self_, static_cast<int>(ell_)}) ? 1 : 0);
      case Phase::kWriteV: return Op::write(v_reg(self_), encode({self_, static_cast<int>(ell_)}));
      case Phase::kStepA: {
        Op op = inner_.pending();
        // A's detector query is served from the chosen vertex; to the
        // surrounding system it is a local step.
        return op.kind == OpKind::kQuery ? Op::local() : op;
      }
    }
    return Op::local();
  }

  // False iff the response cannot be consumed yet: the wait's consensus
  // returned 1 but this view does not hold the vertex.
  bool can_advance(const Response<Word>& r, const Dag& view) const {
    if (phase_ != Phase::kWait || r.bit != 1) return true;
    return view.contains({self_, static_cast<int>(ell_)});
  }

  // Returns the A step when this micro-action was one.
  std::optional<SimAStep> advance(const Response<Word>& r, const Dag& view) {
    switch (phase_) {
      case Phase::kCollect:
        u_[static_cast<std::size_t>(idx_ - 1)] = decode(r.value);
        if (++idx_ > n_) {
          ++ell_;
          round_ = 1;
          phase_ = Phase::kWait;
        }
        return std::nullopt;
      case Phase::kWait: on_wait(r, view); return std::nullopt;
      case Phase::kWriteV: phase_ = Phase::kStepA; return std::nullopt;
      case Phase::kStepA: {
        SimAStep st;
        st.proc = ProcessId(self_);
        st.op = inner_.pending();
        st.vertex = VertexId{self_, static_cast<int>(ell_)};
        st.resp = r;
        if (st.op.kind == OpKind::kQuery) {
          st.resp = Response<Word>{};
          st.resp.detector = chosen_d_;
          st.resp.time = r.time;
        }
        inner_.advance(st.resp);
        ++a_steps_;
        idx_ = 1;
        phase_ = Phase::kCollect;
        return st;
      }
    }
    return std::nullopt;
  }

  const A& inner() const { return inner_; }
  ProcessId self() const { return ProcessId(self_); }
  std::int64_t ell() const { return ell_; }
  std::int64_t wait_round() const { return round_; }
  std::uint64_t a_steps() const { return a_steps_; }
  bool waiting() const { return phase_ == Phase::kWait; }
  const std::vector<std::optional<VertexId>>& last_collect() const { return u_; }

  friend bool operator==(const AsimProcState&, const AsimProcState&) = default;

 private:
  enum class Phase : std::uint8_t { kCollect, kWait, kWriteV, kStepA };

  ConsKey cons_key() const { return ConsKey{self_, ell_, round_}; }

  std::optional<VertexId> decode(const Word& w) const {
    if (w.empty()) return std::nullopt;
    if (w.size() != 2 || w[0] < 1 || w[0] > n_ || w[1] < 1) {
      throw Error(ErrorCode::kModelError, "malformed V register value read by p" + std::to_string(self_));
    }
    return VertexId{static_cast<int>(w[0]), static_cast<int>(w[1])};
  }

  void on_wait(const Response<Word>& r, const Dag& view) {
    if (r.bit != 1) {
      ++round_;
      return;
    }
    const VertexId cand{self_, static_cast<int>(ell_)};
    const DagVertex* v = view.find(cand);
    if (!v) throw Error(ErrorCode::kModelError, "wait exited without vertex p" + std::to_string(self_) + "/" + std::to_string(ell_));
    for (const auto& uj : u_) {
      if (!uj) continue;
      if (*uj == cand) throw Error(ErrorCode::kModelError, "collected vertex equals the wait candidate");
      if (!view.has_edge(*uj, cand)) {
        ++ell_;
        round_ = 1;
        return;
      }
    }
    chosen_d_ = v->d;
    phase_ = Phase::kWriteV;
  }

  int self_;
  int n_;
  A inner_;
  std::vector<std::optional<VertexId>> u_;
  Phase phase_ = Phase::kCollect;
  int idx_ = 1;
  std::int64_t ell_ = 0;
  std::int64_t round_ = 1;
  DetectorValue chosen_d_ = 0;
  std::uint64_t a_steps_ = 0;
};

// Adapter running A' directly on the event loop over a fixed DAG, recording
// the simulated A steps in global order.
template <Automaton A>
class AsimProcess {
 public:
  using Recorder = std::shared_ptr<std::vector<SimAStep>>;

  AsimProcess(ProcessId self, int n, int input, std::shared_ptr<const Dag> dag, Recorder rec)
      : st_(self, n, A(self, n, input)), dag_(std::move(dag)), rec_(std::move(rec)) {}

  OpRequest<Word> pending() const { return st_.pending(*dag_); }

  void advance(const Response<Word>& r) {
    if (!st_.can_advance(r, *dag_)) throw Error(ErrorCode::kModelError, "A' wait resolved on a vertex outside its DAG");
    if (auto s = st_.advance(r, *dag_)) {
      s->order = r.time;
      if (rec_) rec_->push_back(std::move(*s));
    }
  }

  const AsimProcState<A>& state() const { return st_; }

 private:
  AsimProcState<A> st_;
  std::shared_ptr<const Dag> dag_;
  Recorder rec_;
};

template <Automaton A>
std::vector<AsimProcess<A>> make_asim_processes(const std::vector<int>& inputs, std::shared_ptr<const Dag> dag,
                                                typename AsimProcess<A>::Recorder rec) {
  std::vector<AsimProcess<A>> out;
  const int n = static_cast<int>(inputs.size());
  for (int i = 1; i <= n; ++i) out.emplace_back(ProcessId(i), n, inputs[static_cast<std::size_t>(i - 1)], dag, rec);
  return out;
}

}  // namespace omega
