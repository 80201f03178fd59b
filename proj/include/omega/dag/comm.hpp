#pragma once

#include <utility>
#include <vector>

#include "omega/core/system.hpp"
#include "omega/dag/dag.hpp"

namespace omega {

// One DAG snapshot per write of a process's DAG register.
using DagSnapshot = std::pair<Time, Dag>;

// The DAG-building loop of one process: read every G_j and merge it into G_i,
// query the detector, append [p_i, d, k_i] with edges from every vertex
// already present, write G_i. Each read, the query and the write are separate
// atomic steps.
class CommComponent {
 public:
  static constexpr char kDagTag = 'G';

  CommComponent() = default;
  CommComponent(ProcessId self, int n) : self_(self.index), n_(n), local_(n) {}

  static RegKey dag_reg(int owner) { return RegKey{owner, kDagTag, 0}; }

  OpRequest<Dag> pending() const {
    switch (phase_) {
      case Phase::kRead: return OpRequest<Dag>::read(dag_reg(idx_));
      case Phase::kQuery: return OpRequest<Dag>::query();
      case Phase::kWrite: return OpRequest<Dag>::write(dag_reg(self_), local_);
    }
    return OpRequest<Dag>::local();
  }

  // Returns true when this step completed a full iteration (the write).
  bool advance(const Response<Dag>& r) {
    switch (phase_) {
      case Phase::kRead:
        local_.unite(r.value);
        if (++idx_ > n_) phase_ = Phase::kQuery;
        return false;
      case Phase::kQuery:
        local_.add_sample(self_, r.detector, r.time);
        phase_ = Phase::kWrite;
        return false;
      case Phase::kWrite:
        if (record_) snapshots_.emplace_back(r.time, local_);
        ++iterations_;
        idx_ = 1;
        phase_ = Phase::kRead;
        return true;
    }
    return false;
  }

  const Dag& local() const { return local_; }
  ProcessId self() const { return ProcessId(self_); }
  std::uint64_t iterations() const { return iterations_; }
  bool at_cycle_start() const { return phase_ == Phase::kRead && idx_ == 1; }

  void set_recording(bool on) { record_ = on; }
  const std::vector<DagSnapshot>& snapshots() const { return snapshots_; }

 private:
  enum class Phase { kRead, kQuery, kWrite };

  int self_ = 1;
  int n_ = 2;
  Dag local_;
  Phase phase_ = Phase::kRead;
  int idx_ = 1;
  std::uint64_t iterations_ = 0;
  bool record_ = false;
  std::vector<DagSnapshot> snapshots_;
};

// A process that runs only the communication component.
class CommProcess {
 public:
  CommProcess(ProcessId self, int n, bool record = true) : comm_(self, n) { comm_.set_recording(record); }

  OpRequest<Dag> pending() const { return comm_.pending(); }
  void advance(const Response<Dag>& r) { comm_.advance(r); }

  const CommComponent& comm() const { return comm_; }

 private:
  CommComponent comm_;
};

inline std::vector<CommProcess> make_comm_processes(int n, bool record = true) {
  std::vector<CommProcess> out;
  for (int i = 1; i <= n; ++i) out.emplace_back(ProcessId(i), n, record);
  return out;
}

// Runs one full iteration (n reads, query, write) of p's loop.
template <class Proc>
void comm_step(System<Proc, Dag>& system, ProcessId p) {
  const std::uint64_t before = system.process(p).comm().iterations();
  while (system.process(p).comm().iterations() == before) system.execute_step(p);
}

}  // namespace omega
