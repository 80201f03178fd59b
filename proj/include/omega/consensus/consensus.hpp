#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "omega/core/step.hpp"

namespace omega {

// Consensus using an Ω-like detector over single-writer registers.
//
// Rounds r = 1, 2, ...: query the detector; a process that sees itself as
// leader publishes (r, estimate) in its L register, the others wait for the
// leader's L to reach round r and adopt its estimate. Then a two-phase
// adopt-commit over registers A_r and B_r. Commit decides; adopt replaces the
// estimate. A decided process publishes the decision in L (others waiting on
// it decide too) and keeps querying forever. With Confirm > 1 a process acts
// on a leader only after that many consecutive identical query results, so
// short bursts of detector noise cannot make it lead or follow.
template <int Confirm>
class LeaderConsensus {
  static_assert(Confirm >= 1);

 public:
  static constexpr char kLeadTag = 'L';
  static constexpr char kPhase1Tag = 'A';
  static constexpr char kPhase2Tag = 'B';

  LeaderConsensus(ProcessId self, int n, int input) : self_(self.index), n_(n), input_(input), est_(input) {
    if (input != 0 && input != 1) throw Error(ErrorCode::kModelError, "consensus input must be a bit");
  }

  OpRequest<Word> pending() const {
    using Op = OpRequest<Word>;
    switch (phase_) {
      case Phase::kQuery:
      case Phase::kDone: return Op::query();
      case Phase::kReadLead: return Op::read(lead_reg(leader_));
      case Phase::kWriteLead: return Op::write(lead_reg(self_), {round_, est_, 0});
      case Phase::kWriteA: return Op::write(reg(kPhase1Tag, self_), {est_});
      case Phase::kReadA: return Op::read(reg(kPhase1Tag, idx_));
      case Phase::kWriteB: return Op::write(reg(kPhase2Tag, self_), {mixed_ ? 0 : 1, est_});
      case Phase::kReadB: return Op::read(reg(kPhase2Tag, idx_));
      case Phase::kWriteDecided: return Op::write(lead_reg(self_), {round_, est_, 1});
      case Phase::kDecide: return Op::decide(est_);
    }
    return Op::local();
  }

  void advance(const Response<Word>& r) {
    switch (phase_) {
      case Phase::kQuery: {
        const int d = r.detector;
        streak_ = d == seen_ ? streak_ + 1 : 1;
        seen_ = d;
        if (streak_ < Confirm) break;
        if (d == self_) {
          phase_ = Phase::kWriteLead;
        } else if (d >= 1 && d <= n_) {
          leader_ = d;
          phase_ = Phase::kReadLead;
        }
        break;
      }
      case Phase::kReadLead: {
        const Word& w = r.value;
        if (w.size() == 3 && w[2] == 1) {
          est_ = static_cast<int>(w[1]);
          phase_ = Phase::kWriteDecided;
        } else if (w.size() == 3 && w[0] >= round_) {
          est_ = static_cast<int>(w[1]);
          phase_ = Phase::kWriteA;
        } else {
          phase_ = Phase::kQuery;
        }
        break;
      }
      case Phase::kWriteLead: phase_ = Phase::kWriteA; break;
      case Phase::kWriteA:
        idx_ = 1;
        mixed_ = false;
        phase_ = Phase::kReadA;
        break;
      case Phase::kReadA:
        if (!r.value.empty() && r.value[0] != est_) mixed_ = true;
        if (++idx_ > n_) phase_ = Phase::kWriteB;
        break;
      case Phase::kWriteB:
        idx_ = 1;
        all_commit_ = true;
        adopt_.reset();
        phase_ = Phase::kReadB;
        break;
      case Phase::kReadB:
        if (!r.value.empty()) {
          if (r.value[0] == 1) {
            adopt_ = static_cast<int>(r.value[1]);
            if (r.value[1] != est_) all_commit_ = false;
          } else {
            all_commit_ = false;
          }
        }
        if (++idx_ > n_) finish_round();
        break;
      case Phase::kWriteDecided: phase_ = Phase::kDecide; break;
      case Phase::kDecide:
        decided_ = est_;
        phase_ = Phase::kDone;
        break;
      case Phase::kDone: break;
    }
  }

  std::optional<int> decided() const { return decided_; }
  int input() const { return input_; }
  int estimate() const { return est_; }
  std::int64_t round() const { return round_; }
  ProcessId self() const { return ProcessId(self_); }

  friend bool operator==(const LeaderConsensus&, const LeaderConsensus&) = default;

 private:
  enum class Phase : std::uint8_t {
    kQuery, kReadLead, kWriteLead, kWriteA, kReadA, kWriteB, kReadB, kWriteDecided, kDecide, kDone
  };

  RegKey lead_reg(int owner) const { return RegKey{owner, kLeadTag, 0}; }
  RegKey reg(char tag, int owner) const { return RegKey{owner, tag, round_}; }

  void finish_round() {
    if (all_commit_) {
      phase_ = Phase::kWriteDecided;
      return;
    }
    if (adopt_) est_ = *adopt_;
    ++round_;
    phase_ = Phase::kQuery;
  }

  int self_;
  int n_;
  int input_;
  int est_;
  std::int64_t round_ = 1;
  int leader_ = 0;
  int seen_ = 0;
  int streak_ = 0;
  int idx_ = 1;
  bool mixed_ = false;
  bool all_commit_ = true;
  std::optional<int> adopt_;
  std::optional<int> decided_;
  Phase phase_ = Phase::kQuery;
};

using ConsensusAutomaton = LeaderConsensus<1>;
// The default algorithm of the reduction.
using StableLeaderConsensus = LeaderConsensus<8>;

static_assert(Automaton<ConsensusAutomaton>);
static_assert(Automaton<StableLeaderConsensus>);

struct ConsensusReport {
  bool valid = true;
  bool agreement = true;
  std::set<int> decided_set;
  std::optional<std::size_t> first_violation;  // index into the step sequence
  std::string detail;

  bool ok() const { return valid && agreement; }
};

// Checks validity and agreement over the decide steps of a trace.
inline ConsensusReport check_consensus_trace(const Trace& trace) {
  ConsensusReport rep;
  std::set<int> inputs(trace.initial.inputs.begin(), trace.initial.inputs.end());
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const Step& s = trace.steps[i];
    if (s.kind != OpKind::kDecide || !s.bit) continue;
    const int v = *s.bit;
    if (!inputs.count(v) && rep.valid) {
      rep.valid = false;
      if (!rep.first_violation) {
        rep.first_violation = i;
        rep.detail = "validity: " + to_string(s.proc) + " decided " + std::to_string(v) + " which nobody proposed";
      }
    }
    if (!rep.decided_set.empty() && !rep.decided_set.count(v) && rep.agreement) {
      rep.agreement = false;
      if (!rep.first_violation) {
        rep.first_violation = i;
        rep.detail = "agreement: " + to_string(s.proc) + " decided " + std::to_string(v);
      }
    }
    rep.decided_set.insert(v);
  }
  return rep;
}

}  // namespace omega
