#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omega/bg/bg.hpp"

namespace omega {

// σ symbols: 1 = q1, 2 = q2.
using Schedule = AppendLog<std::uint8_t>;

inline std::string schedule_string(const Schedule& s) {
  std::string out;
  for (std::uint8_t c : s) out += static_cast<char>('0' + c);
  return out;
}

// Smallest-index process among p_1..p_n with the fewest occurrences.
inline ProcessId least_appearing(const std::vector<std::uint64_t>& counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] < counts[best]) best = i;
  return ProcessId(static_cast<int>(best) + 1);
}

inline ProcessId least_appearing(std::span<const std::uint8_t> sch, int n) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n), 0);
  for (std::uint8_t p : sch) {
    if (p < 1 || p > n) throw Error(ErrorCode::kMalformedSchedule, "schedule names p" + std::to_string(p));
    ++counts[static_cast<std::size_t>(p - 1)];
  }
  return least_appearing(counts);
}

template <Automaton A>
struct ReplayResult {
  BGSimulation<A> st;
  std::size_t stalled = 0;

  const Schedule& sch() const { return st.sch(); }
  bool decided() const { return st.decided(); }
};

// Re-executes BG(A') from scratch under σ with simulator inputs J.
template <Automaton A>
ReplayResult<A> replay(int n, std::array<int, 2> J, std::span<const std::uint8_t> sigma, const Dag& view,
                       ConsRegistry& cons, bool record = false) {
  ReplayResult<A> r{BGSimulation<A>(n, J, record), 0};
  for (std::uint8_t c : sigma) {
    if (c != 1 && c != 2) throw Error(ErrorCode::kMalformedSchedule, "σ names simulator q" + std::to_string(c));
    if (r.st.macro_step(c - 1, view, cons) == MacroResult::kStalled) ++r.stalled;
  }
  return r;
}

struct ExplorationPoint {
  std::array<int, 2> J{};
  Schedule sigma;
};

// One work unit of the exploration.
struct ProbeRecord {
  Time t = 0;
  ProcessId proc;
  std::array<int, 2> J{};
  std::size_t point = 0;  // index into Explorer::points()
  int qj = 0;             // 1 or 2; 0 when idle
  std::uint64_t rho_len = 0;
  ProcessId omega_out;
  bool decided = false;
  bool stalled = false;

  friend bool operator==(const ProbeRecord&, const ProbeRecord&) = default;
};

// The exploration of one real process, made iterative: every point (J, σ) is
// probed by q1 alone and then by q2 alone until the probe decides, then its
// children σ·q1 and σ·q2 are explored depth first. The Ω-output is the
// least-appearing simulated process of the current probe's schedule. One
// call to step() is one macro-step of the probing simulator. Points whose
// state is already decided are skipped: every probe below them decides at
// once and leaves the output unchanged.
template <Automaton A>
class Explorer {
 public:
  Explorer(ProcessId self, int n) : self_(self), n_(n), omega_(self) {
    for (int k = 3; k >= 0; --k) stack_.push_back(Node{{k >> 1, k & 1}, {}, BGSimulation<A>(n, {k >> 1, k & 1})});
  }

  ProbeRecord step(const Dag& view, ConsRegistry& cons, Time t) {
    ProbeRecord rec;
    rec.t = t;
    rec.proc = self_;
    if (!probe_) {
      if (stack_.empty()) {
        rec.omega_out = omega_;
        return rec;
      }
      Node node = std::move(stack_.back());
      stack_.pop_back();
      points_.push_back({node.J, node.sigma});
      BGSimulation<A> start = node.st;
      probe_.emplace(Probe{points_.size() - 1, std::move(node.st), 1, 0, std::move(start), {}});
    }
    Probe& pr = *probe_;
    const ExplorationPoint& pt = points_[pr.point];
    rec.J = pt.J;
    rec.point = pr.point;
    rec.qj = pr.qj;
    if (pr.st.macro_step(pr.qj - 1, view, cons) == MacroResult::kStalled) {
      rec.stalled = true;
    } else {
      ++pr.rho;
      if (pr.rho == 1) pr.child[static_cast<std::size_t>(pr.qj - 1)] = pr.st;
      omega_ = least_appearing(pr.st.counts());
    }
    if (pr.st.safety_violations() > violations_seen_) violations_seen_ = pr.st.safety_violations();
    rec.rho_len = pr.rho;
    rec.decided = pr.st.decided();
    rec.omega_out = omega_;
    if (rec.decided) finish_probe();
    return rec;
  }

  ProcessId omega_output() const { return omega_; }
  const std::vector<ExplorationPoint>& points() const { return points_; }
  std::size_t pending_points() const { return stack_.size(); }
  // Agreement or validity violations seen in any explored simulated run.
  std::uint64_t safety_violations() const { return violations_seen_; }
  // The schedule of the current probe, if any.
  const Schedule* probe_schedule() const { return probe_ ? &probe_->st.sch() : nullptr; }
  const BGSimulation<A>* probe_state() const { return probe_ ? &probe_->st : nullptr; }

 private:
  struct Node {
    std::array<int, 2> J{};
    Schedule sigma;
    BGSimulation<A> st;
  };
  struct Probe {
    std::size_t point;
    BGSimulation<A> st;
    int qj;
    std::uint64_t rho;
    BGSimulation<A> start;  // state at σ
    std::array<std::optional<BGSimulation<A>>, 2> child;  // states at σ·q1, σ·q2
  };

  void finish_probe() {
    Probe& pr = *probe_;
    if (pr.qj == 1) {
      pr.qj = 2;
      pr.rho = 0;
      pr.st = pr.start;
      return;
    }
    const ExplorationPoint& pt = points_[pr.point];
    for (int q = 2; q >= 1; --q) {
      auto& c = pr.child[static_cast<std::size_t>(q - 1)];
      if (c->decided()) continue;
      Schedule s = pt.sigma;
      s.push_back(static_cast<std::uint8_t>(q));
      stack_.push_back(Node{pt.J, std::move(s), std::move(*c)});
    }
    probe_.reset();
  }

  ProcessId self_;
  int n_;
  ProcessId omega_;
  std::vector<Node> stack_;
  std::optional<Probe> probe_;
  std::vector<ExplorationPoint> points_;
  std::uint64_t violations_seen_ = 0;
};

}  // namespace omega
