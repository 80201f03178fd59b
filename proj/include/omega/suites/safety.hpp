#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "omega/bg/safe_agreement.hpp"
#include "omega/consensus/consensus.hpp"
#include "omega/core/system.hpp"
#include "omega/detectors/omega.hpp"
#include "omega/suites/common.hpp"

namespace omega::suites {

namespace detail_sa {

using SA = SafeAgreement<int>;

struct Census {
  std::uint64_t nodes = 0;
  std::uint64_t resolutions = 0;
  std::uint64_t pending = 0;
  std::uint64_t violations = 0;
  std::string first;
};

inline bool stopped_mid(const SA& sa) {
  for (int q = 0; q < 2; ++q)
    if (sa.stage(q) == SA::Stage::kWrote || sa.stage(q) == SA::Stage::kRead) return true;
  return false;
}

// Program of simulator q: write, read, raise, resolve. Visits every prefix of
// every interleaving of the two programs.
inline void walk(const SA& sa, std::array<int, 2> pc, std::optional<int> agreed, Census& c) {
  ++c.nodes;
  auto bad = [&](const std::string& why) {
    if (c.violations++ == 0) c.first = why + " after pcs (" + std::to_string(pc[0]) + "," + std::to_string(pc[1]) + ")";
  };
  for (int q = 0; q < 2; ++q) {
    const auto qs = static_cast<std::size_t>(q);
    if (pc[qs] == 4) continue;
    SA next = sa;
    std::optional<int> next_agreed = agreed;
    switch (pc[qs]) {
      case 0: next.write_proposal(q, 10 * (q + 1)); break;
      case 1: next.read_slots(q); break;
      case 2: next.finish_propose(q); break;
      case 3: {
        auto r = next.resolve(q);
        if (r.has_value() == stopped_mid(next)) bad("pending does not match a simulator stopped between its writes");
        if (r) {
          ++c.resolutions;
          if (*r != 10 && *r != 20) bad("resolved to an unproposed value");
          if (!next.proposed(*r / 10 - 1)) bad("resolved to the value of a simulator that never proposed");
          if (agreed && *agreed != *r) bad("two resolutions disagree");
          next_agreed = r;
        } else {
          ++c.pending;
        }
        break;
      }
    }
    auto npc = pc;
    ++npc[qs];
    walk(next, npc, next_agreed, c);
  }
}

}  // namespace detail_sa

// Criterion 1: every interleaving of the micro-steps of both simulators on
// one object, including every point where either stops.
inline SuiteResult suite_sa() {
  SuiteResult r;
  r.name = "sa";
  SuiteTimer timer(r, 5);
  detail_sa::Census c;
  detail_sa::walk({}, {0, 0}, std::nullopt, c);
  if (c.violations) r.fail(c.first);
  if (c.pending == 0 || c.resolutions == 0) r.fail("enumeration never reached both outcomes");
  r.metrics = {{"interleavings", c.nodes}, {"resolutions", c.resolutions}, {"pending", c.pending}, {"violations", c.violations}};
  r.summary = std::to_string(c.nodes) + " interleaving prefixes, " + std::to_string(c.resolutions) + " resolutions, " +
              std::to_string(c.pending) + " pending, " + std::to_string(c.violations) + " violations";
  timer.finish();
  return r;
}

namespace detail_cons {

template <Automaton A>
System<A> make_system(const FailurePattern& f, const FDHistory& h, const std::vector<int>& inputs) {
  std::vector<A> procs;
  for (int i = 1; i <= f.n(); ++i) procs.emplace_back(ProcessId(i), f.n(), inputs[static_cast<std::size_t>(i - 1)]);
  return System<A>(f, h, std::move(procs), InitialState{inputs});
}

struct Census {
  std::uint64_t leaves = 0;
  std::uint64_t decided_leaves = 0;
  std::uint64_t violations = 0;
};

// Every schedule of length `depth`; decisions are read from the automata.
template <Automaton A>
void enumerate(const System<A>& sys, int depth, const std::set<int>& inputs, Census& c) {
  std::set<int> decided;
  for (int p = 1; p <= sys.n(); ++p)
    if (auto d = sys.process(ProcessId(p)).decided()) decided.insert(*d);
  bool bad = decided.size() > 1;
  for (int v : decided) bad = bad || !inputs.count(v);
  if (bad) {
    ++c.violations;
    return;
  }
  if (depth == 0) {
    ++c.leaves;
    c.decided_leaves += !decided.empty();
    return;
  }
  for (int p = 1; p <= sys.n(); ++p) {
    System<A> next = sys;
    next.execute_step(ProcessId(p));
    enumerate(next, depth - 1, inputs, c);
  }
}

struct ConsensusCensus {
  std::uint64_t leaves = 0;
  std::uint64_t exhaustive_violations = 0;
  std::uint64_t runs = 0;
  std::uint64_t run_violations = 0;
  std::uint64_t undecided_runs = 0;
  std::uint64_t max_decision_step = 0;
  std::string first;
};

template <Automaton A>
void check_algorithm(int depth, int runs, ConsensusCensus& c) {
  for (int leader : {1, 2}) {
    for (int mask = 0; mask < 4; ++mask) {
      std::vector<int> inputs{mask & 1, (mask >> 1) & 1};
      FDHistory h(2, "omega", [leader](ProcessId, Time) { return leader; });
      Census e;
      enumerate(make_system<A>(FailurePattern(2), h, inputs), depth, {inputs.begin(), inputs.end()}, e);
      c.leaves += e.leaves;
      c.exhaustive_violations += e.violations;
      if (e.violations && c.first.empty())
        c.first = "exhaustive n=2 leader p" + std::to_string(leader) + " inputs " + std::to_string(mask);
    }
  }
  for (int seed = 0; seed < runs; ++seed) {
    const auto s = static_cast<std::uint64_t>(seed);
    FailurePattern f(3);
    if (seed % 2) f.crash(ProcessId(seed % 3 + 1), 50 + s % 150);
    const ProcessId leader = f.correct()[s % f.correct().size()];
    auto h = make_omega(f, {s % 201, leader, s});
    std::vector<int> inputs{seed & 1, (seed >> 1) & 1, (seed >> 2) & 1};
    auto sys = make_system<A>(f, h, inputs);
    Scheduler sched(3, SchedMode::kSeededRandom, s);
    run(sys, sched, 10'000);
    ++c.runs;
    auto rep = check_consensus_trace(sys.trace());
    if (!rep.ok()) {
      ++c.run_violations;
      if (c.first.empty()) c.first = "seed " + std::to_string(seed) + ": " + rep.detail;
    }
    bool all = true;
    for (ProcessId p : f.correct()) all = all && sys.process(p).decided().has_value();
    if (!all) {
      ++c.undecided_runs;
      if (c.first.empty()) c.first = "seed " + std::to_string(seed) + ": a correct process did not decide";
    }
    for (const Step& st : sys.trace().steps)
      if (st.kind == OpKind::kDecide) c.max_decision_step = std::max<std::uint64_t>(c.max_decision_step, st.t);
  }
}

}  // namespace detail_cons

// Criterion 2, for the plain algorithm and for the leader-confirming variant
// used by the reduction.
inline SuiteResult suite_consensus(int depth = 14, int runs = 1000) {
  SuiteResult r;
  r.name = "consensus";
  SuiteTimer timer(r, 120);
  detail_cons::ConsensusCensus plain, stable;
  detail_cons::check_algorithm<ConsensusAutomaton>(depth, runs, plain);
  detail_cons::check_algorithm<StableLeaderConsensus>(depth, runs, stable);
  const std::uint64_t want_leaves = 8ull << depth;
  for (auto* c : {&plain, &stable}) {
    const std::string which = c == &plain ? "confirm-1: " : "confirm-8: ";
    if (c->exhaustive_violations || c->run_violations || c->undecided_runs) r.fail(which + c->first);
    if (c->leaves != want_leaves) r.fail(which + "exhaustive enumeration visited " + std::to_string(c->leaves) + " leaves");
  }
  auto m = [](const detail_cons::ConsensusCensus& c) {
    return nlohmann::json{{"leaves", c.leaves}, {"exhaustive_violations", c.exhaustive_violations}, {"runs", c.runs},
                          {"run_violations", c.run_violations}, {"undecided_runs", c.undecided_runs},
                          {"max_decision_step", c.max_decision_step}};
  };
  r.metrics = {{"depth", depth}, {"confirm_1", m(plain)}, {"confirm_8", m(stable)}};
  r.summary = "n=2 depth " + std::to_string(depth) + ": " + std::to_string(plain.leaves + stable.leaves) + " leaves, " +
              std::to_string(plain.exhaustive_violations + stable.exhaustive_violations) + " violations; " +
              std::to_string(plain.runs + stable.runs) + " fair n=3 runs, " +
              std::to_string(plain.run_violations + stable.run_violations) + " violations, " +
              std::to_string(plain.undecided_runs + stable.undecided_runs) + " undecided (latest decision at step " +
              std::to_string(std::max(plain.max_decision_step, stable.max_decision_step)) + ")";
  timer.finish();
  return r;
}

}  // namespace omega::suites
