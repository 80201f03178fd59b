#pragma once

#include <memory>
#include <string>
#include <vector>

#include "omega/asim/theorem1.hpp"
#include "omega/consensus/consensus.hpp"
#include "omega/dag/comm.hpp"
#include "omega/dag/properties.hpp"
#include "omega/detectors/omega.hpp"
#include "omega/suites/common.hpp"

namespace omega::suites {

// Criterion 3: seeded fair runs of the DAG-building loop.
inline SuiteResult suite_dag(int runs = 100, Time budget = 5000, Time horizon = 1000) {
  SuiteResult r;
  r.name = "dag";
  SuiteTimer timer(r, 60);
  std::uint64_t failed = 0, snapshots = 0, vertices = 0, with_crash = 0;
  for (int seed = 0; seed < runs; ++seed) {
    const auto s = static_cast<std::uint64_t>(seed);
    const int n = 3 + seed % 3;
    FailurePattern f(n);
    if (seed % 2) {
      f.crash(ProcessId(n - seed % 2), 100 + 37 * s % 2000);
      ++with_crash;
    }
    auto h = make_omega(f, {s * 53 % 2000, f.correct()[s % f.correct().size()], s});
    System<CommProcess, Dag> sys(f, h, make_comm_processes(n, true));
    sys.set_recording(false);
    Scheduler sched(n, SchedMode::kSeededRandom, s);
    run(sys, sched, budget);
    auto rep = check_dag_properties(collect_timeline(sys), f, h, {budget, horizon});
    snapshots += rep.snapshots;
    vertices += rep.vertices;
    const bool ok = rep.ok(true) && rep.p4_pending_old == 0 && rep.p5_pending_old == 0 && rep.correct_outgrow_faulty;
    if (!ok) {
      ++failed;
      r.fail("seed " + std::to_string(seed) + ": " + (rep.messages.empty() ? std::string("property check failed") : rep.messages.front()));
    }
  }
  r.metrics = {{"runs", runs}, {"failed", failed}, {"snapshots", snapshots}, {"vertices", vertices}, {"runs_with_crash", with_crash}};
  r.summary = std::to_string(runs) + " runs (n in 3..5, " + std::to_string(with_crash) + " with a crash), " +
              std::to_string(snapshots) + " snapshots checked, " + std::to_string(failed) + " failed";
  timer.finish();
  return r;
}

namespace detail_t1 {

struct DagRun {
  FailurePattern f;
  FDHistory h;
  std::shared_ptr<const Dag> g;
};

inline DagRun fair_dag(std::uint64_t seed, Time t_stab, Time budget) {
  FailurePattern f(3);
  auto h = make_omega(f, {t_stab, ProcessId(static_cast<int>(seed % 3) + 1), seed});
  System<CommProcess, Dag> sys(f, h, make_comm_processes(3, false));
  sys.set_recording(false);
  Scheduler sched(3, SchedMode::kSeededRandom, seed);
  run(sys, sched, budget);
  Dag all(3);
  for (int p = 1; p <= 3; ++p) all.unite(sys.process(ProcessId(p)).comm().local());
  return {f, h, std::make_shared<const Dag>(std::move(all))};
}

template <Automaton A>
struct SimRun {
  std::shared_ptr<std::vector<SimAStep>> steps = std::make_shared<std::vector<SimAStep>>();
  std::vector<bool> decided;
};

template <Automaton A>
SimRun<A> run_asim(const DagRun& d, const FailurePattern& fp, const std::vector<int>& inputs, std::uint64_t seed,
                   std::uint64_t budget) {
  SimRun<A> out;
  System<AsimProcess<A>> sys(fp, d.h, make_asim_processes<A>(inputs, d.g, out.steps), InitialState{inputs});
  sys.set_recording(false);
  Scheduler sched(3, SchedMode::kSeededRandom, seed + 1000);
  run(sys, sched, budget);
  for (int p = 1; p <= 3; ++p) out.decided.push_back(sys.process(ProcessId(p)).state().inner().decided().has_value());
  return out;
}

}  // namespace detail_t1

// Criterion 4: A' over fair-run DAGs; fair runs must decide, and a simulated
// process starved in F' must vanish from the tail.
template <Automaton A = StableLeaderConsensus>
SuiteResult suite_theorem1(int runs = 100, Time dag_budget = 20'000, std::uint64_t sim_budget = 8'000,
                           std::size_t tail = 60) {
  SuiteResult r;
  r.name = "theorem1";
  SuiteTimer timer(r, 120);
  std::uint64_t illegal = 0, temporal = 0, undecided = 0, participation = 0, a_steps = 0;
  for (int seed = 0; seed < runs; ++seed) {
    const auto s = static_cast<std::uint64_t>(seed);
    auto d = detail_t1::fair_dag(s, s * 7 % 400, dag_budget);
    std::vector<int> inputs{seed & 1, (seed >> 1) & 1, (seed >> 2) & 1};
    auto check = [&](const FailurePattern& fp, const char* label, bool want_decisions) {
      auto sim = detail_t1::run_asim<A>(d, fp, inputs, s, sim_budget);
      a_steps += sim.steps->size();
      Theorem1Input in{sim.steps.get(), inputs, &d.f, &d.h, d.g.get(), &fp, tail};
      auto rep = validate_theorem1<A>(in);
      const std::string where = std::string(label) + " seed " + std::to_string(seed) + ": ";
      if (!rep.legal) {
        ++illegal;
        r.fail(where + rep.detail);
      }
      if (!rep.temporal_ok) {
        ++temporal;
        r.fail(where + std::to_string(rep.temporal_violations) + " temporal violations");
      }
      if (!rep.participation_ok) {
        ++participation;
        r.fail(where + "tail participants differ from correct(F) ∩ correct(F')");
      }
      if (want_decisions) {
        for (ProcessId p : fp.correct()) {
          if (!sim.decided[static_cast<std::size_t>(p.slot())]) {
            ++undecided;
            r.fail(where + to_string(p) + " did not decide");
            break;
          }
        }
      }
    };
    check(d.f, "fair", true);
    FailurePattern starved(3);
    starved.crash(ProcessId(3), 500);
    check(starved, "p3 starved", false);
  }
  r.metrics = {{"runs", runs},         {"a_steps", a_steps},       {"illegal", illegal}, {"temporal_violations", temporal},
               {"undecided", undecided}, {"participation", participation}};
  r.summary = std::to_string(2 * runs) + " simulated runs, " + std::to_string(a_steps) + " A steps replayed; " +
              std::to_string(illegal) + " illegal, " + std::to_string(temporal) + " temporal, " + std::to_string(undecided) +
              " undecided, " + std::to_string(participation) + " participation failures";
  timer.finish();
  return r;
}

}  // namespace omega::suites
