#pragma once

#include <random>
#include <string>
#include <vector>

#include "omega/consensus/consensus.hpp"
#include "omega/extractor/explorer.hpp"
#include "omega/suites/dag_sim.hpp"

namespace omega::suites {

// Criterion 5: alternating simulators make every simulated process grow; a
// simulator stopped mid-agreement blocks at most one simulated process.
template <Automaton A = StableLeaderConsensus>
SuiteResult suite_bg(std::uint64_t short_run = 1'000, std::uint64_t long_run = 10'000) {
  SuiteResult r;
  r.name = "bg";
  SuiteTimer timer(r, 60);
  auto d = detail_t1::fair_dag(7, 300, 20'000);
  const Dag& g = *d.g;

  ConsRegistry cons;
  BGSimulation<A> bg(3, {0, 1});
  std::vector<std::uint64_t> at_short;
  for (std::uint64_t k = 0; k < long_run; ++k) {
    if (k == short_run) at_short = bg.counts();
    bg.macro_step(static_cast<int>(k % 2), g, cons);
  }
  const auto at_long = bg.counts();
  for (std::size_t i = 0; i < 3; ++i) {
    if (at_short[i] < 1) r.fail("p'" + std::to_string(i + 1) + " took no step in " + std::to_string(short_run) + " macro-steps");
    if (at_long[i] <= at_short[i]) r.fail("p'" + std::to_string(i + 1) + " did not grow between the two budgets");
  }
  if (bg.safety_violations()) r.fail("alternating run violated consensus safety");

  // Stop q2 at every point where it is mid-agreement on p'_3, then let q1 run.
  int stalls = 0, worst_blocked = 0;
  ConsRegistry cons2;
  BGSimulation<A> base(3, {1, 0});
  for (std::uint64_t k = 0; k < 600 && stalls < 40; ++k) {
    base.macro_step(static_cast<int>(k % 2), g, cons2);
    if (!(base.mid(1) && *base.mid(1) == 2)) continue;
    ++stalls;
    BGSimulation<A> solo = base;
    ConsRegistry c3 = cons2;
    for (std::uint64_t j = 0; j < 2'000; ++j) solo.macro_step(0, g, c3);
    const auto before = base.counts();
    const auto after = solo.counts();
    worst_blocked = std::max(worst_blocked, solo.blocked_count());
    if (solo.blocked_count() > 1) r.fail("stall at macro-step " + std::to_string(k) + " blocks " + std::to_string(solo.blocked_count()));
    if (after[2] != before[2]) r.fail("p'3 advanced although its agreement was stalled (macro-step " + std::to_string(k) + ")");
    for (std::size_t i = 0; i < 2; ++i)
      if (after[i] <= before[i]) r.fail("p'" + std::to_string(i + 1) + " starved behind the stall at macro-step " + std::to_string(k));
  }
  if (stalls == 0) r.fail("never caught q2 mid-agreement on p'3");

  r.metrics = {{"counts_short", at_short}, {"counts_long", at_long}, {"stall_points", stalls}, {"worst_blocked", worst_blocked}};
  r.summary = "counts at " + std::to_string(short_run) + ": " + nlohmann::json(at_short).dump() + ", at " +
              std::to_string(long_run) + ": " + nlohmann::json(at_long).dump() + "; " + std::to_string(stalls) +
              " stall points, at most " + std::to_string(worst_blocked) + " blocked";
  timer.finish();
  return r;
}

// Criterion 6: replay is a pure function of (J, σ) and the shared objects,
// and schedules of extensions extend.
template <Automaton A = StableLeaderConsensus>
SuiteResult suite_replay(int samples = 200, std::size_t max_len = 200) {
  SuiteResult r;
  r.name = "replay";
  SuiteTimer timer(r, 60);
  auto d = detail_t1::fair_dag(11, 300, 20'000);
  const Dag& g = *d.g;
  std::mt19937_64 rng(2024);
  ConsRegistry shared;
  std::uint64_t mismatches = 0, prefix_failures = 0, symbols = 0;
  auto same = [](const ReplayResult<A>& a, const ReplayResult<A>& b) {
    if (!(a.sch() == b.sch()) || a.decided() != b.decided() || a.stalled != b.stalled) return false;
    if (a.st.counts() != b.st.counts() || a.st.adopted_inputs() != b.st.adopted_inputs()) return false;
    if (a.st.linearized_a_steps() != b.st.linearized_a_steps()) return false;
    for (int i = 1; i <= 3; ++i)
      if (!(a.st.log(i) == b.st.log(i))) return false;
    return true;
  };
  for (int k = 0; k < samples; ++k) {
    std::vector<std::uint8_t> sigma(rng() % (max_len + 1));
    for (auto& c : sigma) c = static_cast<std::uint8_t>(1 + (rng() & 1));
    symbols += sigma.size();
    const std::array<int, 2> J{static_cast<int>(rng() & 1), static_cast<int>(rng() & 1)};
    auto a = replay<A>(3, J, sigma, g, shared, true);
    auto b = replay<A>(3, J, sigma, g, shared, true);
    // A second replayer: its own copy of the view, same shared objects.
    const Dag other_view = g;
    auto c = replay<A>(3, J, sigma, other_view, shared, true);
    if (!same(a, b) || !same(a, c)) {
      ++mismatches;
      r.fail("sample " + std::to_string(k) + ": replays differ");
    }
    for (std::uint8_t q : {1, 2}) {
      auto longer = sigma;
      longer.push_back(q);
      auto e = replay<A>(3, J, longer, g, shared);
      bool prefix = e.sch().size() >= a.sch().size();
      for (std::size_t i = 0; prefix && i < a.sch().size(); ++i) prefix = e.sch()[i] == a.sch()[i];
      if (!prefix) {
        ++prefix_failures;
        r.fail("sample " + std::to_string(k) + ": SCH(J, σ) is not a prefix of SCH(J, σ·q" + std::to_string(q) + ")");
      }
    }
  }
  r.metrics = {{"samples", samples}, {"symbols", symbols}, {"mismatches", mismatches}, {"prefix_failures", prefix_failures}};
  r.summary = std::to_string(samples) + " (J, σ) samples, " + std::to_string(symbols) + " symbols; " +
              std::to_string(mismatches) + " replay mismatches, " + std::to_string(prefix_failures) + " prefix failures";
  timer.finish();
  return r;
}

}  // namespace omega::suites
