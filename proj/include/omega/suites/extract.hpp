#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "omega/consensus/consensus.hpp"
#include "omega/extractor/reduction.hpp"
#include "omega/suites/common.hpp"

namespace omega::suites {

namespace detail_extract {

// Deepest σ explored by each process; points at where the exploration sat
// when a run failed.
inline std::string deepest_points(const ReductionResult& res) {
  std::string out;
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    std::size_t best = 0;
    for (const auto& pt : res.points[i]) best = std::max(best, pt.sigma.size());
    if (!out.empty()) out += ", ";
    out += "p" + std::to_string(i + 1) + " |σ|<=" + std::to_string(best) + " over " +
           std::to_string(res.points[i].size()) + " points";
  }
  return out;
}

}  // namespace detail_extract

// Criterion 7: the extracted Ω-outputs converge to one correct process.
template <Automaton A = StableLeaderConsensus>
SuiteResult suite_extract(int seeds = 50, std::uint64_t budget = 1'000'000) {
  SuiteResult r;
  r.name = "extract";
  SuiteTimer timer(r, 600);
  int verdicts = 0, unsafe = 0, lemma1_failed = 0, frozen = 0;
  std::vector<int> leaders(3, 0);
  std::string first_bad;
  for (int seed = 1; seed <= seeds; ++seed) {
    ReductionConfig c;
    c.crashes = {{3, 100}};
    c.leader = 1 + seed % 2;
    c.seed = static_cast<std::uint64_t>(seed);
    c.budget = budget;
    auto res = run_reduction<A>(c);
    if (res.verdict.ok) {
      ++verdicts;
      ++leaders[static_cast<std::size_t>(res.verdict.leader->slot())];
    }
    unsafe += res.safety_violations > 0;
    lemma1_failed += !res.lemma1.ok;
    frozen += res.frozen_ok;
    const bool bad = !res.verdict.ok || res.safety_violations || !res.lemma1.ok;
    if (bad && first_bad.empty()) {
      first_bad = "seed " + std::to_string(seed) + ": " +
                  (!res.verdict.ok ? res.verdict.reason : !res.lemma1.ok ? res.lemma1.reason : "safety violation") +
                  "; " + detail_extract::deepest_points(res);
    }
  }
  if (verdicts * 100 < 95 * seeds) r.fail(std::to_string(verdicts) + "/" + std::to_string(seeds) + " runs stabilized; " + first_bad);
  if (unsafe) r.fail(std::to_string(unsafe) + " runs explored a simulated run violating consensus; " + first_bad);
  if (lemma1_failed) r.fail(std::to_string(lemma1_failed) + " runs changed probes in the tail; " + first_bad);
  r.metrics = {{"seeds", seeds}, {"budget", budget},          {"stabilized", verdicts}, {"unsafe", unsafe},
               {"lemma1_failed", lemma1_failed}, {"frozen_ok", frozen}, {"elected", leaders}};
  r.summary = std::to_string(verdicts) + "/" + std::to_string(seeds) + " runs stabilized on a correct leader (elected p1/p2/p3: " +
              std::to_string(leaders[0]) + "/" + std::to_string(leaders[1]) + "/" + std::to_string(leaders[2]) + "), " +
              std::to_string(unsafe) + " unsafe, " + std::to_string(lemma1_failed) + " Lemma 1 failures, " +
              std::to_string(frozen) + " with one frozen simulated process";
  timer.finish();
  return r;
}

}  // namespace omega::suites
