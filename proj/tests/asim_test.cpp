#include <gtest/gtest.h>

#include "omega/asim/theorem1.hpp"
#include "omega/consensus/consensus.hpp"
#include "omega/core/system.hpp"
#include "omega/dag/comm.hpp"
#include "omega/detectors/omega.hpp"

using namespace omega;

namespace {

using State = AsimProcState<ConsensusAutomaton>;

Response<Word> value(Word w) {
  Response<Word> r;
  r.value = std::move(w);
  return r;
}
Response<Word> bit(int b) {
  Response<Word> r;
  r.bit = b;
  return r;
}

// Feeds the collect phase from a table of V register contents.
void collect(State& st, const Dag& g, const std::vector<Word>& vs) {
  for (const Word& w : vs) {
    ASSERT_EQ(st.pending(g).kind, OpKind::kRead);
    st.advance(value(w), g);
  }
}

State fresh(int self, int n, int input = 0) { return State(ProcessId(self), n, ConsensusAutomaton(ProcessId(self), n, input)); }

}  // namespace

TEST(AsimNext, EmptyCollectTakesFirstVertex) {
  Dag g(2);
  g.add_sample(1, 2, 7);
  State st = fresh(1, 2);
  collect(st, g, {{}, {}});
  auto op = st.pending(g);
  ASSERT_EQ(op.kind, OpKind::kCons);
  EXPECT_EQ(op.cons, (ConsKey{1, 1, 1}));
  EXPECT_EQ(op.bit, 1);
  st.advance(bit(1), g);
  op = st.pending(g);
  ASSERT_EQ(op.kind, OpKind::kWrite);
  EXPECT_EQ(op.value, (Word{1, 1}));
  st.advance({}, g);
  EXPECT_EQ(st.pending(g).kind, OpKind::kLocal);  // A's query, served from the vertex
  auto a = st.advance({}, g);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->op.kind, OpKind::kQuery);
  EXPECT_EQ(a->resp.detector, 2);
  EXPECT_EQ(a->vertex, (VertexId{1, 1}));
}

TEST(AsimNext, MissingVertexSpinsOnConsensus) {
  Dag g(2);
  State st = fresh(1, 2);
  collect(st, g, {{}, {}});
  auto op = st.pending(g);
  EXPECT_EQ(op.bit, 0);
  st.advance(bit(0), g);
  op = st.pending(g);
  ASSERT_EQ(op.kind, OpKind::kCons);
  EXPECT_EQ(op.cons, (ConsKey{1, 1, 2}));
  EXPECT_EQ(st.ell(), 1);
}

TEST(AsimNext, DominanceAdvancesEll) {
  Dag g(2);
  for (int s = 1; s <= 5; ++s) g.append(DagVertex{2, 1, s, static_cast<Time>(s), {0, s - 1}});
  g.append(DagVertex{1, 2, 1, 10, {0, 4}});  // no edge from [p2,5]
  g.append(DagVertex{1, 1, 2, 11, {1, 5}});  // edge from [p2,5]
  State st = fresh(1, 2);
  collect(st, g, {{}, {2, 5}});
  st.advance(bit(1), g);
  EXPECT_EQ(st.ell(), 2);
  EXPECT_TRUE(st.waiting());
  EXPECT_EQ(st.pending(g).cons, (ConsKey{1, 2, 1}));
  st.advance(bit(1), g);
  EXPECT_EQ(st.pending(g).value, (Word{1, 2}));
}

TEST(AsimNext, MalformedCollectIsModelError) {
  Dag g(2);
  State st = fresh(1, 2);
  try {
    st.advance(value({7}), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModelError);
  }
}

TEST(AsimNext, ConsOneWithoutVertexCannotAdvance) {
  Dag g(2);
  State st = fresh(1, 2);
  collect(st, g, {{}, {}});
  EXPECT_FALSE(st.can_advance(bit(1), g));
  EXPECT_TRUE(st.can_advance(bit(0), g));
}

namespace {

struct DagRun {
  FailurePattern f;
  FDHistory h;
  std::shared_ptr<const Dag> g;
};

DagRun build_dag(std::uint64_t seed, std::optional<std::pair<int, Time>> crash, Time budget) {
  FailurePattern f(3);
  if (crash) f.crash(ProcessId(crash->first), crash->second);
  auto h = make_omega(f, {200, f.correct().front(), seed});
  System<CommProcess, Dag> sys(f, h, make_comm_processes(3, false));
  sys.set_recording(false);
  Scheduler s(3, SchedMode::kSeededRandom, seed);
  run(sys, s, budget);
  Dag all(3);
  for (int p = 1; p <= 3; ++p) all.unite(sys.process(ProcessId(p)).comm().local());
  return {f, h, std::make_shared<const Dag>(std::move(all))};
}

struct AsimRun {
  std::shared_ptr<std::vector<SimAStep>> steps = std::make_shared<std::vector<SimAStep>>();
  std::vector<std::optional<int>> decided;
};

AsimRun run_asim(const DagRun& d, const FailurePattern& fp, std::vector<int> inputs, std::uint64_t seed, std::uint64_t budget) {
  AsimRun out;
  System<AsimProcess<ConsensusAutomaton>> sys(fp, d.h, make_asim_processes<ConsensusAutomaton>(inputs, d.g, out.steps),
                                              InitialState{inputs});
  sys.set_recording(false);
  Scheduler s(3, SchedMode::kSeededRandom, seed + 1000);
  run(sys, s, budget);
  for (int p = 1; p <= 3; ++p) out.decided.push_back(sys.process(ProcessId(p)).state().inner().decided());
  return out;
}

}  // namespace

TEST(Theorem1, FairRunPassesAllChecks) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DagRun d = build_dag(seed, std::nullopt, 20000);
    std::vector<int> inputs{0, 1, static_cast<int>(seed & 1)};
    AsimRun r = run_asim(d, d.f, inputs, seed, 5000);
    Theorem1Input in{r.steps.get(), inputs, &d.f, &d.h, d.g.get(), &d.f, 60};
    auto rep = validate_theorem1<ConsensusAutomaton>(in);
    EXPECT_TRUE(rep.ok()) << rep.detail;
    for (const auto& dec : r.decided) EXPECT_TRUE(dec.has_value());
  }
}

TEST(Theorem1, SwappedDetectorValueDiverges) {
  DagRun d = build_dag(3, std::nullopt, 20000);
  std::vector<int> inputs{0, 1, 1};
  AsimRun r = run_asim(d, d.f, inputs, 3, 3000);
  auto steps = *r.steps;
  std::size_t k = 0;
  while (steps[k].op.kind != OpKind::kQuery) ++k;
  steps[k].resp.detector = steps[k].resp.detector % 3 + 1;
  Theorem1Input in{&steps, inputs, &d.f, &d.h, d.g.get(), nullptr, 0};
  auto rep = validate_theorem1<ConsensusAutomaton>(in);
  EXPECT_FALSE(rep.legal);
  EXPECT_EQ(rep.first_divergence, k);
}

TEST(Theorem1, StarvedSimulatedProcessLeavesTail) {
  DagRun d = build_dag(5, std::nullopt, 20000);
  FailurePattern fp(3);
  fp.crash(ProcessId(3), 500);
  std::vector<int> inputs{1, 0, 1};
  AsimRun r = run_asim(d, fp, inputs, 5, 5000);
  Theorem1Input in{r.steps.get(), inputs, &d.f, &d.h, d.g.get(), &fp, 60};
  auto rep = validate_theorem1<ConsensusAutomaton>(in);
  EXPECT_TRUE(rep.ok()) << rep.detail;
  EXPECT_EQ(rep.participants, (std::set<ProcessId>{ProcessId(1), ProcessId(2)}));
}

TEST(Theorem1, FaultyInDagBlocksSimulatedProcess) {
  DagRun d = build_dag(9, std::make_pair(2, Time{400}), 20000);
  std::vector<int> inputs{1, 1, 0};
  AsimRun r = run_asim(d, FailurePattern(3), inputs, 9, 6000);
  FailurePattern all_correct(3);
  Theorem1Input in{r.steps.get(), inputs, &d.f, &d.h, d.g.get(), &all_correct, 60};
  auto rep = validate_theorem1<ConsensusAutomaton>(in);
  EXPECT_TRUE(rep.ok()) << rep.detail;
  EXPECT_EQ(rep.participants, (std::set<ProcessId>{ProcessId(1), ProcessId(3)}));
}

TEST(Theorem1, DeterministicReplay) {
  DagRun d = build_dag(2, std::nullopt, 10000);
  auto a = run_asim(d, d.f, {0, 1, 0}, 2, 2000);
  auto b = run_asim(d, d.f, {0, 1, 0}, 2, 2000);
  EXPECT_EQ(*a.steps, *b.steps);
}
