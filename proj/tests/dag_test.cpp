#include <gtest/gtest.h>

#include <set>

#include "omega/dag/comm.hpp"
#include "omega/dag/json.hpp"
#include "omega/dag/properties.hpp"
#include "omega/detectors/omega.hpp"

using namespace omega;

namespace {

using Edge = std::pair<VertexId, VertexId>;
using CommSystem = System<CommProcess, Dag>;

std::set<Edge> edge_set(const Dag& g) {
  auto e = g.edges();
  return {e.begin(), e.end()};
}

// Explicit-edge oracle: transitive closure, acyclicity, same-process chains.
::testing::AssertionResult structurally_sound(const Dag& g) {
  auto es = edge_set(g);
  std::set<VertexId> vs;
  for (const auto& v : g.vertices()) vs.insert(v.id());
  for (const auto& [a, b] : es) {
    if (a == b) return ::testing::AssertionFailure() << "self loop";
    if (es.count({b, a})) return ::testing::AssertionFailure() << "cycle";
    for (const auto& [c, d] : es)
      if (c == b && !es.count({a, d})) return ::testing::AssertionFailure() << "not transitive";
  }
  for (const auto& a : vs)
    for (const auto& b : vs)
      if (a.proc == b.proc && a.seq < b.seq && !es.count({a, b}))
        return ::testing::AssertionFailure() << "missing chain edge";
  return ::testing::AssertionSuccess();
}

FDHistory by_time(int n) {
  return FDHistory(n, "test", [n](ProcessId, Time t) { return static_cast<int>(t % static_cast<Time>(n)) + 1; });
}

CommSystem comm_system(const FailurePattern& f, const FDHistory& h) {
  return CommSystem(f, h, make_comm_processes(f.n()));
}

}  // namespace

TEST(DagUnion, EmptyWithEmpty) {
  EXPECT_TRUE(dag_union(Dag(3), Dag(3)).empty());
  EXPECT_TRUE(dag_union(Dag{}, Dag{}).empty());
}

TEST(DagUnion, Idempotent) {
  Dag g(2);
  g.add_sample(1, 2, 0);
  g.add_sample(2, 1, 1);
  g.add_sample(1, 1, 2);
  EXPECT_EQ(dag_union(g, g), g);
}

TEST(DagUnion, ChainsSharingPrefix) {
  Dag base(3);
  base.add_sample(1, 1, 0);
  base.add_sample(2, 2, 1);
  Dag a = base, b = base;
  a.add_sample(1, 3, 2);
  a.add_sample(1, 1, 4);
  b.add_sample(2, 1, 3);
  b.add_sample(3, 1, 5);
  Dag u = dag_union(a, b);
  std::set<Edge> expect = edge_set(a);
  for (const auto& e : edge_set(b)) expect.insert(e);
  EXPECT_EQ(edge_set(u), expect);
  EXPECT_TRUE(structurally_sound(u));
  EXPECT_EQ(u.size(), 6u);
}

TEST(DagUnion, ConflictingVerticesAreCorruption) {
  Dag a(2), b(2);
  a.add_sample(1, 1, 0);
  b.add_sample(1, 2, 0);
  try {
    dag_union(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruption);
  }
}

TEST(CommStep, FirstStepSingleVertex) {
  CommSystem sys = comm_system(FailurePattern(2), FDHistory(2, "c", [](ProcessId, Time) { return 2; }));
  comm_step(sys, ProcessId(1));
  const Dag& g = sys.process(ProcessId(1)).comm().local();
  ASSERT_EQ(g.size(), 1u);
  const DagVertex* v = g.find(1, 1);
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->d, 2);
  EXPECT_TRUE(g.edges().empty());
  EXPECT_EQ(sys.trace().steps.size(), 4u);  // n reads, query, write
  EXPECT_EQ(sys.memory().read(CommComponent::dag_reg(1)), g);
}

TEST(CommStep, SecondStepChainsOwnVertices) {
  CommSystem sys = comm_system(FailurePattern(2), by_time(2));
  comm_step(sys, ProcessId(1));
  comm_step(sys, ProcessId(1));
  const Dag& g = sys.process(ProcessId(1)).comm().local();
  EXPECT_TRUE(g.has_edge({1, 1}, {1, 2}));
  EXPECT_FALSE(g.has_edge({1, 2}, {1, 1}));
}

TEST(CommStep, ThreeStepSchedule) {
  CommSystem sys = comm_system(FailurePattern(2), by_time(2));
  comm_step(sys, ProcessId(1));
  comm_step(sys, ProcessId(2));
  comm_step(sys, ProcessId(1));
  const Dag& g = sys.process(ProcessId(1)).comm().local();
  std::set<Edge> expect{{{1, 1}, {2, 1}}, {{1, 1}, {1, 2}}, {{2, 1}, {1, 2}}};
  EXPECT_EQ(edge_set(g), expect);
  // Sample times: p1's query at t=2, p2's at t=6, p1's second at t=10.
  EXPECT_EQ(g.find(1, 1)->sample_time, 2u);
  EXPECT_EQ(g.find(2, 1)->sample_time, 6u);
  EXPECT_EQ(g.find(1, 2)->sample_time, 10u);
}

TEST(CommStep, StructureHoldsAfterEveryWrite) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    FailurePattern f(3);
    CommSystem sys = comm_system(f, by_time(3));
    Scheduler s(3, SchedMode::kSeededRandom, seed);
    run(sys, s, 300);
    for (int p = 1; p <= 3; ++p)
      for (const auto& [t, g] : sys.process(ProcessId(p)).comm().snapshots()) ASSERT_TRUE(structurally_sound(g)) << t;
  }
}

TEST(DagProperties, OneIterationEachPasses) {
  FailurePattern f(3);
  auto h = by_time(3);
  CommSystem sys = comm_system(f, h);
  for (int p = 1; p <= 3; ++p) comm_step(sys, ProcessId(p));
  auto rep = check_dag_properties(collect_timeline(sys), f, h);
  EXPECT_TRUE(rep.structural_ok());
  EXPECT_EQ(rep.vertices, 3u);
}

TEST(DagProperties, InversionFlagged) {
  FailurePattern f(2);
  FDHistory h(2, "c", [](ProcessId, Time) { return 1; });
  Dag g(2);
  g.append(DagVertex{2, 1, 1, 9, {0, 0}});
  g.append(DagVertex{1, 1, 1, 4, {0, 1}});  // edge [p2,1] -> [p1,1] but 9 > 4
  DagTimeline tl{{{10, g}}, {}};
  auto rep = check_dag_properties(tl, f, h);
  EXPECT_EQ(rep.order_inversion, 1u);
  EXPECT_FALSE(rep.structural_ok());
}

TEST(DagProperties, WrongSampleFlagged) {
  FailurePattern f(2);
  f.crash(ProcessId(2), 3);
  FDHistory h(2, "c", [](ProcessId, Time) { return 1; });
  Dag g(2);
  g.append(DagVertex{1, 2, 1, 0, {0, 0}});  // history says 1
  g.append(DagVertex{2, 1, 1, 5, {1, 0}});  // p2 crashed at 3
  auto rep = check_dag_properties({{{6, g}}, {}}, f, h);
  EXPECT_EQ(rep.sample_mismatch, 2u);
}

TEST(DagProperties, MissingTransitiveEdgeFlagged) {
  FailurePattern f(3);
  FDHistory h(3, "c", [](ProcessId, Time) { return 1; });
  Dag g(3);
  g.append(DagVertex{1, 1, 1, 0, {0, 0, 0}});
  g.append(DagVertex{2, 1, 1, 1, {1, 0, 0}});
  g.append(DagVertex{3, 1, 1, 2, {0, 1, 0}});  // sees p2/1 but not p1/1
  auto rep = check_dag_properties({{{3, g}}, {}, {}}, f, h);
  EXPECT_GT(rep.not_closed, 0u);
}

TEST(DagProperties, FairRunDischargesLiveness) {
  FailurePattern f(3);
  auto h = make_omega(f, {500, ProcessId(1), 3});
  CommSystem sys = comm_system(f, h);
  Scheduler s(3, SchedMode::kSeededRandom, 17);
  run(sys, s, 5000);
  auto rep = check_dag_properties(collect_timeline(sys), f, h, {5000, 1000});
  EXPECT_TRUE(rep.ok(true)) << (rep.messages.empty() ? "" : rep.messages.front());
  EXPECT_EQ(rep.p4_pending_old, 0u);
  EXPECT_EQ(rep.p5_pending_old, 0u);
  EXPECT_TRUE(rep.agree_on_intersection);
}

TEST(DagProperties, FaultyProcessStopsGrowing) {
  FailurePattern f(4);
  f.crash(ProcessId(4), 300);
  auto h = make_omega(f, {100, ProcessId(2), 1});
  CommSystem sys = comm_system(f, h);
  Scheduler s(4, SchedMode::kSeededRandom, 2);
  run(sys, s, 5000);
  auto rep = check_dag_properties(collect_timeline(sys), f, h, {5000, 1000});
  EXPECT_TRUE(rep.ok(true)) << (rep.messages.empty() ? "" : rep.messages.front());
  EXPECT_TRUE(rep.correct_outgrow_faulty);
}

TEST(DagJson, RoundTrip) {
  FailurePattern f(3);
  CommSystem sys = comm_system(f, by_time(3));
  Scheduler s(3, SchedMode::kRoundRobin);
  run(sys, s, 60);
  const Dag& g = sys.process(ProcessId(2)).comm().local();
  auto j = dag_to_json(g);
  EXPECT_EQ(j["vertices"].size(), g.size());
  EXPECT_EQ(j["edges"].size(), g.edges().size());
  EXPECT_EQ(dag_from_json(j, 3), g);
}

TEST(DagJson, GoldenTwoVertices) {
  Dag g(2);
  g.add_sample(1, 2, 0);
  g.add_sample(2, 1, 3);
  EXPECT_EQ(dag_to_json(g).dump(),
            R"({"edges":[[0,1]],"vertices":[{"d":2,"p":1,"seq":1,"t":0},{"d":1,"p":2,"seq":1,"t":3}]})");
}
