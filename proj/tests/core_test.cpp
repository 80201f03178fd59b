#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "omega/core/analysis.hpp"
#include "omega/core/system.hpp"

using namespace omega;

namespace {

// Executes a fixed op list, then local steps forever.
struct Scripted {
  Scripted() = default;
  Scripted(std::vector<OpRequest<Word>> o) : ops(std::move(o)) {}

  std::vector<OpRequest<Word>> ops;
  std::size_t next = 0;
  std::vector<Response<Word>> seen;

  OpRequest<Word> pending() const { return next < ops.size() ? ops[next] : OpRequest<Word>::local(); }
  void advance(const Response<Word>& r) {
    seen.push_back(r);
    ++next;
  }
};

FDHistory const_history(int n, int v) {
  return FDHistory(n, "const", [v](ProcessId, Time) { return v; });
}

RegKey reg(int owner, std::int64_t i = 0) { return RegKey{owner, 'R', i}; }

// Random read/write/query scripts over a few registers.
std::vector<Scripted> random_scripts(int n, std::mt19937_64& rng, int len) {
  std::vector<Scripted> out(static_cast<std::size_t>(n));
  for (int p = 1; p <= n; ++p) {
    for (int i = 0; i < len; ++i) {
      switch (rng() % 3) {
        case 0: out[p - 1].ops.push_back(OpRequest<Word>::write(reg(p, static_cast<int>(rng() % 2)), {static_cast<std::int64_t>(rng() % 100)})); break;
        case 1: out[p - 1].ops.push_back(OpRequest<Word>::read(reg(static_cast<int>(rng() % n) + 1, static_cast<int>(rng() % 2)))); break;
        default: out[p - 1].ops.push_back(OpRequest<Word>::query()); break;
      }
    }
  }
  return out;
}

}  // namespace

TEST(ExecuteStep, WriteSetsRegister) {
  Scripted p1{{OpRequest<Word>::write(reg(1), {42})}};
  System<Scripted> sys(FailurePattern(2), const_history(2, 1), {p1, Scripted{}});
  const Step& s = sys.execute_step(ProcessId(1));
  EXPECT_EQ(s.kind, OpKind::kWrite);
  EXPECT_EQ(s.proc, ProcessId(1));
  EXPECT_EQ(sys.memory().read(reg(1)), Word{42});
}

TEST(ExecuteStep, QueryCarriesHistoryValue) {
  FDHistory h(2, "test", [](ProcessId p, Time t) { return static_cast<int>(p.index * 100 + t); });
  Scripted q{{OpRequest<Word>::query()}};
  System<Scripted> sys(FailurePattern(2), h, {Scripted{}, q});
  sys.execute_step(ProcessId(1));
  sys.execute_step(ProcessId(1));
  const Step& s = sys.execute_step(ProcessId(2));
  ASSERT_TRUE(s.fd.has_value());
  EXPECT_EQ(*s.fd, 202);
  EXPECT_EQ(s.t, 2u);
}

TEST(ExecuteStep, TwoWritesThenReadSeesSecond) {
  Scripted p1{{OpRequest<Word>::write(reg(1), {1}), OpRequest<Word>::write(reg(1), {2})}};
  Scripted p2{{OpRequest<Word>::read(reg(1))}};
  System<Scripted> sys(FailurePattern(2), const_history(2, 1), {p1, p2});
  sys.execute_step(ProcessId(1));
  sys.execute_step(ProcessId(1));
  const Step& s = sys.execute_step(ProcessId(2));
  EXPECT_EQ(s.value, Word{2});
  EXPECT_EQ(sys.process(ProcessId(2)).seen.at(0).value, Word{2});
}

TEST(ExecuteStep, CrashedProcessIsRejected) {
  FailurePattern f(2);
  f.crash(ProcessId(2), 1);
  System<Scripted> sys(f, const_history(2, 1), {Scripted{}, Scripted{}});
  sys.execute_step(ProcessId(2));
  try {
    sys.execute_step(ProcessId(2));
    FAIL() << "expected scheduler-bug";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchedulerBug);
  }
}

TEST(ExecuteStep, ForeignWriteIsModelViolation) {
  Scripted p1{{OpRequest<Word>::write(reg(2), {1})}};
  System<Scripted> sys(FailurePattern(2), const_history(2, 1), {p1, Scripted{}});
  try {
    sys.execute_step(ProcessId(1));
    FAIL() << "expected model-violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModelViolation);
  }
}

TEST(Run, ZeroBudgetIsEmpty) {
  System<Scripted> sys(FailurePattern(2), const_history(2, 1), {Scripted{}, Scripted{}});
  Scheduler sched(2, SchedMode::kRoundRobin);
  EXPECT_TRUE(run(sys, sched, 0).steps.empty());
}

TEST(Run, RoundRobinAlternates) {
  System<Scripted> sys(FailurePattern(2), const_history(2, 1), {Scripted{}, Scripted{}});
  Scheduler sched(2, SchedMode::kRoundRobin);
  const Trace& tr = run(sys, sched, 4);
  ASSERT_EQ(tr.steps.size(), 4u);
  std::vector<int> who;
  for (const auto& s : tr.steps) who.push_back(s.proc.index);
  EXPECT_EQ(who, (std::vector<int>{1, 2, 1, 2}));
}

TEST(Run, SameSeedSameTrace) {
  auto once = [] {
    std::mt19937_64 rng(5);
    FailurePattern f(3);
    f.crash(ProcessId(3), 40);
    System<Scripted> sys(f, const_history(3, 2), random_scripts(3, rng, 40));
    Scheduler sched(3, SchedMode::kSeededRandom, 99);
    return run(sys, sched, 120).steps;
  };
  EXPECT_EQ(once(), once());
}

TEST(Scheduler, RoundRobinNextAfterLast) {
  Scheduler s(3, SchedMode::kRoundRobin);
  FailurePattern f(3);
  EXPECT_EQ(s.next(f, 0), ProcessId(1));
  EXPECT_EQ(s.next(f, 1), ProcessId(2));
}

TEST(Scheduler, CrashedNeverReturned) {
  FailurePattern f(3);
  f.crash(ProcessId(2), 5);
  Scheduler s(3, SchedMode::kSeededRandom, 3);
  for (Time t = 0; t < 500; ++t) {
    ProcessId p = s.next(f, t);
    if (t >= 5) {
      EXPECT_NE(p, ProcessId(2));
    }
  }
}

TEST(Scheduler, NoLiveProcess) {
  // Valid patterns always keep a correct process; an empty one has none live.
  Scheduler s(2, SchedMode::kRoundRobin);
  try {
    s.next(FailurePattern{}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoLiveProcess);
  }
}

TEST(Scheduler, SeededRandomGapAtMostWindow) {
  for (int n = 2; n <= 6; ++n) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      FailurePattern f(n);
      if (n > 2) f.crash(ProcessId(n), 37 + seed);
      Scheduler s(n, SchedMode::kSeededRandom, seed);
      const std::uint64_t w = s.window();
      EXPECT_EQ(w, 3u * static_cast<std::uint64_t>(n));
      std::vector<std::int64_t> last(static_cast<std::size_t>(n), -1);
      for (Time t = 0; t < 5000; ++t) {
        ProcessId p = s.next(f, t);
        ASSERT_FALSE(f.crashed_at(p, t));
        last[p.slot()] = static_cast<std::int64_t>(t);
        for (ProcessId c : f.correct())
          ASSERT_LE(static_cast<std::int64_t>(t) - last[c.slot()], static_cast<std::int64_t>(w))
              << "n=" << n << " seed=" << seed << " t=" << t << " " << c;
      }
    }
  }
}

TEST(Scheduler, WindowBelowNRejected) {
  EXPECT_THROW(Scheduler(4, SchedMode::kSeededRandom, 1, 3), Error);
}

TEST(Scheduler, ParseMode) {
  EXPECT_EQ(parse_sched_mode("round-robin"), SchedMode::kRoundRobin);
  EXPECT_EQ(parse_sched_mode("seeded-random"), SchedMode::kSeededRandom);
  EXPECT_THROW(parse_sched_mode("fifo"), Error);
}

namespace {
std::vector<Step> steps_of(std::initializer_list<int> procs) {
  std::vector<Step> out;
  Time t = 0;
  for (int p : procs) {
    Step s;
    s.t = t++;
    s.proc = ProcessId(p);
    out.push_back(s);
  }
  return out;
}
}  // namespace

TEST(ClassifyRun, AllCorrectInTailIsFair) {
  auto rc = classify_run(steps_of({1, 2, 3, 1, 2, 3}), FailurePattern(3), 3);
  EXPECT_TRUE(rc.fair);
  EXPECT_EQ(rc.max_k_resilience, 0);
}

TEST(ClassifyRun, MissingCorrectProcessIsUnfair) {
  auto rc = classify_run(steps_of({3, 1, 2, 1, 2, 1, 2}), FailurePattern(3), 4);
  EXPECT_FALSE(rc.fair);
  EXPECT_EQ(rc.max_k_resilience, 1);
}

TEST(ClassifyRun, SingleProcessTail) {
  auto rc = classify_run(steps_of({2, 3, 4, 1, 1, 1}), FailurePattern(4), 3);
  EXPECT_EQ(rc.max_k_resilience, 3);
}

TEST(ClassifyRun, WindowLargerThanTrace) {
  try {
    classify_run(steps_of({1, 2}), FailurePattern(2), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedClassification);
  }
}

namespace {
Step mk(int p, OpKind k, std::optional<RegKey> r = std::nullopt) {
  Step s;
  s.proc = ProcessId(p);
  s.kind = k;
  s.reg = r;
  return s;
}

// Transitive closure of the direct relation by Floyd-Warshall.
std::vector<std::vector<char>> closure_oracle(const std::vector<Step>& st) {
  const std::size_t m = st.size();
  std::vector<std::vector<char>> c(m, std::vector<char>(m, 0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      c[a][b] = st[a].proc == st[b].proc ||
                (st[a].kind == OpKind::kWrite && st[b].kind == OpKind::kRead && st[a].reg == st[b].reg);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t a = 0; a < m; ++a)
      if (c[a][k])
        for (std::size_t b = 0; b < m; ++b)
          if (c[k][b]) c[a][b] = 1;
  return c;
}
}  // namespace

TEST(CausalPrecedes, SameProcessOrder) {
  std::vector<Step> st{mk(1, OpKind::kLocal), mk(2, OpKind::kLocal), mk(1, OpKind::kLocal)};
  EXPECT_TRUE(causal_precedes(st, 0, 2));
  EXPECT_FALSE(causal_precedes(st, 2, 0));
}

TEST(CausalPrecedes, DifferentRegisterIsUnrelated) {
  std::vector<Step> st{mk(1, OpKind::kWrite, reg(1, 0)), mk(2, OpKind::kRead, reg(1, 1))};
  EXPECT_FALSE(causal_precedes(st, 0, 1));
}

TEST(CausalPrecedes, ChainAcrossThreeProcesses) {
  std::vector<Step> st{mk(1, OpKind::kWrite, reg(1)), mk(2, OpKind::kRead, reg(1)), mk(2, OpKind::kWrite, reg(2)),
                       mk(3, OpKind::kRead, reg(2))};
  auto oracle = closure_oracle(st);
  EXPECT_TRUE(oracle[0][3]);
  EXPECT_TRUE(causal_precedes(st, 0, 3));
  EXPECT_FALSE(causal_precedes(st, 3, 0));
}

TEST(CausalPrecedes, BadIndexThrows) {
  std::vector<Step> st{mk(1, OpKind::kLocal)};
  EXPECT_THROW(causal_precedes(st, 0, 1), Error);
}

TEST(CausalPrecedes, StrictPartialOrderAndClockAgreeWithOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    std::mt19937_64 rng(seed);
    System<Scripted> sys(FailurePattern(3), const_history(3, 1), random_scripts(3, rng, 20));
    Scheduler sched(3, SchedMode::kSeededRandom, seed);
    const auto& st = run(sys, sched, 50).steps;
    auto oracle = closure_oracle(st);
    CausalClock clock(st, 3);
    for (std::size_t a = 0; a < st.size(); ++a) {
      EXPECT_FALSE(causal_precedes(st, a, a));
      for (std::size_t b = 0; b < st.size(); ++b) {
        const bool ab = causal_precedes(st, a, b);
        ASSERT_EQ(ab, static_cast<bool>(oracle[a][b])) << seed << " " << a << " " << b;
        ASSERT_EQ(clock.precedes(a, b), ab);
        if (ab) {
          EXPECT_FALSE(causal_precedes(st, b, a));
        }
      }
    }
  }
}

TEST(ConsAccess, FreshObjectReturnsProposal) {
  ConsRegistry reg;
  EXPECT_EQ(reg.access(ConsKey{1, 1, 1}, 1), 1);
}

TEST(ConsAccess, DecidedObjectKeepsDecision) {
  ConsRegistry reg;
  reg.access(ConsKey{1, 1, 1}, 0);
  EXPECT_EQ(reg.access(ConsKey{1, 1, 1}, 1), 0);
}

TEST(ConsAccess, BothInterleavingsAgree) {
  for (int first : {0, 1}) {
    ConsRegistry reg;
    ConsKey k{2, 3, 4};
    int a = reg.access(k, first);
    int b = reg.access(k, 1 - first);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, first);
  }
}

TEST(ConsAccess, ThroughEventLoopIsAtomicStep) {
  ConsKey k{1, 1, 1};
  Scripted p1{{OpRequest<Word>::cons_access(k, 0)}};
  Scripted p2{{OpRequest<Word>::cons_access(k, 1)}};
  System<Scripted> sys(FailurePattern(2), const_history(2, 1), {p1, p2});
  sys.execute_step(ProcessId(2));
  const Step& s = sys.execute_step(ProcessId(1));
  EXPECT_EQ(s.kind, OpKind::kCons);
  EXPECT_EQ(s.cons_id, k);
  EXPECT_EQ(s.bit, 1);
}

// Register atomicity, crash monotonicity and query consistency over seeded runs.
TEST(Invariants, RandomRuns) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    FailurePattern f(4);
    f.crash(ProcessId(2), 30 + seed);
    FDHistory h(4, "mix", [](ProcessId p, Time t) { return static_cast<int>((p.index + t) % 4) + 1; });
    System<Scripted> sys(f, h, random_scripts(4, rng, 60));
    Scheduler sched(4, SchedMode::kSeededRandom, seed);
    const auto& st = run(sys, sched, 200).steps;
    std::map<RegKey, Word> mem;
    for (std::size_t i = 0; i < st.size(); ++i) {
      const Step& s = st[i];
      EXPECT_EQ(s.t, i);
      EXPECT_FALSE(f.crashed_at(s.proc, s.t));
      EXPECT_EQ(s.fd.has_value(), s.kind == OpKind::kQuery);
      if (s.kind == OpKind::kQuery) {
        EXPECT_EQ(*s.fd, h.sample(s.proc, s.t));
      }
      if (s.kind == OpKind::kWrite) mem[*s.reg] = *s.value;
      if (s.kind == OpKind::kRead) {
        EXPECT_EQ(*s.value, mem.count(*s.reg) ? mem[*s.reg] : Word{});
      }
    }
  }
}

TEST(FailurePatternTest, NeedsACorrectProcess) {
  FailurePattern f(2);
  f.crash(ProcessId(1), 3);
  EXPECT_THROW(f.crash(ProcessId(2), 4), Error);
  EXPECT_THROW(FailurePattern(1), Error);
  EXPECT_EQ(f.correct(), std::vector<ProcessId>{ProcessId(2)});
  EXPECT_TRUE(f.crashed_at(ProcessId(1), 3));
  EXPECT_FALSE(f.crashed_at(ProcessId(1), 2));
}

TEST(AppendLogTest, CopiesShareAndDiverge) {
  AppendLog<int> a;
  a.push_back(1);
  a.push_back(2);
  AppendLog<int> b = a;
  b.push_back(3);
  EXPECT_TRUE(a.shares_storage_with(b));
  a.push_back(9);
  EXPECT_FALSE(a.shares_storage_with(b));
  EXPECT_EQ(a.to_vector(), (std::vector<int>{1, 2, 9}));
  EXPECT_EQ(b.to_vector(), (std::vector<int>{1, 2, 3}));
}
