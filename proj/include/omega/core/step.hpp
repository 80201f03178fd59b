#pragma once

#include <concepts>
#include <optional>
#include <string>
#include <vector>

#include "omega/core/memory.hpp"
#include "omega/core/types.hpp"

namespace omega {

enum class OpKind { kRead, kWrite, kQuery, kCons, kLocal, kDecide };

inline const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::kRead: return "read";
    case OpKind::kWrite: return "write";
    case OpKind::kQuery: return "query";
    case OpKind::kCons: return "cons";
    case OpKind::kLocal: return "local";
    case OpKind::kDecide: return "decide";
  }
  return "?";
}

template <class V>
struct OpRequest {
  OpKind kind = OpKind::kLocal;
  RegKey reg{};    // read / write
  V value{};       // write
  ConsKey cons{};  // cons
  int bit = 0;     // cons proposal / decision

  static OpRequest read(RegKey r) { return {OpKind::kRead, r, {}, {}, 0}; }
  static OpRequest write(RegKey r, V v) { return {OpKind::kWrite, r, std::move(v), {}, 0}; }
  static OpRequest query() { return {OpKind::kQuery, {}, {}, {}, 0}; }
  static OpRequest cons_access(ConsKey k, int b) { return {OpKind::kCons, {}, {}, k, b}; }
  static OpRequest local() { return {OpKind::kLocal, {}, {}, {}, 0}; }
  static OpRequest decide(int b) { return {OpKind::kDecide, {}, {}, {}, b}; }

  friend bool operator==(const OpRequest&, const OpRequest&) = default;
};

template <class V>
struct Response {
  V value{};                 // read result
  DetectorValue detector{};  // query result
  int bit = -1;              // cons result
  Time time = 0;             // event index at which the op took effect

  friend bool operator==(const Response&, const Response&) = default;
};

// Compact, serializable view of a register value carried in trace records.
inline Word summarize(const Word& w) { return w; }

// A recorded step. detector_value is present iff kind == kQuery.
struct Step {
  Time t = 0;
  ProcessId proc;
  OpKind kind = OpKind::kLocal;
  std::optional<RegKey> reg;
  std::optional<Word> value;
  std::optional<DetectorValue> fd;
  std::optional<ConsKey> cons_id;
  std::optional<int> bit;

  friend bool operator==(const Step&, const Step&) = default;
};

struct InitialState {
  std::vector<int> inputs;  // one per process; empty when the algorithm has no inputs
};

struct Trace {
  FailurePattern pattern;
  FDHistory history;
  InitialState initial;
  std::vector<Step> steps;
};

// Process automata driven by the event loop.
template <class P, class V>
concept SimProcess = requires(P p, const P cp, const Response<V>& r) {
  { cp.pending() } -> std::convertible_to<OpRequest<V>>;
  p.advance(r);
};

// Inner algorithm automata (the algorithm A of the reduction). Constructed
// from (self, n, input); deterministic in (state, response).
template <class A>
concept Automaton = std::copy_constructible<A> && SimProcess<A, Word> &&
    std::constructible_from<A, ProcessId, int, int> && requires(const A a) {
  { a.decided() } -> std::convertible_to<std::optional<int>>;
  { a.input() } -> std::convertible_to<int>;
};

}  // namespace omega
