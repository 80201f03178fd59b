#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "omega/core/types.hpp"

namespace omega {

struct VertexId {
  int proc = 0;
  int seq = 0;

  friend constexpr auto operator<=>(const VertexId&, const VertexId&) = default;
};

// Vertex [proc, d, seq] of a sample DAG. sample_time is the event index of the
// query that produced d; it is carried for validation only and algorithms
// never read it. preds[k] is the highest seq of process k+1 that precedes
// this vertex (all lower seqs of that process precede it too).
struct DagVertex {
  int proc = 0;
  DetectorValue d = 0;
  int seq = 0;
  Time sample_time = 0;
  std::vector<int> preds;

  VertexId id() const { return {proc, seq}; }

  friend bool operator==(const DagVertex&, const DagVertex&) = default;
};

// Transitively closed sample DAG built by the communication component.
//
// Vertices of each process form a chain seq = 1..len, and every DAG is closed
// under predecessors, so the edge set is fully described by each vertex's
// per-process predecessor frontier: (u, v) is an edge iff
// u.seq <= v.preds[u.proc - 1]. Chains are shared between copies and only
// ever appended to, which keeps register snapshots cheap.
class Dag {
 public:
  Dag() = default;
  explicit Dag(int n) : chains_(static_cast<std::size_t>(n)) {}

  int n() const { return static_cast<int>(chains_.size()); }

  int count(int proc) const { return static_cast<int>(chain(proc).len); }

  std::size_t size() const {
    std::size_t s = 0;
    for (const auto& c : chains_) s += c.len;
    return s;
  }

  bool empty() const { return size() == 0; }

  const DagVertex* find(int proc, int seq) const {
    if (proc < 1 || proc > n() || seq < 1) return nullptr;
    const Chain& c = chains_[static_cast<std::size_t>(proc - 1)];
    if (static_cast<std::size_t>(seq) > c.len) return nullptr;
    return &(*c.data)[static_cast<std::size_t>(seq - 1)];
  }
  const DagVertex* find(VertexId v) const { return find(v.proc, v.seq); }

  bool contains(VertexId v) const { return find(v) != nullptr; }

  bool has_edge(VertexId from, VertexId to) const {
    const DagVertex* a = find(from);
    const DagVertex* b = find(to);
    if (!a || !b) return false;
    return from.seq <= b->preds[static_cast<std::size_t>(from.proc - 1)];
  }

  // Adds [proc, d, k+1] with edges from every vertex currently in the DAG.
  const DagVertex& add_sample(int proc, DetectorValue d, Time sample_time) {
    DagVertex v;
    v.proc = proc;
    v.d = d;
    v.seq = count(proc) + 1;
    v.sample_time = sample_time;
    v.preds.resize(chains_.size());
    for (std::size_t k = 0; k < chains_.size(); ++k) v.preds[k] = static_cast<int>(chains_[k].len);
    return append(std::move(v));
  }

  // Appends a vertex as given. Used to build DAGs by hand (tests, loaders);
  // only the per-process seq order is enforced here.
  const DagVertex& append(DagVertex v) {
    Chain& c = mutable_chain(v.proc);
    if (v.seq != static_cast<int>(c.len) + 1) {
      throw Error(ErrorCode::kCorruption, "vertex p" + std::to_string(v.proc) + "/" + std::to_string(v.seq) +
                                              " breaks the per-process sequence");
    }
    if (v.preds.size() != chains_.size()) throw Error(ErrorCode::kCorruption, "vertex frontier has wrong width");
    if (!c.data) c.data = std::make_shared<std::vector<DagVertex>>();
    if (c.data->size() != c.len) {
      c.data = std::make_shared<std::vector<DagVertex>>(c.data->begin(), c.data->begin() + static_cast<std::ptrdiff_t>(c.len));
    }
    c.data->push_back(std::move(v));
    ++c.len;
    return c.data->back();
  }

  // G <- G ∪ other.
  void unite(const Dag& other) {
    if (other.n() == 0) return;  // never-written register
    if (n() == 0) {
      *this = other;
      return;
    }
    if (other.n() != n()) throw Error(ErrorCode::kCorruption, "union of DAGs with different process counts");
    for (std::size_t k = 0; k < chains_.size(); ++k) {
      Chain& mine = chains_[k];
      const Chain& theirs = other.chains_[k];
      if (theirs.len == 0) continue;
      if (mine.data != theirs.data) check_common_prefix(mine, theirs);
      if (theirs.len > mine.len) mine = theirs;
    }
  }

  // Explicit edge list, for dumps and brute-force checks.
  std::vector<std::pair<VertexId, VertexId>> edges() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    for (const DagVertex& v : vertices())
      for (std::size_t k = 0; k < v.preds.size(); ++k)
        for (int s = 1; s <= v.preds[k]; ++s) out.push_back({VertexId{static_cast<int>(k) + 1, s}, v.id()});
    return out;
  }

  // Vertices ordered by (proc, seq).
  std::vector<DagVertex> vertices() const {
    std::vector<DagVertex> out;
    for (const auto& c : chains_)
      for (std::size_t i = 0; i < c.len; ++i) out.push_back((*c.data)[i]);
    return out;
  }

  bool shares_chain(const Dag& other, int proc) const {
    return chain(proc).data == other.chain(proc).data;
  }

  friend bool operator==(const Dag& a, const Dag& b) {
    if (a.n() != b.n()) return false;
    for (int p = 1; p <= a.n(); ++p) {
      if (a.count(p) != b.count(p)) return false;
      if (a.shares_chain(b, p)) continue;
      for (int s = 1; s <= a.count(p); ++s)
        if (!(*a.find(p, s) == *b.find(p, s))) return false;
    }
    return true;
  }

 private:
  struct Chain {
    std::shared_ptr<std::vector<DagVertex>> data;
    std::size_t len = 0;
  };

  const Chain& chain(int proc) const {
    if (proc < 1 || proc > n()) throw Error(ErrorCode::kModelError, "process p" + std::to_string(proc) + " out of range");
    return chains_[static_cast<std::size_t>(proc - 1)];
  }
  Chain& mutable_chain(int proc) { return const_cast<Chain&>(chain(proc)); }

  static void check_common_prefix(const Chain& a, const Chain& b) {
    const std::size_t common = std::min(a.len, b.len);
    for (std::size_t i = 0; i < common; ++i) {
      const DagVertex& x = (*a.data)[i];
      const DagVertex& y = (*b.data)[i];
      if (!(x == y)) {
        throw Error(ErrorCode::kCorruption, "conflicting vertices for p" + std::to_string(x.proc) + "/" +
                                                std::to_string(x.seq) + " (d=" + std::to_string(x.d) +
                                                " vs d=" + std::to_string(y.d) + ")");
      }
    }
  }

  std::vector<Chain> chains_;
};

inline Dag dag_union(const Dag& a, const Dag& b) {
  if (a.n() == 0) return b;
  Dag out = a;
  if (b.n() != 0) out.unite(b);
  return out;
}

inline Word summarize(const Dag& g) { return {static_cast<std::int64_t>(g.size())}; }

}  // namespace omega
