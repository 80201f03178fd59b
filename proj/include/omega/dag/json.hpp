#pragma once

#include <map>
#include <json.hpp>

#include "omega/dag/dag.hpp"

namespace omega {

// {vertices:[{p,d,seq,t}], edges:[[from_idx, to_idx]]}, vertices in (p, seq) order.
inline nlohmann::json dag_to_json(const Dag& g) {
  nlohmann::json out;
  out["vertices"] = nlohmann::json::array();
  out["edges"] = nlohmann::json::array();
  std::map<VertexId, std::size_t> index;
  for (const DagVertex& v : g.vertices()) {
    index[v.id()] = index.size();
    out["vertices"].push_back({{"p", v.proc}, {"d", v.d}, {"seq", v.seq}, {"t", v.sample_time}});
  }
  for (const auto& [from, to] : g.edges()) out["edges"].push_back({index.at(from), index.at(to)});
  return out;
}

// Inverse of dag_to_json. Predecessor frontiers are rebuilt from the edge
// list, so a dump with a non-closed edge set comes back closed per process.
inline Dag dag_from_json(const nlohmann::json& j, int n) {
  std::vector<DagVertex> vs;
  for (const auto& jv : j.at("vertices")) {
    DagVertex v;
    v.proc = jv.at("p").get<int>();
    v.d = jv.at("d").get<int>();
    v.seq = jv.at("seq").get<int>();
    v.sample_time = jv.at("t").get<Time>();
    v.preds.assign(static_cast<std::size_t>(n), 0);
    vs.push_back(std::move(v));
  }
  for (const auto& e : j.at("edges")) {
    const DagVertex& from = vs.at(e.at(0).get<std::size_t>());
    DagVertex& to = vs.at(e.at(1).get<std::size_t>());
    int& slot = to.preds.at(static_cast<std::size_t>(from.proc - 1));
    slot = std::max(slot, from.seq);
  }
  Dag g(n);
  for (auto& v : vs) g.append(std::move(v));
  return g;
}

}  // namespace omega
