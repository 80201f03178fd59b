#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "omega/consensus/consensus.hpp"
#include "omega/core/config.hpp"
#include "omega/core/trace_io.hpp"
#include "omega/extractor/reduction.hpp"

namespace omega::cli {

using ReductionAutomaton = StableLeaderConsensus;

struct ExperimentConfig {
  ReductionConfig red;
  std::string detector = "omega";
  std::string out;  // output directory; empty = no artifacts
};

inline void validate(const ExperimentConfig& c) {
  if (c.detector != "omega") throw Error(ErrorCode::kConfigError, "unsupported detector '" + c.detector + "'");
  (void)make_pattern(c.red);
}

// Keys mirror the long flags without the leading dashes.
inline void apply_config_file(const KeyValueConfig& kv, ExperimentConfig& c) {
  static const std::vector<std::string> known{"n",           "crash",       "detector",   "t-stab", "leader",
                                              "seed",        "budget",      "tail-window", "probe-tail",
                                              "explore",     "fairness-window", "out"};
  for (const auto& k : kv.keys())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw Error(ErrorCode::kConfigError, "unknown key '" + k + "'");
  auto& r = c.red;
  r.n = kv.get_number("n", r.n);
  if (kv.has("crash")) {
    r.crashes.clear();
    for (const auto& s : kv.all("crash")) r.crashes.push_back(parse_crash(s));
  }
  c.detector = kv.get("detector", c.detector);
  r.t_stab = kv.get_number("t-stab", r.t_stab);
  if (kv.has("leader")) r.leader = parse_process_id(kv.get("leader", "")).index;
  r.seed = kv.get_number("seed", r.seed);
  r.budget = kv.get_number("budget", r.budget);
  r.tail_window = kv.get_number("tail-window", r.tail_window);
  r.probe_tail = kv.get_number("probe-tail", r.probe_tail);
  r.explore_per_comm = kv.get_number("explore", r.explore_per_comm);
  r.fairness_window = kv.get_number("fairness-window", r.fairness_window);
  c.out = kv.get("out", c.out);
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  const auto& r = c.red;
  nlohmann::json crashes = nlohmann::json::array();
  for (const auto& [p, t] : r.crashes) crashes.push_back("p" + std::to_string(p) + "@" + std::to_string(t));
  nlohmann::json j{{"n", r.n},
                   {"crash", crashes},
                   {"detector", c.detector},
                   {"t-stab", r.t_stab},
                   {"seed", r.seed},
                   {"budget", r.budget},
                   {"tail-window", r.tail_window},
                   {"probe-tail", r.probe_tail},
                   {"explore", r.explore_per_comm},
                   {"fairness-window", r.fairness_window}};
  if (r.leader) j["leader"] = "p" + std::to_string(*r.leader);
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    auto& r = c.red;
    r.n = j.at("n").get<int>();
    for (const auto& s : j.at("crash")) r.crashes.push_back(parse_crash(s.get<std::string>()));
    c.detector = j.at("detector").get<std::string>();
    r.t_stab = j.at("t-stab").get<Time>();
    if (j.contains("leader")) r.leader = parse_process_id(j["leader"].get<std::string>()).index;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.budget = j.at("budget").get<std::uint64_t>();
    r.tail_window = j.at("tail-window").get<Time>();
    r.probe_tail = j.at("probe-tail").get<std::size_t>();
    r.explore_per_comm = j.at("explore").get<int>();
    r.fairness_window = j.at("fairness-window").get<std::uint64_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruption, std::string("bad config header: ") + e.what());
  }
}

struct RunOutcome {
  ReductionResult res;
  bool pass = false;
  std::optional<Time> stabilized_at;  // last Ω-output change among correct processes
};

inline bool run_passes(const ReductionResult& r) { return r.verdict.ok && r.safety_violations == 0 && r.lemma1.ok; }

// Runs one reduction; streams the core trace to `trace` (after a header line
// holding the config) when given.
inline RunOutcome run_experiment(const ExperimentConfig& c, std::ostream* trace = nullptr) {
  validate(c);
  if (trace) *trace << nlohmann::json{{"config", config_to_json(c)}}.dump() << '\n';
  std::function<void(const Step&)> obs;
  if (trace) obs = [trace](const Step& s) { *trace << step_to_json(s).dump() << '\n'; };
  RunOutcome o{run_reduction<ReductionAutomaton>(c.red, obs), false, std::nullopt};
  o.pass = run_passes(o.res);
  if (o.res.verdict.ok) {
    Time last = 0;
    for (ProcessId p : o.res.pattern.correct())
      for (const auto& [t, v] : o.res.streams[static_cast<std::size_t>(p.slot())].changes()) last = std::max(last, t);
    o.stabilized_at = last;
  }
  return o;
}

inline void write_probes_jsonl(std::ostream& out, const ReductionResult& r) {
  for (std::size_t i = 0; i < r.probes.size(); ++i) {
    for (const ProbeRecord& p : r.probes[i]) {
      nlohmann::json j{{"t", p.t},
                       {"proc", p.proc.index},
                       {"J", p.J},
                       {"sigma", p.qj ? schedule_string(r.points[i][p.point].sigma) : ""},
                       {"qj", p.qj},
                       {"rho_len", p.rho_len},
                       {"omega_out", p.omega_out.index},
                       {"decided", p.decided}};
      out << j.dump() << '\n';
    }
  }
}

inline nlohmann::json verdict_json(const ExperimentConfig& c, const RunOutcome& o) {
  const auto& r = o.res;
  nlohmann::json j{{"config", config_to_json(c)},
                   {"pass", o.pass},
                   {"steps", r.steps},
                   {"omega_ok", r.verdict.ok},
                   {"omega_reason", r.verdict.reason},
                   {"safety_violations", r.safety_violations},
                   {"lemma1_ok", r.lemma1.ok},
                   {"lemma1_reason", r.lemma1.reason},
                   {"frozen_ok", r.frozen_ok},
                   {"frozen_reason", r.frozen_reason},
                   {"final_counts", r.final_counts}};
  j["leader"] = r.verdict.leader ? nlohmann::json(to_string(*r.verdict.leader)) : nlohmann::json();
  j["stabilized_at"] = o.stabilized_at ? nlohmann::json(*o.stabilized_at) : nlohmann::json();
  return j;
}

inline std::string verdict_line(const ExperimentConfig& c, const RunOutcome& o) {
  const auto& r = o.res;
  std::string s = std::string(o.pass ? "PASS" : "FAIL") + " seed " + std::to_string(c.red.seed) + ": ";
  if (r.verdict.ok) {
    s += "leader " + to_string(*r.verdict.leader) + " stable since t=" + std::to_string(*o.stabilized_at);
  } else {
    s += "no stable leader (" + r.verdict.reason + ")";
  }
  s += ", " + std::to_string(r.safety_violations) + " safety violations, lemma1 " +
       (r.lemma1.ok ? std::string("ok") : "failed (" + r.lemma1.reason + ")");
  return s;
}

struct ReplayDiff {
  bool identical = true;
  std::uint64_t compared = 0;
  std::string detail;
};

// Re-executes the run described by a trace file's header and compares every
// step.
inline ReplayDiff replay_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kCorruption, "empty trace");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kCorruption, std::string("trace header is not JSON: ") + e.what());
  }
  if (!header.contains("config")) throw Error(ErrorCode::kCorruption, "trace header has no config");
  const ExperimentConfig c = config_from_json(header["config"]);
  const std::vector<Step> recorded = read_steps_jsonl(in);
  ReplayDiff d;
  validate(c);
  auto obs = [&](const Step& s) {
    if (!d.identical) return;
    if (d.compared >= recorded.size()) {
      d.identical = false;
      d.detail = "re-execution runs past the recorded trace at t=" + std::to_string(s.t);
    } else if (!(step_to_json(s) == step_to_json(recorded[d.compared]))) {
      d.identical = false;
      d.detail = "first difference at step " + std::to_string(d.compared) + ": recorded " +
                 step_to_json(recorded[d.compared]).dump() + ", re-executed " + step_to_json(s).dump();
    }
    ++d.compared;
  };
  (void)run_reduction<ReductionAutomaton>(c.red, obs);
  if (d.identical && d.compared != recorded.size()) {
    d.identical = false;
    d.detail = "recorded trace has " + std::to_string(recorded.size()) + " steps, re-execution " + std::to_string(d.compared);
  }
  return d;
}

}  // namespace omega::cli
