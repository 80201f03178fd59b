#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "omega/core/step.hpp"

namespace omega {

inline OpKind parse_op_kind(const std::string& s) {
  for (OpKind k : {OpKind::kRead, OpKind::kWrite, OpKind::kQuery, OpKind::kCons, OpKind::kLocal, OpKind::kDecide})
    if (s == to_string(k)) return k;
  throw Error(ErrorCode::kCorruption, "unknown step kind '" + s + "'");
}

// {t, proc, kind, reg?, value?, fd?, cons_id?, bit?}; reg is [owner, tag, index],
// cons_id is [proc, ell, r].
inline nlohmann::json step_to_json(const Step& s) {
  nlohmann::json j;
  j["t"] = s.t;
  j["proc"] = s.proc.index;
  j["kind"] = to_string(s.kind);
  if (s.reg) j["reg"] = {s.reg->owner, std::string(1, s.reg->tag), s.reg->index};
  if (s.value) j["value"] = *s.value;
  if (s.fd) j["fd"] = *s.fd;
  if (s.cons_id) j["cons_id"] = {s.cons_id->proc, s.cons_id->ell, s.cons_id->r};
  if (s.bit) j["bit"] = *s.bit;
  return j;
}

inline Step step_from_json(const nlohmann::json& j) {
  try {
    Step s;
    s.t = j.at("t").get<Time>();
    s.proc = ProcessId(j.at("proc").get<int>());
    s.kind = parse_op_kind(j.at("kind").get<std::string>());
    if (j.contains("reg")) {
      const auto& r = j["reg"];
      const auto tag = r.at(1).get<std::string>();
      if (tag.size() != 1) throw Error(ErrorCode::kCorruption, "register tag must be one character");
      s.reg = RegKey{r.at(0).get<int>(), tag[0], r.at(2).get<std::int64_t>()};
    }
    if (j.contains("value")) s.value = j["value"].get<Word>();
    if (j.contains("fd")) s.fd = j["fd"].get<DetectorValue>();
    if (j.contains("cons_id")) {
      const auto& c = j["cons_id"];
      s.cons_id = ConsKey{c.at(0).get<int>(), c.at(1).get<std::int64_t>(), c.at(2).get<std::int64_t>()};
    }
    if (j.contains("bit")) s.bit = j["bit"].get<int>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruption, std::string("bad trace record: ") + e.what());
  }
}

inline void write_steps_jsonl(std::ostream& out, const std::vector<Step>& steps) {
  for (const Step& s : steps) out << step_to_json(s).dump() << '\n';
}

// Skips blank lines and records without a "kind" (headers).
inline std::vector<Step> read_steps_jsonl(std::istream& in) {
  std::vector<Step> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kCorruption, std::string("trace line is not JSON: ") + e.what());
    }
    if (!j.contains("kind")) continue;
    out.push_back(step_from_json(j));
  }
  return out;
}

}  // namespace omega
