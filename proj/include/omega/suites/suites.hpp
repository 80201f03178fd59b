#pragma once

#include <string>
#include <vector>

#include "omega/suites/bg_replay.hpp"
#include "omega/suites/dag_sim.hpp"
#include "omega/suites/extract.hpp"
#include "omega/suites/safety.hpp"

namespace omega::suites {

// In criterion order.
inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"sa", "consensus", "dag", "theorem1", "bg", "replay", "extract"};
  return names;
}

inline SuiteResult run_suite(const std::string& name) {
  if (name == "sa") return suite_sa();
  if (name == "consensus") return suite_consensus();
  if (name == "dag") return suite_dag();
  if (name == "theorem1") return suite_theorem1();
  if (name == "bg") return suite_bg();
  if (name == "replay") return suite_replay();
  if (name == "extract") return suite_extract();
  throw Error(ErrorCode::kConfigError, "unknown suite '" + name + "'");
}

}  // namespace omega::suites
