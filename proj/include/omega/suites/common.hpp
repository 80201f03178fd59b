#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>

#include <json.hpp>

namespace omega::suites {

struct SuiteResult {
  std::string name;
  bool pass = true;
  std::string summary;
  std::string failure;  // first failure, if any
  nlohmann::json metrics = nlohmann::json::object();
  double seconds = 0;
  double time_limit = 0;  // seconds; 0 = none

  void fail(const std::string& why) {
    if (pass) failure = why;
    pass = false;
  }

  nlohmann::json to_json() const {
    return {{"suite", name}, {"pass", pass}, {"summary", summary}, {"failure", failure},
            {"metrics", metrics}, {"seconds", seconds}, {"time_limit", time_limit}};
  }

  std::string line() const {
    std::string out = std::string(pass ? "PASS" : "FAIL") + " " + name + ": " + summary;
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.2fs", seconds);
    out += buf;
    if (time_limit > 0) {
      std::snprintf(buf, sizeof buf, ", limit %.0fs", time_limit);
      out += buf;
    }
    out += ")";
    if (!pass) out += " -- " + failure;
    return out;
  }
};

// Measures a suite and enforces its time limit.
class SuiteTimer {
 public:
  SuiteTimer(SuiteResult& r, double limit) : r_(r), start_(std::chrono::steady_clock::now()) { r_.time_limit = limit; }
  ~SuiteTimer() { finish(); }
  void finish() {
    if (done_) return;
    done_ = true;
    r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (r_.time_limit > 0 && r_.seconds > r_.time_limit) r_.fail("took longer than the time limit");
  }

 private:
  SuiteResult& r_;
  std::chrono::steady_clock::time_point start_;
  bool done_ = false;
};

}  // namespace omega::suites
