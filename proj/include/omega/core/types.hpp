#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace omega {

// Event-loop step index. One atomic operation per index.
using Time = std::uint64_t;

// Values output by a failure detector module. For Ω-like detectors this is a
// 1-based process index.
using DetectorValue = int;

// Register contents. An empty Word is the initial value (⊥).
using Word = std::vector<std::int64_t>;

enum class ErrorCode {
  kSchedulerBug,
  kModelViolation,
  kNoLiveProcess,
  kUndefinedClassification,
  kInvalidSpec,
  kEmptySeries,
  kCorruption,
  kProtocolMisuse,
  kMalformedSchedule,
  kModelError,
  kConfigError,
  kUsage,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchedulerBug: return "scheduler-bug";
    case ErrorCode::kModelViolation: return "model-violation";
    case ErrorCode::kNoLiveProcess: return "no-live-process";
    case ErrorCode::kUndefinedClassification: return "undefined-classification";
    case ErrorCode::kInvalidSpec: return "invalid-spec";
    case ErrorCode::kEmptySeries: return "empty-series";
    case ErrorCode::kCorruption: return "corruption";
    case ErrorCode::kProtocolMisuse: return "protocol-misuse";
    case ErrorCode::kMalformedSchedule: return "malformed-schedule";
    case ErrorCode::kModelError: return "model-error";
    case ErrorCode::kConfigError: return "config-error";
    case ErrorCode::kUsage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// 1-based, dense process identifier.
struct ProcessId {
  int index = 1;

  constexpr ProcessId() = default;
  constexpr explicit ProcessId(int i) : index(i) {}

  constexpr int slot() const { return index - 1; }  // 0-based position

  friend constexpr auto operator<=>(ProcessId, ProcessId) = default;

  friend std::ostream& operator<<(std::ostream& os, ProcessId p) { return os << 'p' << p.index; }
};

inline std::string to_string(ProcessId p) { return "p" + std::to_string(p.index); }

// Parses "p3" or "3".
inline ProcessId parse_process_id(const std::string& s) {
  std::string digits = (!s.empty() && (s[0] == 'p' || s[0] == 'P')) ? s.substr(1) : s;
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::kConfigError, "bad process id '" + s + "'");
  }
  return ProcessId(std::stoi(digits));
}

// Single-writer register identity: a register family tag plus an index within
// the family, owned by one process.
struct RegKey {
  int owner = 1;
  char tag = '?';
  std::int64_t index = 0;

  friend constexpr auto operator<=>(const RegKey&, const RegKey&) = default;
};

inline std::string to_string(const RegKey& r) {
  return std::string(1, r.tag) + std::to_string(r.index) + "@p" + std::to_string(r.owner);
}

// Identity of one consensus object cons^{proc,ell}_r.
struct ConsKey {
  int proc = 0;
  std::int64_t ell = 0;
  std::int64_t r = 0;

  friend constexpr auto operator<=>(const ConsKey&, const ConsKey&) = default;
};

inline std::string to_string(const ConsKey& k) {
  return std::to_string(k.proc) + "." + std::to_string(k.ell) + "." + std::to_string(k.r);
}

class FailurePattern {
 public:
  FailurePattern() = default;
  explicit FailurePattern(int n) : crash_(static_cast<std::size_t>(n)) {
    if (n < 2) throw Error(ErrorCode::kInvalidSpec, "n must be at least 2");
  }

  FailurePattern& crash(ProcessId p, Time t) {
    check(p);
    auto prev = crash_[p.slot()];
    crash_[p.slot()] = t;
    if (correct().empty()) {
      crash_[p.slot()] = prev;
      throw Error(ErrorCode::kInvalidSpec, "at least one process must be correct");
    }
    return *this;
  }

  int n() const { return static_cast<int>(crash_.size()); }

  std::optional<Time> crash_time(ProcessId p) const {
    check(p);
    return crash_[p.slot()];
  }

  bool crashed_at(ProcessId p, Time t) const {
    auto c = crash_time(p);
    return c && t >= *c;
  }

  bool is_correct(ProcessId p) const { return !crash_time(p).has_value(); }

  std::vector<ProcessId> correct() const {
    std::vector<ProcessId> out;
    for (int i = 1; i <= n(); ++i)
      if (!crash_[i - 1]) out.emplace_back(i);
    return out;
  }

  std::vector<ProcessId> faulty() const {
    std::vector<ProcessId> out;
    for (int i = 1; i <= n(); ++i)
      if (crash_[i - 1]) out.emplace_back(i);
    return out;
  }

  // F(t): processes crashed by time t.
  std::vector<ProcessId> crashed_by(Time t) const {
    std::vector<ProcessId> out;
    for (int i = 1; i <= n(); ++i)
      if (crashed_at(ProcessId(i), t)) out.emplace_back(i);
    return out;
  }

  void check(ProcessId p) const {
    if (p.index < 1 || p.index > n()) {
      throw Error(ErrorCode::kModelError, "process id " + to_string(p) + " out of range");
    }
  }

 private:
  std::vector<std::optional<Time>> crash_;
};

// A failure detector history: the value output at (process, time).
class FDHistory {
 public:
  using SampleFn = std::function<DetectorValue(ProcessId, Time)>;

  FDHistory() = default;
  FDHistory(int n, std::string range, SampleFn fn) : n_(n), range_(std::move(range)), fn_(std::move(fn)) {}

  DetectorValue sample(ProcessId p, Time t) const { return fn_(p, t); }
  int n() const { return n_; }
  const std::string& range() const { return range_; }
  explicit operator bool() const { return static_cast<bool>(fn_); }

 private:
  int n_ = 0;
  std::string range_;
  SampleFn fn_;
};

}  // namespace omega
