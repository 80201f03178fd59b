#pragma once

#include <array>
#include <optional>
#include <string>

#include "omega/core/types.hpp"

namespace omega {

// Two-simulator safe agreement. Each simulator proposes in three atomic
// micro-steps: write (v, level 1); read the other slot; set its own level to
// 2, or back off to 0 if the other slot was already at 2. Resolution is
// pending while any slot sits at level 1, and otherwise yields the value of
// the lowest simulator id at level 2.
template <class V>
class SafeAgreement {
 public:
  enum class Stage : std::uint8_t { kIdle, kWrote, kRead, kDone };

  struct Slot {
    V value{};
    int level = 0;
    Stage stage = Stage::kIdle;
    int seen_other = 0;

    friend bool operator==(const Slot&, const Slot&) = default;
  };

  void write_proposal(int q, V v) {
    Slot& s = slot(q);
    if (s.stage != Stage::kIdle) misuse(q, "proposed twice");
    s.value = std::move(v);
    s.level = 1;
    s.stage = Stage::kWrote;
  }

  void read_slots(int q) {
    Slot& s = slot(q);
    if (s.stage != Stage::kWrote) misuse(q, "read out of order");
    s.seen_other = slots_[static_cast<std::size_t>(1 - q)].level;
    s.stage = Stage::kRead;
  }

  void finish_propose(int q) {
    Slot& s = slot(q);
    if (s.stage != Stage::kRead) misuse(q, "raised out of order");
    s.level = s.seen_other == 2 ? 0 : 2;
    s.stage = Stage::kDone;
  }

  void propose(int q, V v) {
    write_proposal(q, std::move(v));
    read_slots(q);
    finish_propose(q);
  }

  // nullopt = pending.
  std::optional<V> resolve(int q) const {
    if (slot(q).stage == Stage::kIdle) misuse(q, "resolved before proposing");
    for (const Slot& s : slots_)
      if (s.level == 1) return std::nullopt;
    for (const Slot& s : slots_)
      if (s.level == 2) return s.value;
    throw Error(ErrorCode::kProtocolMisuse, "no proposal at level 2");
  }

  bool proposed(int q) const { return slot(q).stage != Stage::kIdle; }
  Stage stage(int q) const { return slot(q).stage; }
  int level(int q) const { return slot(q).level; }
  bool blocked() const { return slots_[0].level == 1 || slots_[1].level == 1; }

  friend bool operator==(const SafeAgreement&, const SafeAgreement&) = default;

 private:
  const Slot& slot(int q) const {
    if (q != 0 && q != 1) throw Error(ErrorCode::kProtocolMisuse, "simulator index " + std::to_string(q));
    return slots_[static_cast<std::size_t>(q)];
  }
  Slot& slot(int q) { return const_cast<Slot&>(std::as_const(*this).slot(q)); }

  [[noreturn]] static void misuse(int q, const char* what) {
    throw Error(ErrorCode::kProtocolMisuse, "q" + std::to_string(q + 1) + " " + what);
  }

  std::array<Slot, 2> slots_{};
};

}  // namespace omega
