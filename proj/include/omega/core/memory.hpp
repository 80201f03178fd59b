#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "omega/core/types.hpp"

namespace omega {

// Single-writer multi-reader registers. Reads of a never-written register
// return the value-initialized V (⊥).
template <class V>
class Memory {
 public:
  const V& read(const RegKey& key) const {
    auto it = regs_.find(key);
    return it == regs_.end() ? empty_ : it->second;
  }

  void write(ProcessId writer, const RegKey& key, V value) {
    if (key.owner != writer.index) {
      throw Error(ErrorCode::kModelViolation,
                  to_string(writer) + " wrote register " + to_string(key) + " it does not own");
    }
    regs_[key] = std::move(value);
    ++version_;
  }

  // Number of writes applied so far.
  std::uint64_t version() const { return version_; }
  std::size_t size() const { return regs_.size(); }

 private:
  std::map<RegKey, V> regs_;
  std::uint64_t version_ = 0;
  V empty_{};
};

// A linearizable binary consensus object.
struct ConsensusObject {
  std::optional<int> decision;
  std::uint8_t proposals_seen = 0;  // bit v set iff v was proposed

  int propose(int v) {
    if (v != 0 && v != 1) throw Error(ErrorCode::kModelError, "consensus proposal must be a bit");
    proposals_seen |= static_cast<std::uint8_t>(1u << v);
    if (!decision) decision = v;
    return *decision;
  }
};

class ConsRegistry {
 public:
  int access(const ConsKey& key, int proposal) {
    last_ = key;
    ++accesses_;
    return objects_[key].propose(proposal);
  }

  const ConsensusObject* find(const ConsKey& key) const {
    auto it = objects_.find(key);
    return it == objects_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return objects_.size(); }
  std::uint64_t accesses() const { return accesses_; }

  // Key of the most recent access; used by the event loop to label steps.
  const std::optional<ConsKey>& last_access() const { return last_; }
  void clear_last_access() { last_.reset(); }

  const std::map<ConsKey, ConsensusObject>& objects() const { return objects_; }

 private:
  std::map<ConsKey, ConsensusObject> objects_;
  std::optional<ConsKey> last_;
  std::uint64_t accesses_ = 0;
};

// Append-only sequence with O(1) value copies. Copies share storage; an append
// to a copy that is not at the shared tip clones its prefix first.
template <class T>
class AppendLog {
 public:
  AppendLog() : data_(std::make_shared<std::vector<T>>()) {}

  void push_back(T v) {
    if (data_->size() != len_) {
      data_ = std::make_shared<std::vector<T>>(data_->begin(), data_->begin() + static_cast<std::ptrdiff_t>(len_));
    }
    data_->push_back(std::move(v));
    ++len_;
  }

  std::size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }
  const T& operator[](std::size_t i) const { return (*data_)[i]; }
  const T& back() const { return (*data_)[len_ - 1]; }

  auto begin() const { return data_->begin(); }
  auto end() const { return data_->begin() + static_cast<std::ptrdiff_t>(len_); }

  std::vector<T> to_vector() const { return {begin(), end()}; }

  bool shares_storage_with(const AppendLog& o) const { return data_ == o.data_; }

  friend bool operator==(const AppendLog& a, const AppendLog& b) {
    if (a.len_ != b.len_) return false;
    if (a.data_ == b.data_) return true;
    for (std::size_t i = 0; i < a.len_; ++i)
      if (!(a[i] == b[i])) return false;
    return true;
  }

 private:
  std::shared_ptr<std::vector<T>> data_;
  std::size_t len_ = 0;
};

}  // namespace omega
