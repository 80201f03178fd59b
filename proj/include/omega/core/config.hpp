#pragma once

#include <charconv>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "omega/core/types.hpp"

namespace omega {

// Plain-text `key = value` file. `#` starts a comment; blank lines are
// ignored; a repeated key appends (used for `crash`).
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in) {
    KeyValueConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::kConfigError, "line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw Error(ErrorCode::kConfigError, "line " + std::to_string(lineno) + ": empty key");
      c.values_[key].push_back(value);
    }
    return c;
  }

  static KeyValueConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::vector<std::string>& all(const std::string& key) const {
    static const std::vector<std::string> none;
    auto it = values_.find(key);
    return it == values_.end() ? none : it->second;
  }

  std::string get(const std::string& key, const std::string& fallback) const {
    const auto& v = all(key);
    return v.empty() ? fallback : v.back();
  }

  template <class T>
  T get_number(const std::string& key, T fallback) const {
    const auto& v = all(key);
    return v.empty() ? fallback : parse_number<T>(key, v.back());
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) out.push_back(k);
    return out;
  }

  template <class T>
  static T parse_number(const std::string& key, const std::string& text) {
    T out{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw Error(ErrorCode::kConfigError, key + ": not a number: '" + text + "'");
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::vector<std::string>> values_;
};

// "p3@100" or "3@100" -> (3, 100).
inline std::pair<int, Time> parse_crash(const std::string& s) {
  const auto at = s.find('@');
  if (at == std::string::npos) throw Error(ErrorCode::kConfigError, "crash '" + s + "': expected pid@time");
  const ProcessId p = parse_process_id(s.substr(0, at));
  return {p.index, KeyValueConfig::parse_number<Time>("crash", s.substr(at + 1))};
}

}  // namespace omega
