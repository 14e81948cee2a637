#pragma once

#include <map>
#include <optional>
#include <string>

namespace hoopdef {

/// Flat sectioned key-value configuration:
///
///   [section]
///   key = value        # trailing comments allowed
///
/// Keys are addressed as "section.key"; an empty section prefix is fine
/// for top-level keys. Values validate and range-check on access.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback, double lo, double hi) const;
  int get_int(const std::string& key, int fallback, int lo, int hi) const;
  long long get_int64(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace hoopdef
