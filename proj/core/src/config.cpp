#include "hoopdef/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hoopdef {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse(buf.str());
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback, double lo,
                                  double hi) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v;
  try {
    v = std::stod(it->second);
  } catch (...) {
    throw std::runtime_error("config key " + key + ": not a number: " + it->second);
  }
  if (v < lo || v > hi)
    throw std::runtime_error("config key " + key + ": " + it->second + " outside [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

int KeyValueConfig::get_int(const std::string& key, int fallback, int lo, int hi) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  int v;
  try {
    v = std::stoi(it->second);
  } catch (...) {
    throw std::runtime_error("config key " + key + ": not an integer: " + it->second);
  }
  if (v < lo || v > hi)
    throw std::runtime_error("config key " + key + ": " + it->second + " outside [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

long long KeyValueConfig::get_int64(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (...) {
    throw std::runtime_error("config key " + key + ": not an integer: " + it->second);
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config key " + key + ": not a boolean: " + v);
}

}  // namespace hoopdef
