#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoopdef/hash.hpp"

namespace hoopdef {

/// Minimal CSV emitter with canonical double formatting.
class CsvWriter {
 public:
  CsvWriter& field(std::string_view s) {
    sep();
    out_ << s;
    return *this;
  }
  CsvWriter& field(double x) { return field(std::string_view(fmt_double(x))); }
  CsvWriter& field(int x) { return field(std::string_view(std::to_string(x))); }
  CsvWriter& field(long x) { return field(std::string_view(std::to_string(x))); }
  void endrow() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

  void save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << out_.str();
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostringstream out_;
  bool first_ = true;
};

}  // namespace hoopdef
