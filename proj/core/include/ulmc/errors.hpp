#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ulmc {

struct SourcePos {
  uint32_t line = 0;  // 1-based; 0 = unknown
  uint32_t col = 0;
};

// Parse-time failures (.ul models, .omg configs, queries, subset-IR).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, SourcePos pos = {})
      : std::runtime_error(format(msg, pos)), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  static std::string format(const std::string& msg, SourcePos pos) {
    if (pos.line == 0) return msg;
    return std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg;
  }
  SourcePos pos_;
};

// Frontend (subset-IR) lowering failures: unsupported constructs, recursion,
// frame overflow. Must fail loudly, never skip.
class FrontendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ulmc
