#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ieim/core.hpp"

namespace ieim {

/// Malformed binary input; offset points at the first bad byte.
struct DecodeError : std::runtime_error {
  std::size_t offset;
  DecodeError(std::size_t off, const std::string& what)
      : std::runtime_error(what + " at offset " + std::to_string(off)), offset(off) {}
};

/// Malformed text input; line numbers are 1-based.
struct ParseError : std::runtime_error {
  std::size_t line;
  ParseError(std::size_t ln, const std::string& what)
      : std::runtime_error("line " + std::to_string(ln) + ": " + what), line(ln) {}
};

/// A stream failed its invariants where a valid one was required.
struct ValidationError : std::runtime_error {
  std::vector<Violation> violations;
  explicit ValidationError(std::vector<Violation> v)
      : std::runtime_error(describe(v)), violations(std::move(v)) {}

 private:
  static std::string describe(const std::vector<Violation>& v) {
    std::string s = "invalid stream (" + std::to_string(v.size()) + " violations)";
    for (std::size_t i = 0; i < v.size() && i < 3; ++i)
      s += "; [" + std::to_string(v[i].index) + "] " + v[i].message;
    return s;
  }
};

/// Requested work exceeds the configured resource guard.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ieim
