#pragma once

#include <stdexcept>
#include <string>

namespace ahdd {

// Single exception type for the library. The message carries enough context
// (file, line number, code name) for the CLI to print and exit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

}  // namespace ahdd
