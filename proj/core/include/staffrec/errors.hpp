#pragma once

#include <stdexcept>
#include <string>

namespace staffrec {

/// Filesystem-level failure: unreadable input, unwritable output.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or unsupported file content (bad PNG, truncated PGM, bad JSON).
class format_error : public std::runtime_error {
 public:
  explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller broke an API precondition or an internal invariant failed.
/// Maps to exit code 3 in the command line tool.
class contract_violation : public std::logic_error {
 public:
  explicit contract_violation(const std::string& msg) : std::logic_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw contract_violation(msg);
}

}  // namespace staffrec
