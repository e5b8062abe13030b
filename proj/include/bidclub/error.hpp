#pragma once

#include <stdexcept>
#include <string>

namespace bidclub {

enum class ErrorKind {
  invalid_parameter,
  precondition_violation,
  no_participants,
  protocol_order,
  scenario_unavailable,
  config,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception type for every failure raised by the library. The kind lets
/// callers (notably the CLI) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace bidclub
