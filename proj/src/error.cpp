#include "bidclub/error.hpp"

namespace bidclub {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid parameter";
    case ErrorKind::precondition_violation: return "precondition violation";
    case ErrorKind::no_participants: return "no participants";
    case ErrorKind::protocol_order: return "protocol order";
    case ErrorKind::scenario_unavailable: return "scenario unavailable";
    case ErrorKind::config: return "configuration";
    case ErrorKind::io: return "i/o";
  }
  return "unknown";
}

}  // namespace bidclub
