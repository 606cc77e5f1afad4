#include "pmr/error.hpp"

namespace pmr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::improper_system: return "improper_system";
    case ErrorKind::pole_at_frequency: return "pole_at_frequency";
    case ErrorKind::unclassifiable_plant: return "unclassifiable_plant";
    case ErrorKind::foi_flatness: return "foi_flatness";
    case ErrorKind::no_limit_cycle: return "no_limit_cycle";
    case ErrorKind::unstable_relay_loop: return "unstable_relay_loop";
    case ErrorKind::degenerate_tuning: return "degenerate_tuning";
    case ErrorKind::closed_loop_unstable: return "closed_loop_unstable";
    case ErrorKind::parse_error: return "parse_error";
  }
  return "unknown";
}

}  // namespace pmr
