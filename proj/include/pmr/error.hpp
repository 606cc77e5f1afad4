#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmr {

enum class ErrorKind {
  invalid_argument,
  improper_system,
  pole_at_frequency,
  unclassifiable_plant,
  foi_flatness,
  no_limit_cycle,
  unstable_relay_loop,
  degenerate_tuning,
  closed_loop_unstable,
  parse_error,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the toolkit carries a machine-readable kind so the
/// CLI can report it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pmr
