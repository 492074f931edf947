#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "cbv/rational.hpp"

namespace cbv {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed expression / polygon / interval / flag input.
struct ParseError : Error {
  using Error::Error;
};

// Argument outside the domain of an operation (e.g. evaluation point
// outside [0;1] beyond precision slack).
struct DomainError : Error {
  using Error::Error;
};

// A name was caught violating its own declared invariants (e.g. stage
// polygons that are not a Cauchy sequence).  Once thrown, the name keeps
// throwing: lazily detected inconsistency must not be silently absorbed.
struct PoisonedName : Error {
  using Error::Error;
};

// A bounded certification search ran out of steps.  Carries the best
// enclosure reached so callers can report partial progress.
struct EffortExhausted : Error {
  EffortExhausted(const std::string& what, std::optional<Rat> lo = {},
                  std::optional<Rat> hi = {})
      : Error(what), lo(std::move(lo)), hi(std::move(hi)) {}
  std::optional<Rat> lo, hi;
};

}  // namespace cbv
