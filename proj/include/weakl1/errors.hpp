#pragma once

#include <stdexcept>
#include <string>

namespace weakl1 {

// Parameter or precondition violations (bad n, malformed segments, ...).
struct invalid_parameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Structural problems with piecewise data (overlap, breakpoint straddle, pole in closure).
struct segment_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parse failures for "p/q" strings, JSON payloads, CLI selectors.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A certified computation ran out of refinement budget before meeting its
// tolerance. Carries the best enclosure found so far as "lo/hi" strings so
// callers can report it.
struct inconclusive_error : std::runtime_error {
    std::string best_lo, best_hi;
    inconclusive_error(const std::string& what, std::string lo, std::string hi)
        : std::runtime_error(what), best_lo(std::move(lo)), best_hi(std::move(hi)) {}
};

// Guard against blow-up: requested exact object would exceed the configured
// size budget (e.g. dense sequence of length n^(2^(n-1)) for large n).
struct size_budget_error : std::length_error {
    using std::length_error::length_error;
};

} // namespace weakl1
