#pragma once

#include <stdexcept>
#include <string>

#include "stsg/rational.hpp"

namespace stsg {

struct RootMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoOpenTree : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownTree : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IncompleteDerivation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyForest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The or/and graph has a cycle (unary elementary trees looping on a span),
// so derivation counts and sums diverge.
struct CyclicForest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidFormula : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DuplicateProduction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Carries the exact number of items that exist, when countable by DP.
struct CapExceeded : std::runtime_error {
  BigInt exact_count;
  bool count_known;
  CapExceeded(BigInt count, const std::string& what)
      : std::runtime_error(what), exact_count(std::move(count)), count_known(true) {}
};

struct TextParseError : std::runtime_error {
  int line;
  TextParseError(const std::string& msg, int line_number)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + msg),
        line(line_number) {}
};

}  // namespace stsg
