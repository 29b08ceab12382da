#pragma once

#include <stdexcept>
#include <string>

namespace joinmatch {

// Source position; line/col are 1-based, 0 means "unknown".
struct Loc {
  int line = 0;
  int col = 0;

  std::string str() const {
    if (line == 0) return "?";
    return std::to_string(line) + ":" + std::to_string(col);
  }
};

struct Error : std::runtime_error {
  Loc loc;
  Error(std::string msg, Loc l = {}) : std::runtime_error(std::move(msg)), loc(l) {}
};

struct SyntaxError : Error {
  using Error::Error;
};

struct TypeError : Error {
  using Error::Error;
};

// Duplicate binder where the disjoint union of Figure-style scope rules fails.
struct NonLinearError : Error {
  using Error::Error;
};

// Pattern-algebra operation applied to operands of different types.
struct TypeMismatchError : Error {
  using Error::Error;
};

// repr() called on non-equivalent patterns.
struct ReprError : Error {
  using Error::Error;
};

// preds_of() with a pattern equivalent to no lattice annotation.
struct NoVertexError : Error {
  using Error::Error;
};

struct StaleRedexError : Error {
  using Error::Error;
};

struct StateBudgetExceededError : Error {
  using Error::Error;
};

}  // namespace joinmatch
