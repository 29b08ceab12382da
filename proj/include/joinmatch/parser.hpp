#pragma once

#include <string>

#include "joinmatch/ast.hpp"

namespace joinmatch {

struct ParseOptions {
  // Loader mode: accepts compiler-private `x@j` channel names and `or`
  // groups inside join patterns (the shapes emitted by --emit-core).
  bool loader = false;
};

Program parse(const std::string& text, const ParseOptions& opts = {});

}  // namespace joinmatch
