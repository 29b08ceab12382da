#pragma once

#include <map>

#include "joinmatch/ast.hpp"
#include "joinmatch/types.hpp"

namespace joinmatch {

// A checked program. Every channel of every definition has a ground content
// type recorded in Definition::channel_types, every Match node carries its
// subject type, and free output channels are listed with their content types.
struct TypedProgram {
  Program program;
  TypeEnv env;
  std::map<Name, TypePtr> free_channels;
};

// Throws TypeError / NonLinearError on the first problem found. Channel types
// are inferred by local unification; channels whose type is not pinned by any
// use must carry a `: T` annotation.
TypedProgram typecheck(Program program);

}  // namespace joinmatch
