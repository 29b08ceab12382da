#pragma once

#include <random>
#include <string>

#include "joinmatch/ast.hpp"
#include "joinmatch/types.hpp"

namespace joinmatch::testutil {

// type list = Nil | Cons(int, list)
inline TypeEnv list_env() {
  TypeEnv env;
  TypeDecl list;
  list.name = "list";
  list.ctors.push_back({"Nil", {}, {}});
  list.ctors.push_back({"Cons", {Type::integer(), Type::named("list")}, {}});
  env.declare(list);
  env.finalize();
  return env;
}

inline TypePtr list_type() { return Type::named("list"); }

inline PatternPtr nil() { return Pattern::ctor("Nil", {}); }
inline PatternPtr cons(PatternPtr h, PatternPtr t) {
  return Pattern::ctor("Cons", {std::move(h), std::move(t)});
}
inline PatternPtr wild() { return Pattern::wildcard(); }

inline ValuePtr vnil() { return Value::make_ctor("Nil", {}); }
inline ValuePtr vcons(ValuePtr h, ValuePtr t) {
  return Value::make_ctor("Cons", {std::move(h), std::move(t)});
}
inline ValuePtr vint(long long n) { return Value::integer(n); }

// List value [a, b, ...] from ints.
inline ValuePtr vlist(std::initializer_list<long long> xs) {
  ValuePtr v = vnil();
  std::vector<long long> items(xs);
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    v = vcons(vint(*it), v);
  return v;
}

// Random linear list-of-int pattern with nesting depth <= depth and int
// constants from {0, 1}.
inline PatternPtr random_list_pattern(std::mt19937_64& rng, int depth,
                                      int& next_var) {
  auto int_pattern = [&]() -> PatternPtr {
    switch (rng() % 4) {
      case 0:
        return Pattern::wildcard();
      case 1:
        return Pattern::var("i" + std::to_string(next_var++));
      case 2:
        return Pattern::integer(0);
      default:
        return Pattern::integer(1);
    }
  };
  // Constructor nodes (Nil included) cost one level of depth, so a depth-0
  // budget leaves only wildcards and variables.
  if (depth <= 0) {
    return rng() % 2 ? Pattern::wildcard()
                     : Pattern::var("x" + std::to_string(next_var++));
  }
  switch (rng() % 6) {
    case 0:
      return Pattern::wildcard();
    case 1:
      return Pattern::var("x" + std::to_string(next_var++));
    case 2:
      return nil();
    default:
      return cons(int_pattern(), random_list_pattern(rng, depth - 1, next_var));
  }
}

}  // namespace joinmatch::testutil
