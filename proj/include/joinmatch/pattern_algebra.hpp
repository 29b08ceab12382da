#pragma once

#include <optional>
#include <vector>

#include "joinmatch/ast.hpp"
#include "joinmatch/types.hpp"

namespace joinmatch {

// Instance relation: true iff some substitution sends p to v. Variables and
// wildcards match anything. Inputs must share a type.
bool matches(const PatternPtr& p, const ValuePtr& v);

// The unique substitution with p{s} = v (unique by linearity), or nullopt.
std::optional<Substitution> match_bindings(const PatternPtr& p, const ValuePtr& v);

// Least upper bound: a pattern whose instance set is the intersection of the
// operands' instance sets; nullopt when the patterns are incompatible.
// Variables are treated as wildcards; the result is variable-free.
std::optional<PatternPtr> lub(const PatternPtr& p1, const PatternPtr& p2);

// Usefulness (algorithm U, generalized to pattern matrices): true iff some
// value is an instance of q and of no pattern in rows. All patterns have
// type t.
bool useful(const TypeEnv& env, const TypePtr& t,
            const std::vector<PatternPtr>& rows, const PatternPtr& q);

// p1 less precise than p2 (instances of p2 included in instances of p1);
// computed as the negation of useful([p1], p2).
bool leq(const TypeEnv& env, const TypePtr& t, const PatternPtr& p1,
         const PatternPtr& p2);

bool equiv(const TypeEnv& env, const TypePtr& t, const PatternPtr& p1,
           const PatternPtr& p2);

// Representative of an equivalence class: the lub of two equivalent patterns.
// Throws ReprError when the operands are not equivalent.
PatternPtr repr(const TypeEnv& env, const TypePtr& t, const PatternPtr& p1,
                const PatternPtr& p2);

// True iff the patterns jointly cover every value of type t.
bool exhaustive(const TypeEnv& env, const TypePtr& t,
                const std::vector<PatternPtr>& pi);

// Structure-preserving Variable -> Wildcard map.
PatternPtr erase_vars(const PatternPtr& p);

struct MatchOutcome {
  size_t clause_index;
  Substitution bindings;
};

// First-match policy: least index whose pattern admits v, with bindings.
std::optional<MatchOutcome> first_match(const std::vector<PatternPtr>& clauses,
                                        const ValuePtr& v);

// Binding-only extraction for residual matches that are known never to fail:
// walks the pattern and value positionally without testing constructors.
Substitution extract_bindings_unchecked(const PatternPtr& p, const ValuePtr& v);

// Brute-force oracle: every value of type t with constructor nesting depth
// <= depth and int leaves drawn from ints, each exactly once, deterministic
// order (declaration order, then argument combinations left-to-right).
std::vector<ValuePtr> enum_values(const TypeEnv& env, const TypePtr& t, int depth,
                                  const std::vector<long long>& ints);

// Smallest enumerated witness for useful(rows, q), for diagnostics.
std::optional<ValuePtr> useful_witness(const TypeEnv& env, const TypePtr& t,
                                       const std::vector<PatternPtr>& rows,
                                       const PatternPtr& q, int depth,
                                       const std::vector<long long>& ints);

}  // namespace joinmatch
