#pragma once

#include <map>
#include <set>
#include <vector>

#include "joinmatch/pattern_algebra.hpp"

namespace joinmatch {

struct LatticeVertex {
  int index = 0;                // 1-based topological position
  PatternPtr annotation;
  std::set<size_t> origins;     // source-rule ordinals whose pattern is equivalent
};

// Lub-closed, equivalence-deduplicated DAG of patterns. Vertices are stored
// in topological order: more precise annotations come first. Edges run from
// the more precise vertex toward the less precise one; I(pi) collects the
// indices of every vertex at least as precise as pi's own vertex, pi's vertex
// included.
struct PatternLattice {
  TypePtr type;
  std::vector<LatticeVertex> vertices;
  std::vector<std::pair<int, int>> edges;  // (finer index, coarser index)
  std::map<size_t, std::set<int>> preds;   // source ordinal -> I(pi)
};

// Closure under least upper bounds, following the F recursion
// F(pi; Pi') = pi; F(Pi'); pi ^ F(Pi'). Patterns equivalent to an already
// emitted one are folded into its representative as they appear.
std::vector<PatternPtr> close_lub(const TypeEnv& env, const TypePtr& t,
                                  const std::vector<PatternPtr>& pi);

// Keeps one representative per equivalence class, first-occurrence order.
std::vector<PatternPtr> dedupe(const TypeEnv& env, const TypePtr& t,
                               const std::vector<PatternPtr>& omega);

// Builds the lattice from the erased pattern arguments of one channel, one
// entry per source rule (duplicates allowed; deduplication is internal).
// Topological ties break on descending constructor-node count, then on the
// canonical print, ascending.
PatternLattice build(const TypeEnv& env, const TypePtr& t,
                     const std::vector<PatternPtr>& erased_source);

// I(pi) for a pattern equivalent to some annotation; throws NoVertexError.
std::set<int> preds_of(const TypeEnv& env, const PatternLattice& l,
                       const PatternPtr& source_pattern);

// Debug dump: one vertex per line, `#index  annotation  I={...}` for origin
// vertices, `#index  annotation  -` otherwise.
std::string dump(const PatternLattice& l);

}  // namespace joinmatch
