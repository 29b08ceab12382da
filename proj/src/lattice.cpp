#include "joinmatch/lattice.hpp"

#include <algorithm>
#include <cassert>

namespace joinmatch {

namespace {

// Appends p to out unless an equivalent pattern is already there, in which
// case the kept entry is replaced by the representative of the class.
void push_upto_equiv(const TypeEnv& env, const TypePtr& t,
                     std::vector<PatternPtr>& out, const PatternPtr& p) {
  for (auto& q : out) {
    if (equiv(env, t, q, p)) {
      q = repr(env, t, q, p);
      return;
    }
  }
  out.push_back(p);
}

std::vector<PatternPtr> close_rec(const TypeEnv& env, const TypePtr& t,
                                  const std::vector<PatternPtr>& pi, size_t from) {
  if (from >= pi.size()) return {};
  std::vector<PatternPtr> rest = close_rec(env, t, pi, from + 1);
  std::vector<PatternPtr> out;
  push_upto_equiv(env, t, out, pi[from]);
  for (const auto& w : rest) push_upto_equiv(env, t, out, w);
  for (const auto& w : rest) {
    auto j = lub(pi[from], w);
    if (j) push_upto_equiv(env, t, out, *j);
  }
  return out;
}

}  // namespace

std::vector<PatternPtr> close_lub(const TypeEnv& env, const TypePtr& t,
                                  const std::vector<PatternPtr>& pi) {
  return close_rec(env, t, pi, 0);
}

std::vector<PatternPtr> dedupe(const TypeEnv& env, const TypePtr& t,
                               const std::vector<PatternPtr>& omega) {
  std::vector<PatternPtr> out;
  for (const auto& p : omega) push_upto_equiv(env, t, out, p);
  return out;
}

PatternLattice build(const TypeEnv& env, const TypePtr& t,
                     const std::vector<PatternPtr>& erased_source) {
  PatternLattice lattice;
  lattice.type = t;

  std::vector<PatternPtr> dedup = dedupe(env, t, erased_source);
  std::vector<PatternPtr> omega = close_lub(env, t, dedup);

  size_t m = omega.size();

  // finer[a][b]: omega[b] strictly more precise than omega[a].
  std::vector<std::vector<bool>> finer(m, std::vector<bool>(m, false));
  for (size_t a = 0; a < m; ++a)
    for (size_t b = 0; b < m; ++b)
      if (a != b && leq(env, t, omega[a], omega[b])) finer[a][b] = true;

  // Topological order, most precise first. Among unordered candidates pick
  // the highest constructor count, then the least canonical print.
  std::vector<size_t> order;
  std::vector<bool> placed(m, false);
  for (size_t step = 0; step < m; ++step) {
    size_t best = m;
    for (size_t v = 0; v < m; ++v) {
      if (placed[v]) continue;
      bool ready = true;
      for (size_t w = 0; w < m; ++w)
        if (!placed[w] && w != v && finer[v][w]) {
          ready = false;  // a strictly finer vertex is still unplaced
          break;
        }
      if (!ready) continue;
      if (best == m) {
        best = v;
        continue;
      }
      int cb = constructor_count(omega[best]);
      int cv = constructor_count(omega[v]);
      if (cv > cb || (cv == cb && to_string(omega[v]) < to_string(omega[best])))
        best = v;
    }
    assert(best < m);
    placed[best] = true;
    order.push_back(best);
  }

  std::vector<int> index_of(m, 0);  // omega position -> 1-based topo index
  for (size_t k = 0; k < m; ++k) index_of[order[k]] = static_cast<int>(k) + 1;

  for (size_t k = 0; k < m; ++k) {
    LatticeVertex v;
    v.index = static_cast<int>(k) + 1;
    v.annotation = omega[order[k]];
    lattice.vertices.push_back(std::move(v));
  }

  for (size_t a = 0; a < m; ++a)
    for (size_t b = 0; b < m; ++b)
      if (finer[a][b]) lattice.edges.emplace_back(index_of[b], index_of[a]);
  std::sort(lattice.edges.begin(), lattice.edges.end());

  // Origins and preds per source-rule ordinal.
  for (size_t s = 0; s < erased_source.size(); ++s) {
    int self = 0;
    for (auto& v : lattice.vertices)
      if (equiv(env, t, v.annotation, erased_source[s])) {
        v.origins.insert(s);
        self = v.index;
        break;
      }
    assert(self != 0);
    std::set<int> preds;
    preds.insert(self);
    for (const auto& v : lattice.vertices)
      if (leq(env, t, erased_source[s], v.annotation)) preds.insert(v.index);
    lattice.preds[s] = std::move(preds);
  }
  return lattice;
}

std::set<int> preds_of(const TypeEnv& env, const PatternLattice& l,
                       const PatternPtr& source_pattern) {
  PatternPtr erased = erase_vars(source_pattern);
  int self = 0;
  for (const auto& v : l.vertices)
    if (equiv(env, l.type, v.annotation, erased)) {
      self = v.index;
      break;
    }
  if (self == 0)
    throw NoVertexError("no lattice vertex is equivalent to " + to_string(erased));
  std::set<int> out;
  out.insert(self);
  for (const auto& v : l.vertices)
    if (leq(env, l.type, erased, v.annotation)) out.insert(v.index);
  return out;
}

std::string dump(const PatternLattice& l) {
  std::string out;
  for (const auto& v : l.vertices) {
    out += "#" + std::to_string(v.index) + "  " + to_string(v.annotation) + "  ";
    if (v.origins.empty()) {
      out += "-";
    } else {
      // All origins of one vertex share the same I set.
      const auto& I = l.preds.at(*v.origins.begin());
      out += "I={";
      bool first = true;
      for (int i : I) {
        if (!first) out += ",";
        first = false;
        out += std::to_string(i);
      }
      out += "}";
    }
    out += "\n";
  }
  return out;
}

}  // namespace joinmatch
