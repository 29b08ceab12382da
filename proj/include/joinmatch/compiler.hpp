#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "joinmatch/ast.hpp"
#include "joinmatch/lattice.hpp"

namespace joinmatch {

struct CompileOptions {
  bool optimize = true;  // §8.2.2 pruning of useless dispatcher clauses
};

// Compiler warnings (non-exhaustive channel patterns).
using WarningSink = std::function<void(const std::string&)>;

// Synthesized dispatcher for one channel, before materialization into a rule.
struct Dispatcher {
  Name channel;
  Name subject_var;
  std::vector<std::pair<PatternPtr, Name>> clauses;  // (annotation, forward channel)
  bool catch_all = false;
};

// Forwarding-channel names are compiler-private: `x@j` cannot be written in
// source programs, so user code can neither collide with nor send to them.
Name forwarding_channel_name(const Name& channel, int vertex_index);

// The Y_x transformer: rewrites every rule of d that defines x, and appends a
// dispatcher rule unless the single-exhaustive-pattern jump case applies.
// Channels other than x are untouched; the definition's interface is
// preserved.
DefinitionPtr transform_channel(const TypeEnv& env, const Definition& d,
                                const Name& x, const CompileOptions& opts = {},
                                const WarningSink& warn = nullptr);

// Dispatcher clauses in topological order restricted to kept vertices;
// catch-all present iff the source patterns are not exhaustive.
Dispatcher synth_dispatcher(const Name& x, const PatternLattice& l,
                            bool is_exhaustive, const std::set<int>& kept);

// §8.2.2: vertex j is kept iff its annotation is useful with respect to the
// annotations kept so far, processed in topological order.
std::set<int> prune_useless(const TypeEnv& env, const PatternLattice& l);

// The compilation scheme C[.]: homomorphic everywhere except Def, where the
// definition is transformed per defined channel in first-occurrence order.
ProcessPtr compile_process(const TypeEnv& env, const ProcessPtr& p,
                           const CompileOptions& opts = {},
                           const WarningSink& warn = nullptr);

// ---------------------------------------------------------------------------
// §8.3 lowering: join patterns to bitsets over channel slots, or-groups to
// matching-list entries sharing one guarded body through slot dictionaries.

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(size_t bits) : size_(bits), words_((bits + 63) / 64, 0) {}

  void set(size_t i) { words_[i / 64] |= (uint64_t{1} << (i % 64)); }
  void reset(size_t i) { words_[i / 64] &= ~(uint64_t{1} << (i % 64)); }
  bool test(size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }
  size_t size() const { return size_; }

  bool subset_of(const Bitset& o) const {
    for (size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~o.words_[w]) return false;
    return true;
  }

  bool operator==(const Bitset& o) const {
    return size_ == o.size_ && words_ == o.words_;
  }

  // Slot 0 printed leftmost, matching the §-style 110 examples.
  std::string str() const {
    std::string s;
    for (size_t i = 0; i < size_; ++i) s += test(i) ? '1' : '0';
    return s;
  }

 private:
  size_t size_ = 0;
  std::vector<uint64_t> words_;
};

struct MatchingEntry {
  Bitset bitset;                // one bit per conjunct channel
  std::vector<int> dictionary;  // per formal, the slot supplying it
  size_t body_ref;              // index into CompiledDefinition::bodies
};

struct GuardedBody {
  std::vector<Name> formals;  // conjunct variables in conjunct order
  ProcessPtr body;
  size_t source_rule;
};

struct CompiledDefinition {
  std::map<Name, int> slots;    // channel -> slot index, dense from 0
  std::vector<Name> slot_names; // slot index -> channel
  std::vector<MatchingEntry> matching_list;
  std::vector<GuardedBody> bodies;
  std::vector<DispatcherInfo> dispatchers;
};

// Requires Step 5 shape: every alternative is a single message pattern whose
// argument is a variable. Expands each rule's or-groups into the cartesian
// product of alternatives; all entries of one rule share one guarded body.
CompiledDefinition lower_or(const Definition& d);

// `bitset(binary)  dictionary  body#` lines.
std::string dump_matching(const CompiledDefinition& cd);

}  // namespace joinmatch
