#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "joinmatch/ast.hpp"
#include "joinmatch/compiler.hpp"
#include "joinmatch/typecheck.hpp"

namespace joinmatch {

enum class Mode { Direct, Compiled };

// A reducible choice of the machine: a React over a join pattern (direct rule
// variant or compiled matching entry), a Match step, or a dispatcher drop.
struct Redex {
  enum class Kind { React, MatchStep, Drop };

  Kind kind = Kind::React;
  // React
  size_t def_index = 0;
  size_t rule_index = 0;  // direct: expanded variant index; compiled: entry index
  std::vector<std::pair<int, size_t>> consumed;  // (slot, queue position)
  // MatchStep / Drop
  size_t runnable_index = 0;
  size_t clause_index = 0;
};

struct TraceStep {
  int index;
  std::string line;
  std::set<Name> barbs;
};

struct Trace {
  uint64_t seed = 0;
  std::vector<TraceStep> steps;
  std::set<Name> final_barbs;
  std::map<Name, std::vector<ValuePtr>> outputs;

  // One line per step, then BARBS and OUT lines.
  std::string dump() const;
};

// RCHAM state: live definitions with per-channel FIFO queues, a multiset of
// pending Match processes, and the observer record of sends on free channels.
// Structural rules are applied eagerly: Parallel/Def/Null never appear among
// the runnables, and message delivery happens at heating time.
//
// Single-owner mutable state; copying yields an independent machine.
class Machine {
 public:
  // Run policy picks per conjunct the oldest matching message and offers one
  // redex per rule variant; Explore branches over every matching position.
  enum class Policy { Run, Explore };

  static Machine load(const TypedProgram& prog, Mode mode);
  // Loads with an explicitly provided main process (used by the equivalence
  // harness to run a separately compiled body against prog's environment).
  static Machine load_process(const TypedProgram& prog, const ProcessPtr& main,
                              Mode mode);

  std::vector<Redex> enabled(Policy policy = Policy::Run) const;
  void step(const Redex& r);  // throws StaleRedexError when r is no longer enabled

  std::set<Name> barbs() const;
  const std::map<Name, std::vector<ValuePtr>>& outputs() const { return free_output_; }
  int step_count() const { return step_count_; }
  Mode mode() const { return mode_; }

  std::string describe(const Redex& r) const;

  // Canonical state fingerprint: channel identities renumbered in a fixed
  // traversal order, queues and runnables keyed as sorted multisets.
  std::string canonical_key() const;
  // Canonical free-output snapshot (sorted value multiset per channel).
  std::string output_snapshot() const;

  // Introspection for tests and the CLI.
  size_t definition_count() const { return defs_.size(); }
  size_t runnable_count() const { return runnables_.size(); }
  std::vector<ValuePtr> queue_of(const Name& channel) const;

 private:
  struct RuleVariant {
    size_t rule;  // source rule ordinal
    std::vector<MessagePattern> messages;
    ProcessPtr body;
  };

  struct LiveDef {
    DefinitionPtr source;  // sibling-substituted definition
    std::shared_ptr<const std::vector<RuleVariant>> variants;  // direct mode
    std::shared_ptr<const CompiledDefinition> compiled;        // compiled mode
    std::map<Name, int> slot_of;
    std::vector<Name> slot_names;
    std::vector<ChannelId> ids;              // slot -> global channel id
    std::vector<std::deque<ValuePtr>> queues;  // slot -> FIFO
    Bitset status;                            // compiled: nonempty-queue bits
  };

  struct Runnable {
    ProcessPtr match_node;
    ValuePtr subject;
  };

  void heat(const ProcessPtr& p);
  void heat_def(const ProcessPtr& p);
  ValuePtr eval(const ExprPtr& e) const;
  void deliver(ChannelId target, const Name& display, const ValuePtr& v);
  void check_status_invariant() const;

  Mode mode_ = Mode::Direct;
  std::vector<LiveDef> defs_;
  std::vector<Runnable> runnables_;
  std::map<Name, std::vector<ValuePtr>> free_output_;
  // Channel table: id -> (def index, slot); free channels use def == SIZE_MAX.
  std::vector<std::pair<size_t, int>> chan_table_;
  std::vector<Name> chan_names_;
  std::map<Name, ChannelId> free_ids_;
  int step_count_ = 0;
};

// Seeded uniform scheduler; deterministic for fixed (program, seed).
Trace run(Machine& m, uint64_t seed, int max_steps);

// Bounded exhaustive exploration.
struct ExploreSummary {
  std::set<Name> weak_barbs;
  std::set<std::string> terminal_outputs;
  size_t states_visited = 0;
  bool truncated = false;  // some non-terminal state sat at the depth bound
};

// BFS over canonicalized states up to `depth` reductions; throws
// StateBudgetExceededError past `budget` visited states.
ExploreSummary explore_machine(const Machine& initial, int depth, size_t budget);
ExploreSummary explore(const TypedProgram& prog, Mode mode, int depth,
                       size_t budget = 1000000);

}  // namespace joinmatch
