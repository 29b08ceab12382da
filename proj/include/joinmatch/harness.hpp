#pragma once

#include <string>
#include <vector>

#include "joinmatch/compiler.hpp"
#include "joinmatch/machine.hpp"
#include "joinmatch/parser.hpp"
#include "joinmatch/typecheck.hpp"

namespace joinmatch {

// Per-mode exploration summary used by the equivalence verdict.
struct ModeSummary {
  std::set<Name> weak_barbs;
  std::set<std::string> terminals;
  size_t states = 0;
  bool truncated = false;
};

// Bounded observational comparison of direct vs compiled semantics: the
// operational substitute for the congruence theorem, never a proof of it.
struct EquivVerdict {
  enum class Kind { EquivalentAtDepth, Distinguished, Inconclusive };

  Kind kind = Kind::Inconclusive;
  int depth = 0;
  ModeSummary direct_summary;
  ModeSummary compiled_summary;
  std::string witness;  // shortest distinguishing observation
  std::string note;     // inconclusive reason

  std::string describe() const;
};

EquivVerdict check_equivalence(const TypedProgram& prog, int depth, size_t budget,
                               const CompileOptions& opts = {});

// Compares prog's direct semantics against an externally supplied compiled
// main process (negative-control fixtures corrupt the compiled side).
EquivVerdict check_equivalence_against(const TypedProgram& prog,
                                       const ProcessPtr& compiled_main, int depth,
                                       size_t budget);

// Static diagnostics: per-channel exhaustiveness and per-match clause
// usefulness warnings.
std::vector<std::string> analyze_warnings(const TypedProgram& prog);

TypedProgram load_source(const std::string& text, const ParseOptions& opts = {});
TypedProgram load_file(const std::string& path, const ParseOptions& opts = {});

// ---------------------------------------------------------------------------
// CLI command bodies. Output goes to the returned string; exit codes follow
// the documented convention (0 ok/equivalent, 1 error, 2 distinguished,
// 3 inconclusive).

struct CommandResult {
  int exit_code = 0;
  std::string output;
};

struct CompileFlags {
  bool emit_core = true;
  bool dump_lattice = false;
  bool dump_matching = false;
  bool optimize = true;
};

CommandResult cmd_check(const std::string& path);
CommandResult cmd_compile(const std::string& path, const CompileFlags& flags);
CommandResult cmd_run(const std::string& path, Mode mode, uint64_t seed,
                      int max_steps, bool optimize = true);
CommandResult cmd_explore(const std::string& path, Mode mode, int depth,
                          size_t budget, bool optimize = true);
CommandResult cmd_equiv(const std::string& path, int depth, size_t budget,
                        bool optimize = true);

}  // namespace joinmatch
