#include "joinmatch/harness.hpp"

#include <fstream>
#include <sstream>

#include "joinmatch/lattice.hpp"
#include "joinmatch/pattern_algebra.hpp"

namespace joinmatch {

TypedProgram load_source(const std::string& text, const ParseOptions& opts) {
  return typecheck(parse(text, opts));
}

TypedProgram load_file(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_source(buf.str(), opts);
}

// ---------------------------------------------------------------------------
// Equivalence.

namespace {

ModeSummary to_mode_summary(const ExploreSummary& s) {
  return ModeSummary{s.weak_barbs, s.terminal_outputs, s.states_visited,
                     s.truncated};
}

EquivVerdict compare_summaries(ModeSummary direct, ModeSummary compiled,
                               int depth) {
  EquivVerdict v;
  v.depth = depth;
  v.direct_summary = std::move(direct);
  v.compiled_summary = std::move(compiled);

  for (const auto& b : v.direct_summary.weak_barbs)
    if (!v.compiled_summary.weak_barbs.count(b)) {
      v.kind = EquivVerdict::Kind::Distinguished;
      v.witness = "barb on '" + b + "' (direct only)";
      return v;
    }
  for (const auto& b : v.compiled_summary.weak_barbs)
    if (!v.direct_summary.weak_barbs.count(b)) {
      v.kind = EquivVerdict::Kind::Distinguished;
      v.witness = "barb on '" + b + "' (compiled only)";
      return v;
    }

  // Shortest distinguishing terminal snapshot, for replayability.
  std::string best;
  bool found = false;
  bool direct_side = false;
  auto probe = [&](const std::set<std::string>& a, const std::set<std::string>& b,
                   bool from_direct) {
    for (const auto& t : a)
      if (!b.count(t) && (!found || t.size() < best.size())) {
        best = t;
        found = true;
        direct_side = from_direct;
      }
  };
  probe(v.direct_summary.terminals, v.compiled_summary.terminals, true);
  probe(v.compiled_summary.terminals, v.direct_summary.terminals, false);
  if (found) {
    v.kind = EquivVerdict::Kind::Distinguished;
    v.witness = "terminal outputs {" + best + "} (" +
                (direct_side ? "direct" : "compiled") + " only)";
    return v;
  }
  v.kind = EquivVerdict::Kind::EquivalentAtDepth;
  return v;
}

}  // namespace

std::string EquivVerdict::describe() const {
  switch (kind) {
    case Kind::EquivalentAtDepth:
      return "equivalent-at-depth " + std::to_string(depth) + " (direct: " +
             std::to_string(direct_summary.states) + " states, compiled: " +
             std::to_string(compiled_summary.states) + " states)";
    case Kind::Distinguished:
      return "distinguished: " + witness;
    case Kind::Inconclusive:
      return "inconclusive: " + note;
  }
  return "?";
}

EquivVerdict check_equivalence_against(const TypedProgram& prog,
                                       const ProcessPtr& compiled_main, int depth,
                                       size_t budget) {
  try {
    auto direct =
        explore_machine(Machine::load(prog, Mode::Direct), depth, budget);
    auto compiled = explore_machine(
        Machine::load_process(prog, compiled_main, Mode::Compiled), depth, budget);
    return compare_summaries(to_mode_summary(direct), to_mode_summary(compiled),
                             depth);
  } catch (const StateBudgetExceededError& e) {
    EquivVerdict v;
    v.kind = EquivVerdict::Kind::Inconclusive;
    v.depth = depth;
    v.note = e.what();
    return v;
  }
}

EquivVerdict check_equivalence(const TypedProgram& prog, int depth, size_t budget,
                               const CompileOptions& opts) {
  ProcessPtr compiled = compile_process(prog.env, prog.program.main, opts);
  return check_equivalence_against(prog, compiled, depth, budget);
}

// ---------------------------------------------------------------------------
// Static diagnostics.

namespace {

void analyze_process(const TypedProgram& prog, const ProcessPtr& p,
                     std::vector<std::string>& out) {
  switch (p->kind) {
    case Process::Kind::Null:
    case Process::Kind::Send:
      return;
    case Process::Kind::Par:
      analyze_process(prog, p->left, out);
      analyze_process(prog, p->right, out);
      return;
    case Process::Kind::Def: {
      const Definition& d = *p->definition;
      // Per-channel pattern-argument exhaustiveness (Step 0.3 of the
      // transformer, run here as a pure analysis).
      std::map<Name, std::vector<PatternPtr>> per_channel;
      std::vector<Name> order;
      for (const auto& r : d.rules)
        for (const auto& conj : r.pattern.conjuncts)
          for (const auto& alt : conj.alts)
            for (const auto& m : alt) {
              if (!per_channel.count(m.channel)) order.push_back(m.channel);
              per_channel[m.channel].push_back(erase_vars(m.arg));
            }
      for (const auto& x : order) {
        const TypePtr& t = d.channel_types.at(x);
        if (resolve(t)->kind == Type::Kind::Chan) {
          // Channel-typed contents are only matched by variables.
          continue;
        }
        if (!exhaustive(prog.env, t, per_channel[x]))
          out.push_back("warning: patterns on channel '" + x +
                        "' are not exhaustive; unmatched messages will never be consumed");
      }
      for (const auto& r : d.rules) analyze_process(prog, r.body, out);
      analyze_process(prog, p->body, out);
      return;
    }
    case Process::Kind::Match: {
      std::vector<PatternPtr> earlier;
      for (size_t i = 0; i < p->clauses.size(); ++i) {
        PatternPtr erased = erase_vars(p->clauses[i].pattern);
        if (i > 0 && !useful(prog.env, p->subject_type, earlier, erased))
          out.push_back("warning: match clause " + std::to_string(i + 1) + " (" +
                        to_string(p->clauses[i].pattern) + ") is useless");
        earlier.push_back(erased);
      }
      if (!exhaustive(prog.env, p->subject_type, earlier))
        out.push_back("warning: match at " + p->loc.str() + " is not exhaustive");
      for (const auto& c : p->clauses) analyze_process(prog, c.body, out);
      return;
    }
  }
}

}  // namespace

std::vector<std::string> analyze_warnings(const TypedProgram& prog) {
  std::vector<std::string> out;
  analyze_process(prog, prog.program.main, out);
  return out;
}

// ---------------------------------------------------------------------------
// Commands.

namespace {

// Lattice dumps for every definition channel that needs a dispatcher.
void dump_lattices(const TypedProgram& prog, const ProcessPtr& p, std::string& out) {
  switch (p->kind) {
    case Process::Kind::Null:
    case Process::Kind::Send:
      return;
    case Process::Kind::Par:
      dump_lattices(prog, p->left, out);
      dump_lattices(prog, p->right, out);
      return;
    case Process::Kind::Match:
      for (const auto& c : p->clauses) dump_lattices(prog, c.body, out);
      return;
    case Process::Kind::Def: {
      const Definition& d = *p->definition;
      std::map<Name, std::vector<PatternPtr>> per_channel;
      std::vector<Name> order;
      for (const auto& r : d.rules)
        for (const auto& conj : r.pattern.conjuncts)
          for (const auto& alt : conj.alts)
            for (const auto& m : alt) {
              if (!per_channel.count(m.channel)) order.push_back(m.channel);
              per_channel[m.channel].push_back(erase_vars(m.arg));
            }
      for (const auto& x : order) {
        const TypePtr& t = d.channel_types.at(x);
        if (resolve(t)->kind == Type::Kind::Chan) continue;
        auto deduped = dedupe(prog.env, t, per_channel[x]);
        if (deduped.size() == 1 && exhaustive(prog.env, t, deduped))
          continue;  // jump case: no lattice, no dispatcher
        PatternLattice l = build(prog.env, t, per_channel[x]);
        out += "lattice " + x + ":\n" + dump(l);
      }
      for (const auto& r : d.rules) dump_lattices(prog, r.body, out);
      dump_lattices(prog, p->body, out);
      return;
    }
  }
}

void dump_matchings(const ProcessPtr& p, std::string& out) {
  switch (p->kind) {
    case Process::Kind::Null:
    case Process::Kind::Send:
      return;
    case Process::Kind::Par:
      dump_matchings(p->left, out);
      dump_matchings(p->right, out);
      return;
    case Process::Kind::Match:
      for (const auto& c : p->clauses) dump_matchings(c.body, out);
      return;
    case Process::Kind::Def: {
      out += dump_matching(lower_or(*p->definition));
      for (const auto& r : p->definition->rules) dump_matchings(r.body, out);
      dump_matchings(p->body, out);
      return;
    }
  }
}

}  // namespace

CommandResult cmd_check(const std::string& path) {
  CommandResult res;
  try {
    TypedProgram prog = load_file(path);
    for (const auto& w : analyze_warnings(prog)) res.output += w + "\n";
    res.output += "ok\n";
    return res;
  } catch (const Error& e) {
    res.exit_code = 1;
    res.output = "error: " + std::string(e.what()) +
                 (e.loc.line ? " at " + e.loc.str() : "") + "\n";
    return res;
  }
}

CommandResult cmd_compile(const std::string& path, const CompileFlags& flags) {
  CommandResult res;
  try {
    TypedProgram prog = load_file(path);
    CompileOptions opts;
    opts.optimize = flags.optimize;
    std::vector<std::string> warnings;
    ProcessPtr compiled = compile_process(
        prog.env, prog.program.main, opts,
        [&](const std::string& w) { warnings.push_back("warning: " + w); });
    for (const auto& w : warnings) res.output += w + "\n";
    if (flags.dump_lattice) dump_lattices(prog, prog.program.main, res.output);
    if (flags.dump_matching) dump_matchings(compiled, res.output);
    if (flags.emit_core) {
      Program core{prog.program.decls, compiled};
      res.output += print_program(core);
    }
    return res;
  } catch (const Error& e) {
    res.exit_code = 1;
    res.output = "error: " + std::string(e.what()) +
                 (e.loc.line ? " at " + e.loc.str() : "") + "\n";
    return res;
  }
}

CommandResult cmd_run(const std::string& path, Mode mode, uint64_t seed,
                      int max_steps, bool optimize) {
  CommandResult res;
  try {
    ParseOptions popts;
    popts.loader = true;
    TypedProgram prog = load_file(path, popts);
    Machine m = mode == Mode::Compiled
                    ? Machine::load_process(
                          prog,
                          compile_process(prog.env, prog.program.main,
                                          CompileOptions{optimize}),
                          Mode::Compiled)
                    : Machine::load(prog, Mode::Direct);
    Trace t = run(m, seed, max_steps);
    res.output = t.dump();
    return res;
  } catch (const StaleRedexError& e) {
    res.exit_code = 1;
    res.output = "error: " + std::string(e.what()) + "\n";
    return res;
  } catch (const Error& e) {
    res.exit_code = 1;
    res.output = "error: " + std::string(e.what()) +
                 (e.loc.line ? " at " + e.loc.str() : "") + "\n";
    return res;
  }
}

CommandResult cmd_explore(const std::string& path, Mode mode, int depth,
                          size_t budget, bool optimize) {
  CommandResult res;
  try {
    ParseOptions popts;
    popts.loader = true;
    TypedProgram prog = load_file(path, popts);
    Machine m = mode == Mode::Compiled
                    ? Machine::load_process(
                          prog,
                          compile_process(prog.env, prog.program.main,
                                          CompileOptions{optimize}),
                          Mode::Compiled)
                    : Machine::load(prog, Mode::Direct);
    ExploreSummary s = explore_machine(m, depth, budget);
    res.output += "states: " + std::to_string(s.states_visited) + "\n";
    res.output += "weak barbs: {";
    bool first = true;
    for (const auto& b : s.weak_barbs) {
      if (!first) res.output += ", ";
      first = false;
      res.output += b;
    }
    res.output += "}\n";
    for (const auto& t : s.terminal_outputs) res.output += "terminal: " + t + "\n";
    if (s.truncated) res.output += "truncated at depth " + std::to_string(depth) + "\n";
    return res;
  } catch (const StateBudgetExceededError& e) {
    res.exit_code = 3;
    res.output = "inconclusive: " + std::string(e.what()) + "\n";
    return res;
  } catch (const Error& e) {
    res.exit_code = 1;
    res.output = "error: " + std::string(e.what()) + "\n";
    return res;
  }
}

CommandResult cmd_equiv(const std::string& path, int depth, size_t budget,
                        bool optimize) {
  CommandResult res;
  try {
    TypedProgram prog = load_file(path);
    EquivVerdict v = check_equivalence(prog, depth, budget, CompileOptions{optimize});
    res.output = v.describe() + "\n";
    switch (v.kind) {
      case EquivVerdict::Kind::EquivalentAtDepth:
        res.exit_code = 0;
        break;
      case EquivVerdict::Kind::Distinguished:
        res.exit_code = 2;
        break;
      case EquivVerdict::Kind::Inconclusive:
        res.exit_code = 3;
        break;
    }
    return res;
  } catch (const Error& e) {
    res.exit_code = 1;
    res.output = "error: " + std::string(e.what()) + "\n";
    return res;
  }
}

}  // namespace joinmatch
