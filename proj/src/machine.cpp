#include "joinmatch/machine.hpp"

#include <algorithm>
#include <cassert>
#include <random>

#include "joinmatch/pattern_algebra.hpp"

namespace joinmatch {

namespace {

// Expands or-groups into flat rule variants (the §4 sugar, read as rule
// duplication). Bodies are shared, not copied.
std::vector<std::pair<size_t, std::vector<MessagePattern>>> expand_rule(
    const ReactionRule& rule, size_t rule_index) {
  std::vector<std::vector<MessagePattern>> acc{{}};
  for (const auto& conj : rule.pattern.conjuncts) {
    std::vector<std::vector<MessagePattern>> next;
    for (const auto& prefix : acc)
      for (const auto& alt : conj.alts) {
        auto merged = prefix;
        merged.insert(merged.end(), alt.begin(), alt.end());
        next.push_back(std::move(merged));
      }
    acc = std::move(next);
  }
  std::vector<std::pair<size_t, std::vector<MessagePattern>>> out;
  out.reserve(acc.size());
  for (auto& msgs : acc) out.emplace_back(rule_index, std::move(msgs));
  return out;
}

}  // namespace

Machine Machine::load(const TypedProgram& prog, Mode mode) {
  return load_process(prog, prog.program.main, mode);
}

Machine Machine::load_process(const TypedProgram& prog, const ProcessPtr& main,
                              Mode mode) {
  Machine m;
  m.mode_ = mode;
  // Free output channels become pre-minted observer channels; substituting
  // them up front closes the process for real.
  Substitution free_subst;
  for (const auto& [name, type] : prog.free_channels) {
    ChannelId id{static_cast<int>(m.chan_table_.size())};
    m.chan_table_.emplace_back(SIZE_MAX, 0);
    m.chan_names_.push_back(name);
    m.free_ids_[name] = id;
    m.free_output_[name];  // present even when never sent to
    free_subst.emplace(name, Value::channel(id, name));
  }
  m.heat(substitute(main, free_subst));
  return m;
}

ValuePtr Machine::eval(const ExprPtr& e) const {
  switch (e->kind) {
    case Expression::Kind::Int:
      return Value::integer(e->int_value);
    case Expression::Kind::Chan:
      return Value::channel(e->chan, e->chan_name);
    case Expression::Kind::Var:
      // Closed solutions only (Figure 3 side conditions); an open expression
      // here is a machine bug, not a user error.
      throw Error("open expression at runtime: variable '" + e->name + "'");
    case Expression::Kind::Ctor: {
      std::vector<ValuePtr> args;
      args.reserve(e->args.size());
      for (const auto& a : e->args) args.push_back(eval(a));
      return Value::make_ctor(e->name, std::move(args));
    }
  }
  return nullptr;
}

void Machine::deliver(ChannelId target, const Name& display, const ValuePtr& v) {
  assert(target.valid() && static_cast<size_t>(target.raw) < chan_table_.size());
  auto [def_index, slot] = chan_table_[static_cast<size_t>(target.raw)];
  if (def_index == SIZE_MAX) {
    free_output_[chan_names_[static_cast<size_t>(target.raw)]].push_back(v);
    return;
  }
  (void)display;
  LiveDef& def = defs_[def_index];
  def.queues[static_cast<size_t>(slot)].push_back(v);
  if (mode_ == Mode::Compiled) def.status.set(static_cast<size_t>(slot));
}

void Machine::heat_def(const ProcessPtr& p) {
  const Definition& d = *p->definition;

  LiveDef live;
  Substitution sigma;
  for (const auto& r : d.rules)
    for (const auto& conj : r.pattern.conjuncts)
      for (const auto& alt : conj.alts)
        for (const auto& m : alt)
          if (!live.slot_of.count(m.channel)) {
            int slot = static_cast<int>(live.slot_names.size());
            live.slot_of[m.channel] = slot;
            live.slot_names.push_back(m.channel);
            ChannelId id{static_cast<int>(chan_table_.size())};
            chan_table_.emplace_back(defs_.size(), slot);
            chan_names_.push_back(m.channel);
            live.ids.push_back(id);
            sigma.emplace(m.channel, Value::channel(id, m.channel));
          }
  live.queues.resize(live.slot_names.size());

  // dv(D) is fresh by construction (new opaque ids); rule bodies close over
  // their siblings here.
  live.source = substitute_def(d, sigma);

  if (mode_ == Mode::Compiled) {
    live.compiled = std::make_shared<const CompiledDefinition>(lower_or(*live.source));
    live.status = Bitset(live.slot_names.size());
    // lower_or assigns slots in the same first-occurrence order.
    assert(live.compiled->slot_names == live.slot_names);
  } else {
    auto variants = std::make_shared<std::vector<RuleVariant>>();
    for (size_t r = 0; r < live.source->rules.size(); ++r)
      for (auto& [rule, msgs] : expand_rule(live.source->rules[r], r))
        variants->push_back(RuleVariant{rule, std::move(msgs),
                                        live.source->rules[r].body});
    live.variants = std::move(variants);
  }

  defs_.push_back(std::move(live));
  heat(substitute(p->body, sigma));
}

void Machine::heat(const ProcessPtr& p) {
  switch (p->kind) {
    case Process::Kind::Null:
      return;  // Str-Null
    case Process::Kind::Par:  // Str-Par
      heat(p->left);
      heat(p->right);
      return;
    case Process::Kind::Def:  // Str-Def
      heat_def(p);
      return;
    case Process::Kind::Send: {
      if (!p->chan.valid())
        throw Error("send on unresolved channel '" + p->chan_name + "'");
      deliver(p->chan, p->chan_name, eval(p->arg));
      return;
    }
    case Process::Kind::Match:
      runnables_.push_back(Runnable{p, eval(p->subject)});
      return;
  }
}

std::vector<Redex> Machine::enabled(Policy policy) const {
  std::vector<Redex> out;

  for (size_t d = 0; d < defs_.size(); ++d) {
    const LiveDef& def = defs_[d];
    if (mode_ == Mode::Direct) {
      const auto& variants = *def.variants;
      for (size_t v = 0; v < variants.size(); ++v) {
        const auto& msgs = variants[v].messages;
        // Candidate positions per conjunct message.
        std::vector<std::vector<size_t>> choices(msgs.size());
        bool feasible = true;
        for (size_t k = 0; k < msgs.size(); ++k) {
          int slot = def.slot_of.at(msgs[k].channel);
          const auto& queue = def.queues[static_cast<size_t>(slot)];
          for (size_t pos = 0; pos < queue.size(); ++pos) {
            if (matches(msgs[k].arg, queue[pos])) {
              choices[k].push_back(pos);
              if (policy == Policy::Run) break;  // oldest matching only
            }
          }
          if (choices[k].empty()) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        std::vector<size_t> pick(msgs.size(), 0);
        for (;;) {
          Redex r;
          r.kind = Redex::Kind::React;
          r.def_index = d;
          r.rule_index = v;
          for (size_t k = 0; k < msgs.size(); ++k)
            r.consumed.emplace_back(def.slot_of.at(msgs[k].channel),
                                    choices[k][pick[k]]);
          out.push_back(std::move(r));
          size_t k = pick.size();
          while (k > 0) {
            --k;
            if (++pick[k] < choices[k].size()) break;
            pick[k] = 0;
            if (k == 0) {
              k = SIZE_MAX;
              break;
            }
          }
          if (pick.empty() || k == SIZE_MAX) break;
        }
      }
    } else {
      const CompiledDefinition& cd = *def.compiled;
      for (size_t e = 0; e < cd.matching_list.size(); ++e) {
        const MatchingEntry& entry = cd.matching_list[e];
        if (!entry.bitset.subset_of(def.status)) continue;
        if (policy == Policy::Run) {
          Redex r;
          r.kind = Redex::Kind::React;
          r.def_index = d;
          r.rule_index = e;
          for (int slot : entry.dictionary) r.consumed.emplace_back(slot, 0);
          out.push_back(std::move(r));
        } else {
          std::vector<size_t> pick(entry.dictionary.size(), 0);
          for (;;) {
            Redex r;
            r.kind = Redex::Kind::React;
            r.def_index = d;
            r.rule_index = e;
            for (size_t k = 0; k < entry.dictionary.size(); ++k)
              r.consumed.emplace_back(entry.dictionary[k], pick[k]);
            out.push_back(std::move(r));
            size_t k = pick.size();
            while (k > 0) {
              --k;
              size_t qsize =
                  def.queues[static_cast<size_t>(entry.dictionary[k])].size();
              if (++pick[k] < qsize) break;
              pick[k] = 0;
              if (k == 0) {
                k = SIZE_MAX;
                break;
              }
            }
            if (pick.empty() || k == SIZE_MAX) break;
          }
        }
      }
    }
  }

  for (size_t i = 0; i < runnables_.size(); ++i) {
    const Runnable& rn = runnables_[i];
    const auto& clauses = rn.match_node->clauses;
    if (rn.match_node->no_test) {
      Redex r;
      r.kind = Redex::Kind::MatchStep;
      r.runnable_index = i;
      r.clause_index = 0;
      out.push_back(std::move(r));
      continue;
    }
    std::vector<PatternPtr> pats;
    pats.reserve(clauses.size());
    for (const auto& c : clauses) pats.push_back(c.pattern);
    auto outcome = first_match(pats, rn.subject);
    if (!outcome) continue;  // stuck match: no reduction applies
    Redex r;
    r.kind = clauses[outcome->clause_index].drop ? Redex::Kind::Drop
                                                 : Redex::Kind::MatchStep;
    r.runnable_index = i;
    r.clause_index = outcome->clause_index;
    out.push_back(std::move(r));
  }
  return out;
}

void Machine::step(const Redex& r) {
  switch (r.kind) {
    case Redex::Kind::React: {
      if (r.def_index >= defs_.size()) throw StaleRedexError("no such definition");
      LiveDef& def = defs_[r.def_index];

      const std::vector<MessagePattern>* msgs = nullptr;
      ProcessPtr body;
      std::vector<Name> formals;  // compiled mode
      if (mode_ == Mode::Direct) {
        if (r.rule_index >= def.variants->size())
          throw StaleRedexError("no such rule variant");
        const RuleVariant& variant = (*def.variants)[r.rule_index];
        msgs = &variant.messages;
        body = variant.body;
        if (r.consumed.size() != msgs->size())
          throw StaleRedexError("consumed arity mismatch");
      } else {
        if (r.rule_index >= def.compiled->matching_list.size())
          throw StaleRedexError("no such matching entry");
        const MatchingEntry& entry = def.compiled->matching_list[r.rule_index];
        const GuardedBody& gb = def.compiled->bodies[entry.body_ref];
        body = gb.body;
        formals = gb.formals;
        if (r.consumed.size() != entry.dictionary.size())
          throw StaleRedexError("consumed arity mismatch");
      }

      // Validate and collect bindings before consuming anything.
      Substitution sigma;
      for (size_t k = 0; k < r.consumed.size(); ++k) {
        auto [slot, pos] = r.consumed[k];
        if (slot < 0 || static_cast<size_t>(slot) >= def.queues.size())
          throw StaleRedexError("bad slot");
        const auto& queue = def.queues[static_cast<size_t>(slot)];
        if (pos >= queue.size()) throw StaleRedexError("message gone");
        const ValuePtr& value = queue[pos];
        if (mode_ == Mode::Direct) {
          auto binds = match_bindings((*msgs)[k].arg, value);
          if (!binds) throw StaleRedexError("message no longer matches");
          for (auto& [n, v] : *binds) sigma[n] = v;
        } else {
          sigma[formals[k]] = value;
        }
      }

      // Consume; distinct slots by join-pattern linearity.
      for (auto [slot, pos] : r.consumed) {
        auto& queue = def.queues[static_cast<size_t>(slot)];
        queue.erase(queue.begin() + static_cast<long>(pos));
        if (mode_ == Mode::Compiled && queue.empty())
          def.status.reset(static_cast<size_t>(slot));
      }

      ++step_count_;
      heat(substitute(body, sigma));
      break;
    }
    case Redex::Kind::MatchStep:
    case Redex::Kind::Drop: {
      if (r.runnable_index >= runnables_.size())
        throw StaleRedexError("no such runnable");
      Runnable rn = runnables_[r.runnable_index];
      const auto& clauses = rn.match_node->clauses;
      if (r.clause_index >= clauses.size()) throw StaleRedexError("bad clause");
      const MatchClause& clause = clauses[r.clause_index];

      Substitution eta;
      if (rn.match_node->no_test) {
        // §8.2.1: the residual never fails, bindings are positional.
        assert(matches(clause.pattern, rn.subject) &&
               "no_test residual fed a non-matching value");
        eta = extract_bindings_unchecked(clause.pattern, rn.subject);
      } else {
        // First-match side condition: no earlier clause admits the subject.
        for (size_t j = 0; j < r.clause_index; ++j)
          if (matches(clauses[j].pattern, rn.subject))
            throw StaleRedexError("first-match side condition violated");
        auto binds = match_bindings(clause.pattern, rn.subject);
        if (!binds) throw StaleRedexError("clause no longer matches");
        eta = std::move(*binds);
      }

      runnables_.erase(runnables_.begin() + static_cast<long>(r.runnable_index));
      ++step_count_;
      if (r.kind == Redex::Kind::MatchStep) heat(substitute(clause.body, eta));
      // Drop: the dispatched value is discarded, nothing is emitted.
      break;
    }
  }
#ifndef NDEBUG
  check_status_invariant();
#endif
}

void Machine::check_status_invariant() const {
  if (mode_ != Mode::Compiled) return;
  for (const auto& def : defs_)
    for (size_t s = 0; s < def.queues.size(); ++s)
      assert(def.status.test(s) == !def.queues[s].empty() &&
             "status bitset out of sync with queues");
}

std::set<Name> Machine::barbs() const {
  std::set<Name> out;
  for (const auto& [name, values] : free_output_)
    if (!values.empty()) out.insert(name);
  return out;
}

std::vector<ValuePtr> Machine::queue_of(const Name& channel) const {
  for (const auto& def : defs_) {
    auto it = def.slot_of.find(channel);
    if (it != def.slot_of.end()) {
      const auto& q = def.queues[static_cast<size_t>(it->second)];
      return {q.begin(), q.end()};
    }
  }
  return {};
}

std::string Machine::describe(const Redex& r) const {
  switch (r.kind) {
    case Redex::Kind::React: {
      const LiveDef& def = defs_[r.def_index];
      std::string line = "REACT rule=d" + std::to_string(r.def_index);
      if (mode_ == Mode::Direct)
        line += ".r" + std::to_string((*def.variants)[r.rule_index].rule);
      else
        line += ".e" + std::to_string(r.rule_index);
      line += " consumed=";
      for (size_t k = 0; k < r.consumed.size(); ++k) {
        if (k) line += ",";
        line += def.slot_names[static_cast<size_t>(r.consumed[k].first)] + ":" +
                std::to_string(r.consumed[k].second);
      }
      return line;
    }
    case Redex::Kind::MatchStep:
      return "MATCH clause=" + std::to_string(r.clause_index);
    case Redex::Kind::Drop:
      return "DROP " + runnables_[r.runnable_index].match_node->dispatcher_channel;
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Canonicalization.

namespace {

void discover_value(const ValuePtr& v, std::map<int, int>& renumber) {
  if (v->kind == Value::Kind::Chan) {
    renumber.emplace(v->chan.raw, static_cast<int>(renumber.size()));
    return;
  }
  for (const auto& a : v->args) discover_value(a, renumber);
}

void discover_expr(const ExprPtr& e, std::map<int, int>& renumber) {
  if (e->kind == Expression::Kind::Chan) {
    renumber.emplace(e->chan.raw, static_cast<int>(renumber.size()));
    return;
  }
  for (const auto& a : e->args) discover_expr(a, renumber);
}

void discover_process(const ProcessPtr& p, std::map<int, int>& renumber) {
  switch (p->kind) {
    case Process::Kind::Null:
      return;
    case Process::Kind::Send:
      if (p->chan.valid())
        renumber.emplace(p->chan.raw, static_cast<int>(renumber.size()));
      discover_expr(p->arg, renumber);
      return;
    case Process::Kind::Par:
      discover_process(p->left, renumber);
      discover_process(p->right, renumber);
      return;
    case Process::Kind::Def:
      for (const auto& r : p->definition->rules) discover_process(r.body, renumber);
      discover_process(p->body, renumber);
      return;
    case Process::Kind::Match:
      discover_expr(p->subject, renumber);
      for (const auto& c : p->clauses) discover_process(c.body, renumber);
      return;
  }
}

}  // namespace

std::string Machine::canonical_key() const {
  // Pass 1: deterministic discovery order for channel identities.
  std::map<int, int> renumber;
  for (const auto& def : defs_) {
    for (const auto& id : def.ids)
      renumber.emplace(id.raw, static_cast<int>(renumber.size()));
    if (mode_ == Mode::Direct) {
      for (const auto& r : def.source->rules) discover_process(r.body, renumber);
    } else {
      for (const auto& b : def.compiled->bodies) discover_process(b.body, renumber);
    }
    for (const auto& q : def.queues)
      for (const auto& v : q) discover_value(v, renumber);
  }
  for (const auto& rn : runnables_) {
    discover_value(rn.subject, renumber);
    discover_process(rn.match_node, renumber);
  }
  for (const auto& [name, values] : free_output_)
    for (const auto& v : values) discover_value(v, renumber);

  // Pass 2: render with canonical ids; queues and runnables as sorted
  // multisets (exploration branches over positions, so order is immaterial
  // for reachability).
  std::string key;
  for (const auto& def : defs_) {
    key += "D{";
    if (mode_ == Mode::Direct) {
      for (const auto& r : def.source->rules) {
        key += to_string(r.pattern) + "|>" + print_process(r.body, &renumber) + ";";
      }
    } else {
      key += dump_matching(*def.compiled);
      for (const auto& b : def.compiled->bodies)
        key += print_process(b.body, &renumber) + ";";
    }
    for (size_t s = 0; s < def.queues.size(); ++s) {
      std::vector<std::string> items;
      for (const auto& v : def.queues[s]) items.push_back(to_string(v, &renumber));
      std::sort(items.begin(), items.end());
      key += def.slot_names[s] + "[";
      for (const auto& i : items) key += i + " ";
      key += "]";
    }
    key += "}";
  }
  {
    std::vector<std::string> items;
    for (const auto& rn : runnables_)
      items.push_back(to_string(rn.subject, &renumber) + "@" +
                      print_process(rn.match_node, &renumber));
    std::sort(items.begin(), items.end());
    key += "R{";
    for (const auto& i : items) key += i + ";";
    key += "}";
  }
  key += "O{" + output_snapshot() + "}";
  return key;
}

std::string Machine::output_snapshot() const {
  // Channel values inside outputs are renumbered in (channel name, arrival)
  // order; purely algebraic outputs compare exactly across modes.
  std::map<int, int> renumber;
  for (const auto& [name, values] : free_output_)
    for (const auto& v : values) discover_value(v, renumber);
  std::string out;
  for (const auto& [name, values] : free_output_) {
    if (values.empty()) continue;
    std::vector<std::string> items;
    for (const auto& v : values) items.push_back(to_string(v, &renumber));
    std::sort(items.begin(), items.end());
    out += name + ":";
    for (const auto& i : items) out += " " + i;
    out += "; ";
  }
  return out.empty() ? "(none)" : out;
}

// ---------------------------------------------------------------------------
// Scheduling and exploration.

namespace {

// Rejection-sampled bound; portable and deterministic, unlike
// std::uniform_int_distribution.
uint64_t bounded_rand(std::mt19937_64& rng, uint64_t n) {
  if (n <= 1) return 0;
  uint64_t threshold = (0 - n) % n;
  for (;;) {
    uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

}  // namespace

Trace run(Machine& m, uint64_t seed, int max_steps) {
  std::mt19937_64 rng(seed);
  Trace trace;
  trace.seed = seed;
  for (int i = 0; i < max_steps; ++i) {
    auto redexes = m.enabled(Machine::Policy::Run);
    if (redexes.empty()) break;
    const Redex& choice = redexes[bounded_rand(rng, redexes.size())];
    std::string line =
        "#" + std::to_string(m.step_count() + 1) + " " + m.describe(choice);
    m.step(choice);
    trace.steps.push_back({m.step_count(), std::move(line), m.barbs()});
  }
  trace.final_barbs = m.barbs();
  trace.outputs = m.outputs();
  return trace;
}

std::string Trace::dump() const {
  std::string out;
  for (const auto& s : steps) out += s.line + "\n";
  out += "BARBS {";
  bool first = true;
  for (const auto& b : final_barbs) {
    if (!first) out += ", ";
    first = false;
    out += b;
  }
  out += "}\n";
  for (const auto& [name, values] : outputs) {
    if (values.empty()) continue;
    out += "OUT " + name + ":";
    for (const auto& v : values) out += " " + to_string(v);
    out += "\n";
  }
  return out;
}

ExploreSummary explore_machine(const Machine& initial, int depth, size_t budget) {
  ExploreSummary summary;
  std::set<std::string> visited;
  std::deque<std::pair<Machine, int>> frontier;

  auto visit = [&](const Machine& m, int d) {
    std::string key = m.canonical_key();
    if (!visited.insert(std::move(key)).second) return;
    if (visited.size() > budget)
      throw StateBudgetExceededError("state budget of " + std::to_string(budget) +
                                     " exceeded");
    auto b = m.barbs();
    summary.weak_barbs.insert(b.begin(), b.end());
    frontier.emplace_back(m, d);
  };

  visit(initial, 0);
  while (!frontier.empty()) {
    auto [m, d] = std::move(frontier.front());
    frontier.pop_front();
    auto redexes = m.enabled(Machine::Policy::Explore);
    if (redexes.empty()) {
      summary.terminal_outputs.insert(m.output_snapshot());
      continue;
    }
    if (d >= depth) {
      summary.truncated = true;
      continue;
    }
    for (const auto& r : redexes) {
      Machine next = m;
      next.step(r);
      visit(next, d + 1);
    }
  }
  summary.states_visited = visited.size();
  return summary;
}

ExploreSummary explore(const TypedProgram& prog, Mode mode, int depth,
                       size_t budget) {
  return explore_machine(Machine::load(prog, mode), depth, budget);
}

}  // namespace joinmatch
