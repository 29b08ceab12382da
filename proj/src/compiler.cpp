#include "joinmatch/compiler.hpp"

#include <algorithm>
#include <cassert>

namespace joinmatch {

Name forwarding_channel_name(const Name& channel, int vertex_index) {
  return channel + "@" + std::to_string(vertex_index);
}

std::set<int> prune_useless(const TypeEnv& env, const PatternLattice& l) {
  std::set<int> kept;
  std::vector<PatternPtr> kept_annotations;
  for (const auto& v : l.vertices) {
    if (useful(env, l.type, kept_annotations, v.annotation)) {
      kept.insert(v.index);
      kept_annotations.push_back(v.annotation);
    }
  }
  return kept;
}

Dispatcher synth_dispatcher(const Name& x, const PatternLattice& l,
                            bool is_exhaustive, const std::set<int>& kept) {
  Dispatcher d;
  d.channel = x;
  d.catch_all = !is_exhaustive;
  for (const auto& v : l.vertices)
    if (kept.count(v.index))
      d.clauses.emplace_back(v.annotation, forwarding_channel_name(x, v.index));
  return d;
}

namespace {

struct ChannelOccurrence {
  size_t rule;
  size_t conjunct;
  PatternPtr pattern;  // original, variables intact
};

// Plain x(pi) conjunct for channel x, if any. Alternation groups cannot carry
// x: they only ever hold forwarding channels, which are never re-transformed.
std::optional<size_t> find_channel_conjunct(const ReactionRule& rule, const Name& x) {
  for (size_t c = 0; c < rule.pattern.conjuncts.size(); ++c) {
    const auto& conj = rule.pattern.conjuncts[c];
    for (const auto& alt : conj.alts)
      for (const auto& m : alt)
        if (m.channel == x) {
          if (!conj.plain())
            throw Error("channel '" + x + "' occurs under 'or'; not transformable");
          return c;
        }
  }
  return std::nullopt;
}

MessagePattern message_var(const Name& channel, const Name& var) {
  MessagePattern m;
  m.channel = channel;
  m.arg = Pattern::var(var);
  return m;
}

}  // namespace

DefinitionPtr transform_channel(const TypeEnv& env, const Definition& d,
                                const Name& x, const CompileOptions& opts,
                                const WarningSink& warn) {
  TypePtr content = d.channel_types.at(x);

  // Step 0.1: collect the pattern arguments of x, in rule order.
  std::vector<ChannelOccurrence> occurrences;
  for (size_t r = 0; r < d.rules.size(); ++r) {
    auto c = find_channel_conjunct(d.rules[r], x);
    if (c)
      occurrences.push_back(
          {r, *c, d.rules[r].pattern.conjuncts[*c].alts[0][0].arg});
  }
  assert(!occurrences.empty());

  std::vector<PatternPtr> erased;
  erased.reserve(occurrences.size());
  for (const auto& o : occurrences) erased.push_back(erase_vars(o.pattern));

  // Step 0.2 / 0.3.
  std::vector<PatternPtr> pi_prime = dedupe(env, content, erased);
  bool is_exhaustive = exhaustive(env, content, pi_prime);
  if (!is_exhaustive && warn)
    warn("patterns on channel '" + x + "' are not exhaustive; unmatched messages will be dropped");

  std::set<Name> used = collect_names(d);

  auto out = std::make_shared<Definition>();
  out->channel_types = d.channel_types;
  out->dispatchers = d.dispatchers;
  out->loc = d.loc;
  out->rules = d.rules;

  // Step 0.4 jump case: a single exhaustive pattern needs no dispatching.
  bool jump = pi_prime.size() == 1 && is_exhaustive;

  PatternLattice lattice;
  std::set<int> kept;
  if (!jump) {
    lattice = build(env, content, erased);
    kept.clear();
    if (opts.optimize) {
      kept = prune_useless(env, lattice);
    } else {
      for (const auto& v : lattice.vertices) kept.insert(v.index);
    }
  }

  // Step 5: rewrite each rule that defines x.
  for (size_t k = 0; k < occurrences.size(); ++k) {
    const auto& occ = occurrences[k];
    ReactionRule& rule = out->rules[occ.rule];

    Name zi = fresh_name("z", used);
    used.insert(zi);

    auto residual = Process::match(Expression::var(zi),
                                   {{occ.pattern, rule.body, false}}, rule.loc);
    residual->no_test = true;
    residual->subject_type = content;

    JoinConjunct conj;
    if (jump) {
      conj.alts.push_back({message_var(x, zi)});
    } else {
      for (int j : lattice.preds.at(k))
        if (kept.count(j))
          conj.alts.push_back({message_var(forwarding_channel_name(x, j), zi)});
      assert(!conj.alts.empty());
    }
    rule.pattern.conjuncts[occ.conjunct] = std::move(conj);
    rule.body = std::move(residual);
  }

  // Step 4: append the dispatcher.
  if (!jump) {
    Dispatcher disp = synth_dispatcher(x, lattice, is_exhaustive, kept);
    Name z = fresh_name("z", used);
    used.insert(z);

    std::vector<MatchClause> clauses;
    for (const auto& [annotation, target] : disp.clauses)
      clauses.push_back(
          {annotation, Process::send(target, Expression::var(z)), false});
    if (disp.catch_all)
      clauses.push_back({Pattern::wildcard(), Process::null(), true});

    auto body = Process::match(Expression::var(z), std::move(clauses));
    body->subject_type = content;
    body->dispatcher_channel = x;

    ReactionRule dispatcher_rule;
    dispatcher_rule.pattern.conjuncts.push_back(
        JoinConjunct{{{message_var(x, z)}}});
    dispatcher_rule.body = std::move(body);
    out->rules.push_back(std::move(dispatcher_rule));

    for (const auto& [annotation, target] : disp.clauses)
      out->channel_types[target] = content;

    DispatcherInfo info;
    info.channel = disp.channel;
    info.subject_var = z;
    info.clauses = disp.clauses;
    info.catch_all = disp.catch_all;
    out->dispatchers.push_back(std::move(info));
  }

  return out;
}

namespace {

// Defined channels in first-occurrence order.
std::vector<Name> channels_in_order(const Definition& d) {
  std::vector<Name> out;
  std::set<Name> seen;
  for (const auto& r : d.rules)
    for (const auto& conj : r.pattern.conjuncts)
      for (const auto& alt : conj.alts)
        for (const auto& m : alt)
          if (seen.insert(m.channel).second) out.push_back(m.channel);
  return out;
}

}  // namespace

ProcessPtr compile_process(const TypeEnv& env, const ProcessPtr& p,
                           const CompileOptions& opts, const WarningSink& warn) {
  switch (p->kind) {
    case Process::Kind::Null:
    case Process::Kind::Send:
      return p;
    case Process::Kind::Par:
      return Process::par(compile_process(env, p->left, opts, warn),
                          compile_process(env, p->right, opts, warn));
    case Process::Kind::Match: {
      std::vector<MatchClause> clauses;
      clauses.reserve(p->clauses.size());
      for (const auto& c : p->clauses)
        clauses.push_back(
            {c.pattern, compile_process(env, c.body, opts, warn), c.drop});
      auto out = Process::match(p->subject, std::move(clauses), p->loc);
      out->no_test = p->no_test;
      out->dispatcher_channel = p->dispatcher_channel;
      out->subject_type = p->subject_type;
      return out;
    }
    case Process::Kind::Def: {
      auto compiled = std::make_shared<Definition>(*p->definition);
      for (auto& r : compiled->rules)
        r.body = compile_process(env, r.body, opts, warn);
      DefinitionPtr current = compiled;
      for (const auto& x : channels_in_order(*p->definition))
        current = transform_channel(env, *current, x, opts, warn);
      return Process::def(current, compile_process(env, p->body, opts, warn),
                          p->loc);
    }
  }
  return p;
}

CompiledDefinition lower_or(const Definition& d) {
  CompiledDefinition cd;
  cd.dispatchers = d.dispatchers;

  for (const auto& r : d.rules)
    for (const auto& conj : r.pattern.conjuncts)
      for (const auto& alt : conj.alts)
        for (const auto& m : alt)
          if (!cd.slots.count(m.channel)) {
            int slot = static_cast<int>(cd.slot_names.size());
            cd.slots[m.channel] = slot;
            cd.slot_names.push_back(m.channel);
          }

  for (size_t ri = 0; ri < d.rules.size(); ++ri) {
    const auto& rule = d.rules[ri];

    GuardedBody body;
    body.source_rule = ri;
    body.body = rule.body;
    for (const auto& conj : rule.pattern.conjuncts) {
      for (const auto& alt : conj.alts) {
        if (alt.size() != 1 || alt[0].arg->kind != Pattern::Kind::Var)
          throw Error(
              "lower_or requires single-message alternatives with variable "
              "arguments");
      }
      body.formals.push_back(conj.alts[0][0].arg->name);
    }
    size_t body_ref = cd.bodies.size();
    cd.bodies.push_back(body);

    // Cartesian product over the alternatives of each conjunct.
    std::vector<size_t> pick(rule.pattern.conjuncts.size(), 0);
    for (;;) {
      MatchingEntry entry;
      entry.bitset = Bitset(cd.slot_names.size());
      entry.body_ref = body_ref;
      for (size_t c = 0; c < pick.size(); ++c) {
        const auto& m = rule.pattern.conjuncts[c].alts[pick[c]][0];
        int slot = cd.slots.at(m.channel);
        assert(!entry.bitset.test(static_cast<size_t>(slot)));
        entry.bitset.set(static_cast<size_t>(slot));
        entry.dictionary.push_back(slot);
      }
      cd.matching_list.push_back(std::move(entry));

      size_t c = pick.size();
      while (c > 0) {
        --c;
        if (++pick[c] < rule.pattern.conjuncts[c].alts.size()) break;
        pick[c] = 0;
        if (c == 0) {
          c = SIZE_MAX;
          break;
        }
      }
      if (pick.empty() || c == SIZE_MAX) break;
    }
  }
  return cd;
}

std::string dump_matching(const CompiledDefinition& cd) {
  std::string out;
  for (const auto& e : cd.matching_list) {
    out += e.bitset.str() + "  [";
    for (size_t i = 0; i < e.dictionary.size(); ++i) {
      if (i) out += ";";
      out += std::to_string(e.dictionary[i]);
    }
    out += "]  g" + std::to_string(e.body_ref) + "\n";
  }
  return out;
}

}  // namespace joinmatch
