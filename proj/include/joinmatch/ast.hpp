#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "joinmatch/errors.hpp"
#include "joinmatch/types.hpp"

namespace joinmatch {

// Opaque runtime channel identity, minted by the machine at Def heating.
struct ChannelId {
  int raw = -1;
  bool valid() const { return raw >= 0; }
  friend auto operator<=>(const ChannelId&, const ChannelId&) = default;
};

// ---------------------------------------------------------------------------
// Algebraic patterns. Linear constructor trees with variables; int literals
// act as the constant-constructor family of the builtin int type. Wildcard is
// a distinct node, not an anonymous variable, so variable erasure is a total
// structural map.

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class Kind { Wildcard, Var, Ctor, Int };

  Kind kind = Kind::Wildcard;
  Name name;                     // Var: variable; Ctor: constructor
  std::vector<PatternPtr> args;  // Ctor
  long long int_value = 0;       // Int

  static PatternPtr wildcard();
  static PatternPtr var(Name n);
  static PatternPtr ctor(Name c, std::vector<PatternPtr> args);
  static PatternPtr integer(long long v);
};

// ---------------------------------------------------------------------------
// Values: closed constructor trees plus channel references.

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct Value {
  enum class Kind { Ctor, Int, Chan };

  Kind kind = Kind::Ctor;
  Name ctor;
  std::vector<ValuePtr> args;
  long long int_value = 0;
  ChannelId chan;
  Name chan_name;  // source-level name, kept for printing

  static ValuePtr make_ctor(Name c, std::vector<ValuePtr> args);
  static ValuePtr integer(long long v);
  static ValuePtr channel(ChannelId id, Name display);
  static ValuePtr unit() { return make_ctor(tuple_ctor_name(0), {}); }
};

bool value_equal(const ValuePtr& a, const ValuePtr& b);

// Finite map from identifiers to closed values (the sigma of React).
using Substitution = std::map<Name, ValuePtr>;

// ---------------------------------------------------------------------------
// Expressions. Chan embeds an already-substituted channel value so that
// substitution stays a total structural map.

struct Expression;
using ExprPtr = std::shared_ptr<const Expression>;

struct Expression {
  enum class Kind { Var, Ctor, Int, Chan };

  Kind kind = Kind::Var;
  Name name;  // Var / Ctor
  std::vector<ExprPtr> args;
  long long int_value = 0;
  ChannelId chan;
  Name chan_name;
  Loc loc;

  static ExprPtr var(Name n, Loc loc = {});
  static ExprPtr ctor(Name c, std::vector<ExprPtr> args, Loc loc = {});
  static ExprPtr integer(long long v, Loc loc = {});
  static ExprPtr channel(ChannelId id, Name display);
  static ExprPtr unit(Loc loc = {}) { return ctor(tuple_ctor_name(0), {}, loc); }
};

// Converts a closed value back into expression form (used by substitution).
ExprPtr value_to_expr(const ValuePtr& v);

// ---------------------------------------------------------------------------
// Join patterns. A join pattern is a conjunction of conjuncts; each conjunct
// is a disjunction of alternatives; each alternative is a (usually singleton)
// list of message patterns. Source programs only produce plain conjuncts;
// alternation groups are introduced by compilation (and accepted back by the
// runtime loader).

struct MessagePattern {
  Name channel;
  PatternPtr arg;
  TypePtr annot;  // optional `: T` annotation
  Loc loc;
};

using JoinAlternative = std::vector<MessagePattern>;

struct JoinConjunct {
  std::vector<JoinAlternative> alts;  // size 1 = plain message pattern
  bool plain() const { return alts.size() == 1 && alts[0].size() == 1; }
};

struct JoinPattern {
  std::vector<JoinConjunct> conjuncts;
};

// ---------------------------------------------------------------------------
// Processes and definitions.

struct Process;
using ProcessPtr = std::shared_ptr<Process>;
struct Definition;
using DefinitionPtr = std::shared_ptr<Definition>;

struct MatchClause {
  PatternPtr pattern;
  ProcessPtr body;
  bool drop = false;  // synthesized dispatcher catch-all `_ -> 0`
};

struct ReactionRule {
  JoinPattern pattern;
  ProcessPtr body;
  Loc loc;
};

// Metadata describing a dispatcher synthesized for one transformed channel.
struct DispatcherInfo {
  Name channel;
  Name subject_var;
  std::vector<std::pair<PatternPtr, Name>> clauses;  // (annotation, forward target)
  bool catch_all = false;
};

struct Definition {
  std::vector<ReactionRule> rules;
  // Filled by the typechecker (and by the compiler for fresh channels):
  // content type per defined channel.
  std::map<Name, TypePtr> channel_types;
  // Filled by the compiler.
  std::vector<DispatcherInfo> dispatchers;
  Loc loc;
};

struct Process {
  enum class Kind { Null, Send, Par, Def, Match };

  Kind kind = Kind::Null;

  // Send: either a source-level name or an already-substituted channel value.
  Name chan_name;
  ChannelId chan;
  ExprPtr arg;

  // Par
  ProcessPtr left, right;

  // Def
  DefinitionPtr definition;
  ProcessPtr body;

  // Match
  ExprPtr subject;
  std::vector<MatchClause> clauses;
  bool no_test = false;        // Step 5 residual: binding-only, never fails
  Name dispatcher_channel;     // set on synthesized dispatcher matches
  TypePtr subject_type;        // filled by the typechecker / compiler

  Loc loc;

  static ProcessPtr null();
  static ProcessPtr send(Name chan, ExprPtr arg, Loc loc = {});
  static ProcessPtr send_to(ChannelId chan, Name display, ExprPtr arg);
  static ProcessPtr par(ProcessPtr l, ProcessPtr r);
  static ProcessPtr def(DefinitionPtr d, ProcessPtr body, Loc loc = {});
  static ProcessPtr match(ExprPtr subject, std::vector<MatchClause> clauses,
                          Loc loc = {});
};

struct Program {
  std::vector<TypeDecl> decls;
  ProcessPtr main;
};

// ---------------------------------------------------------------------------
// Binders (Figure-2 style rv/dv/fv), substitution, fresh names.

std::set<Name> received_vars(const PatternPtr& p);
std::set<Name> received_vars(const JoinPattern& j);
std::set<Name> defined_channels(const JoinPattern& j);
std::set<Name> defined_channels(const Definition& d);
std::set<Name> free_vars(const ExprPtr& e);
std::set<Name> free_vars(const ProcessPtr& p);
std::set<Name> free_vars(const Definition& d);

ExprPtr substitute(const ExprPtr& e, const Substitution& s);
ProcessPtr substitute(const ProcessPtr& p, const Substitution& s);
DefinitionPtr substitute_def(const Definition& d, const Substitution& s);

// Returns base if unused, else base'k for the least k >= 1 making it unused.
Name fresh_name(const Name& base, const std::set<Name>& used);

// Every identifier occurring anywhere (binders included); used to seed the
// fresh-name pool during compilation.
std::set<Name> collect_names(const ProcessPtr& p);
std::set<Name> collect_names(const Definition& d);

// ---------------------------------------------------------------------------
// Canonical printing. Channel values print as `#id`; an optional renumbering
// map substitutes canonical ids (used by state canonicalization).

std::string to_string(const PatternPtr& p);
std::string to_string(const ValuePtr& v,
                      const std::map<int, int>* renumber = nullptr);
std::string to_string(const ExprPtr& e, const std::map<int, int>* renumber = nullptr);
std::string to_string(const JoinPattern& j);
std::string print_process(const ProcessPtr& p,
                          const std::map<int, int>* renumber = nullptr);
std::string print_definition(const Definition& d);
std::string print_program(const Program& p);

bool pattern_equal(const PatternPtr& a, const PatternPtr& b);
int pattern_depth(const PatternPtr& p);
int constructor_count(const PatternPtr& p);

}  // namespace joinmatch
