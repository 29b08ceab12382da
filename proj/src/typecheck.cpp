#include "joinmatch/typecheck.hpp"

#include <vector>

namespace joinmatch {

namespace {

class Checker {
 public:
  explicit Checker(TypeEnv& env) : env_(env) {}

  std::map<Name, TypePtr> free_channels;

  void check_closed_process(const ProcessPtr& p) {
    Scope scope;
    check_process(p, scope);
    ground_pass(p);
    for (auto& [name, t] : free_channels) {
      TypePtr r = resolve(t);
      if (!is_ground(r))
        throw TypeError("cannot infer the message type of free channel '" + name +
                        "'");
      free_channels[name] = r;
    }
  }

 private:
  using Scope = std::map<Name, TypePtr>;

  TypePtr lookup(const Name& n, const Scope& scope, Loc loc) {
    auto it = scope.find(n);
    if (it != scope.end()) return it->second;
    // Unbound identifiers are free output channels; they must be
    // channel-typed for the program to be variable-closed.
    auto fit = free_channels.find(n);
    if (fit != free_channels.end()) return fit->second;
    TypePtr t = Type::chan(Type::fresh_var());
    free_channels.emplace(n, t);
    (void)loc;
    return t;
  }

  void require(bool ok, const std::string& msg, Loc loc) {
    if (!ok) throw TypeError(msg, loc);
  }

  TypePtr infer_expr(const ExprPtr& e, const Scope& scope) {
    switch (e->kind) {
      case Expression::Kind::Int:
        return Type::integer();
      case Expression::Kind::Chan:
        throw TypeError("channel reference in source expression", e->loc);
      case Expression::Kind::Var:
        return lookup(e->name, scope, e->loc);
      case Expression::Kind::Ctor: {
        if (is_tuple_ctor(e->name)) {
          std::vector<TypePtr> elems;
          elems.reserve(e->args.size());
          for (const auto& a : e->args) elems.push_back(infer_expr(a, scope));
          return Type::tuple(std::move(elems));
        }
        const CtorInfo* info = env_.find_ctor(e->name);
        require(info != nullptr, "unknown constructor '" + e->name + "'", e->loc);
        require(info->arg_types.size() == e->args.size(),
                "constructor '" + e->name + "' expects " +
                    std::to_string(info->arg_types.size()) + " argument(s), got " +
                    std::to_string(e->args.size()),
                e->loc);
        for (size_t i = 0; i < e->args.size(); ++i) {
          TypePtr ti = infer_expr(e->args[i], scope);
          require(unify(ti, info->arg_types[i]),
                  "argument " + std::to_string(i + 1) + " of '" + e->name +
                      "': expected " + to_string(info->arg_types[i]) + ", found " +
                      to_string(ti),
                  e->loc);
        }
        return Type::named(info->type_name);
      }
    }
    return Type::integer();
  }

  void infer_pattern(const PatternPtr& p, const TypePtr& expected, Scope& binds,
                     Loc loc) {
    switch (p->kind) {
      case Pattern::Kind::Wildcard:
        return;
      case Pattern::Kind::Var: {
        if (binds.count(p->name))
          throw NonLinearError("duplicate variable '" + p->name + "' in pattern",
                               loc);
        binds.emplace(p->name, expected);
        return;
      }
      case Pattern::Kind::Int:
        require(unify(expected, Type::integer()),
                "integer pattern where " + to_string(expected) + " expected", loc);
        return;
      case Pattern::Kind::Ctor: {
        if (is_tuple_ctor(p->name)) {
          std::vector<TypePtr> elems;
          for (size_t i = 0; i < p->args.size(); ++i) elems.push_back(Type::fresh_var());
          require(unify(expected, Type::tuple(elems)),
                  "tuple pattern where " + to_string(expected) + " expected", loc);
          for (size_t i = 0; i < p->args.size(); ++i)
            infer_pattern(p->args[i], elems[i], binds, loc);
          return;
        }
        const CtorInfo* info = env_.find_ctor(p->name);
        require(info != nullptr, "unknown constructor '" + p->name + "'", loc);
        require(info->arg_types.size() == p->args.size(),
                "constructor '" + p->name + "' expects " +
                    std::to_string(info->arg_types.size()) + " argument(s), got " +
                    std::to_string(p->args.size()),
                loc);
        require(unify(expected, Type::named(info->type_name)),
                "pattern of type " + info->type_name + " where " +
                    to_string(expected) + " expected",
                loc);
        for (size_t i = 0; i < p->args.size(); ++i)
          infer_pattern(p->args[i], info->arg_types[i], binds, loc);
        return;
      }
    }
  }

  void check_process(const ProcessPtr& p, const Scope& scope) {
    switch (p->kind) {
      case Process::Kind::Null:
        return;
      case Process::Kind::Send: {
        TypePtr tc = lookup(p->chan_name, scope, p->loc);
        TypePtr ta = infer_expr(p->arg, scope);
        require(unify(tc, Type::chan(ta)),
                "message of type " + to_string(ta) + " sent on '" + p->chan_name +
                    "' of type " + to_string(tc),
                p->loc);
        return;
      }
      case Process::Kind::Par:
        check_process(p->left, scope);
        check_process(p->right, scope);
        return;
      case Process::Kind::Def:
        check_def(*p->definition, scope, p->loc);
        {
          Scope inner = scope;
          for (const auto& [c, t] : p->definition->channel_types)
            inner[c] = Type::chan(t);
          check_process(p->body, inner);
        }
        return;
      case Process::Kind::Match: {
        require(!p->clauses.empty(), "match with no clauses", p->loc);
        TypePtr ts = infer_expr(p->subject, scope);
        for (const auto& c : p->clauses) {
          Scope binds;
          infer_pattern(c.pattern, ts, binds, p->loc);
          Scope inner = scope;
          for (auto& [n, t] : binds) inner[n] = t;
          check_process(c.body, inner);
        }
        p->subject_type = ts;
        return;
      }
    }
  }

  void check_def(Definition& d, const Scope& scope, Loc loc) {
    // One content-type variable per defined channel; every use must unify.
    std::map<Name, TypePtr> contents;
    auto dv = defined_channels(d);
    for (const auto& c : dv) contents[c] = Type::fresh_var();

    Scope def_scope = scope;
    for (const auto& [c, t] : contents) def_scope[c] = Type::chan(t);

    for (auto& rule : d.rules) {
      // Linearity across the join pattern (throws NonLinearError).
      (void)received_vars(rule.pattern);
      (void)defined_channels(rule.pattern);

      // Message patterns constrain channel content types. Alternatives of one
      // conjunct must agree on the types they bind, which follows from each
      // binding the same variables against per-channel content types.
      Scope binds;
      for (const auto& conj : rule.pattern.conjuncts) {
        for (size_t a = 0; a < conj.alts.size(); ++a) {
          Scope alt_binds;
          for (const auto& m : conj.alts[a]) {
            auto it = contents.find(m.channel);
            require(it != contents.end(), "unknown channel '" + m.channel + "'",
                    m.loc);
            if (m.annot)
              require(unify(it->second, m.annot),
                      "annotation " + to_string(m.annot) + " conflicts with '" +
                          m.channel + "'",
                      m.loc);
            infer_pattern(m.arg, it->second, alt_binds, m.loc);
          }
          if (a == 0) {
            binds.insert(alt_binds.begin(), alt_binds.end());
          } else {
            for (const auto& [n, t] : alt_binds) {
              auto bit = binds.find(n);
              require(bit != binds.end() && unify(bit->second, t),
                      "'or' alternatives disagree on variable '" + n + "'", rule.loc);
            }
          }
        }
      }
      Scope inner = def_scope;
      for (const auto& [n, t] : binds) inner[n] = t;
      check_process(rule.body, inner);
    }

    // Uses in the def body still contribute constraints; grounding is
    // deferred to ground_pass.
    (void)loc;
    for (const auto& [c, t] : contents) d.channel_types[c] = t;
  }

  // Replaces recorded types by their ground resolvents.
  void ground_pass(const ProcessPtr& p) {
    switch (p->kind) {
      case Process::Kind::Null:
      case Process::Kind::Send:
        return;
      case Process::Kind::Par:
        ground_pass(p->left);
        ground_pass(p->right);
        return;
      case Process::Kind::Def: {
        for (auto& [c, t] : p->definition->channel_types) {
          TypePtr r = resolve(t);
          if (!is_ground(r))
            throw TypeError("cannot infer the message type of channel '" + c +
                                "' (add a ': T' annotation)",
                            p->loc);
          t = r;
        }
        for (const auto& r : p->definition->rules) ground_pass(r.body);
        ground_pass(p->body);
        return;
      }
      case Process::Kind::Match: {
        TypePtr r = resolve(p->subject_type);
        if (!is_ground(r))
          throw TypeError("cannot infer the type of a match subject", p->loc);
        p->subject_type = r;
        for (const auto& c : p->clauses) ground_pass(c.body);
        return;
      }
    }
  }

  TypeEnv& env_;
};

}  // namespace

TypedProgram typecheck(Program program) {
  TypedProgram out;
  for (const auto& d : program.decls) out.env.declare(d);
  out.env.finalize();
  Checker checker(out.env);
  checker.check_closed_process(program.main);
  out.free_channels = std::move(checker.free_channels);
  out.program = std::move(program);
  return out;
}

}  // namespace joinmatch
