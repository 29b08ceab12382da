#include "joinmatch/pattern_algebra.hpp"

#include <cassert>
#include <set>

namespace joinmatch {

namespace {

bool is_wild(const PatternPtr& p) {
  return p->kind == Pattern::Kind::Wildcard || p->kind == Pattern::Kind::Var;
}

// Head constructor identity: declared constructor name or int spelling.
struct Head {
  bool is_int = false;
  long long int_value = 0;
  Name ctor;

  bool operator<(const Head& o) const {
    if (is_int != o.is_int) return is_int < o.is_int;
    if (is_int) return int_value < o.int_value;
    return ctor < o.ctor;
  }
  bool operator==(const Head& o) const {
    return is_int == o.is_int && int_value == o.int_value && ctor == o.ctor;
  }
};

Head head_of(const PatternPtr& p) {
  Head h;
  if (p->kind == Pattern::Kind::Int) {
    h.is_int = true;
    h.int_value = p->int_value;
  } else {
    h.ctor = p->name;
  }
  return h;
}

size_t head_arity(const TypeEnv& env, const TypePtr& t, const Head& h) {
  if (h.is_int) return 0;
  return env.ctor_args_at(t, h.ctor).size();
}

std::vector<TypePtr> head_arg_types(const TypeEnv& env, const TypePtr& t,
                                    const Head& h) {
  if (h.is_int) return {};
  return env.ctor_args_at(t, h.ctor);
}

}  // namespace

bool matches(const PatternPtr& p, const ValuePtr& v) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard:
    case Pattern::Kind::Var:
      return true;
    case Pattern::Kind::Int:
      if (v->kind == Value::Kind::Ctor)
        throw TypeMismatchError("integer pattern against constructor value");
      return v->kind == Value::Kind::Int && v->int_value == p->int_value;
    case Pattern::Kind::Ctor: {
      if (v->kind != Value::Kind::Ctor) {
        if (v->kind == Value::Kind::Int)
          throw TypeMismatchError("constructor pattern against integer value");
        return false;  // channel value: only variables/wildcards apply
      }
      if (v->ctor != p->name) return false;
      assert(v->args.size() == p->args.size());
      for (size_t i = 0; i < p->args.size(); ++i)
        if (!matches(p->args[i], v->args[i])) return false;
      return true;
    }
  }
  return false;
}

namespace {

bool bind_into(const PatternPtr& p, const ValuePtr& v, Substitution& out) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard:
      return true;
    case Pattern::Kind::Var:
      out.emplace(p->name, v);
      return true;
    case Pattern::Kind::Int:
      return v->kind == Value::Kind::Int && v->int_value == p->int_value;
    case Pattern::Kind::Ctor: {
      if (v->kind != Value::Kind::Ctor || v->ctor != p->name) return false;
      for (size_t i = 0; i < p->args.size(); ++i)
        if (!bind_into(p->args[i], v->args[i], out)) return false;
      return true;
    }
  }
  return false;
}

}  // namespace

std::optional<Substitution> match_bindings(const PatternPtr& p, const ValuePtr& v) {
  Substitution out;
  if (!bind_into(p, v, out)) return std::nullopt;
  return out;
}

std::optional<PatternPtr> lub(const PatternPtr& p1, const PatternPtr& p2) {
  if (is_wild(p1)) return erase_vars(p2);
  if (is_wild(p2)) return erase_vars(p1);
  if (p1->kind == Pattern::Kind::Int || p2->kind == Pattern::Kind::Int) {
    if (p1->kind != p2->kind)
      throw TypeMismatchError("lub of integer and constructor patterns");
    if (p1->int_value != p2->int_value) return std::nullopt;
    return p1;
  }
  if (p1->name != p2->name) return std::nullopt;
  std::vector<PatternPtr> args;
  args.reserve(p1->args.size());
  for (size_t i = 0; i < p1->args.size(); ++i) {
    auto a = lub(p1->args[i], p2->args[i]);
    if (!a) return std::nullopt;
    args.push_back(std::move(*a));
  }
  return Pattern::ctor(p1->name, std::move(args));
}

namespace {

// Generalized usefulness over a matrix of pattern rows and a query row, all
// against a vector of column types. The paper's two-pattern recursion is the
// single-row, single-column corner of this.
bool useful_rec(const TypeEnv& env, std::vector<TypePtr> types,
                std::vector<std::vector<PatternPtr>> rows,
                std::vector<PatternPtr> q) {
  if (q.empty()) return rows.empty();
  assert(types.size() == q.size());

  const TypePtr t = types[0];
  const PatternPtr q1 = q[0];

  auto specialize = [&](const Head& h) {
    size_t arity = head_arity(env, t, h);
    std::vector<std::vector<PatternPtr>> out;
    for (const auto& row : rows) {
      const PatternPtr& r1 = row[0];
      std::vector<PatternPtr> nrow;
      if (is_wild(r1)) {
        for (size_t i = 0; i < arity; ++i) nrow.push_back(Pattern::wildcard());
      } else if (head_of(r1) == h) {
        nrow = r1->args;
      } else {
        continue;
      }
      nrow.insert(nrow.end(), row.begin() + 1, row.end());
      out.push_back(std::move(nrow));
    }
    return out;
  };

  auto sub_types = [&](const Head& h) {
    std::vector<TypePtr> out = head_arg_types(env, t, h);
    out.insert(out.end(), types.begin() + 1, types.end());
    return out;
  };

  if (!is_wild(q1)) {
    Head h = head_of(q1);
    std::vector<PatternPtr> nq =
        q1->kind == Pattern::Kind::Int ? std::vector<PatternPtr>{} : q1->args;
    nq.insert(nq.end(), q.begin() + 1, q.end());
    return useful_rec(env, sub_types(h), specialize(h), std::move(nq));
  }

  // Wildcard query column: split on the head constructors present in the
  // first column of the matrix.
  std::set<Head> heads;
  for (const auto& row : rows)
    if (!is_wild(row[0])) heads.insert(head_of(row[0]));

  std::set<Name> head_names;
  bool any_int_head = false;
  for (const auto& h : heads) {
    if (h.is_int)
      any_int_head = true;
    else
      head_names.insert(h.ctor);
  }

  bool complete = !any_int_head && !heads.empty() &&
                  env.signature_complete(t, head_names);

  if (complete) {
    for (const auto& h : heads) {
      size_t arity = head_arity(env, t, h);
      std::vector<PatternPtr> nq;
      for (size_t i = 0; i < arity; ++i) nq.push_back(Pattern::wildcard());
      nq.insert(nq.end(), q.begin() + 1, q.end());
      if (useful_rec(env, sub_types(h), specialize(h), std::move(nq))) return true;
    }
    return false;
  }

  // Incomplete signature: some constructor is unmatched by every non-wildcard
  // row, so only rows with a wildcard head constrain the rest of the query.
  std::vector<std::vector<PatternPtr>> default_rows;
  for (const auto& row : rows)
    if (is_wild(row[0]))
      default_rows.emplace_back(row.begin() + 1, row.end());
  return useful_rec(env, std::vector<TypePtr>(types.begin() + 1, types.end()),
                    std::move(default_rows),
                    std::vector<PatternPtr>(q.begin() + 1, q.end()));
}

}  // namespace

bool useful(const TypeEnv& env, const TypePtr& t,
            const std::vector<PatternPtr>& rows, const PatternPtr& q) {
  std::vector<std::vector<PatternPtr>> matrix;
  matrix.reserve(rows.size());
  for (const auto& r : rows) matrix.push_back({r});
  return useful_rec(env, {t}, std::move(matrix), {q});
}

bool leq(const TypeEnv& env, const TypePtr& t, const PatternPtr& p1,
         const PatternPtr& p2) {
  return !useful(env, t, {p1}, p2);
}

bool equiv(const TypeEnv& env, const TypePtr& t, const PatternPtr& p1,
           const PatternPtr& p2) {
  return leq(env, t, p1, p2) && leq(env, t, p2, p1);
}

PatternPtr repr(const TypeEnv& env, const TypePtr& t, const PatternPtr& p1,
                const PatternPtr& p2) {
  if (!equiv(env, t, p1, p2))
    throw ReprError("repr of non-equivalent patterns " + to_string(p1) + " and " +
                    to_string(p2));
  auto r = lub(p1, p2);
  assert(r.has_value());
  return *r;
}

bool exhaustive(const TypeEnv& env, const TypePtr& t,
                const std::vector<PatternPtr>& pi) {
  return !useful(env, t, pi, Pattern::wildcard());
}

PatternPtr erase_vars(const PatternPtr& p) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard:
    case Pattern::Kind::Int:
      return p;
    case Pattern::Kind::Var:
      return Pattern::wildcard();
    case Pattern::Kind::Ctor: {
      std::vector<PatternPtr> args;
      args.reserve(p->args.size());
      for (const auto& a : p->args) args.push_back(erase_vars(a));
      return Pattern::ctor(p->name, std::move(args));
    }
  }
  return p;
}

std::optional<MatchOutcome> first_match(const std::vector<PatternPtr>& clauses,
                                        const ValuePtr& v) {
  for (size_t i = 0; i < clauses.size(); ++i) {
    auto binds = match_bindings(clauses[i], v);
    if (binds) return MatchOutcome{i, std::move(*binds)};
  }
  return std::nullopt;
}

Substitution extract_bindings_unchecked(const PatternPtr& p, const ValuePtr& v) {
  Substitution out;
  auto walk = [&](const PatternPtr& pat, const ValuePtr& val, auto&& rec) -> void {
    switch (pat->kind) {
      case Pattern::Kind::Wildcard:
      case Pattern::Kind::Int:
        return;
      case Pattern::Kind::Var:
        out.emplace(pat->name, val);
        return;
      case Pattern::Kind::Ctor:
        assert(val->kind == Value::Kind::Ctor && val->ctor == pat->name);
        for (size_t i = 0; i < pat->args.size(); ++i)
          rec(pat->args[i], val->args[i], rec);
        return;
    }
  };
  walk(p, v, walk);
  return out;
}

std::vector<ValuePtr> enum_values(const TypeEnv& env, const TypePtr& t, int depth,
                                  const std::vector<long long>& ints) {
  TypePtr r = resolve(t);
  std::vector<ValuePtr> out;
  switch (r->kind) {
    case Type::Kind::Int:
      for (long long v : ints) out.push_back(Value::integer(v));
      return out;
    case Type::Kind::Chan:
      throw TypeMismatchError("cannot enumerate values of a channel type");
    case Type::Kind::Var:
      throw TypeMismatchError("cannot enumerate an unresolved type");
    case Type::Kind::Tuple:
    case Type::Kind::Named: {
      if (depth < 1) return out;
      struct Ctor {
        Name name;
        std::vector<TypePtr> args;
      };
      std::vector<Ctor> ctors;
      if (r->kind == Type::Kind::Tuple) {
        ctors.push_back({tuple_ctor_name(r->elems.size()), r->elems});
      } else {
        const TypeDecl* d = env.find_type(r->name);
        if (!d) throw TypeMismatchError("unknown type '" + r->name + "'");
        for (const auto& c : d->ctors) ctors.push_back({c.name, c.arg_types});
      }
      for (const auto& c : ctors) {
        std::vector<std::vector<ValuePtr>> arg_values;
        bool feasible = true;
        for (const auto& at : c.args) {
          arg_values.push_back(enum_values(env, at, depth - 1, ints));
          if (arg_values.back().empty()) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        // Left-to-right lexicographic product.
        std::vector<size_t> idx(arg_values.size(), 0);
        for (;;) {
          std::vector<ValuePtr> args;
          for (size_t i = 0; i < idx.size(); ++i) args.push_back(arg_values[i][idx[i]]);
          out.push_back(Value::make_ctor(c.name, std::move(args)));
          size_t k = idx.size();
          while (k > 0) {
            --k;
            if (++idx[k] < arg_values[k].size()) break;
            idx[k] = 0;
            if (k == 0) {
              k = SIZE_MAX;
              break;
            }
          }
          if (idx.empty() || k == SIZE_MAX) break;
        }
      }
      return out;
    }
  }
  return out;
}

std::optional<ValuePtr> useful_witness(const TypeEnv& env, const TypePtr& t,
                                       const std::vector<PatternPtr>& rows,
                                       const PatternPtr& q, int depth,
                                       const std::vector<long long>& ints) {
  for (const auto& v : enum_values(env, t, depth, ints)) {
    if (!matches(q, v)) continue;
    bool covered = false;
    for (const auto& r : rows)
      if (matches(r, v)) {
        covered = true;
        break;
      }
    if (!covered) return v;
  }
  return std::nullopt;
}

}  // namespace joinmatch
