#include "joinmatch/types.hpp"

#include <atomic>

namespace joinmatch {

TypePtr Type::integer() {
  auto t = std::make_shared<Type>();
  t->kind = Kind::Int;
  return t;
}

TypePtr Type::named(Name n) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::Named;
  t->name = std::move(n);
  return t;
}

TypePtr Type::chan(TypePtr content) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::Chan;
  t->elems.push_back(std::move(content));
  return t;
}

TypePtr Type::tuple(std::vector<TypePtr> elems) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::Tuple;
  t->elems = std::move(elems);
  return t;
}

TypePtr Type::fresh_var() {
  static std::atomic<int> counter{0};
  auto t = std::make_shared<Type>();
  t->kind = Kind::Var;
  t->var_id = ++counter;
  return t;
}

TypePtr resolve(const TypePtr& t) {
  TypePtr cur = t;
  while (cur && cur->kind == Type::Kind::Var && cur->link) cur = cur->link;
  // Path compression.
  TypePtr walk = t;
  while (walk && walk->kind == Type::Kind::Var && walk->link && walk->link != cur) {
    TypePtr next = walk->link;
    walk->link = cur;
    walk = next;
  }
  return cur;
}

namespace {

bool occurs(const TypePtr& var, const TypePtr& t) {
  TypePtr r = resolve(t);
  if (r == var) return true;
  for (const auto& e : r->elems)
    if (occurs(var, e)) return true;
  return false;
}

}  // namespace

bool unify(const TypePtr& a, const TypePtr& b) {
  TypePtr x = resolve(a);
  TypePtr y = resolve(b);
  if (x == y) return true;
  if (x->kind == Type::Kind::Var) {
    if (occurs(x, y)) return false;
    x->link = y;
    return true;
  }
  if (y->kind == Type::Kind::Var) return unify(y, x);
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Type::Kind::Int:
      return true;
    case Type::Kind::Named:
      return x->name == y->name;
    case Type::Kind::Chan:
    case Type::Kind::Tuple: {
      if (x->elems.size() != y->elems.size()) return false;
      for (size_t i = 0; i < x->elems.size(); ++i)
        if (!unify(x->elems[i], y->elems[i])) return false;
      return true;
    }
    case Type::Kind::Var:
      return false;  // unreachable
  }
  return false;
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
  TypePtr x = resolve(a);
  TypePtr y = resolve(b);
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Type::Kind::Int:
      return true;
    case Type::Kind::Named:
      return x->name == y->name;
    case Type::Kind::Chan:
    case Type::Kind::Tuple: {
      if (x->elems.size() != y->elems.size()) return false;
      for (size_t i = 0; i < x->elems.size(); ++i)
        if (!type_equal(x->elems[i], y->elems[i])) return false;
      return true;
    }
    case Type::Kind::Var:
      return x == y;
  }
  return false;
}

bool is_ground(const TypePtr& t) {
  TypePtr r = resolve(t);
  if (r->kind == Type::Kind::Var) return false;
  for (const auto& e : r->elems)
    if (!is_ground(e)) return false;
  return true;
}

std::string to_string(const TypePtr& t) {
  TypePtr r = resolve(t);
  switch (r->kind) {
    case Type::Kind::Int:
      return "int";
    case Type::Kind::Named:
      return r->name;
    case Type::Kind::Chan:
      return "chan(" + to_string(r->elems[0]) + ")";
    case Type::Kind::Tuple: {
      if (r->elems.empty()) return "unit";
      std::string s = "(";
      for (size_t i = 0; i < r->elems.size(); ++i) {
        if (i) s += ", ";
        s += to_string(r->elems[i]);
      }
      return s + ")";
    }
    case Type::Kind::Var:
      return "'t" + std::to_string(r->var_id);
  }
  return "?";
}

Name tuple_ctor_name(size_t arity) { return "#tup" + std::to_string(arity); }

bool is_tuple_ctor(const Name& n) { return n.rfind("#tup", 0) == 0; }

size_t tuple_ctor_arity(const Name& n) {
  return static_cast<size_t>(std::stoul(n.substr(4)));
}

void TypeEnv::declare(const TypeDecl& decl) {
  if (type_index_.count(decl.name) || decl.name == "int" || decl.name == "unit")
    throw TypeError("duplicate type name '" + decl.name + "'", decl.loc);
  for (const auto& c : decl.ctors) {
    if (ctors_.count(c.name))
      throw TypeError("duplicate constructor '" + c.name + "'", c.loc);
    ctors_[c.name] = CtorInfo{c.name, decl.name, c.arg_types};
  }
  type_index_[decl.name] = decls_.size();
  decls_.push_back(decl);
}

void TypeEnv::finalize() const {
  auto check_ref = [&](const TypePtr& t, const Loc& loc) {
    // Walks a declared type expression; only ground shapes occur here.
    auto self = [&](const TypePtr& ty, const Loc& l, auto&& rec) -> void {
      TypePtr r = resolve(ty);
      if (r->kind == Type::Kind::Named && !type_index_.count(r->name))
        throw TypeError("unknown type '" + r->name + "'", l);
      for (const auto& e : r->elems) rec(e, l, rec);
    };
    self(t, loc, self);
  };
  for (const auto& d : decls_)
    for (const auto& c : d.ctors)
      for (const auto& a : c.arg_types) check_ref(a, c.loc);

  // Inhabitedness: a type is inhabited when some constructor has all argument
  // types inhabited. int, unit, tuples of inhabited types and chan are
  // inhabited by construction.
  std::set<Name> inhabited;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& d : decls_) {
      if (inhabited.count(d.name)) continue;
      for (const auto& c : d.ctors) {
        bool ok = true;
        auto arg_ok = [&](const TypePtr& a, auto&& rec) -> bool {
          TypePtr r = resolve(a);
          if (r->kind == Type::Kind::Named) return inhabited.count(r->name) > 0;
          for (const auto& e : r->elems)
            if (!rec(e, rec)) return false;
          return true;
        };
        for (const auto& a : c.arg_types)
          if (!arg_ok(a, arg_ok)) { ok = false; break; }
        if (ok) {
          inhabited.insert(d.name);
          changed = true;
          break;
        }
      }
    }
  }
  for (const auto& d : decls_)
    if (!inhabited.count(d.name))
      throw TypeError("type '" + d.name + "' has no finite values", d.loc);
}

const TypeDecl* TypeEnv::find_type(const Name& n) const {
  auto it = type_index_.find(n);
  return it == type_index_.end() ? nullptr : &decls_[it->second];
}

const CtorInfo* TypeEnv::find_ctor(const Name& n) const {
  auto it = ctors_.find(n);
  return it == ctors_.end() ? nullptr : &it->second;
}

std::vector<TypePtr> TypeEnv::ctor_args_at(const TypePtr& t, const Name& ctor) const {
  TypePtr r = resolve(t);
  if (is_tuple_ctor(ctor)) {
    if (r->kind != Type::Kind::Tuple || r->elems.size() != tuple_ctor_arity(ctor))
      throw TypeMismatchError("tuple constructor at non-tuple type " + to_string(t));
    return r->elems;
  }
  const CtorInfo* info = find_ctor(ctor);
  if (!info) throw TypeMismatchError("unknown constructor '" + ctor + "'");
  if (r->kind != Type::Kind::Named || r->name != info->type_name)
    throw TypeMismatchError("constructor '" + ctor + "' does not belong to type " +
                            to_string(t));
  return info->arg_types;
}

bool TypeEnv::signature_complete(const TypePtr& t, const std::set<Name>& heads) const {
  TypePtr r = resolve(t);
  switch (r->kind) {
    case Type::Kind::Int:
    case Type::Kind::Chan:
      return false;  // never enumerable-complete
    case Type::Kind::Tuple:
      return heads.count(tuple_ctor_name(r->elems.size())) > 0;
    case Type::Kind::Named: {
      const TypeDecl* d = find_type(r->name);
      if (!d) throw TypeMismatchError("unknown type '" + r->name + "'");
      for (const auto& c : d->ctors)
        if (!heads.count(c.name)) return false;
      return true;
    }
    case Type::Kind::Var:
      throw TypeMismatchError("signature query on unresolved type variable");
  }
  return false;
}

}  // namespace joinmatch
