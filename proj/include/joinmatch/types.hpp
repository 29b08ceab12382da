#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "joinmatch/errors.hpp"

namespace joinmatch {

using Name = std::string;

struct Type;
using TypePtr = std::shared_ptr<Type>;

// Monomorphic types. Var is an inference variable used only during
// typechecking; everything recorded on the AST is ground.
struct Type {
  enum class Kind { Int, Named, Chan, Tuple, Var };

  Kind kind = Kind::Int;
  Name name;                   // Named
  std::vector<TypePtr> elems;  // Chan (1 element) / Tuple (0..n elements)
  TypePtr link;                // Var: union-find parent, null if unbound
  int var_id = 0;              // Var

  static TypePtr integer();
  static TypePtr named(Name n);
  static TypePtr chan(TypePtr content);
  static TypePtr tuple(std::vector<TypePtr> elems);
  static TypePtr unit() { return tuple({}); }
  static TypePtr fresh_var();
};

// Follows Var links to the representative.
TypePtr resolve(const TypePtr& t);

// Structural unification; returns false on a constructor clash. Occurs check
// rejects infinite types.
bool unify(const TypePtr& a, const TypePtr& b);

bool type_equal(const TypePtr& a, const TypePtr& b);

// True when no inference variable remains under t.
bool is_ground(const TypePtr& t);

std::string to_string(const TypePtr& t);

struct TypeDecl {
  struct Ctor {
    Name name;
    std::vector<TypePtr> arg_types;
    Loc loc;
  };
  Name name;
  std::vector<Ctor> ctors;
  Loc loc;
};

// Reserved constructor spellings for the builtin tuple family; these cannot be
// produced by the parser for user constructors.
Name tuple_ctor_name(size_t arity);
bool is_tuple_ctor(const Name& n);
size_t tuple_ctor_arity(const Name& n);

struct CtorInfo {
  Name name;
  Name type_name;
  std::vector<TypePtr> arg_types;
};

class TypeEnv {
 public:
  // Validates constructor-name uniqueness across the program.
  void declare(const TypeDecl& decl);
  // Checks that every constructor argument type refers to a known type and
  // that every declared type is inhabited by some finite value.
  void finalize() const;

  const TypeDecl* find_type(const Name& n) const;
  const CtorInfo* find_ctor(const Name& n) const;
  bool is_ctor(const Name& n) const { return find_ctor(n) != nullptr; }

  // Argument types of constructor `ctor` at type t. Handles declared
  // constructors, int constants (arity 0) and tuple constructors, whose
  // component types come from t itself.
  std::vector<TypePtr> ctor_args_at(const TypePtr& t, const Name& ctor) const;

  // Whether the set of head constructor names forms the complete signature of
  // type t. The int family is never complete; chan types have no constructors.
  bool signature_complete(const TypePtr& t, const std::set<Name>& heads) const;

  const std::vector<TypeDecl>& decls() const { return decls_; }

 private:
  std::vector<TypeDecl> decls_;
  std::map<Name, size_t> type_index_;
  std::map<Name, CtorInfo> ctors_;
};

}  // namespace joinmatch
