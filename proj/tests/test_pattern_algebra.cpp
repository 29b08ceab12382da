#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "joinmatch/pattern_algebra.hpp"
#include "test_util.hpp"

using namespace joinmatch;
using namespace joinmatch::testutil;

namespace {

// The two-pattern usefulness recursion in its simplified form; kept test-side
// as a cross-check of the generalized matrix algorithm.
bool simplified_u(const TypeEnv& env, const TypePtr& t, const PatternPtr& raw1,
                  const PatternPtr& raw2) {
  PatternPtr p1 = erase_vars(raw1);
  PatternPtr p2 = erase_vars(raw2);

  auto is_wild = [](const PatternPtr& p) {
    return p->kind == Pattern::Kind::Wildcard;
  };
  auto same_head = [](const PatternPtr& a, const PatternPtr& b) {
    if (a->kind != b->kind) return false;
    if (a->kind == Pattern::Kind::Int) return a->int_value == b->int_value;
    return a->name == b->name;
  };

  if (!is_wild(p2)) {
    if (is_wild(p1)) return false;  // useless
    if (!same_head(p1, p2)) return true;
    auto arg_types = p2->kind == Pattern::Kind::Int
                         ? std::vector<TypePtr>{}
                         : env.ctor_args_at(t, p2->name);
    for (size_t i = 0; i < arg_types.size(); ++i)
      if (simplified_u(env, arg_types[i], p1->args[i], p2->args[i])) return true;
    return false;
  }
  // p2 is a wildcard.
  if (is_wild(p1)) return false;
  if (p1->kind == Pattern::Kind::Int) return true;  // ints are never a signature
  bool unique = env.signature_complete(t, {p1->name});
  if (!unique) return true;
  auto arg_types = env.ctor_args_at(t, p1->name);
  for (size_t i = 0; i < arg_types.size(); ++i)
    if (simplified_u(env, arg_types[i], p1->args[i], Pattern::wildcard()))
      return true;
  return false;
}

std::vector<ValuePtr> instances_of(const PatternPtr& p,
                                   const std::vector<ValuePtr>& universe) {
  std::vector<ValuePtr> out;
  for (const auto& v : universe)
    if (matches(p, v)) out.push_back(v);
  return out;
}

bool subset_by_print(const std::vector<ValuePtr>& a, const std::vector<ValuePtr>& b) {
  std::set<std::string> bs;
  for (const auto& v : b) bs.insert(to_string(v));
  for (const auto& v : a)
    if (!bs.count(to_string(v))) return false;
  return true;
}

}  // namespace

TEST_CASE("matches: instance relation") {
  CHECK(matches(cons(Pattern::var("x"), Pattern::var("xs")), vlist({1})));
  CHECK_FALSE(matches(cons(Pattern::integer(0), Pattern::var("xs")), vlist({1})));
  // wildcard matches any value
  CHECK(matches(wild(), vlist({})));
  CHECK(matches(wild(), vlist({1, 2, 3})));
  CHECK(matches(wild(), vint(42)));
}

TEST_CASE("match_bindings") {
  auto b = match_bindings(cons(Pattern::var("x"), Pattern::var("xs")), vlist({1}));
  REQUIRE(b.has_value());
  CHECK(b->size() == 2);
  CHECK(to_string(b->at("x")) == "1");
  CHECK(to_string(b->at("xs")) == "Nil");

  auto w = match_bindings(wild(), vlist({1}));
  REQUIRE(w.has_value());
  CHECK(w->empty());

  CHECK_FALSE(match_bindings(nil(), vlist({1})).has_value());
}

TEST_CASE("lub computation rules") {
  // (0::xs) ^ (x1::x2::xs) = 0::_::_
  auto a = cons(Pattern::integer(0), Pattern::var("xs"));
  auto b = cons(Pattern::var("x1"), cons(Pattern::var("x2"), Pattern::var("xs2")));
  auto j = lub(a, b);
  REQUIRE(j.has_value());
  CHECK(to_string(*j) == "Cons(0, Cons(_, _))");

  // (0::xs) ^ [x] = [0]
  auto c = cons(Pattern::var("x"), nil());
  auto j2 = lub(a, c);
  REQUIRE(j2.has_value());
  CHECK(to_string(*j2) == "Cons(0, Nil)");

  CHECK_FALSE(lub(nil(), cons(Pattern::var("x"), Pattern::var("xs"))).has_value());
}

TEST_CASE("useful") {
  TypeEnv env = list_env();
  TypePtr t = list_type();

  // the final wildcard clause after _::_ and [] is useless
  CHECK_FALSE(useful(env, t, {cons(wild(), wild()), nil()}, wild()));
  // U([_], x::xs) = useless, hence _ is less precise than x::xs
  CHECK_FALSE(useful(env, t, {wild()}, cons(Pattern::var("x"), Pattern::var("xs"))));
  // witness Cons(1, Nil)
  CHECK(useful(env, t, {cons(Pattern::integer(0), wild())}, cons(wild(), wild())));
  auto w = useful_witness(env, t, {cons(Pattern::integer(0), wild())},
                          cons(wild(), wild()), 3, {0, 1});
  REQUIRE(w.has_value());
  CHECK(to_string(*w) == "Cons(1, Nil)");
}

TEST_CASE("leq: precision relation") {
  TypeEnv env = list_env();
  TypePtr t = list_type();

  auto ls = Pattern::var("ls");
  auto cons_xs = cons(Pattern::var("x"), Pattern::var("xs"));
  CHECK(leq(env, t, ls, cons_xs));
  CHECK_FALSE(leq(env, t, cons_xs, ls));

  // (_,_) is less precise than _ at a pair type (single-constructor family)
  TypePtr pair = Type::tuple({Type::integer(), Type::integer()});
  auto pair_pat = Pattern::ctor(tuple_ctor_name(2), {wild(), wild()});
  CHECK(leq(env, pair, pair_pat, wild()));
  CHECK(leq(env, pair, wild(), pair_pat));

  // Cons(0,_) and Cons(_,Nil) are unordered
  auto p1 = cons(Pattern::integer(0), wild());
  auto p2 = cons(wild(), nil());
  CHECK_FALSE(leq(env, t, p1, p2));
  CHECK_FALSE(leq(env, t, p2, p1));
}

TEST_CASE("equiv and repr") {
  TypeEnv env = list_env();
  TypePtr t = list_type();

  CHECK(equiv(env, t, erase_vars(Pattern::var("x")), wild()));

  TypePtr pair = Type::tuple({Type::integer(), Type::integer()});
  auto pair_pat = Pattern::ctor(tuple_ctor_name(2), {wild(), wild()});
  CHECK(equiv(env, pair, pair_pat, wild()));
  CHECK(to_string(repr(env, pair, pair_pat, wild())) == "(_, _)");

  CHECK_FALSE(equiv(env, t, nil(), wild()));
  CHECK_THROWS_AS(repr(env, t, nil(), wild()), ReprError);
}

TEST_CASE("exhaustive") {
  TypeEnv env = list_env();
  TypePtr t = list_type();

  CHECK(exhaustive(env, t, {erase_vars(Pattern::var("ls"))}));
  CHECK(exhaustive(env, t, {cons(wild(), wild()), nil()}));
  CHECK_FALSE(exhaustive(env, t, {cons(Pattern::integer(0), wild())}));

  // the int constructor family is never complete
  TypePtr ti = Type::integer();
  CHECK_FALSE(exhaustive(env, ti, {Pattern::integer(0), Pattern::integer(1)}));
  CHECK(exhaustive(env, ti, {Pattern::integer(0), wild()}));
}

TEST_CASE("erase_vars") {
  CHECK(to_string(erase_vars(cons(Pattern::var("x"), Pattern::var("xs")))) ==
        "Cons(_, _)");
  CHECK(to_string(erase_vars(cons(Pattern::integer(0), Pattern::var("xs")))) ==
        "Cons(0, _)");
  CHECK(to_string(erase_vars(wild())) == "_");
}

TEST_CASE("first_match over the enriched-stack dispatcher clauses") {
  // Step 4 clause order: 0::_::_, [0], _::_::_, 0::_, [_], _::_, [], _
  std::vector<PatternPtr> clauses = {
      cons(Pattern::integer(0), cons(wild(), wild())),
      cons(Pattern::integer(0), nil()),
      cons(wild(), cons(wild(), wild())),
      cons(Pattern::integer(0), wild()),
      cons(wild(), nil()),
      cons(wild(), wild()),
      nil(),
      wild(),
  };
  auto r1 = first_match(clauses, vlist({0}));
  REQUIRE(r1.has_value());
  CHECK(r1->clause_index == 1);

  auto r2 = first_match(clauses, vlist({5}));
  REQUIRE(r2.has_value());
  CHECK(r2->clause_index == 4);

  CHECK_FALSE(first_match({nil()}, vlist({1})).has_value());
}

TEST_CASE("enum_values") {
  TypeEnv env = list_env();
  TypePtr t = list_type();

  auto v1 = enum_values(env, t, 1, {0});
  REQUIRE(v1.size() == 1);
  CHECK(to_string(v1[0]) == "Nil");

  auto v2 = enum_values(env, t, 2, {0});
  REQUIRE(v2.size() == 2);
  CHECK(to_string(v2[0]) == "Nil");
  CHECK(to_string(v2[1]) == "Cons(0, Nil)");

  auto vi = enum_values(env, Type::integer(), 0, {0, 1});
  REQUIRE(vi.size() == 2);
  CHECK(vi[0]->int_value == 0);
  CHECK(vi[1]->int_value == 1);

  // each exactly once
  auto v4 = enum_values(env, t, 4, {0, 1});
  std::set<std::string> prints;
  for (const auto& v : v4) prints.insert(to_string(v));
  CHECK(prints.size() == v4.size());
  CHECK(v4.size() == 15);
}

TEST_CASE("oracle agreement: leq, lub, equiv, useful on random pairs") {
  TypeEnv env = list_env();
  TypePtr t = list_type();
  std::mt19937_64 rng(7);
  auto universe = enum_values(env, t, 4, {0, 1});

  for (int i = 0; i < 1000; ++i) {
    int next = 0;
    PatternPtr p1 = random_list_pattern(rng, 3, next);
    PatternPtr p2 = random_list_pattern(rng, 3, next);
    auto s1 = instances_of(p1, universe);
    auto s2 = instances_of(p2, universe);

    // The depth-4 universe saturates depth-3 patterns, so both directions
    // hold exactly.
    CHECK(leq(env, t, p1, p2) == subset_by_print(s2, s1));
    CHECK(equiv(env, t, p1, p2) ==
          (subset_by_print(s2, s1) && subset_by_print(s1, s2)));

    bool u = useful(env, t, {p1}, p2);
    bool oracle_u = false;
    for (const auto& v : universe)
      if (matches(p2, v) && !matches(p1, v)) {
        oracle_u = true;
        break;
      }
    CHECK(u == oracle_u);

    auto j = lub(p1, p2);
    if (j.has_value()) {
      for (const auto& v : universe) {
        bool both = matches(p1, v) && matches(p2, v);
        CHECK(matches(*j, v) == both);
      }
    } else {
      for (const auto& v : universe) {
        bool both = matches(p1, v) && matches(p2, v);
        CHECK_FALSE(both);
      }
    }
  }
}

TEST_CASE("simplified two-pattern recursion agrees with the matrix algorithm") {
  TypeEnv env = list_env();
  TypePtr t = list_type();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    int next = 0;
    PatternPtr p1 = random_list_pattern(rng, 3, next);
    PatternPtr p2 = random_list_pattern(rng, 3, next);
    CHECK(simplified_u(env, t, p1, p2) == useful(env, t, {p1}, p2));
  }
}

TEST_CASE("lub is commutative and associative up to equiv; wildcard is identity") {
  TypeEnv env = list_env();
  TypePtr t = list_type();
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    int next = 0;
    PatternPtr a = random_list_pattern(rng, 2, next);
    PatternPtr b = random_list_pattern(rng, 2, next);
    PatternPtr c = random_list_pattern(rng, 2, next);

    auto ab = lub(a, b);
    auto ba = lub(b, a);
    CHECK(ab.has_value() == ba.has_value());
    if (ab) CHECK(equiv(env, t, *ab, *ba));

    auto bc = lub(b, c);
    if (ab && bc) {
      auto left = lub(*ab, c);
      auto right = lub(a, *bc);
      CHECK(left.has_value() == right.has_value());
      if (left && right) CHECK(equiv(env, t, *left, *right));
    }

    auto aw = lub(a, wild());
    REQUIRE(aw.has_value());
    CHECK(equiv(env, t, *aw, a));
  }
}

TEST_CASE("leq is a partial order up to equiv") {
  TypeEnv env = list_env();
  TypePtr t = list_type();
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    int next = 0;
    PatternPtr a = random_list_pattern(rng, 2, next);
    PatternPtr b = random_list_pattern(rng, 2, next);
    PatternPtr c = random_list_pattern(rng, 2, next);

    CHECK(leq(env, t, a, a));
    if (leq(env, t, a, b) && leq(env, t, b, c)) CHECK(leq(env, t, a, c));
    if (leq(env, t, a, b) && leq(env, t, b, a)) CHECK(equiv(env, t, a, b));
  }
}

TEST_CASE("first_match satisfies the first-match side condition") {
  TypeEnv env = list_env();
  TypePtr t = list_type();
  std::mt19937_64 rng(19);
  auto universe = enum_values(env, t, 4, {0, 1});
  for (int i = 0; i < 500; ++i) {
    int next = 0;
    std::vector<PatternPtr> clauses;
    size_t n = 1 + rng() % 5;
    for (size_t k = 0; k < n; ++k)
      clauses.push_back(random_list_pattern(rng, 3, next));
    const ValuePtr& v = universe[rng() % universe.size()];
    auto r = first_match(clauses, v);
    if (r) {
      CHECK(matches(clauses[r->clause_index], v));
      for (size_t j = 0; j < r->clause_index; ++j)
        CHECK_FALSE(matches(clauses[j], v));
    } else {
      for (const auto& c : clauses) CHECK_FALSE(matches(c, v));
    }
  }
}

TEST_CASE("useful over matrices and exhaustive agree with the oracle") {
  TypeEnv env = list_env();
  TypePtr t = list_type();
  std::mt19937_64 rng(23);
  // One int constant outside the generated patterns keeps the universe
  // saturating for row sets (the int family is never complete).
  auto universe = enum_values(env, t, 4, {0, 1, 2});
  for (int i = 0; i < 300; ++i) {
    int next = 0;
    std::vector<PatternPtr> rows;
    size_t n = rng() % 4;
    for (size_t k = 0; k < n; ++k) rows.push_back(random_list_pattern(rng, 3, next));
    PatternPtr q = random_list_pattern(rng, 3, next);

    bool u = useful(env, t, rows, q);
    bool oracle_u = false;
    for (const auto& v : universe) {
      if (!matches(q, v)) continue;
      bool covered = false;
      for (const auto& r : rows)
        if (matches(r, v)) {
          covered = true;
          break;
        }
      if (!covered) {
        oracle_u = true;
        break;
      }
    }
    CHECK(u == oracle_u);

    bool ex = exhaustive(env, t, rows);
    bool oracle_ex = true;
    for (const auto& v : universe) {
      bool covered = false;
      for (const auto& r : rows)
        if (matches(r, v)) {
          covered = true;
          break;
        }
      if (!covered) {
        oracle_ex = false;
        break;
      }
    }
    CHECK(ex == oracle_ex);
  }
}
