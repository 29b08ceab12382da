#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "joinmatch/ast.hpp"
#include "joinmatch/parser.hpp"

using namespace joinmatch;

namespace {

PatternPtr list_cons(PatternPtr h, PatternPtr t) {
  return Pattern::ctor("Cons", {std::move(h), std::move(t)});
}

PatternPtr list_nil() { return Pattern::ctor("Nil", {}); }

// Independent naive recursive reference for rv, used by the agreement
// property below.
void naive_rv(const PatternPtr& p, std::vector<Name>& out) {
  if (p->kind == Pattern::Kind::Var) out.push_back(p->name);
  for (const auto& a : p->args) naive_rv(a, out);
}

PatternPtr random_pattern(std::mt19937_64& rng, int depth, int& next_var) {
  int roll = static_cast<int>(rng() % 5);
  if (depth == 0 || roll == 0) {
    switch (rng() % 3) {
      case 0:
        return Pattern::wildcard();
      case 1:
        return Pattern::var("v" + std::to_string(next_var++));
      default:
        return list_nil();
    }
  }
  if (roll == 1) return Pattern::var("v" + std::to_string(next_var++));
  if (roll == 2) return Pattern::wildcard();
  PatternPtr head = rng() % 2 ? PatternPtr(Pattern::integer(static_cast<long long>(rng() % 2)))
                              : Pattern::var("v" + std::to_string(next_var++));
  return list_cons(std::move(head), random_pattern(rng, depth - 1, next_var));
}

}  // namespace

TEST_CASE("received_vars on patterns") {
  auto p = list_cons(Pattern::var("x"), Pattern::var("xs"));
  CHECK(received_vars(p) == std::set<Name>{"x", "xs"});
  CHECK(received_vars(Pattern::wildcard()).empty());

  auto dup = list_cons(Pattern::var("x"), Pattern::var("x"));
  CHECK_THROWS_AS(received_vars(dup), NonLinearError);
}

TEST_CASE("received_vars on the stack pop join pattern") {
  // pop(r) & State(Cons(x,xs)) binds r, x, xs
  JoinPattern j;
  j.conjuncts.push_back(JoinConjunct{{{MessagePattern{"pop", Pattern::var("r"), nullptr, {}}}}});
  j.conjuncts.push_back(JoinConjunct{
      {{MessagePattern{"State", list_cons(Pattern::var("x"), Pattern::var("xs")),
                       nullptr, {}}}}});
  CHECK(received_vars(j) == std::set<Name>{"r", "x", "xs"});
  CHECK(defined_channels(j) == std::set<Name>{"pop", "State"});
}

TEST_CASE("defined_channels rejects a repeated channel") {
  JoinPattern j;
  j.conjuncts.push_back(JoinConjunct{{{MessagePattern{"x", Pattern::var("a"), nullptr, {}}}}});
  j.conjuncts.push_back(JoinConjunct{{{MessagePattern{"x", Pattern::var("b"), nullptr, {}}}}});
  CHECK_THROWS_AS(defined_channels(j), NonLinearError);
}

TEST_CASE("defined_channels of the empty definition") {
  Definition d;
  CHECK(defined_channels(d).empty());
}

TEST_CASE("free_vars of a send") {
  // fv(x(Cons(y, Nil))) = {x, y}
  auto e = Expression::ctor(
      "Cons", {Expression::var("y"), Expression::ctor("Nil", {}, {})}, {});
  auto p = Process::send("x", e);
  CHECK(free_vars(p) == std::set<Name>{"x", "y"});
}

TEST_CASE("free_vars of def and match") {
  // fv(def x(v) |> y(v) in x(z)) = {y, z}
  auto d = std::make_shared<Definition>();
  ReactionRule rule;
  rule.pattern.conjuncts.push_back(
      JoinConjunct{{{MessagePattern{"x", Pattern::var("v"), nullptr, {}}}}});
  rule.body = Process::send("y", Expression::var("v"));
  d->rules.push_back(rule);
  auto p = Process::def(d, Process::send("x", Expression::var("z")));
  CHECK(free_vars(p) == std::set<Name>{"y", "z"});

  // fv(match w with Cons(h,t) -> h(t)) = {w}
  auto m = Process::match(
      Expression::var("w"),
      {{list_cons(Pattern::var("h"), Pattern::var("t")),
        Process::send("h", Expression::var("t")), false}});
  CHECK(free_vars(m) == std::set<Name>{"w"});
}

TEST_CASE("substitute replaces free occurrences") {
  Substitution s;
  s["x"] = Value::integer(2);
  s["r"] = Value::channel(ChannelId{7}, "r");

  auto p = Process::send("r", Expression::var("x"));
  auto q = substitute(p, s);
  CHECK(q->chan.raw == 7);
  CHECK(q->arg->kind == Expression::Kind::Int);
  CHECK(q->arg->int_value == 2);
}

TEST_CASE("substitute respects binders") {
  // x(v) under def x(v) |> ... : bound v untouched
  auto d = std::make_shared<Definition>();
  ReactionRule rule;
  rule.pattern.conjuncts.push_back(
      JoinConjunct{{{MessagePattern{"x", Pattern::var("v"), nullptr, {}}}}});
  rule.body = Process::send("out", Expression::var("v"));
  d->rules.push_back(rule);
  auto p = Process::def(d, Process::null());

  Substitution s;
  s["v"] = Value::integer(1);
  auto q = substitute(p, s);
  CHECK(q->definition->rules[0].body->arg->kind == Expression::Kind::Var);
  CHECK(q->definition->rules[0].body->arg->name == "v");
}

TEST_CASE("substitute evaluates the pop rule body under sigma") {
  // State(xs) under {x -> 1, xs -> Nil} becomes State(Nil)
  Substitution s;
  s["x"] = Value::integer(1);
  s["xs"] = Value::make_ctor("Nil", {});
  auto p = Process::send("State", Expression::var("xs"));
  auto q = substitute(p, s);
  CHECK(to_string(q->arg) == "Nil");
}

TEST_CASE("substitute with empty substitution is identity") {
  auto p = Process::send("x", Expression::var("y"));
  CHECK(substitute(p, {}) == p);
}

TEST_CASE("substitute is compositional on Parallel") {
  Substitution s;
  s["a"] = Value::integer(3);
  auto l = Process::send("x", Expression::var("a"));
  auto r = Process::send("y", Expression::var("a"));
  auto both = substitute(Process::par(l, r), s);
  CHECK(print_process(both) ==
        print_process(Process::par(substitute(l, s), substitute(r, s))));
}

TEST_CASE("fresh_name picks the least unused suffix") {
  CHECK(fresh_name("z", {}) == "z");
  CHECK(fresh_name("z", {"z"}) == "z'1");
  CHECK(fresh_name("z", {"z", "z'1"}) == "z'2");
}

TEST_CASE("rv agrees with a naive reference on random patterns") {
  std::mt19937_64 rng(20260810);
  for (int i = 0; i < 1000; ++i) {
    int next_var = 0;
    auto p = random_pattern(rng, 6, next_var);
    std::vector<Name> ref;
    naive_rv(p, ref);
    std::set<Name> ref_set(ref.begin(), ref.end());
    // Generator emits distinct variable names, so rv never throws here.
    CHECK(received_vars(p) == ref_set);
  }
}

TEST_CASE("canonical printing") {
  auto p = list_cons(Pattern::integer(0), Pattern::wildcard());
  CHECK(to_string(p) == "Cons(0, _)");
  auto v = Value::make_ctor("Cons", {Value::integer(1), Value::make_ctor("Nil", {})});
  CHECK(to_string(v) == "Cons(1, Nil)");
  auto unit = Value::unit();
  CHECK(to_string(unit) == "()");
  auto pair = Value::make_ctor(tuple_ctor_name(2), {Value::integer(1), Value::integer(2)});
  CHECK(to_string(pair) == "(1, 2)");
}
