#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "joinmatch/parser.hpp"
#include "joinmatch/typecheck.hpp"

using namespace joinmatch;

namespace {

const char* kStackSource = R"(
(* the list-based concurrent stack *)
type list = Nil | Cons(int, list)

def pop(r) & State(Cons(x, xs)) |> r(x) & State(xs)
 or push(v) & State(ls) |> State(Cons(v, ls))
in State(Nil) & push(1)
)";

}  // namespace

TEST_CASE("parse the stack source") {
  Program p = parse(kStackSource);
  REQUIRE(p.decls.size() == 1);
  CHECK(p.decls[0].name == "list");
  REQUIRE(p.main->kind == Process::Kind::Def);
  CHECK(p.main->definition->rules.size() == 2);
  // pop(r) & State(Cons(x,xs))
  const auto& jp = p.main->definition->rules[0].pattern;
  REQUIRE(jp.conjuncts.size() == 2);
  CHECK(jp.conjuncts[0].alts[0][0].channel == "pop");
  CHECK(jp.conjuncts[1].alts[0][0].channel == "State");
  CHECK(to_string(jp.conjuncts[1].alts[0][0].arg) == "Cons(x, xs)");
}

TEST_CASE("parse minimal program") {
  Program p = parse("def x() |> 0 in x()");
  REQUIRE(p.main->kind == Process::Kind::Def);
  CHECK(p.main->definition->rules.size() == 1);
  CHECK(p.main->body->kind == Process::Kind::Send);
}

TEST_CASE("parse rejects a missing pattern") {
  CHECK_THROWS_AS(parse("match z with | -> 0"), SyntaxError);
}

TEST_CASE("parse rejects compiler-private names outside loader mode") {
  CHECK_THROWS_AS(parse("def x(v) |> 0 in x@1(2)"), SyntaxError);
  ParseOptions loader;
  loader.loader = true;
  CHECK_NOTHROW(parse("def x@1(v) |> 0 in x@1(2)", loader));
}

TEST_CASE("or in join patterns is loader-only") {
  const char* src = "def (a(x) or b(x)) & c(y) |> 0 in a(1) & c(2)";
  CHECK_THROWS_AS(parse(src), SyntaxError);
  ParseOptions loader;
  loader.loader = true;
  Program p = parse(src, loader);
  const auto& jp = p.main->definition->rules[0].pattern;
  REQUIRE(jp.conjuncts.size() == 2);
  CHECK(jp.conjuncts[0].alts.size() == 2);
  CHECK(jp.conjuncts[1].alts.size() == 1);
}

TEST_CASE("comments nest") {
  CHECK_NOTHROW(parse("(* a (* nested *) b *) 0"));
  CHECK_THROWS_AS(parse("(* unterminated 0"), SyntaxError);
}

TEST_CASE("typecheck the stack") {
  TypedProgram tp = typecheck(parse(kStackSource));
  const auto& types = tp.program.main->definition->channel_types;
  CHECK(to_string(types.at("State")) == "list");
  CHECK(to_string(types.at("push")) == "int");
  // pop carries a reply channel of ints
  CHECK(to_string(types.at("pop")) == "chan(int)");
  REQUIRE(tp.free_channels.empty());
}

TEST_CASE("typecheck infers free output channels") {
  TypedProgram tp = typecheck(parse(
      "type list = Nil | Cons(int, list)\n"
      "def pop(r) & State(Cons(x, xs)) |> r(x) & State(xs) in State(Cons(1, Nil)) & pop(out)"));
  REQUIRE(tp.free_channels.count("out"));
  CHECK(to_string(tp.free_channels.at("out")) == "chan(int)");
}

TEST_CASE("typecheck rejects a type mismatch") {
  // x carries list, sent an int
  CHECK_THROWS_AS(typecheck(parse("type list = Nil | Cons(int, list)\n"
                                  "def x(Cons(a, b)) |> 0 in x(1)")),
                  TypeError);
}

TEST_CASE("typecheck tuples through match") {
  TypedProgram tp = typecheck(parse("match (1, 2) with | (a, b) -> out(a)"));
  CHECK(to_string(tp.program.main->subject_type) == "(int, int)");
  CHECK(to_string(tp.free_channels.at("out")) == "chan(int)");
}

TEST_CASE("typecheck rejects nonlinear patterns") {
  CHECK_THROWS_AS(typecheck(parse("match (1, 2) with | (a, a) -> 0")),
                  NonLinearError);
  CHECK_THROWS_AS(typecheck(parse("def x(v) & y(v) |> 0 in x(1)")),
                  NonLinearError);
  CHECK_THROWS_AS(typecheck(parse("def x(v) & x(w) |> 0 in x(1)")),
                  NonLinearError);
}

TEST_CASE("unknown constructor applications fail at parse") {
  CHECK_THROWS_AS(parse("match 1 with | x -> out(Cons(x))"), SyntaxError);
}

TEST_CASE("channels with no inferable type are an error") {
  CHECK_THROWS_AS(typecheck(parse("def x(v) |> 0 in 0")), TypeError);
}

TEST_CASE("channel annotations pin otherwise-ambiguous types") {
  TypedProgram tp = typecheck(parse("def x(v : int) |> 0 in 0"));
  CHECK(to_string(tp.program.main->definition->channel_types.at("x")) == "int");
}

TEST_CASE("match clauses must share the subject type") {
  CHECK_THROWS_AS(typecheck(parse("type list = Nil | Cons(int, list)\n"
                                  "match Nil with | Nil -> 0 | 3 -> 0")),
                  TypeError);
}

TEST_CASE("uninhabited types are rejected") {
  CHECK_THROWS_AS(typecheck(parse("type loop = Self(loop)\n0")), TypeError);
}

TEST_CASE("print/parse round trip is stable") {
  for (const char* src :
       {kStackSource, "def x() |> 0 in x()",
        "match (1, 2) with | (a, b) -> out(a) | _ -> 0",
        "def a(x) & b(y) |> (match x with | 0 -> a(y) | _ -> b(x)) in a(1) & b(2)"}) {
    Program p1 = parse(src);
    std::string printed = print_program(p1);
    Program p2 = parse(printed);
    CHECK(print_program(p2) == printed);
  }
}

TEST_CASE("emitted or-groups and @names reparse in loader mode") {
  ParseOptions loader;
  loader.loader = true;
  const char* src =
      "type list = Nil | Cons(int, list)\n"
      "def push(v) & (s@1(z) or s@2(z)) |> s@1(Cons(v, z)) or s@1(w) |> 0 or s@2(w) |> 0 in push(1)";
  Program p1 = parse(src, loader);
  std::string printed = print_program(p1);
  Program p2 = parse(printed, loader);
  CHECK(print_program(p2) == printed);
}
