#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "nfb/parse.hpp"
#include "nfb/typecheck.hpp"

using namespace nfb;

TEST_CASE("constants and types") {
  CHECK(typecheck(parse_term("()")).type->k == Type::K::Unit);
  CHECK(typecheck(parse_term("true")).type->k == Type::K::Bool);
  CHECK(typecheck(parse_term("-3")).type->k == Type::K::Int);
  CHECK(show_term(parse_term("(1, (true, ()))")) == "(1, (true, ()))");
}

TEST_CASE("type parser") {
  // arrow associates right, * binds tighter
  TypePtr t = parse_type("bool * int -> unit -> bool");
  REQUIRE(t->k == Type::K::Arrow);
  CHECK(t->dom->k == Type::K::Product);
  CHECK(t->cod->k == Type::K::Arrow);
  CHECK(type_eq(t, parse_type("(bool * int) -> (unit -> bool)")));
  CHECK(!type_eq(parse_type("int"), parse_type("bool")));
}

TEST_CASE("lambda sugar desugars to fix") {
  TermPtr t = parse_term("fun (x:int) -> x + 1");
  CHECK(t->k == Term::K::Fix);
  // non-recursive let is an applied lambda
  CHECK(typecheck(parse_term("let x = 3 in x * x")).type->k == Type::K::Int);
  CHECK(typecheck(parse_term("let rec f x = if x == 0 then 0 else f (x - 1) in f 5"))
            .type->k == Type::K::Int);
}

TEST_CASE("annotations propagate to unannotated binders") {
  // inner lambda gets its domain from the application site
  TermPtr t = parse_term("(fun (g:bool->bool) -> g true) (fun b -> b)");
  CHECK(typecheck(t).type->k == Type::K::Bool);
  TermPtr asc = parse_term("(_bot_ : int)");
  CHECK(typecheck(asc).type->k == Type::K::Int);
}

TEST_CASE("let-tuple") {
  TermPtr t = parse_term("let (x,y) = (1, true) in if y then x else 0");
  CHECK(typecheck(t).type->k == Type::K::Int);
}

TEST_CASE("comments are skipped") {
  TermPtr t = parse_term("(* leading *) 1 + (* inner *) 2 (* trailing *)");
  CHECK(show_term(t) == "1 + 2");
}

TEST_CASE("pair files split on a ||| line") {
  PairFile p = parse_pair_file("(* note *)\ntrue\n|||\nfalse\n");
  CHECK(show_term(p.lhs) == "true");
  CHECK(show_term(p.rhs) == "false");
  CHECK_THROWS_AS(parse_pair_file("true\nfalse\n"), ParseError);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_term("fun (x:int -> x");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line >= 1);
  }
  CHECK_THROWS_AS(parse_term(""), ParseError);
  CHECK_THROWS_AS(parse_term("1 +"), ParseError);
}

TEST_CASE("type errors") {
  CHECK_THROWS_AS(typecheck(parse_term("if 1 then 2 else 3")), TypeError);
  CHECK_THROWS_AS(typecheck(parse_term("true + 1")), TypeError);
  CHECK_THROWS_AS(typecheck(parse_term("(fun (x:int) -> x) true")), TypeError);
  CHECK_THROWS_AS(typecheck(parse_term("x")), TypeError);  // unbound
}

TEST_CASE("show/parse round trip") {
  // NB: show_term prints binders bare, so only inference-friendly terms
  // survive the round trip
  for (const char* src : {"if true then (1, 2) else (3, 4)",
                          "(fun (n:int) -> n + 1) 4",
                          "(fun (p:bool*int) -> let (a,b) = p in b) (true, 4)"}) {
    TermPtr t = typecheck(parse_term(src)).term;
    TermPtr back = typecheck(parse_term(show_term(t))).term;
    CHECK(show_term(t) == show_term(back));
  }
}
