#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "nfb/oracle.hpp"
#include "nfb/parse.hpp"
#include "nfb/reduce.hpp"
#include "nfb/typecheck.hpp"

using namespace nfb;

namespace {
TermPtr tc(const std::string& s) { return typecheck(parse_term(s)).term; }

OracleResult::V verdict(const std::string& a, const std::string& b, int depth = 3) {
  return oracle_equiv(tc(a), tc(b), depth, 800, {0, 1}).v;
}
}  // namespace

TEST_CASE("value templates cover the base types") {
  auto bools = oracle_values(parse_type("bool"), {0, 1}, 2);
  std::set<std::string> shown;
  for (auto& v : bools) shown.insert(show_term(v));
  CHECK(shown.count("true"));
  CHECK(shown.count("false"));
  auto units = oracle_values(parse_type("unit"), {0, 1}, 2);
  CHECK(units.size() == 1);
}

TEST_CASE("arrow templates include constant, identity-like and diverging arguments") {
  auto fs = oracle_values(parse_type("bool -> bool"), {0, 1}, 2);
  CHECK(fs.size() >= 4);
  bool has_diverging = false;
  for (auto& f : fs) {
    TermPtr applied = mk_app(f, mk_bool(true));
    if (evaluate(applied, 3000).k == EvalResult::K::Diverged) has_diverging = true;
  }
  CHECK(has_diverging);
  // all candidates really inhabit the type
  for (auto& f : fs) CHECK(type_eq(typecheck(f).type, parse_type("bool -> bool")));
}

TEST_CASE("applicative contexts are one-hole unit-typed programs") {
  TypePtr T = parse_type("bool -> bool");
  auto ctxs = enumerate_applicative(T, 2, {0, 1});
  CHECK(ctxs.size() >= 4);
  for (auto& E : ctxs) {
    TermPtr plugged = plug_ctx(E, tc("fun (b:bool) -> b"));
    CHECK(typecheck(plugged).type->k == Type::K::Unit);
  }
}

TEST_CASE("basic verdicts") {
  CHECK(verdict("fun (b:bool) -> if b then true else false", "fun (b:bool) -> b") ==
        OracleResult::V::Equivalent);
  CHECK(verdict("fun (b:bool) -> b", "fun (b:bool) -> if b then false else true") ==
        OracleResult::V::Inequivalent);
  CHECK(verdict("fun (f:bool->bool) -> f true", "fun (f:bool->bool) -> true") ==
        OracleResult::V::Inequivalent);
  CHECK(verdict("fun (u:unit) -> ()", "fun (u:unit) -> (_bot_:unit)") ==
        OracleResult::V::Inequivalent);
  CHECK(verdict("fun (f:unit->unit) -> f ()", "fun (f:unit->unit) -> f (f ())") ==
        OracleResult::V::Equivalent);
}

TEST_CASE("a reported context really distinguishes") {
  TermPtr a = tc("fun (f:bool->bool) -> f true");
  TermPtr b = tc("fun (f:bool->bool) -> f false");
  OracleResult r = oracle_equiv(a, b, 3, 800, {0, 1});
  REQUIRE(r.v == OracleResult::V::Inequivalent);
  REQUIRE(r.context);
  EvalResult ea = evaluate(plug_ctx(r.context, a), 100000);
  EvalResult eb = evaluate(plug_ctx(r.context, b), 100000);
  CHECK((ea.k == EvalResult::K::Value) != (eb.k == EvalResult::K::Value));
}

TEST_CASE("fuel ambiguity is reported, not guessed") {
  // one side converges instantly, the other outruns every exact-repetition
  // check; with tiny fuel the oracle must stay inconclusive
  TermPtr a = tc("fun (u:unit) -> 0");
  TermPtr b = tc("fun (u:unit) -> let rec f (x:int) = (f (x + 1) : int) in f 0");
  OracleResult r = oracle_equiv(a, b, 2, 50, {0});
  CHECK(r.v == OracleResult::V::Inconclusive);
}
