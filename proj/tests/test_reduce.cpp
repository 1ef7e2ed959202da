#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "nfb/parse.hpp"
#include "nfb/reduce.hpp"
#include "nfb/typecheck.hpp"

using namespace nfb;

namespace {
TermPtr tc(const std::string& s) { return typecheck(parse_term(s)).term; }

long long eval_int(const std::string& s) {
  EvalResult r = evaluate(tc(s));
  REQUIRE(r.k == EvalResult::K::Value);
  REQUIRE(r.value->k == Term::K::Const);
  return r.value->c.n;
}

bool diverges(const std::string& s) {
  return evaluate(tc(s), 5000).k == EvalResult::K::Diverged;
}
}  // namespace

TEST_CASE("arithmetic") {
  CHECK(eval_int("2 + 3 * 4") == 14);
  CHECK(eval_int("10 - 13") == -3);
  CHECK(eval_int("(fun (n:int) -> n * n) 7") == 49);
}

TEST_CASE("euclidean division and modulus") {
  CHECK(eval_int("7 / 2") == 3);
  CHECK(eval_int("7 mod 2") == 1);
  // remainder is always non-negative
  CHECK(eval_int("(0 - 7) / 2") == -4);
  CHECK(eval_int("(0 - 7) mod 2") == 1);
  CHECK(eval_int("7 / (0 - 2)") == -3);
  CHECK(eval_int("7 mod (0 - 2)") == 1);
}

TEST_CASE("division by zero counts as divergence") {
  CHECK(diverges("1 / 0"));
  CHECK(diverges("1 mod 0"));
  // ... even under a consumed conditional branch
  CHECK(eval_int("if true then 1 else 1 / 0") == 1);
}

TEST_CASE("strict boolean operators evaluate both operands") {
  CHECK(diverges("false && (let rec f x = f x in f true)"));
  CHECK(diverges("true || (let rec f x = f x in f true)"));
  CHECK(eval_int("if false && true then 1 else 2") == 2);
  CHECK(eval_int("if true || false then 1 else 2") == 1);
}

TEST_CASE("call by value") {
  // argument evaluated before substitution: diverging argument wins
  CHECK(diverges("(fun (x:int) -> 1) (let rec f y = f y in f 0)"));
  CHECK(eval_int("let (a,b) = (1+1, 2+2) in a * b") == 8);
}

TEST_CASE("divergence detected by state repetition") {
  EvalResult r = evaluate(tc("let rec f (x:int) = (f x : int) in f 0"), 100000);
  CHECK(r.k == EvalResult::K::Diverged);
  CHECK(diverges("(_bot_ : int)"));
  // ever-growing recursion only exhausts fuel
  r = evaluate(tc("let rec f (x:int) = (f (x + 1) : int) in f 0"), 2000);
  CHECK(r.k == EvalResult::K::Fuel);
}

TEST_CASE("fixed point unrolling") {
  CHECK(eval_int("let rec fact n = if n == 0 then 1 else n * fact (n - 1) in fact 6") == 720);
  CHECK(eval_int("let rec even n = if n == 0 then 1 else (if even (n - 1) == 1 then 0 else 1) in even 9") == 0);
}

TEST_CASE("step classifies redexes") {
  CHECK(step(tc("fun (x:int) -> x")).k == Step::K::Value);
  CHECK(step(tc("(1, true)")).k == Step::K::Value);
  CHECK(step(tc("1 + 1")).k == Step::K::Stepped);

  // an applied abstract name surfaces as AbsCall with its context
  TermPtr alpha = mk_absname("a", parse_type("int -> int"), 1);
  TermPtr call = mk_app(alpha, mk_int(3));
  Step s = step(mk_prim("+", {call, mk_int(1)}));
  REQUIRE(s.k == Step::K::AbsCall);
  CHECK(s.alpha->name == "a");
  CHECK(show_term(s.arg) == "3");
  CHECK(s.ctx->k != Term::K::Const);

  // a symbolic guard surfaces as Branch
  TermPtr k = mk_symconst("k1", parse_type("bool"));
  Step b = step(mk_cond(k, mk_int(1), mk_int(2)));
  REQUIRE(b.k == Step::K::Branch);
  CHECK(show_term(b.guard) == show_term(k));
  CHECK(show_term(b.thn) == "1");
  CHECK(show_term(b.els) == "2");
}

TEST_CASE("stuck terms fold into divergence in evaluate") {
  // plugging Branch continuations back
  TermPtr k = mk_symconst("k1", parse_type("bool"));
  TermPtr e = mk_prim("+", {mk_cond(k, mk_int(1), mk_int(2)), mk_int(10)});
  Step b = step(e);
  REQUIRE(b.k == Step::K::Branch);
  EvalResult thn = evaluate(plug_ctx(b.ctx, b.thn));
  REQUIRE(thn.k == EvalResult::K::Value);
  CHECK(thn.value->c.n == 11);
}
