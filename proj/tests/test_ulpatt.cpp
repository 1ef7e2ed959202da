#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "nfb/parse.hpp"
#include "nfb/typecheck.hpp"
#include "nfb/ulpatt.hpp"

using namespace nfb;

namespace {
TermPtr tc(const std::string& s) { return typecheck(parse_term(s)).term; }
}

TEST_CASE("base values are their own pattern") {
  UPat p = ulpatt(tc("true"));
  CHECK(show_term(p.pattern) == "true");
  CHECK(p.fns.empty());
  p = ulpatt(tc("(1, ())"));
  CHECK(show_term(p.pattern) == "(1, ())");
  CHECK(p.fns.empty());
}

TEST_CASE("functions become numbered holes") {
  UPat p = ulpatt(tc("fun (x:int) -> x"));
  CHECK(p.pattern->k == Term::K::Hole);
  CHECK(p.pattern->index == 1);
  REQUIRE(p.fns.size() == 1);
  CHECK(p.fns[0]->k == Term::K::Fix);
}

TEST_CASE("holes are numbered left to right depth first") {
  UPat p = ulpatt(tc("((fun (x:int) -> x), (true, (fun (u:unit) -> 0)))"));
  CHECK(show_term(p.pattern) == "([1], (true, [2]))");
  REQUIRE(p.fns.size() == 2);
  // plugging the extracted functions back restores the value
  CHECK(show_term(plug(p.pattern, p.fns)) ==
        show_term(tc("((fun (x:int) -> x), (true, (fun (u:unit) -> 0)))")));
}

TEST_CASE("symbolic leaves survive in the pattern") {
  TermPtr v = mk_tuple({mk_symconst("k1", parse_type("int")),
                        mk_fix("f", parse_type("int->int"), "x", mk_var("x"))});
  UPat p = ulpatt(v);
  CHECK(show_term(p.pattern) == "(%k1, [1])");
}

TEST_CASE("symbolic opponent pattern is canonical") {
  NameSupply s;
  OPat p = symbolic_pattern(parse_type("(bool -> bool) * int * unit"), s);
  REQUIRE(p.names.size() == 1);
  REQUIRE(p.syms.size() == 1);
  CHECK(p.names[0]->k == Term::K::AbsName);
  CHECK(p.syms[0]->k == Term::K::SymConst);
  CHECK(p.value->k == Term::K::Tuple);
  CHECK(show_term(p.value->xs[2]) == "()");
}

TEST_CASE("concrete pattern enumeration counts") {
  NameSupply s;
  std::vector<long long> ints = {0, 1, 2};
  CHECK(enumerate_patterns(parse_type("unit"), ints, s).size() == 1);
  CHECK(enumerate_patterns(parse_type("bool"), ints, s).size() == 2);
  CHECK(enumerate_patterns(parse_type("int"), ints, s).size() == 3);
  CHECK(enumerate_patterns(parse_type("bool * bool"), ints, s).size() == 4);
  // a single abstract name stands for all functions
  CHECK(enumerate_patterns(parse_type("int -> int"), ints, s).size() == 1);
  CHECK(enumerate_patterns(parse_type("bool * (int -> int)"), ints, s).size() == 2);
}

TEST_CASE("index_names stamps every unindexed name") {
  NameSupply s;
  OPat p = symbolic_pattern(parse_type("(bool -> bool) * (int -> int)"), s);
  TermPtr v = index_names(p.value, 4);
  REQUIRE(v->k == Term::K::Tuple);
  CHECK(v->xs[0]->index == 4);
  CHECK(v->xs[1]->index == 4);
}
