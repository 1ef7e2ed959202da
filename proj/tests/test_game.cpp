#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "nfb/game.hpp"
#include "nfb/gen.hpp"
#include "nfb/parse.hpp"
#include "nfb/reduce.hpp"
#include "nfb/typecheck.hpp"

using namespace nfb;

namespace {
TermPtr tc(const std::string& s) { return typecheck(parse_term(s)).term; }

// hole 0 of type `ty` inside the body of an annotated lambda
TermPtr ctx_of(const std::string& lam, const TypePtr& hole_ty) {
  TermPtr t = tc(lam);
  REQUIRE(t->k == Term::K::Fix);
  return subst(t->xs[0], t->binders[0], mk_hole(0, hole_ty));
}

// Random playout; returns the configs and final trace.
GTrace playout(GameConfig c, Rnd& r, int steps, GSupply& sup,
               std::vector<GameConfig>* keep = nullptr) {
  for (int i = 0; i < steps; ++i) {
    auto succ = g_transitions(c, {0, 1}, sup);
    if (succ.empty()) break;
    c = succ[r.pick((int)succ.size())].next;
    if (keep) keep->push_back(c);
  }
  return c.t;
}
}  // namespace

TEST_CASE("a closed unit program terminates the game") {
  GameConfig c = g_initial_term(tc("()"));
  GSupply sup;
  auto succ = g_transitions(c, {0, 1}, sup);
  REQUIRE(succ.size() == 1);
  REQUIRE(succ[0].move);
  CHECK(succ[0].move->k == GMove::K::PropRet);
  CHECK(succ[0].next.o_final());
}

TEST_CASE("random playouts are plays") {
  const char* programs[] = {
      "fun (f:unit->bool) -> f ()",
      "fun (f:bool->bool) -> fun (g:bool->bool) -> f (g true)",
      "fun (f:(bool->bool)->bool) -> f (fun x -> x)",
      "fun (f:unit->unit) -> f (f ())",
  };
  for (unsigned seed = 0; seed < 40; ++seed) {
    Rnd r(seed);
    for (const char* p : programs) {
      GSupply sup;
      GTrace t = playout(g_initial_term(tc(p)), r, 30, sup);
      PlayCheck pc = is_play(t);
      INFO(p, " seed ", seed, ": ", pc.diag, "\n", show_gtrace(t));
      CHECK(pc.ok);
    }
  }
}

TEST_CASE("is_play rejects broken traces") {
  GSupply sup;
  Rnd r(3);
  GTrace t = playout(g_initial_term(tc("fun (f:unit->bool) -> f ()")), r, 30, sup);
  REQUIRE(t.size() >= 3);
  // duplicate a move: alternation breaks
  GTrace bad = t;
  bad.push_back(bad.back());
  CHECK(!is_play(bad).ok);
  // drop the opening move: later justifiers dangle
  GTrace tail(t.begin() + 1, t.end());
  CHECK(!is_play(tail).ok);
}

TEST_CASE("views select the justified spine") {
  GSupply sup;
  Rnd r(5);
  GTrace t = playout(g_initial_term(tc("fun (f:unit->bool) -> f ()")), r, 30, sup);
  auto just = justifiers(t);
  REQUIRE(just);
  auto pv = pview(t);
  // the P-view always contains the last move and is ordered
  REQUIRE(!pv.empty());
  CHECK(pv.back() == (int)t.size() - 1);
  for (size_t i = 1; i < pv.size(); ++i) CHECK(pv[i - 1] < pv[i]);
  // canonical serialization is insensitive to the fresh-name run
  GSupply sup2;
  sup2.no = 50;
  sup2.np = 90;
  Rnd r2(5);
  GTrace t2 = playout(g_initial_term(tc("fun (f:unit->bool) -> f ()")), r2, 30, sup2);
  auto just2 = justifiers(t2);
  REQUIRE(just2);
  CHECK(canon_view(t, *just, pview(t)) == canon_view(t2, *just2, pview(t2)));
}

TEST_CASE("dual swaps polarity move by move") {
  GSupply sup;
  Rnd r(11);
  GTrace t = playout(g_initial_term(tc("fun (f:unit->bool) -> f ()")), r, 30, sup);
  std::map<std::string, std::string> phi;  // identity on mentioned names
  for (auto& m : t)
    for (auto& n : m.intro) phi[n] = n;
  GTrace d = dual(t, phi);
  REQUIRE(d.size() == t.size());
  for (size_t i = 0; i < t.size(); ++i)
    CHECK(gmove_proponent(d[i]) != gmove_proponent(t[i]));
}

TEST_CASE("composition against concrete contexts matches evaluation") {
  struct Case { const char* prog; const char* ctx; bool conv; };
  TypePtr fb = parse_type("(bool -> bool) -> bool");
  Case cases[] = {
      {"fun (f:bool->bool) -> f true",
       "fun (h:(bool->bool)->bool) -> if h (fun x -> x) then () else ()", true},
      {"fun (f:bool->bool) -> f true",
       "fun (h:(bool->bool)->bool) -> if h (fun x -> (_bot_:bool)) then () else ()", false},
      {"fun (f:bool->bool) -> true",
       "fun (h:(bool->bool)->bool) -> if h (fun x -> (_bot_:bool)) then () else ()", true},
  };
  for (auto& cs : cases) {
    TermPtr e = tc(cs.prog);
    TermPtr E = ctx_of(cs.ctx, fb);
    ComposeResult r = compose_run(e, E, fb, 4000);
    INFO(cs.prog, " in ", cs.ctx);
    CHECK((r == ComposeResult::Terminated) == cs.conv);
    // the direct evaluation agrees
    EvalResult ev = evaluate(plug_ctx(E, e), 100000);
    CHECK((ev.k == EvalResult::K::Value) == cs.conv);
  }
}

TEST_CASE("composition agrees with evaluation on generated programs") {
  int agreements = 0;
  for (unsigned seed = 0; seed < 400 && agreements < 60; ++seed) {
    Rnd r(seed);
    TypePtr T = gen_type(r, 2, /*bool_base=*/true);
    TermPtr e = gen_term(r, T, 3);
    // wrap in a trivial applicative guard when the type is not unit
    TermPtr E;
    if (T->k == Type::K::Unit) E = mk_hole(0, T);
    else if (T->k == Type::K::Bool)
      E = mk_cond(mk_hole(0, T), mk_unit(), mk_unit());
    else continue;
    EvalResult ev = evaluate(plug_ctx(E, e), 4000);
    if (ev.k == EvalResult::K::Fuel) continue;
    ComposeResult c = compose_run(e, E, T, 4000);
    CHECK((c == ComposeResult::Terminated) == (ev.k == EvalResult::K::Value));
    ++agreements;
  }
  CHECK(agreements >= 60);
}
