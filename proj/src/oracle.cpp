#include "nfb/oracle.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "nfb/reduce.hpp"
#include "nfb/typecheck.hpp"

namespace nfb {

namespace {

constexpr size_t kCap = 400;       // per-call result cap
constexpr size_t kBranchCap = 24;  // conditional branch pool cap

struct Binding {
  std::string name;
  TypePtr ty;
};

TermPtr proj(const TermPtr& v, size_t i, size_t n) {
  std::vector<std::string> bs;
  for (size_t k = 0; k < n; ++k) bs.push_back("_p" + std::to_string(k));
  return mk_lettuple(bs, v, mk_var(bs[i]));
}

void dedup(std::vector<TermPtr>& xs) {
  std::set<std::string> seen;
  std::vector<TermPtr> out;
  for (auto& x : xs)
    if (seen.insert(show_term(x)).second) {
      out.push_back(x);
      if (out.size() >= kCap) break;
    }
  xs = std::move(out);
}

struct Gen {
  std::vector<long long> ints;
  int next_var = 0;

  // Accessible one-step heads: variables and projections of product vars.
  std::vector<std::pair<TermPtr, TypePtr>> heads(
      const std::vector<Binding>& env) {
    std::vector<std::pair<TermPtr, TypePtr>> out;
    for (auto& b : env) {
      out.push_back({mk_var(b.name), b.ty});
      if (b.ty->k == Type::K::Product)
        for (size_t i = 0; i < b.ty->items.size(); ++i)
          out.push_back({proj(mk_var(b.name), i, b.ty->items.size()),
                         b.ty->items[i]});
    }
    return out;
  }

  // Small arguments for applications: constants, heads, int offsets.
  std::vector<TermPtr> args(const std::vector<Binding>& env, const TypePtr& T,
                            int depth) {
    std::vector<TermPtr> out;
    if (T->k == Type::K::Unit) out.push_back(mk_unit());
    if (T->k == Type::K::Bool) {
      out.push_back(mk_bool(true));
      out.push_back(mk_bool(false));
    }
    if (T->k == Type::K::Int)
      for (auto c : ints) out.push_back(mk_int(c));
    for (auto& [h, ty] : heads(env)) {
      if (type_eq(ty, T)) out.push_back(h);
      if (ty->k == Type::K::Int && T->k == Type::K::Int) {
        out.push_back(mk_prim("-", {h, mk_int(1)}));
        out.push_back(mk_prim("+", {h, mk_int(1)}));
      }
    }
    if (T->k == Type::K::Arrow && depth > 0)
      for (auto& v : exprs(env, T, depth - 1)) out.push_back(v);
    if (T->k == Type::K::Product && depth > 0) {
      std::vector<std::vector<TermPtr>> comps;
      for (auto& c : T->items) comps.push_back(args(env, c, depth - 1));
      std::vector<std::vector<TermPtr>> acc{{}};
      for (auto& opts : comps) {
        std::vector<std::vector<TermPtr>> nx;
        for (auto& pre : acc)
          for (auto& o : opts) {
            if (nx.size() > kCap) break;
            auto row = pre;
            row.push_back(o);
            nx.push_back(row);
          }
        acc = std::move(nx);
      }
      for (auto& row : acc) out.push_back(mk_tuple(row));
    }
    dedup(out);
    return out;
  }

  // Application chains f a1 … an with the head drawn from env.
  std::vector<TermPtr> apps(const std::vector<Binding>& env, const TypePtr& T,
                            int depth) {
    std::vector<std::pair<TermPtr, TypePtr>> funs;
    for (auto& h : heads(env))
      if (h.second->k == Type::K::Arrow) funs.push_back(h);
    std::vector<TermPtr> out;
    for (int round = 0; round < depth + 1 && !funs.empty(); ++round) {
      std::vector<std::pair<TermPtr, TypePtr>> next;
      for (auto& [f, fty] : funs)
        for (auto& a : args(env, fty->dom, 0)) {
          TermPtr app = mk_app(f, a);
          if (type_eq(fty->cod, T)) out.push_back(app);
          if (fty->cod->k == Type::K::Arrow && next.size() < kCap)
            next.push_back({app, fty->cod});
        }
      funs = std::move(next);
    }
    dedup(out);
    return out;
  }

  std::vector<TermPtr> guards(const std::vector<Binding>& env, int depth) {
    std::vector<TermPtr> out;
    for (auto& [h, ty] : heads(env)) {
      if (ty->k == Type::K::Bool) out.push_back(h);
      if (ty->k == Type::K::Int)
        for (auto c : ints) {
          out.push_back(mk_prim(">", {h, mk_int(c)}));
          out.push_back(mk_prim("==", {h, mk_int(c)}));
        }
    }
    for (auto& a : apps(env, t_bool(), depth)) out.push_back(a);
    dedup(out);
    return out;
  }

  std::vector<TermPtr> exprs(const std::vector<Binding>& env, const TypePtr& T,
                             int depth) {
    std::vector<TermPtr> out;
    for (auto& [h, ty] : heads(env))
      if (type_eq(ty, T)) out.push_back(h);
    if (T->k == Type::K::Unit) out.push_back(mk_unit());
    if (T->k == Type::K::Bool) {
      out.push_back(mk_bool(true));
      out.push_back(mk_bool(false));
    }
    if (T->k == Type::K::Int)
      for (auto c : ints) out.push_back(mk_int(c));
    out.push_back(mk_bot(T));
    if (depth > 0) {
      if (T->k == Type::K::Arrow) {
        std::string x = "x" + std::to_string(++next_var);
        auto env2 = env;
        env2.push_back({x, T->dom});
        for (auto& b : exprs(env2, T->cod, depth))
          out.push_back(mk_fix("_f" + std::to_string(++next_var), T, x, b));
      }
      if (T->k == Type::K::Product)
        for (auto& v : args(env, T, depth)) out.push_back(v);
      for (auto& a : apps(env, T, depth)) out.push_back(a);
      auto gs = guards(env, depth - 1);
      auto pool = out;  // branches from what we have so far
      if (pool.size() > kBranchCap) pool.resize(kBranchCap);
      for (auto& g : gs) {
        if (out.size() > kCap) break;
        for (auto& a : pool)
          for (auto& b : pool) {
            if (show_term(a) == show_term(b)) continue;
            out.push_back(mk_cond(g, a, b));
          }
      }
    }
    dedup(out);
    return out;
  }
};

}  // namespace

std::vector<TermPtr> oracle_values(const TypePtr& T,
                                   const std::vector<long long>& ints,
                                   int depth) {
  Gen g{ints};
  std::vector<TermPtr> out = g.exprs({}, T, depth);
  if (T->k == Type::K::Arrow) {
    // diverging let rec: rec f x = f x
    out.push_back(mk_fix("_rec", T, "_rx", mk_app(mk_var("_rec"), mk_var("_rx"))));
  }
  // keep values only: drop ⊥ and open applications at the top
  std::vector<TermPtr> vals;
  for (auto& v : out)
    if (is_value(v)) vals.push_back(v);
  dedup(vals);
  return vals;
}

namespace {

void contexts(const TermPtr& E, const TypePtr& T, int depth,
              const std::vector<long long>& ints, std::vector<TermPtr>& out) {
  if (is_base(T)) {
    std::vector<TermPtr> cs;
    if (T->k == Type::K::Unit) cs.push_back(mk_unit());
    if (T->k == Type::K::Bool) {
      cs.push_back(mk_bool(true));
      cs.push_back(mk_bool(false));
    }
    if (T->k == Type::K::Int)
      for (auto c : ints) cs.push_back(mk_int(c));
    for (auto& c : cs)
      out.push_back(mk_cond(mk_prim("==", {E, c}), mk_unit(), mk_bot(t_unit())));
    return;
  }
  if (depth == 0) return;
  if (T->k == Type::K::Arrow)
    for (auto& v : oracle_values(T->dom, ints, 2))
      contexts(mk_app(E, v), T->cod, depth - 1, ints, out);
  if (T->k == Type::K::Product)
    for (size_t i = 0; i < T->items.size(); ++i)
      contexts(proj(E, i, T->items.size()), T->items[i], depth - 1, ints, out);
}

}  // namespace

std::vector<TermPtr> enumerate_applicative(const TypePtr& T, int depth,
                                           const std::vector<long long>& ints) {
  std::vector<TermPtr> out;
  contexts(mk_hole(0, T), T, depth, ints, out);
  std::set<std::string> seen;
  std::vector<TermPtr> uniq;
  for (auto& e : out)
    if (seen.insert(show_term(e)).second) uniq.push_back(e);
  return uniq;
}

OracleResult oracle_equiv(const TermPtr& e1, const TermPtr& e2, int depth,
                          long long fuel, const std::vector<long long>& ints) {
  Typed t1 = typecheck(e1);
  Typed t2 = typecheck(e2);
  bool ambiguous = false;
  for (auto& E : enumerate_applicative(t1.type, depth, ints)) {
    EvalResult r1 = evaluate(plug_ctx(E, t1.term), fuel);
    EvalResult r2 = evaluate(plug_ctx(E, t2.term), fuel);
    auto conv = [](const EvalResult& r) { return r.k == EvalResult::K::Value; };
    auto loop = [](const EvalResult& r) { return r.k == EvalResult::K::Diverged; };
    if ((conv(r1) && loop(r2)) || (loop(r1) && conv(r2)))
      return {OracleResult::V::Inequivalent, E};
    if (conv(r1) != conv(r2)) ambiguous = true;  // one side ran out of fuel
  }
  return {ambiguous ? OracleResult::V::Inconclusive : OracleResult::V::Equivalent,
          nullptr};
}

}  // namespace nfb
