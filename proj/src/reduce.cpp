#include "nfb/reduce.hpp"

#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "nfb/symbolic.hpp"

namespace nfb {

namespace {

Step stepped(TermPtr t) { return {Step::K::Stepped, std::move(t)}; }
Step stuck() { return {Step::K::Stuck}; }

// Wraps a child result: rebuilds the surrounding frame around `term` (for
// Stepped) or around the context (for AbsCall/Branch).
Step wrap(Step s, const TermPtr& e, size_t child) {
  auto rebuild_with = [&](const TermPtr& sub) {
    Term node = *e;
    node.xs[child] = sub;
    return std::make_shared<const Term>(std::move(node));
  };
  switch (s.k) {
    case Step::K::Stepped:
      s.term = rebuild_with(s.term);
      return s;
    case Step::K::AbsCall:
    case Step::K::Branch:
      s.ctx = rebuild_with(s.ctx);
      return s;
    default:
      return s;  // Stuck propagates; Value cannot reach here
  }
}

Step contract(const TermPtr& e) {
  switch (e->k) {
    case Term::K::App: {
      const TermPtr& f = e->xs[0];
      const TermPtr& a = e->xs[1];
      if (f->k == Term::K::Fix) {
        TermPtr body = subst(f->xs[0], f->binders[0], a);
        return stepped(subst(body, f->name, f));
      }
      if (f->k == Term::K::AbsName) {
        TypePtr hole_ty = f->ty ? f->ty->cod : nullptr;
        Step s{Step::K::AbsCall};
        s.ctx = mk_hole(0, hole_ty);
        s.alpha = f;
        s.arg = a;
        return s;
      }
      return stuck();
    }
    case Term::K::Cond: {
      const TermPtr& g = e->xs[0];
      if (g->k == Term::K::Const)
        return stepped(g->c.b ? e->xs[1] : e->xs[2]);
      if (is_symbolic(g)) {
        Step s{Step::K::Branch};
        s.ctx = mk_hole(0, nullptr);
        s.guard = g;
        s.thn = e->xs[1];
        s.els = e->xs[2];
        return s;
      }
      return stuck();
    }
    case Term::K::Prim: {
      const std::string& op = e->name;
      if ((op == "/" || op == "mod") && is_symbolic(e->xs[1])) {
        // Fork on the divisor being zero; the zero branch is stuck, which
        // the convention reads as divergence.
        Step s{Step::K::Branch};
        s.ctx = mk_hole(0, nullptr);
        s.guard = sym_eq(e->xs[1], mk_int(0));
        s.thn = mk_bot(t_int());
        TermPtr v = mk_symterm(op, e->xs, t_int());
        s.els = v;
        return s;
      }
      TermPtr r = sym_prim(op, e->xs);
      if (!r) return stuck();  // division by concrete zero
      return stepped(r);
    }
    case Term::K::LetTuple: {
      const TermPtr& v = e->xs[0];
      if (e->binders.size() == 1)
        return stepped(subst(e->xs[1], e->binders[0], v));
      if (v->k != Term::K::Tuple || v->xs.size() != e->binders.size())
        return stuck();
      TermPtr body = e->xs[1];
      // Simultaneous binding: rename first to avoid capture between fields.
      std::vector<std::string> tmp;
      for (size_t i = 0; i < e->binders.size(); ++i) {
        tmp.push_back("_lt" + std::to_string(fresh_id()));
        body = subst(body, e->binders[i], mk_var(tmp[i]));
      }
      for (size_t i = 0; i < tmp.size(); ++i) body = subst(body, tmp[i], v->xs[i]);
      return stepped(body);
    }
    default:
      return stuck();
  }
}

}  // namespace

Step step(const TermPtr& e) {
  if (is_value(e)) return {Step::K::Value, e};
  // Children evaluated left-to-right for App/Tuple/Prim; Cond and LetTuple
  // only force their scrutinee.
  size_t forced = e->xs.size();
  if (e->k == Term::K::Cond || e->k == Term::K::LetTuple) forced = 1;
  if (e->k == Term::K::Var || e->k == Term::K::Fix) return stuck();
  for (size_t i = 0; i < forced; ++i) {
    if (!is_value(e->xs[i])) return wrap(step(e->xs[i]), e, i);
  }
  return contract(e);
}

EvalResult evaluate(const TermPtr& e, long long fuel) {
  TermPtr cur = e;
  std::unordered_map<size_t, std::vector<TermPtr>> seen;
  for (long long i = 0; i < fuel; ++i) {
    Step s = step(cur);
    switch (s.k) {
      case Step::K::Value:
        return {EvalResult::K::Value, cur};
      case Step::K::Stuck:
        return {EvalResult::K::Diverged, nullptr};
      case Step::K::Stepped: {
        auto& bucket = seen[term_hash(s.term)];
        for (auto& prev : bucket)
          if (term_eq(prev, s.term)) return {EvalResult::K::Diverged, nullptr};
        if (bucket.size() < 8) bucket.push_back(s.term);
        cur = s.term;
        break;
      }
      default:
        throw std::runtime_error("evaluate: symbolic leaf in concrete term");
    }
  }
  return {EvalResult::K::Fuel, nullptr};
}

}  // namespace nfb
