#include "nfb/typecheck.hpp"

#include <map>
#include <vector>

namespace nfb {

namespace {

struct Infer {
  // Union-find over inference variables; `bindings[id]` is the resolved
  // type once known (possibly containing further variables).
  std::vector<TypePtr> bindings;

  TypePtr fresh() {
    bindings.push_back(nullptr);
    return t_var(static_cast<int>(bindings.size()) - 1);
  }

  TypePtr shallow(TypePtr t) {
    while (t && t->k == Type::K::Var && bindings[t->var_id]) t = bindings[t->var_id];
    return t;
  }

  bool occurs(int id, const TypePtr& t0) {
    TypePtr t = shallow(t0);
    if (!t) return false;
    switch (t->k) {
      case Type::K::Var: return t->var_id == id;
      case Type::K::Arrow: return occurs(id, t->dom) || occurs(id, t->cod);
      case Type::K::Product:
        for (auto& it : t->items)
          if (occurs(id, it)) return true;
        return false;
      default: return false;
    }
  }

  void unify(TypePtr a, TypePtr b) {
    a = shallow(a);
    b = shallow(b);
    if (a->k == Type::K::Var) {
      if (b->k == Type::K::Var && a->var_id == b->var_id) return;
      if (occurs(a->var_id, b)) throw TypeError("infinite type during unification");
      bindings[a->var_id] = b;
      return;
    }
    if (b->k == Type::K::Var) {
      unify(b, a);
      return;
    }
    if (a->k != b->k)
      throw TypeError("type mismatch: " + show_type(zonk_partial(a)) + " vs " +
                      show_type(zonk_partial(b)));
    switch (a->k) {
      case Type::K::Arrow:
        unify(a->dom, b->dom);
        unify(a->cod, b->cod);
        return;
      case Type::K::Product: {
        if (a->items.size() != b->items.size())
          throw TypeError("tuple arity mismatch: " + show_type(zonk_partial(a)) +
                          " vs " + show_type(zonk_partial(b)));
        for (size_t i = 0; i < a->items.size(); ++i) unify(a->items[i], b->items[i]);
        return;
      }
      default: return;
    }
  }

  // Resolve as far as possible (used in error messages).
  TypePtr zonk_partial(TypePtr t) {
    t = shallow(t);
    switch (t->k) {
      case Type::K::Arrow:
        return t_arrow(zonk_partial(t->dom), zonk_partial(t->cod));
      case Type::K::Product: {
        std::vector<TypePtr> items;
        for (auto& it : t->items) items.push_back(zonk_partial(it));
        return t_product(std::move(items));
      }
      default: return t;
    }
  }

  TypePtr zonk(TypePtr t) {
    t = zonk_partial(t);
    if (has_var(t))
      throw TypeError("cannot infer type " + show_type(t) +
                      "; annotate the binder or expression");
    return t;
  }

  static bool has_var(const TypePtr& t) {
    switch (t->k) {
      case Type::K::Var: return true;
      case Type::K::Arrow: return has_var(t->dom) || has_var(t->cod);
      case Type::K::Product:
        for (auto& it : t->items)
          if (has_var(it)) return true;
        return false;
      default: return false;
    }
  }

  // Converts a possibly-partial source annotation into an inference type,
  // replacing null components with fresh variables.
  TypePtr from_annotation(const TypePtr& ann) {
    if (!ann) return fresh();
    switch (ann->k) {
      case Type::K::Arrow:
        return t_arrow(from_annotation(ann->dom), from_annotation(ann->cod));
      case Type::K::Product: {
        std::vector<TypePtr> items;
        for (auto& it : ann->items) items.push_back(from_annotation(it));
        return t_product(std::move(items));
      }
      default: return ann;
    }
  }

  using Env = std::map<std::string, TypePtr>;

  struct Out {
    TypePtr ty;
    TermPtr term;
  };

  Out infer(const Env& env, const TermPtr& e) {
    switch (e->k) {
      case Term::K::Const:
        return {const_type(e->c), e};
      case Term::K::Var: {
        auto it = env.find(e->name);
        if (it == env.end()) throw TypeError("unbound variable " + e->name);
        return {it->second, e};
      }
      case Term::K::Tuple: {
        std::vector<TypePtr> tys;
        std::vector<TermPtr> xs;
        for (auto& x : e->xs) {
          Out o = infer(env, x);
          tys.push_back(o.ty);
          xs.push_back(o.term);
        }
        return {t_product(std::move(tys)), mk_tuple(std::move(xs))};
      }
      case Term::K::Prim: {
        const std::string& op = e->name;
        if (op == "@annot") {
          Out o = infer(env, e->xs[0]);
          unify(o.ty, from_annotation(e->ty));
          return o;  // annotation erased
        }
        std::vector<Out> args;
        for (auto& x : e->xs) args.push_back(infer(env, x));
        std::vector<TermPtr> xs;
        for (auto& a : args) xs.push_back(a.term);
        TermPtr out = mk_prim(op, std::move(xs));
        if (op == "+" || op == "-" || op == "*" || op == "/" || op == "mod") {
          unify(args[0].ty, t_int());
          unify(args[1].ty, t_int());
          return {t_int(), out};
        }
        if (op == "<" || op == "<=" || op == ">" || op == ">=") {
          unify(args[0].ty, t_int());
          unify(args[1].ty, t_int());
          return {t_bool(), out};
        }
        if (op == "==" || op == "<>") {
          unify(args[0].ty, args[1].ty);
          // Base-type restriction checked after zonking, via the
          // annotation recorded on the rebuilt node.
          Term node = *out;
          node.ty = args[0].ty;
          return {t_bool(), std::make_shared<const Term>(std::move(node))};
        }
        if (op == "&&" || op == "||") {
          unify(args[0].ty, t_bool());
          unify(args[1].ty, t_bool());
          return {t_bool(), out};
        }
        if (op == "not") {
          unify(args[0].ty, t_bool());
          return {t_bool(), out};
        }
        throw TypeError("unknown primitive " + op);
      }
      case Term::K::App: {
        Out f = infer(env, e->xs[0]);
        Out a = infer(env, e->xs[1]);
        TypePtr res = fresh();
        unify(f.ty, t_arrow(a.ty, res));
        return {res, mk_app(f.term, a.term)};
      }
      case Term::K::Cond: {
        Out g = infer(env, e->xs[0]);
        unify(g.ty, t_bool());
        Out thn = infer(env, e->xs[1]);
        Out els = infer(env, e->xs[2]);
        unify(thn.ty, els.ty);
        return {thn.ty, mk_cond(g.term, thn.term, els.term)};
      }
      case Term::K::Fix: {
        TypePtr fn_ty = from_annotation(e->ty);
        TypePtr dom = fresh(), cod = fresh();
        unify(fn_ty, t_arrow(dom, cod));
        Env env2 = env;
        env2[e->name] = fn_ty;
        env2[e->binders[0]] = dom;
        Out body = infer(env2, e->xs[0]);
        unify(body.ty, cod);
        return {fn_ty, mk_fix(e->name, fn_ty, e->binders[0], body.term)};
      }
      case Term::K::LetTuple: {
        Out bound = infer(env, e->xs[0]);
        Env env2 = env;
        if (e->binders.size() == 1) {
          env2[e->binders[0]] = bound.ty;
        } else {
          std::vector<TypePtr> comps;
          for (size_t j = 0; j < e->binders.size(); ++j) comps.push_back(fresh());
          unify(bound.ty, t_product(comps));
          for (size_t j = 0; j < e->binders.size(); ++j)
            env2[e->binders[j]] = comps[j];
        }
        Out body = infer(env2, e->xs[1]);
        return {body.ty, mk_lettuple(e->binders, bound.term, body.term)};
      }
      case Term::K::AbsName:
      case Term::K::SymConst:
      case Term::K::SymTerm:
      case Term::K::Hole:
        // These never occur in source programs.
        if (!e->ty) throw TypeError("internal node without a type");
        return {e->ty, e};
    }
    throw TypeError("unreachable");
  }

  // Final pass: resolve every type in the tree; reject leftovers.
  TermPtr finalize(const TermPtr& e) {
    std::vector<TermPtr> xs;
    for (auto& x : e->xs) xs.push_back(finalize(x));
    Term node = *e;
    node.xs = std::move(xs);
    if (node.ty) node.ty = zonk(node.ty);
    if (node.k == Term::K::Prim && (node.name == "==" || node.name == "<>")) {
      if (!is_base(node.ty))
        throw TypeError("equality is only available at base types, not " +
                        show_type(node.ty));
    }
    return std::make_shared<const Term>(std::move(node));
  }
};

}  // namespace

Typed typecheck(const TermPtr& e) {
  Infer inf;
  auto fv = free_vars(e);
  if (!fv.empty()) throw TypeError("unbound variable " + fv.front());
  Infer::Out o = inf.infer({}, e);
  return {inf.finalize(o.term), inf.zonk(o.ty)};
}

}  // namespace nfb
