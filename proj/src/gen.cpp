#include "nfb/gen.hpp"

#include <string>

namespace nfb {

TypePtr gen_type(Rnd& r, int depth, bool bool_base) {
  if (depth <= 0 || r.flip(2, 5)) {
    switch (r.pick(bool_base ? 2 : 3)) {
      case 0: return t_bool();
      case 1: return t_unit();
      default: return t_int();
    }
  }
  if (r.flip(3, 4))
    return t_arrow(gen_type(r, depth - 1, bool_base),
                   gen_type(r, depth - 1, bool_base));
  std::vector<TypePtr> items;
  int n = 2 + r.pick(2);
  for (int i = 0; i < n; ++i) items.push_back(gen_type(r, depth - 1, bool_base));
  return t_product(std::move(items));
}

namespace {

struct Binding {
  std::string name;
  TypePtr ty;
};

TermPtr go(Rnd& r, std::vector<Binding>& env, const TypePtr& T, int d,
           int& fresh) {
  // occasionally a matching variable
  std::vector<const Binding*> hits;
  for (auto& b : env)
    if (type_eq(b.ty, T)) hits.push_back(&b);
  if (!hits.empty() && r.flip(2, 5)) return mk_var(hits[r.pick((int)hits.size())]->name);
  if (d > 0 && r.flip(1, 12)) return mk_bot(T);
  switch (T->k) {
    case Type::K::Unit:
      if (d > 0 && r.flip(1, 4)) break;
      return mk_unit();
    case Type::K::Bool:
      if (d > 0 && r.flip(1, 2)) break;
      return mk_bool(r.flip());
    case Type::K::Int:
      if (d > 0 && r.flip(1, 2)) break;
      return mk_int(r.pick(7) - 3);
    case Type::K::Arrow: {
      std::string self = "g" + std::to_string(++fresh);
      std::string x = "y" + std::to_string(++fresh);
      env.push_back({x, T->dom});
      // the recursive binder enters scope rarely, to keep most terms total
      bool rec = r.flip(1, 5);
      if (rec) env.push_back({self, T});
      TermPtr body = go(r, env, T->cod, d - 1, fresh);
      if (rec) env.pop_back();
      env.pop_back();
      return mk_fix(self, T, x, body);
    }
    case Type::K::Product: {
      std::vector<TermPtr> xs;
      for (auto& c : T->items) xs.push_back(go(r, env, c, d - 1, fresh));
      return mk_tuple(std::move(xs));
    }
    default: return mk_unit();
  }
  // composite forms at base type
  switch (r.pick(4)) {
    case 0: {  // conditional
      TermPtr g = go(r, env, t_bool(), d - 1, fresh);
      return mk_cond(g, go(r, env, T, d - 1, fresh), go(r, env, T, d - 1, fresh));
    }
    case 1: {  // redex or call of an env function with matching codomain
      std::vector<const Binding*> fns;
      for (auto& b : env)
        if (b.ty->k == Type::K::Arrow && type_eq(b.ty->cod, T)) fns.push_back(&b);
      if (!fns.empty() && r.flip(2, 3)) {
        const Binding* f = fns[r.pick((int)fns.size())];
        return mk_app(mk_var(f->name), go(r, env, f->ty->dom, d - 1, fresh));
      }
      TypePtr dom = gen_type(r, 0, false);
      TermPtr fn = go(r, env, t_arrow(dom, T), d - 1, fresh);
      return mk_app(fn, go(r, env, dom, d - 1, fresh));
    }
    case 2: {  // primitive
      if (T->k == Type::K::Int) {
        const char* ops[] = {"+", "-", "*"};
        return mk_prim(ops[r.pick(3)], {go(r, env, t_int(), d - 1, fresh),
                                        go(r, env, t_int(), d - 1, fresh)});
      }
      if (T->k == Type::K::Bool) {
        if (r.flip()) {
          const char* ops[] = {"==", "<>", "<", "<=", ">", ">="};
          return mk_prim(ops[r.pick(6)], {go(r, env, t_int(), d - 1, fresh),
                                          go(r, env, t_int(), d - 1, fresh)});
        }
        const char* ops[] = {"&&", "||"};
        return mk_prim(ops[r.pick(2)], {go(r, env, t_bool(), d - 1, fresh),
                                        go(r, env, t_bool(), d - 1, fresh)});
      }
      return mk_unit();
    }
    default: {  // let-tuple over a generated pair
      TypePtr p = t_product({gen_type(r, 0, false), T});
      TermPtr bound = go(r, env, p, d - 1, fresh);
      std::string a = "z" + std::to_string(++fresh);
      std::string b = "z" + std::to_string(++fresh);
      return mk_lettuple({a, b}, bound, mk_var(b));
    }
  }
}

}  // namespace

TermPtr gen_term(Rnd& r, const TypePtr& T, int depth) {
  std::vector<Binding> env;
  int fresh = 0;
  return go(r, env, T, depth, fresh);
}

TermPtr gen_constraint(Rnd& r, const std::vector<TermPtr>& syms, int depth) {
  if (depth <= 0 || r.flip(1, 4)) {
    // atomic comparison over a small arithmetic expression
    auto arith = [&](auto&& self, int d) -> TermPtr {
      if (d <= 0 || r.flip(2, 5)) {
        if (!syms.empty() && r.flip(2, 3)) return syms[r.pick((int)syms.size())];
        return mk_int(r.pick(21) - 10);
      }
      switch (r.pick(5)) {
        case 0: return mk_symterm("+", {self(self, d - 1), self(self, d - 1)}, t_int());
        case 1: return mk_symterm("-", {self(self, d - 1), self(self, d - 1)}, t_int());
        case 2: return mk_symterm("*", {self(self, d - 1), self(self, d - 1)}, t_int());
        case 3: return mk_symterm("/", {self(self, d - 1), mk_int(r.pick(5) + 1)}, t_int());
        default: return mk_symterm("mod", {self(self, d - 1), mk_int(r.pick(5) + 1)}, t_int());
      }
    };
    const char* cmps[] = {"==", "<>", "<", "<=", ">", ">="};
    return mk_symterm(cmps[r.pick(6)], {arith(arith, 2), arith(arith, 2)}, t_bool());
  }
  switch (r.pick(3)) {
    case 0:
      return mk_symterm("&&", {gen_constraint(r, syms, depth - 1),
                               gen_constraint(r, syms, depth - 1)}, t_bool());
    case 1:
      return mk_symterm("||", {gen_constraint(r, syms, depth - 1),
                               gen_constraint(r, syms, depth - 1)}, t_bool());
    default:
      return mk_symterm("not", {gen_constraint(r, syms, depth - 1)}, t_bool());
  }
}

}  // namespace nfb
