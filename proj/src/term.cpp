#include "nfb/term.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nfb {

static TypePtr mk_type(Type t) { return std::make_shared<const Type>(std::move(t)); }

TypePtr t_bool() {
  static TypePtr t = mk_type({Type::K::Bool, nullptr, nullptr, {}, 0});
  return t;
}
TypePtr t_int() {
  static TypePtr t = mk_type({Type::K::Int, nullptr, nullptr, {}, 0});
  return t;
}
TypePtr t_unit() {
  static TypePtr t = mk_type({Type::K::Unit, nullptr, nullptr, {}, 0});
  return t;
}
TypePtr t_arrow(TypePtr dom, TypePtr cod) {
  return mk_type({Type::K::Arrow, std::move(dom), std::move(cod), {}, 0});
}
TypePtr t_product(std::vector<TypePtr> items) {
  if (items.size() < 2) throw std::runtime_error("product type needs >= 2 components");
  return mk_type({Type::K::Product, nullptr, nullptr, std::move(items), 0});
}
TypePtr t_var(int id) { return mk_type({Type::K::Var, nullptr, nullptr, {}, id}); }

bool type_eq(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->k != b->k) return false;
  switch (a->k) {
    case Type::K::Bool:
    case Type::K::Int:
    case Type::K::Unit:
      return true;
    case Type::K::Arrow:
      return type_eq(a->dom, b->dom) && type_eq(a->cod, b->cod);
    case Type::K::Product: {
      if (a->items.size() != b->items.size()) return false;
      for (size_t i = 0; i < a->items.size(); ++i)
        if (!type_eq(a->items[i], b->items[i])) return false;
      return true;
    }
    case Type::K::Var:
      return a->var_id == b->var_id;
  }
  return false;
}

bool is_base(const TypePtr& t) {
  return t && (t->k == Type::K::Bool || t->k == Type::K::Int || t->k == Type::K::Unit);
}

std::string show_type(const TypePtr& t) {
  if (!t) return "?";
  switch (t->k) {
    case Type::K::Bool: return "bool";
    case Type::K::Int: return "int";
    case Type::K::Unit: return "unit";
    case Type::K::Var: return "'t" + std::to_string(t->var_id);
    case Type::K::Arrow: {
      std::string lhs = show_type(t->dom);
      if (t->dom && (t->dom->k == Type::K::Arrow || t->dom->k == Type::K::Product))
        lhs = "(" + lhs + ")";
      return lhs + " -> " + show_type(t->cod);
    }
    case Type::K::Product: {
      std::string s;
      for (size_t i = 0; i < t->items.size(); ++i) {
        if (i) s += " * ";
        std::string c = show_type(t->items[i]);
        if (t->items[i] &&
            (t->items[i]->k == Type::K::Arrow || t->items[i]->k == Type::K::Product))
          c = "(" + c + ")";
        s += c;
      }
      return s;
    }
  }
  return "?";
}

Const c_unit() { return Const{Const::Tag::Unit, false, 0}; }
Const c_bool(bool b) { return Const{Const::Tag::Bool, b, 0}; }
Const c_int(long long n) { return Const{Const::Tag::Int, false, n}; }

bool const_eq(const Const& a, const Const& b) {
  if (a.tag != b.tag) return false;
  switch (a.tag) {
    case Const::Tag::Unit: return true;
    case Const::Tag::Bool: return a.b == b.b;
    case Const::Tag::Int: return a.n == b.n;
  }
  return false;
}

std::string show_const(const Const& c) {
  switch (c.tag) {
    case Const::Tag::Unit: return "()";
    case Const::Tag::Bool: return c.b ? "true" : "false";
    case Const::Tag::Int: return std::to_string(c.n);
  }
  return "?";
}

TypePtr const_type(const Const& c) {
  switch (c.tag) {
    case Const::Tag::Unit: return t_unit();
    case Const::Tag::Bool: return t_bool();
    case Const::Tag::Int: return t_int();
  }
  return t_unit();
}

static TermPtr mk(Term t) { return std::make_shared<const Term>(std::move(t)); }

TermPtr mk_const(Const c) { return mk({Term::K::Const, c, "", {}, {}, const_type(c), -1}); }
TermPtr mk_unit() { return mk_const(c_unit()); }
TermPtr mk_bool(bool b) { return mk_const(c_bool(b)); }
TermPtr mk_int(long long n) { return mk_const(c_int(n)); }
TermPtr mk_var(const std::string& name) {
  return mk({Term::K::Var, {}, name, {}, {}, nullptr, -1});
}
TermPtr mk_tuple(std::vector<TermPtr> xs) {
  return mk({Term::K::Tuple, {}, "", std::move(xs), {}, nullptr, -1});
}
TermPtr mk_prim(const std::string& op, std::vector<TermPtr> args) {
  return mk({Term::K::Prim, {}, op, std::move(args), {}, nullptr, -1});
}
TermPtr mk_app(TermPtr f, TermPtr a) {
  return mk({Term::K::App, {}, "", {std::move(f), std::move(a)}, {}, nullptr, -1});
}
TermPtr mk_cond(TermPtr g, TermPtr thn, TermPtr els) {
  return mk({Term::K::Cond, {}, "", {std::move(g), std::move(thn), std::move(els)}, {}, nullptr, -1});
}
TermPtr mk_fix(const std::string& self, TypePtr ty, const std::string& param, TermPtr body) {
  return mk({Term::K::Fix, {}, self, {std::move(body)}, {param}, std::move(ty), -1});
}
TermPtr mk_lettuple(std::vector<std::string> binders, TermPtr bound, TermPtr body) {
  return mk({Term::K::LetTuple, {}, "", {std::move(bound), std::move(body)},
             std::move(binders), nullptr, -1});
}
TermPtr mk_absname(const std::string& base, TypePtr ty, int index) {
  return mk({Term::K::AbsName, {}, base, {}, {}, std::move(ty), index});
}
TermPtr mk_symconst(const std::string& id, TypePtr ty) {
  return mk({Term::K::SymConst, {}, id, {}, {}, std::move(ty), -1});
}
TermPtr mk_symterm(const std::string& op, std::vector<TermPtr> args, TypePtr ty) {
  return mk({Term::K::SymTerm, {}, op, std::move(args), {}, std::move(ty), -1});
}
TermPtr mk_hole(int index, TypePtr ty) {
  return mk({Term::K::Hole, {}, "", {}, {}, std::move(ty), index});
}

TermPtr mk_bot(TypePtr ret_ty) {
  std::string f = "_f" + std::to_string(fresh_id());
  std::string x = "_x" + std::to_string(fresh_id());
  TypePtr fix_ty = ret_ty ? t_arrow(t_unit(), ret_ty) : nullptr;
  TermPtr fix = mk_fix(f, fix_ty, x, mk_app(mk_var(f), mk_var(x)));
  return mk_app(fix, mk_unit());
}

bool is_value(const TermPtr& e) {
  switch (e->k) {
    case Term::K::Const:
    case Term::K::Fix:
    case Term::K::AbsName:
    case Term::K::SymConst:
    case Term::K::SymTerm:
    case Term::K::Hole:
      return true;
    case Term::K::Tuple:
      for (auto& x : e->xs)
        if (!is_value(x)) return false;
      return true;
    default:
      return false;
  }
}

bool is_symbolic(const TermPtr& v) {
  return v->k == Term::K::SymConst || v->k == Term::K::SymTerm;
}

bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->k != b->k) return false;
  if (a->name != b->name) return false;
  if (a->index != b->index) return false;
  if (a->binders != b->binders) return false;
  if (a->k == Term::K::Const && !const_eq(a->c, b->c)) return false;
  if (a->xs.size() != b->xs.size()) return false;
  for (size_t i = 0; i < a->xs.size(); ++i)
    if (!term_eq(a->xs[i], b->xs[i])) return false;
  // Types compared only where they are part of identity (AbsName/SymConst
  // ids are globally unique per checker session, so name equality suffices).
  if (a->k == Term::K::Hole && !type_eq(a->ty, b->ty)) return false;
  return true;
}

static void hash_combine(size_t& h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

size_t term_hash(const TermPtr& e) {
  size_t h = static_cast<size_t>(e->k) * 31;
  hash_combine(h, std::hash<std::string>{}(e->name));
  hash_combine(h, static_cast<size_t>(e->index + 1));
  if (e->k == Term::K::Const) {
    hash_combine(h, static_cast<size_t>(e->c.tag));
    hash_combine(h, std::hash<long long>{}(e->c.n + (e->c.b ? 1 : 0)));
  }
  for (auto& b : e->binders) hash_combine(h, std::hash<std::string>{}(b));
  for (auto& x : e->xs) hash_combine(h, term_hash(x));
  return h;
}

int term_size(const TermPtr& e) {
  int n = 1;
  for (auto& x : e->xs) n += term_size(x);
  return n;
}

TypePtr value_type(const TermPtr& v) {
  switch (v->k) {
    case Term::K::Const:
      return const_type(v->c);
    case Term::K::Fix:
      if (!v->ty) throw std::runtime_error("value_type: unannotated function");
      return v->ty;
    case Term::K::AbsName:
    case Term::K::SymConst:
    case Term::K::SymTerm:
    case Term::K::Hole:
      if (!v->ty) throw std::runtime_error("value_type: missing annotation");
      return v->ty;
    case Term::K::Tuple: {
      std::vector<TypePtr> items;
      for (auto& x : v->xs) items.push_back(value_type(x));
      return t_product(std::move(items));
    }
    default:
      throw std::runtime_error("value_type: not a value");
  }
}

static void free_vars_rec(const TermPtr& e, std::set<std::string>& bound,
                          std::vector<std::string>& out, std::set<std::string>& seen) {
  switch (e->k) {
    case Term::K::Var:
      if (!bound.count(e->name) && !seen.count(e->name)) {
        seen.insert(e->name);
        out.push_back(e->name);
      }
      return;
    case Term::K::Fix: {
      std::set<std::string> b2 = bound;
      b2.insert(e->name);
      b2.insert(e->binders[0]);
      free_vars_rec(e->xs[0], b2, out, seen);
      return;
    }
    case Term::K::LetTuple: {
      free_vars_rec(e->xs[0], bound, out, seen);
      std::set<std::string> b2 = bound;
      for (auto& b : e->binders) b2.insert(b);
      free_vars_rec(e->xs[1], b2, out, seen);
      return;
    }
    default:
      for (auto& x : e->xs) free_vars_rec(x, bound, out, seen);
      return;
  }
}

std::vector<std::string> free_vars(const TermPtr& e) {
  std::set<std::string> bound, seen;
  std::vector<std::string> out;
  free_vars_rec(e, bound, out, seen);
  return out;
}

bool is_closed(const TermPtr& e) { return free_vars(e).empty(); }

long long fresh_id() {
  static std::atomic<long long> counter{0};
  return ++counter;
}

static bool occurs_free(const TermPtr& e, const std::string& name) {
  switch (e->k) {
    case Term::K::Var:
      return e->name == name;
    case Term::K::Fix:
      if (e->name == name || e->binders[0] == name) return false;
      return occurs_free(e->xs[0], name);
    case Term::K::LetTuple: {
      if (occurs_free(e->xs[0], name)) return true;
      for (auto& b : e->binders)
        if (b == name) return false;
      return occurs_free(e->xs[1], name);
    }
    default:
      for (auto& x : e->xs)
        if (occurs_free(x, name)) return true;
      return false;
  }
}

static TermPtr rebuild(const TermPtr& e, std::vector<TermPtr> xs) {
  Term t = *e;
  t.xs = std::move(xs);
  return mk(std::move(t));
}

TermPtr subst(const TermPtr& e, const std::string& name, const TermPtr& v) {
  switch (e->k) {
    case Term::K::Var:
      return e->name == name ? v : e;
    case Term::K::Const:
    case Term::K::AbsName:
    case Term::K::SymConst:
    case Term::K::Hole:
      return e;
    case Term::K::Fix: {
      if (e->name == name || e->binders[0] == name) return e;
      std::string self = e->name, param = e->binders[0];
      TermPtr body = e->xs[0];
      bool clash_self = occurs_free(v, self) && occurs_free(body, self);
      bool clash_param = occurs_free(v, param) && occurs_free(body, param);
      if (clash_self) {
        std::string self2 = self + "'" + std::to_string(fresh_id());
        body = subst(body, self, mk_var(self2));
        self = self2;
      }
      if (clash_param) {
        std::string param2 = param + "'" + std::to_string(fresh_id());
        body = subst(body, param, mk_var(param2));
        param = param2;
      }
      return mk_fix(self, e->ty, param, subst(body, name, v));
    }
    case Term::K::LetTuple: {
      TermPtr bound = subst(e->xs[0], name, v);
      bool shadows = false;
      for (auto& b : e->binders)
        if (b == name) shadows = true;
      if (shadows) return mk_lettuple(e->binders, bound, e->xs[1]);
      std::vector<std::string> binders = e->binders;
      TermPtr body = e->xs[1];
      for (auto& b : binders) {
        if (occurs_free(v, b) && occurs_free(body, b)) {
          std::string b2 = b + "'" + std::to_string(fresh_id());
          body = subst(body, b, mk_var(b2));
          b = b2;
        }
      }
      return mk_lettuple(std::move(binders), bound, subst(body, name, v));
    }
    default: {
      std::vector<TermPtr> xs;
      xs.reserve(e->xs.size());
      bool changed = false;
      for (auto& x : e->xs) {
        TermPtr x2 = subst(x, name, v);
        changed = changed || x2.get() != x.get();
        xs.push_back(std::move(x2));
      }
      return changed ? rebuild(e, std::move(xs)) : e;
    }
  }
}

namespace {
struct AlphaCtx {
  std::map<std::string, std::string> ren;
  int next = 0;
};

TermPtr alpha_rec(const TermPtr& e, AlphaCtx ctx) {
  switch (e->k) {
    case Term::K::Var: {
      auto it = ctx.ren.find(e->name);
      return it == ctx.ren.end() ? e : mk_var(it->second);
    }
    case Term::K::Const:
    case Term::K::AbsName:
    case Term::K::SymConst:
    case Term::K::Hole:
      return e;
    case Term::K::Fix: {
      AlphaCtx c2 = ctx;
      std::string self = "#" + std::to_string(c2.next++);
      std::string param = "#" + std::to_string(c2.next++);
      c2.ren[e->name] = self;
      c2.ren[e->binders[0]] = param;
      return mk_fix(self, e->ty, param, alpha_rec(e->xs[0], c2));
    }
    case Term::K::LetTuple: {
      TermPtr bound = alpha_rec(e->xs[0], ctx);
      AlphaCtx c2 = ctx;
      std::vector<std::string> binders;
      for (auto& b : e->binders) {
        std::string b2 = "#" + std::to_string(c2.next++);
        c2.ren[b] = b2;
        binders.push_back(b2);
      }
      return mk_lettuple(std::move(binders), bound, alpha_rec(e->xs[1], c2));
    }
    default: {
      std::vector<TermPtr> xs;
      for (auto& x : e->xs) xs.push_back(alpha_rec(x, ctx));
      return rebuild(e, std::move(xs));
    }
  }
}
}  // namespace

TermPtr alpha_normalize(const TermPtr& e) { return alpha_rec(e, AlphaCtx{}); }

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  return term_eq(alpha_normalize(a), alpha_normalize(b));
}

TermPtr plug(const TermPtr& pattern, const std::vector<TermPtr>& vals) {
  if (pattern->k == Term::K::Hole && pattern->index >= 1) {
    size_t i = static_cast<size_t>(pattern->index);
    if (i > vals.size()) throw std::runtime_error("plug: hole index out of range");
    return vals[i - 1];
  }
  if (pattern->xs.empty()) return pattern;
  std::vector<TermPtr> xs;
  for (auto& x : pattern->xs) xs.push_back(plug(x, vals));
  return rebuild(pattern, std::move(xs));
}

TermPtr plug_ctx(const TermPtr& ctx, const TermPtr& fill) {
  if (ctx->k == Term::K::Hole && ctx->index == 0) return fill;
  if (ctx->xs.empty()) return ctx;
  std::vector<TermPtr> xs;
  for (auto& x : ctx->xs) xs.push_back(plug_ctx(x, fill));
  return rebuild(ctx, std::move(xs));
}

namespace {

int prec_of(const std::string& op) {
  if (op == "||") return 2;
  if (op == "&&") return 3;
  if (op == "==" || op == "<>" || op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
  if (op == "+" || op == "-") return 5;
  if (op == "*" || op == "/" || op == "mod") return 6;
  return 0;
}

void show_rec(const TermPtr& e, std::ostringstream& os, int prec) {
  auto paren = [&](int mine, auto&& body) {
    if (prec > mine) os << "(";
    body();
    if (prec > mine) os << ")";
  };
  switch (e->k) {
    case Term::K::Const:
      os << show_const(e->c);
      return;
    case Term::K::Var:
      os << e->name;
      return;
    case Term::K::AbsName:
      os << "$" << e->name;
      if (e->index >= 0) os << "^" << e->index;
      return;
    case Term::K::SymConst:
      os << "%" << e->name;
      return;
    case Term::K::Hole:
      os << "[" << e->index << "]";
      return;
    case Term::K::Tuple:
      os << "(";
      for (size_t i = 0; i < e->xs.size(); ++i) {
        if (i) os << ", ";
        show_rec(e->xs[i], os, 0);
      }
      os << ")";
      return;
    case Term::K::Prim:
    case Term::K::SymTerm: {
      const std::string& op = e->name;
      if (e->xs.size() == 2 && prec_of(op) > 0) {
        int p = prec_of(op);
        paren(p, [&] {
          show_rec(e->xs[0], os, p);
          os << " " << op << " ";
          show_rec(e->xs[1], os, p + 1);
        });
      } else if (e->xs.size() == 1 && op == "not") {
        paren(7, [&] {
          os << "not ";
          show_rec(e->xs[0], os, 8);
        });
      } else {
        os << op << "(";
        for (size_t i = 0; i < e->xs.size(); ++i) {
          if (i) os << ", ";
          show_rec(e->xs[i], os, 0);
        }
        os << ")";
      }
      return;
    }
    case Term::K::App:
      paren(8, [&] {
        show_rec(e->xs[0], os, 8);
        os << " ";
        show_rec(e->xs[1], os, 9);
      });
      return;
    case Term::K::Cond:
      paren(1, [&] {
        os << "if ";
        show_rec(e->xs[0], os, 0);
        os << " then ";
        show_rec(e->xs[1], os, 0);
        os << " else ";
        show_rec(e->xs[2], os, 1);
      });
      return;
    case Term::K::Fix:
      paren(1, [&] {
        if (occurs_free(e->xs[0], e->name)) {
          os << "rec " << e->name << " " << e->binders[0] << " -> ";
        } else {
          os << "fun " << e->binders[0] << " -> ";
        }
        show_rec(e->xs[0], os, 1);
      });
      return;
    case Term::K::LetTuple:
      paren(1, [&] {
        os << "let ";
        if (e->binders.size() == 1) {
          os << e->binders[0];
        } else {
          os << "(";
          for (size_t i = 0; i < e->binders.size(); ++i) {
            if (i) os << ", ";
            os << e->binders[i];
          }
          os << ")";
        }
        os << " = ";
        show_rec(e->xs[0], os, 0);
        os << " in ";
        show_rec(e->xs[1], os, 1);
      });
      return;
  }
}

}  // namespace

std::string show_term(const TermPtr& e) {
  std::ostringstream os;
  show_rec(e, os, 0);
  return os.str();
}

}  // namespace nfb
