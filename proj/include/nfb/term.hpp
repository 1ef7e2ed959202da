#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

// Core syntax: types, expressions, and the extended value grammar used by
// the transition systems (abstract function names, symbolic constants and
// symbolic base-type terms, pattern holes).

namespace nfb {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  enum class K { Bool, Int, Unit, Arrow, Product, Var };
  K k;
  TypePtr dom, cod;            // Arrow
  std::vector<TypePtr> items;  // Product, length >= 2
  int var_id = 0;              // Var (inference only)
};

TypePtr t_bool();
TypePtr t_int();
TypePtr t_unit();
TypePtr t_arrow(TypePtr dom, TypePtr cod);
TypePtr t_product(std::vector<TypePtr> items);
TypePtr t_var(int id);

bool type_eq(const TypePtr& a, const TypePtr& b);
bool is_base(const TypePtr& t);  // Bool | Int | Unit
std::string show_type(const TypePtr& t);

struct Const {
  enum class Tag { Unit, Bool, Int };
  Tag tag = Tag::Unit;
  bool b = false;
  long long n = 0;
};

Const c_unit();
Const c_bool(bool b);
Const c_int(long long n);
bool const_eq(const Const& a, const Const& b);
std::string show_const(const Const& c);
TypePtr const_type(const Const& c);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// One node kind set serves expressions, values, ultimate patterns and move
// payloads; the extra kinds (AbsName, SymConst, SymTerm, Hole) never appear
// in source programs.
struct Term {
  enum class K {
    Const,     // c
    Var,       // name
    Tuple,     // xs
    Prim,      // name = op symbol, xs = args
    App,       // xs = {fn, arg}
    Cond,      // xs = {guard, then, else}
    Fix,       // name = self, binders = {param}, xs = {body}, ty = arrow annotation (may be null pre-inference)
    LetTuple,  // binders, xs = {bound, body}
    AbsName,   // name = base id, ty = arrow type, index (-1 when unindexed, as in moves)
    SymConst,  // name = id, ty = Bool|Int
    SymTerm,   // name = op, xs = args (values), ty = Bool|Int
    Hole,      // index >= 1 (pattern hole) or 0 (evaluation-context hole), ty
  };
  K k;
  Const c;
  std::string name;
  std::vector<TermPtr> xs;
  std::vector<std::string> binders;
  TypePtr ty;
  int index = -1;
};

TermPtr mk_const(Const c);
TermPtr mk_unit();
TermPtr mk_bool(bool b);
TermPtr mk_int(long long n);
TermPtr mk_var(const std::string& name);
TermPtr mk_tuple(std::vector<TermPtr> xs);
TermPtr mk_prim(const std::string& op, std::vector<TermPtr> args);
TermPtr mk_app(TermPtr f, TermPtr a);
TermPtr mk_cond(TermPtr g, TermPtr thn, TermPtr els);
TermPtr mk_fix(const std::string& self, TypePtr ty, const std::string& param, TermPtr body);
TermPtr mk_lettuple(std::vector<std::string> binders, TermPtr bound, TermPtr body);
TermPtr mk_absname(const std::string& base, TypePtr ty, int index);
TermPtr mk_symconst(const std::string& id, TypePtr ty);
TermPtr mk_symterm(const std::string& op, std::vector<TermPtr> args, TypePtr ty);
TermPtr mk_hole(int index, TypePtr ty);

// Diverging macro: (fix f (x) -> f x) (), of type ret_ty (annotation may be null).
TermPtr mk_bot(TypePtr ret_ty);

bool is_value(const TermPtr& e);       // Const | Fix | Tuple of values | AbsName | SymConst | SymTerm | Hole
bool is_symbolic(const TermPtr& v);    // SymConst | SymTerm
bool term_eq(const TermPtr& a, const TermPtr& b);
size_t term_hash(const TermPtr& e);
int term_size(const TermPtr& e);

struct TermHash {
  size_t operator()(const TermPtr& e) const { return term_hash(e); }
};
struct TermEq {
  bool operator()(const TermPtr& a, const TermPtr& b) const { return term_eq(a, b); }
};

// Type of a closed (post-inference) value; throws std::runtime_error on
// unannotated functions.
TypePtr value_type(const TermPtr& v);

std::vector<std::string> free_vars(const TermPtr& e);
bool is_closed(const TermPtr& e);

// Global fresh-id counter shared by substitution and the name supplies.
long long fresh_id();

// Capture-avoiding substitution of `name` by value `v`.
TermPtr subst(const TermPtr& e, const std::string& name, const TermPtr& v);

// Canonical alpha-renaming of bound variables (free variables untouched).
TermPtr alpha_normalize(const TermPtr& e);
bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Replace pattern holes: hole i (i >= 1) becomes vals[i-1]; hole 0 is the
// evaluation-context hole and is replaced by `ectx_fill` when given.
TermPtr plug(const TermPtr& pattern, const std::vector<TermPtr>& vals);
TermPtr plug_ctx(const TermPtr& ctx, const TermPtr& fill);

std::string show_term(const TermPtr& e);

}  // namespace nfb
