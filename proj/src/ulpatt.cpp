#include "nfb/ulpatt.hpp"

#include <stdexcept>

namespace nfb {

namespace {

TermPtr ulpatt_rec(const TermPtr& v, std::vector<TermPtr>& fns) {
  TypePtr ty = value_type(v);
  if (ty->k == Type::K::Arrow) {
    fns.push_back(v);
    return mk_hole(static_cast<int>(fns.size()), ty);
  }
  if (v->k == Term::K::Tuple) {
    std::vector<TermPtr> xs;
    for (auto& x : v->xs) xs.push_back(ulpatt_rec(x, fns));
    return mk_tuple(std::move(xs));
  }
  return v;  // base leaf, concrete or symbolic
}

}  // namespace

UPat ulpatt(const TermPtr& v) {
  UPat up;
  up.pattern = ulpatt_rec(v, up.fns);
  return up;
}

OPat symbolic_pattern(const TypePtr& ty, NameSupply& s) {
  OPat p;
  switch (ty->k) {
    case Type::K::Unit:
      p.value = mk_unit();
      return p;
    case Type::K::Bool:
    case Type::K::Int:
      p.value = mk_symconst(s.fresh_sym(), ty);
      p.syms.push_back(p.value);
      return p;
    case Type::K::Arrow:
      p.value = mk_absname(s.fresh_name(), ty, -1);
      p.names.push_back(p.value);
      return p;
    case Type::K::Product: {
      std::vector<TermPtr> xs;
      for (auto& it : ty->items) {
        OPat sub = symbolic_pattern(it, s);
        xs.push_back(sub.value);
        p.names.insert(p.names.end(), sub.names.begin(), sub.names.end());
        p.syms.insert(p.syms.end(), sub.syms.begin(), sub.syms.end());
      }
      p.value = mk_tuple(std::move(xs));
      return p;
    }
    default:
      throw std::runtime_error("symbolic_pattern: unexpected type");
  }
}

std::vector<OPat> enumerate_patterns(const TypePtr& ty,
                                     const std::vector<long long>& ints,
                                     NameSupply& s) {
  switch (ty->k) {
    case Type::K::Unit:
      return {OPat{mk_unit(), {}, {}}};
    case Type::K::Bool:
      return {OPat{mk_bool(false), {}, {}}, OPat{mk_bool(true), {}, {}}};
    case Type::K::Int: {
      std::vector<OPat> out;
      for (long long n : ints) out.push_back({mk_int(n), {}, {}});
      return out;
    }
    case Type::K::Arrow: {
      TermPtr a = mk_absname(s.fresh_name(), ty, -1);
      return {OPat{a, {a}, {}}};
    }
    case Type::K::Product: {
      std::vector<OPat> out{OPat{nullptr, {}, {}}};
      std::vector<std::vector<TermPtr>> parts{{}};
      for (auto& it : ty->items) {
        std::vector<OPat> here = enumerate_patterns(it, ints, s);
        std::vector<OPat> next;
        std::vector<std::vector<TermPtr>> next_parts;
        for (size_t i = 0; i < out.size(); ++i)
          for (auto& h : here) {
            OPat m = out[i];
            m.names.insert(m.names.end(), h.names.begin(), h.names.end());
            m.syms.insert(m.syms.end(), h.syms.begin(), h.syms.end());
            auto fields = parts[i];
            fields.push_back(h.value);
            next.push_back(std::move(m));
            next_parts.push_back(std::move(fields));
          }
        out = std::move(next);
        parts = std::move(next_parts);
      }
      for (size_t i = 0; i < out.size(); ++i) out[i].value = mk_tuple(parts[i]);
      return out;
    }
    default:
      throw std::runtime_error("enumerate_patterns: unexpected type");
  }
}

TermPtr index_names(const TermPtr& v, int j) {
  if (v->k == Term::K::AbsName && v->index < 0)
    return mk_absname(v->name, v->ty, j);
  if (v->xs.empty()) return v;
  std::vector<TermPtr> xs;
  for (auto& x : v->xs) xs.push_back(index_names(x, j));
  Term node = *v;
  node.xs = std::move(xs);
  return std::make_shared<const Term>(std::move(node));
}

}  // namespace nfb
