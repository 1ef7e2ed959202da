// Built-in satisfiability procedure for the checker's path constraints:
// quantifier-free boolean combinations of linear integer comparisons.
//
// Strategy: translate to DNF; refute each disjunct with Fourier–Motzkin
// elimination over the rationals (sound for integer unsat); search for an
// integer witness in the box [-64, 64] by evaluating the original
// constraints. Unknown when neither side concludes (DNF blowup, overflow,
// nonlinear residue, or box exhausted without a refutation).

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "nfb/symbolic.hpp"

namespace nfb {

namespace {

constexpr long long kBox = 64;
constexpr size_t kMaxClauses = 4096;
constexpr long long kMaxSearchNodes = 4'000'000;

struct Lin {
  // sum coeffs[v]*v + c
  std::map<int, long long> coeffs;
  long long c = 0;
  bool ok = true;  // false after overflow or nonlinear residue

  void add(const Lin& o, long long scale) {
    if (!o.ok) ok = false;
    if (!ok) return;
    auto mul_ok = [&](long long a, long long b, long long& out) {
      __int128 r = static_cast<__int128>(a) * b;
      if (r > INT64_MAX / 4 || r < INT64_MIN / 4) return false;
      out = static_cast<long long>(r);
      return true;
    };
    long long t;
    if (!mul_ok(o.c, scale, t)) { ok = false; return; }
    c += t;
    for (auto& [v, k] : o.coeffs) {
      if (!mul_ok(k, scale, t)) { ok = false; return; }
      coeffs[v] += t;
      if (coeffs[v] == 0) coeffs.erase(v);
    }
  }
};

// Atom: lin <= 0.
struct Atom {
  Lin lin;
};

struct Clause {
  std::vector<Atom> atoms;
  bool exact = true;  // all atoms translated without relaxation
};

struct Translator {
  std::map<std::string, int> var_ids;        // symconst / opaque-term -> var
  std::vector<bool> is_bool;                 // var domain {0,1}
  std::vector<Clause> clauses;               // DNF under construction
  bool blown = false;

  int var_for(const std::string& key, bool boolean) {
    auto it = var_ids.find(key);
    if (it != var_ids.end()) return it->second;
    int id = static_cast<int>(is_bool.size());
    var_ids[key] = id;
    is_bool.push_back(boolean);
    return id;
  }

  Lin lin_of(const TermPtr& e, Clause& side) {
    Lin l;
    switch (e->k) {
      case Term::K::Const:
        l.c = e->c.tag == Const::Tag::Int ? e->c.n : (e->c.b ? 1 : 0);
        return l;
      case Term::K::SymConst:
        l.coeffs[var_for(e->name, e->ty && e->ty->k == Type::K::Bool)] = 1;
        return l;
      case Term::K::SymTerm: {
        const std::string& op = e->name;
        if (op == "+" || op == "-") {
          Lin a = lin_of(e->xs[0], side), b = lin_of(e->xs[1], side);
          l = a;
          l.add(b, op == "+" ? 1 : -1);
          return l;
        }
        if (op == "*") {
          Lin a = lin_of(e->xs[0], side), b = lin_of(e->xs[1], side);
          if (a.coeffs.empty() && a.ok) {
            Lin scaled;
            scaled.add(b, a.c);
            return scaled;
          }
          if (b.coeffs.empty() && b.ok) {
            Lin scaled;
            scaled.add(a, b.c);
            return scaled;
          }
          break;  // nonlinear: opaque below
        }
        if ((op == "/" || op == "mod") && e->xs[1]->k == Term::K::Const &&
            e->xs[1]->c.n != 0) {
          // e0 = d*q + r, 0 <= r < |d| (Euclidean); result is q or r.
          long long d = e->xs[1]->c.n;
          Lin e0 = lin_of(e->xs[0], side);
          int q = var_for("q:" + term_key(e), false);
          int r = var_for("r:" + term_key(e), false);
          Lin def;  // e0 - d*q - r <= 0 and >= 0
          def = e0;
          def.coeffs[q] -= d;
          def.coeffs[r] -= 1;
          side.atoms.push_back({def});
          Lin neg;
          neg.add(def, -1);
          side.atoms.push_back({neg});
          Lin rlow;  // -r <= 0
          rlow.coeffs[r] = -1;
          side.atoms.push_back({rlow});
          Lin rhigh;  // r - |d| + 1 <= 0
          rhigh.coeffs[r] = 1;
          rhigh.c = 1 - std::llabs(d);
          side.atoms.push_back({rhigh});
          l.coeffs[op == "/" ? q : r] = 1;
          return l;
        }
        break;  // opaque
      }
      default:
        break;
    }
    // Opaque integer-valued term: a fresh relaxation variable. The clause
    // is marked inexact so refutation is still sound but sat is not claimed
    // from the relaxation alone.
    l.coeffs[var_for("o:" + term_key(e), false)] = 1;
    side.exact = false;
    return l;
  }

  // lhs - rhs (+1 if strict) <= 0
  Atom cmp_atom(const TermPtr& a, const TermPtr& b, bool strict, Clause& side) {
    Lin la = lin_of(a, side), lb = lin_of(b, side);
    Lin d = la;
    d.add(lb, -1);
    if (strict) d.c += 1;
    return {d};
  }

  // Formula as DNF of clauses; distributes Or over And with a cap.
  std::vector<Clause> dnf(const TermPtr& e, bool neg) {
    auto lit = [&](std::vector<Atom> atoms, bool exact) {
      Clause c;
      c.atoms = std::move(atoms);
      c.exact = exact;
      return std::vector<Clause>{c};
    };
    if (e->k == Term::K::Const) {
      bool b = e->c.b != neg;
      if (b) return lit({}, true);
      return {};  // false: empty disjunction
    }
    if (e->k == Term::K::SymConst) {
      Clause c;
      Lin l;
      l.coeffs[var_for(e->name, true)] = neg ? 1 : -1;
      l.c = neg ? 0 : 1;  // x >= 1 (as 1-x<=0) or x <= 0
      c.atoms.push_back({l});
      return {c};
    }
    if (e->k != Term::K::SymTerm) {
      blown = true;
      return lit({}, false);
    }
    const std::string& op = e->name;
    if (op == "not") return dnf(e->xs[0], !neg);
    bool conj = (op == "&&") != neg;  // de Morgan
    if (op == "&&" || op == "||") {
      std::vector<Clause> a = dnf(e->xs[0], neg), b = dnf(e->xs[1], neg);
      if (conj) {
        std::vector<Clause> out;
        for (auto& ca : a)
          for (auto& cb : b) {
            Clause c = ca;
            c.atoms.insert(c.atoms.end(), cb.atoms.begin(), cb.atoms.end());
            c.exact = ca.exact && cb.exact;
            out.push_back(std::move(c));
            if (out.size() > kMaxClauses) { blown = true; return out; }
          }
        return out;
      }
      a.insert(a.end(), b.begin(), b.end());
      if (a.size() > kMaxClauses) blown = true;
      return a;
    }
    bool int_args = e->xs[0]->k == Term::K::SymTerm
                        ? e->xs[0]->ty->k == Type::K::Int
                        : (e->xs[0]->k == Term::K::SymConst
                               ? e->xs[0]->ty->k == Type::K::Int
                               : e->xs[0]->c.tag == Const::Tag::Int);
    if (op == "==" || op == "<>") {
      bool want_eq = (op == "==") != neg;
      if (!int_args) {
        // boolean (or unit) equality via (a&&b)||(!a&&!b)
        if (e->xs[0]->k == Term::K::Const && e->xs[0]->c.tag == Const::Tag::Unit)
          return want_eq ? lit({}, true) : std::vector<Clause>{};
        TermPtr a = e->xs[0], b = e->xs[1];
        TermPtr both = sym_prim("&&", {a, b});
        TermPtr neither = sym_prim("&&", {sym_not(a), sym_not(b)});
        TermPtr iff = sym_prim("||", {both, neither});
        return dnf(iff, !want_eq);
      }
      if (want_eq) {
        Clause c;
        c.atoms.push_back(cmp_atom(e->xs[0], e->xs[1], false, c));
        c.atoms.push_back(cmp_atom(e->xs[1], e->xs[0], false, c));
        return {c};
      }
      Clause lt, gt;
      lt.atoms.push_back(cmp_atom(e->xs[0], e->xs[1], true, lt));
      gt.atoms.push_back(cmp_atom(e->xs[1], e->xs[0], true, gt));
      return {lt, gt};
    }
    std::string o = op;
    if (neg) {
      if (op == "<") o = ">=";
      else if (op == "<=") o = ">";
      else if (op == ">") o = "<=";
      else if (op == ">=") o = "<";
    }
    Clause c;
    if (o == "<") c.atoms.push_back(cmp_atom(e->xs[0], e->xs[1], true, c));
    else if (o == "<=") c.atoms.push_back(cmp_atom(e->xs[0], e->xs[1], false, c));
    else if (o == ">") c.atoms.push_back(cmp_atom(e->xs[1], e->xs[0], true, c));
    else if (o == ">=") c.atoms.push_back(cmp_atom(e->xs[1], e->xs[0], false, c));
    else { blown = true; return lit({}, false); }
    return {c};
  }
};

// Rational infeasibility of a conjunction of lin<=0 atoms.
// Returns true when provably infeasible; false is inconclusive.
bool fm_infeasible(std::vector<Lin> rows, const std::vector<bool>& is_bool) {
  for (size_t v = 0; v < is_bool.size(); ++v) {
    if (!is_bool[v]) continue;
    Lin low, high;  // 0 <= x <= 1
    low.coeffs[static_cast<int>(v)] = -1;
    high.coeffs[static_cast<int>(v)] = 1;
    high.c = -1;
    rows.push_back(low);
    rows.push_back(high);
  }
  for (auto& r : rows)
    if (!r.ok) return false;
  for (int round = 0; round < 64; ++round) {
    // constant rows
    for (auto& r : rows)
      if (r.coeffs.empty() && r.c > 0) return true;
    // pick a variable to eliminate (fewest pos*neg combinations)
    std::map<int, std::pair<int, int>> counts;
    for (auto& r : rows)
      for (auto& [v, k] : r.coeffs)
        (k > 0 ? counts[v].first : counts[v].second)++;
    int best = -1;
    long long best_cost = -1;
    for (auto& [v, pn] : counts) {
      long long cost = static_cast<long long>(pn.first) * pn.second;
      if (best == -1 || cost < best_cost) { best = v; best_cost = cost; }
    }
    if (best == -1) return false;  // only constant rows left, none positive
    std::vector<Lin> pos, negs, rest;
    for (auto& r : rows) {
      auto it = r.coeffs.find(best);
      if (it == r.coeffs.end()) rest.push_back(r);
      else if (it->second > 0) pos.push_back(r);
      else negs.push_back(r);
    }
    if (static_cast<long long>(pos.size()) * negs.size() +
            static_cast<long long>(rest.size()) > 20000)
      return false;
    for (auto& p : pos)
      for (auto& n : negs) {
        long long a = p.coeffs.at(best), b = -n.coeffs.at(best);
        Lin comb;
        comb.add(p, b);
        comb.add(n, a);
        if (!comb.ok) return false;
        comb.coeffs.erase(best);
        rest.push_back(std::move(comb));
      }
    rows = std::move(rest);
  }
  return false;
}

struct WitnessSearch {
  const std::vector<TermPtr>& constraints;
  std::vector<std::pair<std::string, TypePtr>> vars;
  std::vector<std::vector<size_t>> ready_at;  // constraints checkable once var i set
  Assignment a;
  long long nodes = 0;
  bool budget_hit = false;

  explicit WitnessSearch(const std::vector<TermPtr>& cs) : constraints(cs) {
    std::map<std::string, TypePtr> vm;
    for (auto& c : cs) collect_symconsts(c, vm);
    for (auto& kv : vm) vars.push_back(kv);
    ready_at.resize(vars.size() + 1);
    std::map<std::string, size_t> pos;
    for (size_t i = 0; i < vars.size(); ++i) pos[vars[i].first] = i;
    for (size_t ci = 0; ci < cs.size(); ++ci) {
      std::map<std::string, TypePtr> used;
      collect_symconsts(cs[ci], used);
      size_t last = 0;
      for (auto& [n, _] : used) last = std::max(last, pos[n] + 1);
      ready_at[last].push_back(ci);
    }
  }

  bool check_ready(size_t depth) {
    for (size_t ci : ready_at[depth]) {
      auto v = eval_under(constraints[ci], a);
      if (!v || v->tag != Const::Tag::Bool || !v->b) return false;
    }
    return true;
  }

  bool go(size_t i) {
    if (++nodes > kMaxSearchNodes) { budget_hit = true; return false; }
    if (!check_ready(i)) return false;
    if (i == vars.size()) return true;
    auto& [name, ty] = vars[i];
    if (ty && ty->k == Type::K::Bool) {
      for (bool b : {false, true}) {
        a[name] = c_bool(b);
        if (go(i + 1)) return true;
      }
    } else {
      // small magnitudes first
      for (long long m = 0; m <= kBox; ++m) {
        for (long long n : {m, -m}) {
          if (n == 0 && m != 0) continue;
          a[name] = c_int(n);
          if (go(i + 1)) return true;
          if (budget_hit) return false;
        }
        if (budget_hit) return false;
      }
    }
    a.erase(name);
    return false;
  }
};

}  // namespace

SolverAnswer solve_internal(const std::vector<TermPtr>& constraints) {
  // One shared translator so variable identities agree across constraints.
  Translator tr;
  std::vector<Clause> disjuncts{Clause{}};
  for (auto& c : constraints) {
    std::vector<Clause> cd = tr.dnf(c, false);
    std::vector<Clause> next;
    for (auto& a : disjuncts)
      for (auto& b : cd) {
        Clause m = a;
        m.atoms.insert(m.atoms.end(), b.atoms.begin(), b.atoms.end());
        m.exact = a.exact && b.exact;
        next.push_back(std::move(m));
        if (next.size() > kMaxClauses) tr.blown = true;
      }
    disjuncts = std::move(next);
    if (tr.blown) break;
  }

  bool refuted_all = !tr.blown;
  if (!tr.blown) {
    for (auto& cl : disjuncts) {
      std::vector<Lin> rows;
      for (auto& at : cl.atoms) rows.push_back(at.lin);
      if (!fm_infeasible(std::move(rows), tr.is_bool)) {
        refuted_all = false;
        break;
      }
    }
    if (refuted_all) return {SatResult::Unsat, {}};
  }

  WitnessSearch ws(constraints);
  if (ws.go(0)) return {SatResult::Sat, ws.a};
  return {SatResult::Unknown, {}};
}

}  // namespace nfb
