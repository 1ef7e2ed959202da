#include "nfb/symbolic.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace nfb {

namespace {

bool is_concrete(const TermPtr& e) { return e->k == Term::K::Const; }

bool is_comm(const std::string& op) {
  return op == "+" || op == "*" || op == "==" || op == "<>" || op == "&&" || op == "||";
}

TermPtr symt(const std::string& op, std::vector<TermPtr> args, TypePtr ty) {
  return mk_symterm(op, std::move(args), std::move(ty));
}

}  // namespace

std::string term_key(const TermPtr& e) { return show_term(e); }

TermPtr sym_prim(const std::string& op, const std::vector<TermPtr>& args) {
  bool concrete = true;
  for (auto& a : args) concrete = concrete && is_concrete(a);

  if (concrete) {
    if (op == "not") return mk_bool(!args[0]->c.b);
    if (op == "&&") return mk_bool(args[0]->c.b && args[1]->c.b);
    if (op == "||") return mk_bool(args[0]->c.b || args[1]->c.b);
    if (op == "==") return mk_bool(const_eq(args[0]->c, args[1]->c));
    if (op == "<>") return mk_bool(!const_eq(args[0]->c, args[1]->c));
    long long x = args[0]->c.n, y = args.size() > 1 ? args[1]->c.n : 0;
    if (op == "+") return mk_int(x + y);
    if (op == "-") return mk_int(x - y);
    if (op == "*") return mk_int(x * y);
    if (op == "<") return mk_bool(x < y);
    if (op == "<=") return mk_bool(x <= y);
    if (op == ">") return mk_bool(x > y);
    if (op == ">=") return mk_bool(x >= y);
    if (op == "/" || op == "mod") {
      if (y == 0) return nullptr;
      // Euclidean convention: remainder is always non-negative.
      long long q = x / y, r = x % y;
      if (r < 0) {
        r += std::llabs(y);
        q = (x - r) / y;
      }
      return mk_int(op == "/" ? q : r);
    }
    throw std::runtime_error("sym_prim: unknown op " + op);
  }

  TypePtr ty = (op == "+" || op == "-" || op == "*" || op == "/" || op == "mod")
                   ? t_int()
                   : t_bool();

  if ((op == "/" || op == "mod") && is_concrete(args[1]) && args[1]->c.n == 0)
    return nullptr;

  std::vector<TermPtr> xs = args;

  // Light algebraic normalisation; the solver does the heavy lifting.
  if (is_comm(op) && xs.size() == 2 && term_key(xs[0]) > term_key(xs[1]))
    std::swap(xs[0], xs[1]);

  if ((op == "==" || op == "<=" || op == ">=") && term_eq(xs[0], xs[1]))
    return mk_bool(true);
  if ((op == "<>" || op == "<" || op == ">") && term_eq(xs[0], xs[1]))
    return mk_bool(false);
  if (op == "&&") {
    for (int i = 0; i < 2; ++i)
      if (is_concrete(xs[i])) return xs[i]->c.b ? xs[1 - i] : mk_bool(false);
  }
  if (op == "||") {
    for (int i = 0; i < 2; ++i)
      if (is_concrete(xs[i])) return xs[i]->c.b ? mk_bool(true) : xs[1 - i];
  }
  if (op == "not" && xs[0]->k == Term::K::SymTerm && xs[0]->name == "not")
    return xs[0]->xs[0];
  if (op == "+" && is_concrete(xs[0]) && xs[0]->c.n == 0) return xs[1];
  if (op == "-" && is_concrete(xs[1]) && xs[1]->c.n == 0) return xs[0];
  if (op == "*") {
    for (int i = 0; i < 2; ++i)
      if (is_concrete(xs[i])) {
        if (xs[i]->c.n == 0) return mk_int(0);
        if (xs[i]->c.n == 1) return xs[1 - i];
      }
  }
  // Constant folding across associativity for the common (c + (c' + e)) shape.
  if ((op == "+") && is_concrete(xs[0]) && xs[1]->k == Term::K::SymTerm &&
      xs[1]->name == "+" && is_concrete(xs[1]->xs[0])) {
    return symt("+", {mk_int(xs[0]->c.n + xs[1]->xs[0]->c.n), xs[1]->xs[1]}, t_int());
  }
  return symt(op, std::move(xs), ty);
}

TermPtr sym_not(const TermPtr& e) {
  if (e->k == Term::K::Const) return mk_bool(!e->c.b);
  return sym_prim("not", {e});
}

TermPtr sym_eq(const TermPtr& a, const TermPtr& b) { return sym_prim("==", {a, b}); }

std::optional<Const> eval_under(const TermPtr& e, const Assignment& a) {
  switch (e->k) {
    case Term::K::Const:
      return e->c;
    case Term::K::SymConst: {
      auto it = a.find(e->name);
      if (it == a.end()) return std::nullopt;
      return it->second;
    }
    case Term::K::SymTerm: {
      std::vector<TermPtr> args;
      for (auto& x : e->xs) {
        auto v = eval_under(x, a);
        if (!v) return std::nullopt;
        args.push_back(mk_const(*v));
      }
      TermPtr r = sym_prim(e->name, args);
      if (!r) return std::nullopt;  // division by zero under this assignment
      return r->c;
    }
    default:
      return std::nullopt;
  }
}

void collect_symconsts(const TermPtr& e, std::map<std::string, TypePtr>& out) {
  if (e->k == Term::K::SymConst) {
    out.emplace(e->name, e->ty);
    return;
  }
  for (auto& x : e->xs) collect_symconsts(x, out);
}

SolverAnswer Solver::satisfiable(const std::vector<TermPtr>& constraints) {
  ++queries;
  if (!smtlib_path.empty()) return solve_smtlib(smtlib_path, constraints);
  return solve_internal(constraints);
}

bool Solver::entails(const std::vector<TermPtr>& ctx, const TermPtr& extra) {
  std::vector<TermPtr> q = ctx;
  q.push_back(sym_not(extra));
  return satisfiable(q).res == SatResult::Unsat;
}

// --- SMT-LIB backend -------------------------------------------------------

namespace {

void smt_term(const TermPtr& e, std::ostream& os) {
  switch (e->k) {
    case Term::K::Const:
      switch (e->c.tag) {
        case Const::Tag::Bool: os << (e->c.b ? "true" : "false"); return;
        case Const::Tag::Int:
          if (e->c.n < 0)
            os << "(- " << -e->c.n << ")";
          else
            os << e->c.n;
          return;
        case Const::Tag::Unit: os << "0"; return;
      }
      return;
    case Term::K::SymConst:
      os << "|" << e->name << "|";
      return;
    case Term::K::SymTerm: {
      std::string op = e->name;
      if (op == "==") op = "=";
      else if (op == "<>") { os << "(not (= "; smt_term(e->xs[0], os); os << " "; smt_term(e->xs[1], os); os << "))"; return; }
      else if (op == "&&") op = "and";
      else if (op == "||") op = "or";
      else if (op == "/") op = "div";
      else if (op == "-" && e->xs.size() == 1) op = "-";
      os << "(" << op;
      for (auto& x : e->xs) {
        os << " ";
        smt_term(x, os);
      }
      os << ")";
      return;
    }
    default:
      throw std::runtime_error("smt_term: not a symbolic base value");
  }
}

}  // namespace

std::string to_smtlib(const std::vector<TermPtr>& constraints) {
  std::ostringstream os;
  os << "(set-logic QF_NIA)\n(set-option :produce-models true)\n";
  std::map<std::string, TypePtr> vars;
  for (auto& c : constraints) collect_symconsts(c, vars);
  for (auto& [name, ty] : vars)
    os << "(declare-const |" << name << "| "
       << (ty && ty->k == Type::K::Bool ? "Bool" : "Int") << ")\n";
  for (auto& c : constraints) {
    os << "(assert ";
    smt_term(c, os);
    os << ")\n";
  }
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

SolverAnswer solve_smtlib(const std::string& path,
                          const std::vector<TermPtr>& constraints) {
  std::string script = to_smtlib(constraints);
  char tmpl[] = "/tmp/nfbeq_query_XXXXXX";
  int fd = mkstemp(tmpl);
  if (fd < 0) return {SatResult::Unknown, {}};
  {
    std::ofstream f(tmpl);
    f << script;
  }
  close(fd);
  std::string cmd = path + " " + tmpl + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  if (p) {
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    pclose(p);
  }
  std::remove(tmpl);
  SolverAnswer ans{SatResult::Unknown, {}};
  std::istringstream in(out);
  std::string first;
  std::getline(in, first);
  if (first == "unsat") {
    ans.res = SatResult::Unsat;
  } else if (first == "sat") {
    ans.res = SatResult::Sat;
    // Model parsing is best-effort: callers fall back to the assignment-free
    // answer when a binding is missing.
    std::map<std::string, TypePtr> vars;
    for (auto& c : constraints) collect_symconsts(c, vars);
    std::string rest((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    for (auto& [name, ty] : vars) {
      size_t at = rest.find("|" + name + "|");
      if (at == std::string::npos) continue;
      size_t close_at = at + name.size() + 2;
      // The value follows the sort in `(define-fun |x| () Int 5)`.
      size_t end = rest.find(")", close_at);
      if (end == std::string::npos) continue;
      std::string seg = rest.substr(close_at, end - close_at);
      std::istringstream ss(seg);
      std::string tok, last;
      while (ss >> tok) last = tok;
      if (last == "true" || last == "false") {
        ans.model[name] = c_bool(last == "true");
      } else if (last == "-") {
        // negative literal printed as `(- 5)`; grab the digits after ')'
        size_t e2 = rest.find(")", end + 1);
        std::string digits = rest.substr(end + 1, e2 - end - 1);
        try { ans.model[name] = c_int(-std::stoll(digits)); } catch (...) {}
      } else {
        try { ans.model[name] = c_int(std::stoll(last)); } catch (...) {}
      }
    }
  }
  return ans;
}

SolverAnswer solve_brute(const std::vector<TermPtr>& constraints, long long bound) {
  std::map<std::string, TypePtr> vars;
  for (auto& c : constraints) collect_symconsts(c, vars);
  std::vector<std::pair<std::string, TypePtr>> vs(vars.begin(), vars.end());
  Assignment a;
  std::function<bool(size_t)> go = [&](size_t i) -> bool {
    if (i == vs.size()) {
      for (auto& c : constraints) {
        auto v = eval_under(c, a);
        if (!v || v->tag != Const::Tag::Bool || !v->b) return false;
      }
      return true;
    }
    auto& [name, ty] = vs[i];
    if (ty && ty->k == Type::K::Bool) {
      for (bool b : {false, true}) {
        a[name] = c_bool(b);
        if (go(i + 1)) return true;
      }
    } else {
      for (long long n = -bound; n <= bound; ++n) {
        a[name] = c_int(n);
        if (go(i + 1)) return true;
      }
    }
    a.erase(name);
    return false;
  };
  if (go(0)) return {SatResult::Sat, a};
  return {SatResult::Unsat, a};  // complete only relative to the box
}

}  // namespace nfb
