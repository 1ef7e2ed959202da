#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nfb/term.hpp"

namespace nfb {

// Applies a primitive to evaluated base-type arguments. All-concrete
// arguments fold to a constant; otherwise the result is a canonicalized
// symbolic value. Division and modulus require a concrete nonzero divisor
// here; callers fork on symbolic divisors first. Returns null for
// division by a concrete zero (the caller treats that as a stuck term).
TermPtr sym_prim(const std::string& op, const std::vector<TermPtr>& args);

// Canonical ordering key for symbolic values (commutative operands are
// sorted by it, so e.g. 1 + k and k + 1 collapse to one form).
std::string term_key(const TermPtr& e);

// Evaluates a symbolic base-type value under a concrete assignment of its
// symbolic constants. Returns nullopt when evaluation is undefined
// (division by zero under the assignment).
using Assignment = std::map<std::string, Const>;
std::optional<Const> eval_under(const TermPtr& e, const Assignment& a);

void collect_symconsts(const TermPtr& e, std::map<std::string, TypePtr>& out);

enum class SatResult { Sat, Unsat, Unknown };

struct SolverAnswer {
  SatResult res;
  Assignment model;  // populated on Sat
};

struct Solver {
  // Empty path selects the built-in decision procedure; otherwise the
  // named executable is invoked on SMT-LIB 2 input.
  std::string smtlib_path;
  long long queries = 0;

  // Satisfiability of a conjunction of boolean-typed symbolic values.
  SolverAnswer satisfiable(const std::vector<TermPtr>& constraints);

  // Is `extra` forced by `ctx` (ctx ∧ ¬extra unsat)?
  bool entails(const std::vector<TermPtr>& ctx, const TermPtr& extra);
};

// Built-in procedure, exposed separately for differential testing.
SolverAnswer solve_internal(const std::vector<TermPtr>& constraints);
SolverAnswer solve_smtlib(const std::string& path,
                          const std::vector<TermPtr>& constraints);

// Brute-force reference: exhaustive search over [-bound, bound].
SolverAnswer solve_brute(const std::vector<TermPtr>& constraints, long long bound);

std::string to_smtlib(const std::vector<TermPtr>& constraints);

TermPtr sym_not(const TermPtr& e);
TermPtr sym_eq(const TermPtr& a, const TermPtr& b);

}  // namespace nfb
