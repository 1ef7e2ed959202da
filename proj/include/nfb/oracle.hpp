#pragma once

#include <vector>

#include "nfb/term.hpp"

namespace nfb {

// Brute-force contextual-equivalence oracle over applicative contexts
//   E ::= • | E v | if E == c then () else ⊥ | π_i(E)
// for finite base domains. Argument values come from a size-bounded
// template generator (constants, projections, conditionals, applications,
// nested lambdas, divergence, a diverging let rec).

// Closed values of type T; depth bounds body nesting.
std::vector<TermPtr> oracle_values(const TypePtr& T,
                                   const std::vector<long long>& ints,
                                   int depth);

// Applicative contexts as one-hole terms (hole index 0) of overall type
// unit; depth bounds the number of applications/projections.
std::vector<TermPtr> enumerate_applicative(const TypePtr& T, int depth,
                                           const std::vector<long long>& ints);

struct OracleResult {
  enum class V { Equivalent, Inequivalent, Inconclusive };
  V v;
  TermPtr context;  // distinguishing context on Inequivalent
};

// Co-termination of E[e1] and E[e2] over all enumerated contexts. Typed
// input expected (both sides at the same type).
OracleResult oracle_equiv(const TermPtr& e1, const TermPtr& e2, int depth,
                          long long fuel, const std::vector<long long>& ints);

}  // namespace nfb
