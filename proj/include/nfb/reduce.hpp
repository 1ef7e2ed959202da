#pragma once

#include "nfb/term.hpp"

namespace nfb {

// One small-step of the operational semantics over closed terms extended
// with abstract-function and symbolic leaves.
//
//  Stepped — a plain reduction happened.
//  Value   — the term is already a value.
//  Stuck   — no rule applies (division by zero, ill-formed term).
//  AbsCall — the redex is `alpha arg`; the caller performs the call move.
//  Branch  — the redex guard is symbolic; the caller forks on it. The two
//            continuations are `plug_ctx(ctx, thn)` / `plug_ctx(ctx, els)`.
struct Step {
  enum class K { Stepped, Value, Stuck, AbsCall, Branch };
  K k;
  TermPtr term;   // Stepped
  TermPtr ctx;    // AbsCall / Branch: evaluation context, hole index 0
  TermPtr alpha;  // AbsCall: the abstract name being applied
  TermPtr arg;    // AbsCall: argument value
  TermPtr guard;  // Branch: symbolic boolean
  TermPtr thn, els;
};

Step step(const TermPtr& e);

// Iterated reduction for fully concrete closed terms. Divergence is
// detected by exact state repetition; Stuck is folded into Diverged per
// the divergence-as-failure convention used throughout.
struct EvalResult {
  enum class K { Value, Diverged, Fuel };
  K k;
  TermPtr value;
};
EvalResult evaluate(const TermPtr& e, long long fuel = 100000);

}  // namespace nfb
