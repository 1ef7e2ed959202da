#pragma once

#include <stdexcept>
#include <string>

#include "nfb/term.hpp"

namespace nfb {

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Monomorphic type inference over closed terms. Returns the term with every
// function node carrying its full arrow type and all `(e : T)` annotations
// erased. Throws TypeError on ill-typed input, and also when some type is
// left undetermined ("cannot infer type ... annotate").
struct Typed {
  TermPtr term;
  TypePtr type;
};
Typed typecheck(const TermPtr& e);

}  // namespace nfb
