#pragma once

#include <string>
#include <vector>

#include "nfb/term.hpp"

namespace nfb {

// Ultimate pattern of a value: function subvalues are replaced by numbered
// holes (left-to-right, depth-first, starting at 1) and extracted into
// `fns`. Base leaves (concrete or symbolic) stay in the pattern.
struct UPat {
  TermPtr pattern;
  std::vector<TermPtr> fns;
};
UPat ulpatt(const TermPtr& v);

struct NameSupply {
  long long next_name = 0;
  long long next_sym = 0;
  std::string fresh_name() { return "a" + std::to_string(++next_name); }
  std::string fresh_sym() { return "k" + std::to_string(++next_sym); }
};

// A pattern chosen by the environment for a value of the given type.
// `names` are the abstract function names introduced (unindexed; a
// configuration indexes them on registration), `syms` the symbolic base
// constants.
struct OPat {
  TermPtr value;
  std::vector<TermPtr> names;
  std::vector<TermPtr> syms;
};

// Symbolic mode: one canonical pattern — unit is (), bool/int leaves are
// fresh symbolic constants, arrows are fresh abstract names.
OPat symbolic_pattern(const TypePtr& ty, NameSupply& s);

// Concrete mode: every pattern whose integer leaves come from `ints`.
std::vector<OPat> enumerate_patterns(const TypePtr& ty,
                                     const std::vector<long long>& ints,
                                     NameSupply& s);

// Copy of a pattern value with every unindexed abstract name given index j.
TermPtr index_names(const TermPtr& v, int j);

}  // namespace nfb
