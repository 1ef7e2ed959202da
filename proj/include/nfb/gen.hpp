#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nfb/term.hpp"

namespace nfb {

// Seeded generators for property tests.
struct Rnd {
  std::mt19937_64 rng;
  explicit Rnd(uint64_t seed) : rng(seed) {}
  int pick(int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); }
  bool flip(int num = 1, int den = 2) { return pick(den) < num; }
};

// Random ground type; bool_base restricts base leaves to bool/unit.
TypePtr gen_type(Rnd& r, int depth, bool bool_base);

// Random closed well-typed term of type T (fully annotated; may diverge).
TermPtr gen_term(Rnd& r, const TypePtr& T, int depth);

// Random boolean constraint over the given integer symbolic constants.
TermPtr gen_constraint(Rnd& r, const std::vector<TermPtr>& syms, int depth);

}  // namespace nfb
