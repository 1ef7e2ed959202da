#pragma once

#include <string>

#include "nfb/lts.hpp"
#include "nfb/symbolic.hpp"

namespace nfb {

struct CheckOpts {
  int bound = 6;
  bool memo = true;        // cache fully-expanded configuration pairs
  bool identity = true;    // close syntactically identical pairs
  bool normalise = true;   // canonical renaming before memo/identity
  bool pcache = true;      // replayed calls do not consume bound
  bool oskip = true;       // skip repeated opponent calls w/ unchanged knowledge
  bool loopdetect = true;  // nested identical proponent calls ⇒ divergence
  std::string smtlib_path;  // empty: built-in solver
  long long timeout_ms = 0;  // 0: none
  long long tau_fuel = 20000;
};

struct CheckStats {
  long long pairs = 0;
  long long challenges = 0;
  long long solver_queries = 0;
  long long memo_hits = 0;
  long long identity_hits = 0;
  long long loop_skips = 0;
  long long oskip_hits = 0;
  long long forced_replays = 0;
};

struct Verdict {
  enum class V { Equivalent, Inequivalent, Inconclusive };
  V v;
  Trace witness;       // Inequivalent: distinguishing top-level interaction
  Assignment model;    // Inequivalent: satisfying assignment for the path
  std::string reason;  // Inconclusive: bound | solver | fuel | timeout
  CheckStats stats;
};

std::string show_verdict_line(const Verdict& v);

// Bounded normal-form bisimulation check. Inputs must be closed and
// typecheck at the same type (checked here; throws TypeError otherwise).
Verdict check(const TermPtr& e1, const TermPtr& e2, const CheckOpts& opts = {});

// Canonical renaming used by memoisation/identity, exposed for tests:
// abstract names and symbolic constants renamed by first occurrence,
// binders alpha-normalised.
std::string normalize_pair_key(const std::string& raw);

}  // namespace nfb
