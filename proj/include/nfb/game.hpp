#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nfb/term.hpp"
#include "nfb/ulpatt.hpp"

namespace nfb {

// Game moves. The payload is a hole-pattern (numbered holes, concrete base
// leaves); intro[i] is the name standing for hole i+1, introduced by this
// move. Calls carry the called name in target.
struct GMove {
  enum class K { PropApp, PropRet, OpApp, OpRet };
  K k;
  std::string target;
  TermPtr payload;
  std::vector<std::string> intro;
  std::vector<TypePtr> intro_tys;  // aligned with intro
};

bool gmove_proponent(const GMove& m);
std::string show_gmove(const GMove& m);

using GTrace = std::vector<GMove>;
std::string show_gtrace(const GTrace& t);

// Fresh-name supply for a run: opponent names print as $a..., proponent
// names as $b... so the two ownerships never collide.
struct GSupply {
  long long no = 0, np = 0;
  std::string fresh_o() { return "a" + std::to_string(++no); }
  std::string fresh_p() { return "b" + std::to_string(++np); }
};

struct GKFrame {
  TermPtr ctx;  // one-hole evaluation context
  TypePtr hole_ty;
  std::vector<std::string> als;  // opponent names available to the frame
};

struct GameConfig {
  bool proponent;
  std::map<std::string, std::vector<std::string>> A;  // O-name -> P-names
  struct Decor {
    TermPtr v;
    std::vector<std::string> als;  // O-names available to the value
  };
  std::map<std::string, Decor> kappa;  // P-name -> decorated value
  std::vector<GKFrame> K;
  GTrace t;  // full play so far
  TermPtr e;                       // proponent only
  std::vector<std::string> avail;  // O-names (prop) / P-names (opp)
  std::vector<std::vector<std::string>> V;  // stack of P-name sequences

  bool p_final() const;  // ⟨_;_;·;_;();·⟩
  bool o_final() const;  // ⟨_;_;·;_;·;_⟩
};

GameConfig g_initial_term(const TermPtr& e);
// E: a term with a single Hole of type hole_ty; E[·] : unit.
GameConfig g_initial_ctx(const TermPtr& E, const TypePtr& hole_ty);

struct GStep {
  std::optional<GMove> move;  // empty = τ
  GameConfig next;
};

// All transitions of a configuration. Opponent base-type choices range over
// `ints` (booleans always over both); a forced move (O-innocence via the
// recorded play) preempts free choices.
std::vector<GStep> g_transitions(const GameConfig& c,
                                 const std::vector<long long>& ints,
                                 GSupply& sup);

// Applies a specific opponent move whose intro names are already chosen.
GameConfig g_apply_omove(const GameConfig& c, const GMove& mv);

// Play validity: legality, alternation, bracketing, visibility, innocence.
struct PlayCheck {
  bool ok;
  std::string diag;
};
PlayCheck is_play(const GTrace& t);

// Justifier index per move (-1 for an initial move); fails on illegal input.
std::optional<std::vector<int>> justifiers(const GTrace& t);

// Views as index sequences into t.
std::vector<int> pview(const GTrace& t);
std::vector<int> oview(const GTrace& t);

// Canonical serialization of a view (first-occurrence name renaming,
// justifiers as view-relative positions): equal strings ⇔ views equal up to
// name permutation.
std::string canon_view(const GTrace& t, const std::vector<int>& just,
                       const std::vector<int>& view);

// The forced opponent move at trace t, if O-innocence determines one.
std::optional<GMove> next_o(const GTrace& t);

// Dual trace under a partial bijection (applied to every name).
GTrace dual(const GTrace& t, const std::map<std::string, std::string>& phi);

// Synchronizes the engine for e against the engine for the applicative
// context E, extending the name bijection at every synchronized move.
// Terminated iff the composed program converges (composition lemma).
enum class ComposeResult { Terminated, Exhausted };
ComposeResult compose_run(const TermPtr& e, const TermPtr& E,
                          const TypePtr& hole_ty, long long fuel);

}  // namespace nfb
