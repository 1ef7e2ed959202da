#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfb/term.hpp"
#include "nfb/ulpatt.hpp"

namespace nfb {

// Moves. Payloads of proponent moves are ultimate patterns (numbered
// holes); payloads of opponent moves are pattern values whose function
// positions are unindexed abstract names and whose base positions are
// concrete constants or fresh symbolic constants.
struct Move {
  enum class K { PropApp, PropRet, OpApp, OpRet };
  K k;
  std::string alpha;  // PropApp: target abstract name (no index)
  int idx = 0;        // OpApp: 1-based position in the knowledge sequence
  TermPtr payload;
};

bool move_proponent(const Move& m);
bool move_eq(const Move& a, const Move& b);
std::string show_move(const Move& m);

using Trace = std::vector<Move>;
bool trace_eq(const Trace& a, const Trace& b);
std::string show_trace(const Trace& t);

// Names introduced by a move (PropApp's target is a use, not an
// introduction; opponent payload names are introductions).
std::vector<std::string> move_introductions(const Move& m);

// Prefix-closed set of opponent-visible traces.
struct Memory {
  std::vector<Trace> traces;  // without the empty trace; closed by add()

  bool contains(const Trace& t) const;
  // Adds t and its prefixes.
  void add(const Trace& t);
  std::optional<Move> next(const Trace& t) const;  // nextmove(M,t), legal M
  std::vector<Move> next_all(const Trace& t) const;
  std::vector<Trace> maximal() const;
  bool operator==(const Memory& o) const;
};

bool is_legal(const Memory& m);
std::string show_memory(const Memory& m);

struct AEntry {
  std::vector<std::string> names;  // introduced as one group
  int j = 0;
  std::vector<TermPtr> knowledge;  // values attached at introduction
};

struct KFrame {
  Trace resume;
  TermPtr ctx;  // evaluation context, hole index 0
  TypePtr hole_ty;
};

// One record type serves proponent and opponent configurations.
// Proponent: ⟨A; M; K; t; e; V⟩.  Opponent: ⟨A; M; K; t; V; knowledge⟩.
struct Config {
  bool proponent = true;
  std::vector<AEntry> A;
  Memory M;
  std::vector<KFrame> K;
  Trace t;
  TermPtr e;  // proponent only
  std::vector<std::vector<TermPtr>> V;
  std::vector<TermPtr> knowledge;  // opponent only

  bool final_config() const { return !proponent && K.empty(); }
};

Config initial_config(const TermPtr& e);

const AEntry* lookup_name(const Config& c, const std::string& base, int j);
int least_unused_index(const std::vector<AEntry>& A,
                       const std::vector<std::string>& names);

struct Mode {
  bool symbolic = true;
  std::vector<long long> base_ints;  // concrete mode: Int domain
};

struct TransResult {
  std::optional<Move> label;  // visible barbs only (PropRet / OpApp)
  Config next;
  std::vector<TermPtr> constraints;   // symbolic guard of this branch
  std::vector<TermPtr> new_syms;      // symbolic constants introduced
  std::vector<Trace> added_traces;    // traces this step added to M
  bool forced = false;                // opponent move was dictated by M
};

struct MalformedConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All one-step successors of C under the seven rules. In symbolic mode, a
// symbolic conditional yields two τ successors carrying the guard and its
// negation; opponent free choices yield one successor per option.
std::vector<TransResult> transitions(const Config& c, NameSupply& fresh,
                                     const Mode& mode);

// τ* · visible · τ* successors, with a fuel cap on τ chains.
struct BigStep {
  Move label;
  Config next;
  std::vector<TermPtr> constraints;
  bool fuel_exhausted = false;
};
std::vector<BigStep> big_step(const Config& c, NameSupply& fresh, const Mode& mode,
                              int fuel = 10000);

// Concrete trace semantics up to a visible-move depth: the set of (t, M)
// observed at final configurations, serialized canonically (names are
// renamed in order of first occurrence so runs are comparable).
std::vector<std::string> semantics(const TermPtr& e, int depth, const Mode& mode);

}  // namespace nfb
