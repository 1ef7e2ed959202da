#include "nfb/checker.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "nfb/reduce.hpp"
#include "nfb/typecheck.hpp"

namespace nfb {

namespace {

using Clock = std::chrono::steady_clock;

struct TimeoutExc {};

struct FoundInequivalence {
  Trace witness;
  Assignment model;
  bool model_known = true;
};

struct Ctx {
  CheckOpts opts;
  Solver solver;
  NameSupply fresh;
  CheckStats stats;
  bool saw_bound = false;
  bool saw_unknown = false;
  bool saw_fuel = false;
  std::map<std::string, int> memo;  // normalized pair -> largest bound expanded
  std::optional<FoundInequivalence> found;
  Clock::time_point deadline;
  bool has_deadline = false;
  int depth = 0;  // run_side nesting; guards replay loops w/o loopdetect

  void tick() {
    if (has_deadline && Clock::now() > deadline) throw TimeoutExc{};
  }

  SatResult sat(const std::vector<TermPtr>& sigma) {
    auto a = solver.satisfiable(sigma);
    stats.solver_queries = solver.queries;
    return a.res;
  }

  // σ ⊨ e, i.e. σ ∧ ¬e unsatisfiable.
  SatResult entailed(const std::vector<TermPtr>& sigma, const TermPtr& e) {
    std::vector<TermPtr> q = sigma;
    q.push_back(sym_not(e));
    auto r = sat(q);
    if (r == SatResult::Unsat) return SatResult::Sat;      // entailed
    if (r == SatResult::Sat) return SatResult::Unsat;      // not entailed
    return SatResult::Unknown;
  }
};

// Structural constraint equating two values of matching shape; nullopt on
// skeleton mismatch. Base leaves contribute equalities; abstract names and
// pattern holes must coincide exactly.
bool value_eq_constraint(const TermPtr& a, const TermPtr& b,
                         std::vector<TermPtr>& out) {
  if (a->k == Term::K::Tuple || b->k == Term::K::Tuple) {
    if (a->k != b->k || a->xs.size() != b->xs.size()) return false;
    for (size_t i = 0; i < a->xs.size(); ++i)
      if (!value_eq_constraint(a->xs[i], b->xs[i], out)) return false;
    return true;
  }
  if (a->k == Term::K::Hole || b->k == Term::K::Hole) {
    return a->k == b->k && a->index == b->index && type_eq(a->ty, b->ty);
  }
  if (a->k == Term::K::AbsName || b->k == Term::K::AbsName)
    return a->k == b->k && a->name == b->name;
  // base leaves: concrete or symbolic
  if (a->k == Term::K::Const && b->k == Term::K::Const) {
    if (!const_eq(a->c, b->c)) out.push_back(mk_bool(false));
    return true;
  }
  TermPtr eq = sym_eq(a, b);
  if (eq->k == Term::K::Const && eq->c.b) return true;
  out.push_back(eq);
  return true;
}

bool move_eq_constraint(const Move& a, const Move& b, std::vector<TermPtr>& out) {
  if (a.k != b.k || a.alpha != b.alpha || a.idx != b.idx) return false;
  return value_eq_constraint(a.payload, b.payload, out);
}

bool trace_eq_constraint(const Trace& a, const Trace& b,
                         std::vector<TermPtr>& out) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!move_eq_constraint(a[i], b[i], out)) return false;
  return true;
}

// Structural equality of two proponent values up to base-leaf constraints:
// used by loop detection to recognise a nested call repeating its argument.
// Conservative: mismatched shapes return false (no divergence claim).
bool arg_eq_constraint(const TermPtr& a, const TermPtr& b,
                       std::vector<TermPtr>& out) {
  if (term_eq(a, b)) return true;
  auto base = [](const TermPtr& t) {
    return t->k == Term::K::Const || t->k == Term::K::SymConst ||
           t->k == Term::K::SymTerm;
  };
  if (base(a) && base(b)) {
    TermPtr eq = sym_eq(a, b);
    if (eq->k == Term::K::Const) {
      if (!eq->c.b) out.push_back(mk_bool(false));
      return true;
    }
    out.push_back(eq);
    return true;
  }
  if (a->k != b->k || a->xs.size() != b->xs.size()) return false;
  if (a->name != b->name || a->binders != b->binders) return false;
  if (a->k == Term::K::AbsName) return a->index == b->index;
  for (size_t i = 0; i < a->xs.size(); ++i)
    if (!arg_eq_constraint(a->xs[i], b->xs[i], out)) return false;
  return true;
}

TermPtr conjunction(const std::vector<TermPtr>& cs) {
  if (cs.empty()) return mk_bool(true);
  TermPtr acc = cs[0];
  for (size_t i = 1; i < cs.size(); ++i) acc = sym_prim("&&", {acc, cs[i]});
  return acc;
}

// ---------------------------------------------------------------------------
// One side's run from a proponent configuration to its next top-level barb.

struct SideLeaf {
  enum class K { Returned, Diverged, Bound, Fuel, Unknown };
  K k;
  TermPtr pattern;  // Returned
  Config final_cfg;
  std::vector<TermPtr> sigma;
  Memory M;
  int bound_left = 0;
  std::vector<Trace> touched;
};

struct PendingCall {
  std::string alpha;
  int index;
  TermPtr arg;  // actual argument value, alpha-normalized
};

struct RunState {
  Config cfg;  // cfg.M unused: the shared memory travels separately
  std::vector<TermPtr> sigma;
  Memory M;
  int k;
  std::vector<Trace> touched;
  std::vector<PendingCall> pending;  // call per K frame, for loop detection
  std::set<std::string> called;  // opponent-call skipping, path-local
  long long fuel;
};

void run_side(Ctx& ctx, RunState st, std::vector<SideLeaf>& out);

void leaf_simple(SideLeaf::K k, const RunState& st, std::vector<SideLeaf>& out) {
  SideLeaf l;
  l.k = k;
  l.sigma = st.sigma;
  l.M = st.M;
  l.bound_left = st.k;
  l.touched = st.touched;
  out.push_back(std::move(l));
}

// Applies an opponent return (recorded payload or fresh pattern).
void do_opret(Ctx& ctx, RunState st, const OPat& pat, bool adopt_trace,
              const Trace& adopted, std::vector<SideLeaf>& out) {
  Config& c = st.cfg;
  const KFrame fr = c.K.back();
  Trace base = adopt_trace ? Trace(adopted.begin(), adopted.end() - 1) : c.t;
  Trace t2 = base;
  if (adopt_trace)
    t2 = adopted;
  else
    t2.push_back(Move{Move::K::OpRet, "", 0, pat.value});
  std::vector<std::string> names;
  for (auto& n : pat.names) names.push_back(n->name);
  int j = least_unused_index(c.A, names);
  if (!names.empty()) c.A.push_back({names, j, c.knowledge});
  st.M.add(t2);
  st.touched.push_back(t2);
  c.K.pop_back();
  st.pending.pop_back();
  c.t = fr.resume;
  c.e = plug_ctx(fr.ctx, index_names(pat.value, j));
  c.proponent = true;
  c.knowledge.clear();
  run_side(ctx, std::move(st), out);
}

void do_opcall(Ctx& ctx, RunState st, int i, const OPat& pat, bool adopt_trace,
               const Trace& adopted, bool forced, std::vector<SideLeaf>& out) {
  Config& c = st.cfg;
  if (!forced) {
    if (st.k == 0) {
      leaf_simple(SideLeaf::K::Bound, st, out);
      return;
    }
    --st.k;
  }
  Trace t2;
  if (adopt_trace) {
    t2 = adopted;
  } else {
    t2 = c.t;
    t2.push_back(Move{Move::K::OpApp, "", i, pat.value});
  }
  std::vector<std::string> names;
  for (auto& n : pat.names) names.push_back(n->name);
  int j = least_unused_index(c.A, names);
  TermPtr vi = c.knowledge[i - 1];
  if (!names.empty()) c.A.push_back({names, j, c.knowledge});
  st.M.add(t2);
  st.touched.push_back(t2);
  c.V.push_back(c.knowledge);
  c.t = t2;
  c.e = mk_app(vi, index_names(pat.value, j));
  c.proponent = true;
  c.knowledge.clear();
  run_side(ctx, std::move(st), out);
}

void opponent_free_choices(Ctx& ctx, const RunState& st, std::vector<SideLeaf>& out) {
  const Config& c = st.cfg;
  // Return with the canonical symbolic pattern.
  {
    RunState s2 = st;
    OPat pat = symbolic_pattern(c.K.back().hole_ty, ctx.fresh);
    do_opret(ctx, std::move(s2), pat, false, {}, out);
  }
  // Or call any available proponent function.  Skipping a repeat with
  // unchanged knowledge is a completeness heuristic: the other side's matching
  // value may react differently to the repeat, so a pruned branch can hide a
  // witness (verdict degrades to inconclusive, never to the wrong side).
  for (size_t i = 1; i <= c.knowledge.size(); ++i) {
    TypePtr ty = value_type(c.knowledge[i - 1]);
    if (ty->k != Type::K::Arrow) throw MalformedConfig("non-function knowledge");
    if (ctx.opts.oskip) {
      std::ostringstream key;
      key << show_term(alpha_normalize(c.knowledge[i - 1])) << "#";
      for (auto& v : c.knowledge) key << show_term(alpha_normalize(v)) << ";";
      RunState probe = st;
      if (!probe.called.insert(key.str()).second) {
        ++ctx.stats.oskip_hits;
        continue;
      }
      RunState s2 = std::move(probe);
      OPat pat = symbolic_pattern(ty->dom, ctx.fresh);
      do_opcall(ctx, std::move(s2), static_cast<int>(i), pat, false, {}, false, out);
      continue;
    }
    RunState s2 = st;
    OPat pat = symbolic_pattern(ty->dom, ctx.fresh);
    do_opcall(ctx, std::move(s2), static_cast<int>(i), pat, false, {}, false, out);
  }
}

// Candidate recorded continuations for the current opponent point: recorded
// traces whose prefix matches the side's trace up to σ-equatable base
// leaves. Structural matches are forced outright; σ-contingent matches fork.
void opponent_point(Ctx& ctx, const RunState& st, std::vector<SideLeaf>& out) {
  ctx.tick();
  struct Cand {
    Trace u;
    std::vector<TermPtr> eq;
  };
  std::vector<Cand> cands;
  for (auto& u : st.M.traces) {
    if (u.size() != st.cfg.t.size() + 1) continue;
    std::vector<TermPtr> eq;
    Trace prefix(u.begin(), u.end() - 1);
    if (!trace_eq_constraint(prefix, st.cfg.t, eq)) continue;
    bool has_false = false;
    for (auto& e : eq) has_false = has_false || (e->k == Term::K::Const && !e->c.b);
    if (has_false) continue;
    cands.push_back({u, std::move(eq)});
  }
  // Structural (constraint-free) match: the move is forced.
  for (auto& cd : cands) {
    if (!cd.eq.empty()) continue;
    ++ctx.stats.forced_replays;
    const Move& mv = cd.u.back();
    OPat pat = [&] {
      OPat p;
      p.value = mv.payload;
      std::function<void(const TermPtr&)> visit = [&](const TermPtr& v) {
        if (v->k == Term::K::AbsName) p.names.push_back(v);
        for (auto& x : v->xs) visit(x);
      };
      visit(mv.payload);
      return p;
    }();
    RunState s2 = st;
    if (mv.k == Move::K::OpRet)
      do_opret(ctx, std::move(s2), pat, true, cd.u, out);
    else
      do_opcall(ctx, std::move(s2), mv.idx, pat, true, cd.u, true, out);
    return;
  }
  // σ-contingent candidates: fork on prefix equality.
  std::function<void(size_t, std::vector<TermPtr>)> go =
      [&](size_t idx, std::vector<TermPtr> sigma) {
        if (ctx.found) return;
        if (idx == cands.size()) {
          RunState s2 = st;
          s2.sigma = std::move(sigma);
          opponent_free_choices(ctx, s2, out);
          return;
        }
        auto& cd = cands[idx];
        std::vector<TermPtr> with = sigma;
        with.insert(with.end(), cd.eq.begin(), cd.eq.end());
        SatResult r = ctx.sat(with);
        if (r == SatResult::Unknown) {
          RunState s2 = st;
          s2.sigma = sigma;
          leaf_simple(SideLeaf::K::Unknown, s2, out);
          return;
        }
        if (r == SatResult::Sat) {
          ++ctx.stats.forced_replays;
          const Move& mv = cd.u.back();
          OPat pat;
          pat.value = mv.payload;
          std::function<void(const TermPtr&)> visit = [&](const TermPtr& v) {
            if (v->k == Term::K::AbsName) pat.names.push_back(v);
            for (auto& x : v->xs) visit(x);
          };
          visit(mv.payload);
          RunState s2 = st;
          s2.sigma = with;
          if (mv.k == Move::K::OpRet)
            do_opret(ctx, std::move(s2), pat, true, cd.u, out);
          else
            do_opcall(ctx, std::move(s2), mv.idx, pat, true, cd.u, true, out);
          // Other-side branch: the prefixes differ.
          std::vector<TermPtr> rest = sigma;
          rest.push_back(sym_not(conjunction(cd.eq)));
          SatResult r2 = ctx.sat(rest);
          if (r2 == SatResult::Sat) {
            go(idx + 1, std::move(rest));
          } else if (r2 == SatResult::Unknown) {
            RunState s3 = st;
            s3.sigma = rest;
            leaf_simple(SideLeaf::K::Unknown, s3, out);
          }
          return;
        }
        go(idx + 1, std::move(sigma));
      };
  go(0, st.sigma);
}

struct DepthGuard {
  Ctx& ctx;
  explicit DepthGuard(Ctx& c) : ctx(c) { ++ctx.depth; }
  ~DepthGuard() { --ctx.depth; }
};

void run_side(Ctx& ctx, RunState st, std::vector<SideLeaf>& out) {
  ctx.tick();
  if (ctx.found) return;
  DepthGuard dg(ctx);
  if (ctx.depth > 1000) {
    out.push_back(SideLeaf{SideLeaf::K::Fuel});
    return;
  }
  Config& c = st.cfg;
  if (!c.proponent) {
    opponent_point(ctx, st, out);
    return;
  }
  // τ-loop detection by expression repetition within this segment.
  std::unordered_map<size_t, std::vector<TermPtr>> seen;
  for (;;) {
    if (--st.fuel <= 0) {
      ctx.saw_fuel = true;
      leaf_simple(SideLeaf::K::Fuel, st, out);
      return;
    }
    Step s = step(c.e);
    switch (s.k) {
      case Step::K::Stepped: {
        auto& bucket = seen[term_hash(s.term)];
        for (auto& prev : bucket)
          if (term_eq(prev, s.term)) {
            leaf_simple(SideLeaf::K::Diverged, st, out);
            return;
          }
        if (bucket.size() < 8) bucket.push_back(s.term);
        c.e = s.term;
        continue;
      }
      case Step::K::Stuck:
        leaf_simple(SideLeaf::K::Diverged, st, out);
        return;
      case Step::K::Branch: {
        for (auto& [guard, cont] :
             {std::pair<TermPtr, TermPtr>{s.guard, s.thn},
              std::pair<TermPtr, TermPtr>{sym_not(s.guard), s.els}}) {
          std::vector<TermPtr> sigma2 = st.sigma;
          sigma2.push_back(guard);
          SatResult r = ctx.sat(sigma2);
          if (r == SatResult::Unsat) continue;
          RunState s2 = st;
          s2.sigma = std::move(sigma2);
          s2.cfg.e = plug_ctx(s.ctx, cont);
          if (r == SatResult::Unknown) {
            leaf_simple(SideLeaf::K::Unknown, s2, out);
            continue;
          }
          run_side(ctx, std::move(s2), out);
        }
        return;
      }
      case Step::K::AbsCall: {
        if (s.alpha->index < 0)
          throw MalformedConfig("call to unindexed abstract name");
        const AEntry* entry = lookup_name(c, s.alpha->name, s.alpha->index);
        if (!entry)
          throw MalformedConfig("unregistered abstract name " + s.alpha->name);
        UPat up = ulpatt(s.arg);
        Move mv{Move::K::PropApp, s.alpha->name, 0, up.pattern};
        // Nested call of the same abstract function on a σ-equal argument:
        // the memory forces the opponent to repeat its recorded replies, so
        // the interaction regresses forever.
        TermPtr norm_arg = alpha_normalize(s.arg);
        if (ctx.opts.loopdetect) {
          for (auto& pc : st.pending) {
            if (pc.alpha != s.alpha->name || pc.index != s.alpha->index)
              continue;
            std::vector<TermPtr> eq;
            if (!arg_eq_constraint(pc.arg, norm_arg, eq)) continue;
            bool has_false = false;
            for (auto& e : eq)
              has_false = has_false || (e->k == Term::K::Const && !e->c.b);
            if (has_false) continue;
            if (eq.empty() ||
                ctx.entailed(st.sigma, conjunction(eq)) == SatResult::Sat) {
              ++ctx.stats.loop_skips;
              leaf_simple(SideLeaf::K::Diverged, st, out);
              return;
            }
          }
        }
        Trace t2{mv};
        bool determined = ctx.opts.pcache && st.M.next(t2).has_value();
        if (!determined) {
          if (st.k == 0) {
            leaf_simple(SideLeaf::K::Bound, st, out);
            return;
          }
          --st.k;
        }
        st.M.add(t2);
        st.touched.push_back(t2);
        c.K.push_back({c.t, s.ctx, s.alpha->ty ? s.alpha->ty->cod : nullptr});
        st.pending.push_back({s.alpha->name, s.alpha->index, norm_arg});
        c.t = t2;
        c.proponent = false;
        c.knowledge = entry->knowledge;
        c.knowledge.insert(c.knowledge.end(), up.fns.begin(), up.fns.end());
        c.e = nullptr;
        opponent_point(ctx, st, out);
        return;
      }
      case Step::K::Value: {
        UPat up = ulpatt(c.e);
        if (c.K.empty()) {
          SideLeaf l;
          l.k = SideLeaf::K::Returned;
          l.pattern = up.pattern;
          Config fin = c;
          fin.proponent = false;
          fin.t.clear();
          fin.V.clear();
          fin.e = nullptr;
          fin.knowledge = up.fns;
          l.final_cfg = std::move(fin);
          l.sigma = st.sigma;
          l.M = st.M;
          l.bound_left = st.k;
          l.touched = st.touched;
          out.push_back(std::move(l));
          return;
        }
        if (c.V.empty()) throw MalformedConfig("inner return with empty V");
        Move mv{Move::K::PropRet, "", 0, up.pattern};
        Trace t2 = c.t;
        t2.push_back(mv);
        st.M.add(t2);
        st.touched.push_back(t2);
        c.t = t2;
        c.knowledge = c.V.back();
        c.V.pop_back();
        c.knowledge.insert(c.knowledge.end(), up.fns.begin(), up.fns.end());
        c.proponent = false;
        c.e = nullptr;
        opponent_point(ctx, st, out);
        return;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Pair exploration.

struct PairState {
  Config c1, c2;  // final configurations
  std::vector<TermPtr> sigma;
  Memory M;
  int k;
  Trace witness;
  std::vector<Trace> proj1, proj2;
  std::set<std::string> challenged;  // pair-level opponent-call skipping
};

// Renames `$name` and `%sym` tokens by first occurrence.
std::string normalize_key_impl(const std::string& raw) {
  std::map<std::string, std::string> ren;
  int nn = 0, ns = 0;
  std::string out;
  for (size_t i = 0; i < raw.size();) {
    char c = raw[i];
    if (c == '$' || c == '%') {
      size_t j = i + 1;
      while (j < raw.size() && (std::isalnum(static_cast<unsigned char>(raw[j])) ||
                                raw[j] == '_' || raw[j] == '^'))
        ++j;
      std::string name = raw.substr(i, j - i);
      auto it = ren.find(name);
      if (it == ren.end()) {
        std::string fresh = c == '$' ? "$n" + std::to_string(++nn)
                                     : "%s" + std::to_string(++ns);
        it = ren.emplace(name, fresh).first;
      }
      out += it->second;
      i = j;
    } else {
      out += raw[i++];
    }
  }
  return out;
}

void serialize_side(const Config& c, std::ostringstream& os) {
  os << "K:";
  for (auto& v : c.knowledge) os << show_term(alpha_normalize(v)) << ";";
  os << "A:";
  for (auto& g : c.A) {
    for (auto& n : g.names) os << "$" << n << "^" << g.j << ",";
    os << "=";
    for (auto& v : g.knowledge) os << show_term(alpha_normalize(v)) << ";";
    os << "|";
  }
}

std::string live_sigma_serialized(const PairState& ps) {
  // Keep only constraints connected to symbolic constants that still occur
  // in the configurations or projections.
  std::set<std::string> live;
  auto note = [&](const TermPtr& v) {
    std::map<std::string, TypePtr> m;
    collect_symconsts(v, m);
    for (auto& [n, _] : m) live.insert(n);
  };
  for (auto* c : {&ps.c1, &ps.c2}) {
    for (auto& v : c->knowledge) note(v);
    for (auto& g : c->A)
      for (auto& v : g.knowledge) note(v);
  }
  for (auto* pj : {&ps.proj1, &ps.proj2})
    for (auto& t : *pj)
      for (auto& m : t) note(m.payload);
  std::vector<std::pair<std::set<std::string>, TermPtr>> cs;
  for (auto& c : ps.sigma) {
    std::map<std::string, TypePtr> m;
    collect_symconsts(c, m);
    std::set<std::string> names;
    for (auto& [n, _] : m) names.insert(n);
    cs.push_back({std::move(names), c});
  }
  // Fixpoint: a constraint sharing a name with the live set makes all its
  // names live.
  bool changed = true;
  std::vector<bool> kept(cs.size(), false);
  while (changed) {
    changed = false;
    for (size_t i = 0; i < cs.size(); ++i) {
      if (kept[i]) continue;
      bool touches = false;
      for (auto& n : cs[i].first) touches = touches || live.count(n);
      if (touches) {
        kept[i] = true;
        changed = true;
        for (auto& n : cs[i].first) live.insert(n);
      }
    }
  }
  std::vector<std::string> lines;
  for (size_t i = 0; i < cs.size(); ++i)
    if (kept[i]) lines.push_back(show_term(cs[i].second));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (auto& l : lines) out += l + "&";
  return out;
}

std::string pair_key(const PairState& ps, bool normalise) {
  std::ostringstream os;
  serialize_side(ps.c1, os);
  os << "##";
  serialize_side(ps.c2, os);
  os << "##S:" << live_sigma_serialized(ps);
  os << "##M:";
  std::vector<std::string> lines;
  for (auto& t : ps.M.maximal()) lines.push_back(show_trace(t));
  std::sort(lines.begin(), lines.end());
  for (auto& l : lines) os << l << "\n";
  std::string raw = os.str();
  return normalise ? normalize_key_impl(raw) : raw;
}

// Memory reconciliation at a final pair: the per-side projections must have
// σ-equal prefix closures.
enum class MemCmp { Equal, Mismatch, Unknown };

MemCmp memories_match(Ctx& ctx, const PairState& ps) {
  Memory m1, m2;
  for (auto& t : ps.proj1) m1.add(t);
  for (auto& t : ps.proj2) m2.add(t);
  auto covers = [&](const std::vector<Trace>& from, Memory& into) -> MemCmp {
    for (auto& t : from) {
      bool matched = false;
      bool unknown = false;
      for (auto& u : into.traces) {
        std::vector<TermPtr> eq;
        if (u.size() != t.size()) continue;
        if (!trace_eq_constraint(t, u, eq)) continue;
        if (eq.empty()) {
          matched = true;
          break;
        }
        SatResult r = ctx.entailed(ps.sigma, conjunction(eq));
        if (r == SatResult::Sat) {
          matched = true;
          break;
        }
        if (r == SatResult::Unknown) unknown = true;
      }
      if (!matched) return unknown ? MemCmp::Unknown : MemCmp::Mismatch;
    }
    return MemCmp::Equal;
  };
  MemCmp a = covers(m1.maximal(), m2);
  if (a != MemCmp::Equal) return a;
  return covers(m2.maximal(), m1);
}

void report_inequivalent(Ctx& ctx, const Trace& witness,
                         const std::vector<TermPtr>& sigma) {
  if (ctx.found) return;
  FoundInequivalence f;
  f.witness = witness;
  auto a = ctx.solver.satisfiable(sigma);
  ctx.stats.solver_queries = ctx.solver.queries;
  if (a.res == SatResult::Sat) {
    f.model = a.model;
  } else if (a.res == SatResult::Unknown) {
    // The path was kept on a Sat answer earlier; failing to re-derive a
    // model downgrades the verdict.
    ctx.saw_unknown = true;
    return;
  }
  ctx.found = std::move(f);
}

void expand_pair(Ctx& ctx, PairState ps);

// Runs both sides from proponent configurations and matches the outcomes.
void run_and_match(Ctx& ctx, const Config& p1, const Config& p2, PairState ps) {
  ctx.tick();
  std::vector<SideLeaf> leaves1;
  run_side(ctx, RunState{p1, ps.sigma, ps.M, ps.k, {}, {}, {}, ctx.opts.tau_fuel},
           leaves1);
  for (auto& l1 : leaves1) {
    if (ctx.found) return;
    switch (l1.k) {
      case SideLeaf::K::Bound: ctx.saw_bound = true; continue;
      case SideLeaf::K::Fuel: ctx.saw_fuel = true; continue;
      case SideLeaf::K::Unknown: ctx.saw_unknown = true; continue;
      default: break;
    }
    std::vector<SideLeaf> leaves2;
    run_side(ctx,
             RunState{p2, l1.sigma, l1.M, ps.k, {}, {}, {}, ctx.opts.tau_fuel},
             leaves2);
    for (auto& l2 : leaves2) {
      if (ctx.found) return;
      switch (l2.k) {
        case SideLeaf::K::Bound: ctx.saw_bound = true; continue;
        case SideLeaf::K::Fuel: ctx.saw_fuel = true; continue;
        case SideLeaf::K::Unknown: ctx.saw_unknown = true; continue;
        default: break;
      }
      if (l1.k == SideLeaf::K::Diverged && l2.k == SideLeaf::K::Diverged)
        continue;  // both sides diverge under this opponent behaviour
      if (l1.k != l2.k) {
        Trace w = ps.witness;
        if (l1.k == SideLeaf::K::Returned)
          w.push_back(Move{Move::K::PropRet, "", 0, l1.pattern});
        else
          w.push_back(Move{Move::K::PropRet, "", 0, l2.pattern});
        report_inequivalent(ctx, w, l2.sigma);
        if (ctx.found) return;
        continue;
      }
      // Both returned: patterns must agree under σ.
      std::vector<TermPtr> eq;
      if (!value_eq_constraint(l1.pattern, l2.pattern, eq)) {
        Trace w = ps.witness;
        w.push_back(Move{Move::K::PropRet, "", 0, l1.pattern});
        report_inequivalent(ctx, w, l2.sigma);
        if (ctx.found) return;
        continue;
      }
      std::vector<TermPtr> sigma2 = l2.sigma;
      if (!eq.empty()) {
        SatResult ent = ctx.entailed(l2.sigma, conjunction(eq));
        if (ent == SatResult::Unknown) {
          ctx.saw_unknown = true;
          continue;
        }
        if (ent == SatResult::Unsat) {
          // Some model separates the returned values.
          std::vector<TermPtr> sep = l2.sigma;
          sep.push_back(sym_not(conjunction(eq)));
          Trace w = ps.witness;
          w.push_back(Move{Move::K::PropRet, "", 0, l1.pattern});
          report_inequivalent(ctx, w, sep);
          if (ctx.found) return;
          continue;
        }
        sigma2.insert(sigma2.end(), eq.begin(), eq.end());
      }
      PairState next;
      next.c1 = l1.final_cfg;
      next.c2 = l2.final_cfg;
      next.sigma = std::move(sigma2);
      next.M = l2.M;
      next.k = std::min(l1.bound_left, l2.bound_left);
      next.witness = ps.witness;
      next.witness.push_back(Move{Move::K::PropRet, "", 0, l1.pattern});
      next.proj1 = ps.proj1;
      next.proj1.insert(next.proj1.end(), l1.touched.begin(), l1.touched.end());
      next.proj2 = ps.proj2;
      next.proj2.insert(next.proj2.end(), l2.touched.begin(), l2.touched.end());
      next.challenged = ps.challenged;
      expand_pair(ctx, std::move(next));
      if (ctx.found) return;
    }
  }
}

Config apply_challenge(const Config& fin, int i, const OPat& pat) {
  Config c = fin;
  c.proponent = true;
  std::vector<std::string> names;
  for (auto& n : pat.names) names.push_back(n->name);
  int j = least_unused_index(c.A, names);
  if (!names.empty()) c.A.push_back({names, j, {}});
  c.e = mk_app(fin.knowledge[i - 1], index_names(pat.value, j));
  c.t.clear();
  c.V.clear();
  c.knowledge.clear();
  return c;
}

void expand_pair(Ctx& ctx, PairState ps) {
  ctx.tick();
  if (ctx.found) return;
  ++ctx.stats.pairs;

  switch (memories_match(ctx, ps)) {
    case MemCmp::Mismatch:
      report_inequivalent(ctx, ps.witness, ps.sigma);
      return;
    case MemCmp::Unknown:
      ctx.saw_unknown = true;
      break;
    case MemCmp::Equal:
      break;
  }

  if (ps.c1.knowledge.size() != ps.c2.knowledge.size())
    throw MalformedConfig("mismatched knowledge arity after matched patterns");

  if (ctx.opts.identity) {
    std::ostringstream s1, s2;
    serialize_side(ps.c1, s1);
    serialize_side(ps.c2, s2);
    if (s1.str() == s2.str()) {
      Memory m1, m2;
      for (auto& t : ps.proj1) m1.add(t);
      for (auto& t : ps.proj2) m2.add(t);
      if (m1 == m2) {
        ++ctx.stats.identity_hits;
        return;
      }
    }
  }

  std::string key = pair_key(ps, ctx.opts.normalise);
  if (ctx.opts.memo) {
    auto it = ctx.memo.find(key);
    if (it != ctx.memo.end() && it->second >= ps.k) {
      ++ctx.stats.memo_hits;
      return;
    }
  }

  if (ps.c1.knowledge.empty()) {
    if (ctx.opts.memo) ctx.memo[key] = std::max(ctx.memo[key], ps.k);
    return;  // nothing for the opponent to do
  }
  if (ps.k == 0) {
    ctx.saw_bound = true;
    return;
  }

  for (size_t i = 1; i <= ps.c1.knowledge.size(); ++i) {
    if (ctx.found) return;
    TypePtr t1 = value_type(ps.c1.knowledge[i - 1]);
    TypePtr t2 = value_type(ps.c2.knowledge[i - 1]);
    if (t1->k != Type::K::Arrow || !type_eq(t1, t2))
      throw MalformedConfig("knowledge type mismatch after matched patterns");
    if (ctx.opts.oskip) {
      std::ostringstream keyo;
      keyo << show_term(alpha_normalize(ps.c1.knowledge[i - 1])) << "~"
           << show_term(alpha_normalize(ps.c2.knowledge[i - 1])) << "#";
      for (auto& v : ps.c1.knowledge) keyo << show_term(alpha_normalize(v)) << ";";
      for (auto& v : ps.c2.knowledge) keyo << show_term(alpha_normalize(v)) << ";";
      if (!ps.challenged.insert(normalize_key_impl(keyo.str())).second) {
        ++ctx.stats.oskip_hits;
        continue;
      }
    }
    ++ctx.stats.challenges;
    OPat pat = symbolic_pattern(t1->dom, ctx.fresh);
    PairState sub = ps;
    sub.k = ps.k - 1;
    sub.witness.push_back(Move{Move::K::OpApp, "", static_cast<int>(i), pat.value});
    Config p1 = apply_challenge(ps.c1, static_cast<int>(i), pat);
    Config p2 = apply_challenge(ps.c2, static_cast<int>(i), pat);
    run_and_match(ctx, p1, p2, sub);
  }
  if (ctx.opts.memo && !ctx.found)
    ctx.memo[key] = std::max(ctx.memo[key], ps.k);
}

}  // namespace

std::string normalize_pair_key(const std::string& raw) {
  return normalize_key_impl(raw);
}

std::string show_verdict_line(const Verdict& v) {
  switch (v.v) {
    case Verdict::V::Equivalent: return "EQUIVALENT";
    case Verdict::V::Inequivalent: return "INEQUIVALENT";
    case Verdict::V::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

Verdict check(const TermPtr& e1, const TermPtr& e2, const CheckOpts& opts) {
  Typed t1 = typecheck(e1);
  Typed t2 = typecheck(e2);
  if (!type_eq(t1.type, t2.type))
    throw TypeError("compared expressions have different types: " +
                    show_type(t1.type) + " vs " + show_type(t2.type));

  Ctx ctx;
  ctx.opts = opts;
  ctx.solver.smtlib_path = opts.smtlib_path;
  if (opts.timeout_ms > 0) {
    ctx.has_deadline = true;
    ctx.deadline = Clock::now() + std::chrono::milliseconds(opts.timeout_ms);
  }

  Verdict v;
  try {
    PairState root;
    root.k = opts.bound;
    run_and_match(ctx, initial_config(t1.term), initial_config(t2.term), root);
  } catch (TimeoutExc&) {
    v.v = Verdict::V::Inconclusive;
    v.reason = "timeout";
    v.stats = ctx.stats;
    return v;
  }

  v.stats = ctx.stats;
  if (ctx.found) {
    v.v = Verdict::V::Inequivalent;
    v.witness = ctx.found->witness;
    v.model = ctx.found->model;
  } else if (ctx.saw_unknown) {
    v.v = Verdict::V::Inconclusive;
    v.reason = "solver";
  } else if (ctx.saw_fuel) {
    v.v = Verdict::V::Inconclusive;
    v.reason = "fuel";
  } else if (ctx.saw_bound) {
    v.v = Verdict::V::Inconclusive;
    v.reason = "bound";
  } else {
    v.v = Verdict::V::Equivalent;
  }
  return v;
}

}  // namespace nfb
