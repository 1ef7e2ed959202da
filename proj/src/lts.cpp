#include "nfb/lts.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nfb/reduce.hpp"
#include "nfb/symbolic.hpp"

namespace nfb {

bool move_proponent(const Move& m) {
  return m.k == Move::K::PropApp || m.k == Move::K::PropRet;
}

bool move_eq(const Move& a, const Move& b) {
  return a.k == b.k && a.alpha == b.alpha && a.idx == b.idx &&
         term_eq(a.payload, b.payload);
}

std::string show_move(const Move& m) {
  switch (m.k) {
    case Move::K::PropApp: return "pq " + m.alpha + " (" + show_term(m.payload) + ")";
    case Move::K::PropRet: return "pa (" + show_term(m.payload) + ")";
    case Move::K::OpApp:
      return "oq " + std::to_string(m.idx) + " (" + show_term(m.payload) + ")";
    case Move::K::OpRet: return "oa (" + show_term(m.payload) + ")";
  }
  return "?";
}

bool trace_eq(const Trace& a, const Trace& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!move_eq(a[i], b[i])) return false;
  return true;
}

std::string show_trace(const Trace& t) {
  std::string s;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) s += " . ";
    s += show_move(t[i]);
  }
  return s;
}

namespace {

void payload_names(const TermPtr& v, std::vector<std::string>& out) {
  if (v->k == Term::K::AbsName) {
    out.push_back(v->name);
    return;
  }
  for (auto& x : v->xs) payload_names(x, out);
}

}  // namespace

std::vector<std::string> move_introductions(const Move& m) {
  std::vector<std::string> out;
  if (m.k == Move::K::OpApp || m.k == Move::K::OpRet)
    payload_names(m.payload, out);
  return out;
}

bool Memory::contains(const Trace& t) const {
  for (auto& u : traces)
    if (trace_eq(u, t)) return true;
  return false;
}

void Memory::add(const Trace& t) {
  for (size_t len = 1; len <= t.size(); ++len) {
    Trace prefix(t.begin(), t.begin() + len);
    if (!contains(prefix)) traces.push_back(std::move(prefix));
  }
}

std::vector<Move> Memory::next_all(const Trace& t) const {
  std::vector<Move> out;
  for (auto& u : traces) {
    if (u.size() != t.size() + 1) continue;
    if (!trace_eq(Trace(u.begin(), u.end() - 1), t)) continue;
    bool dup = false;
    for (auto& m : out) dup = dup || move_eq(m, u.back());
    if (!dup) out.push_back(u.back());
  }
  return out;
}

std::optional<Move> Memory::next(const Trace& t) const {
  auto all = next_all(t);
  if (all.empty()) return std::nullopt;
  return all.front();
}

std::vector<Trace> Memory::maximal() const {
  std::vector<Trace> out;
  for (auto& u : traces) {
    bool extended = false;
    for (auto& w : traces)
      if (w.size() == u.size() + 1 && trace_eq(Trace(w.begin(), w.end() - 1), u))
        extended = true;
    if (!extended) out.push_back(u);
  }
  return out;
}

bool Memory::operator==(const Memory& o) const {
  for (auto& t : traces)
    if (!o.contains(t)) return false;
  for (auto& t : o.traces)
    if (!contains(t)) return false;
  return true;
}

bool is_legal(const Memory& m) {
  for (auto& t : m.traces) {
    if (!t.empty() && move_proponent(t.back())) {
      if (m.next_all(t).size() > 1) return false;
    }
  }
  // Each abstract name has a unique introduction context.
  std::map<std::string, std::set<std::string>> intro;
  for (auto& t : m.traces) {
    std::string prefix;
    for (auto& mv : t) {
      prefix += show_move(mv) + "|";
      for (auto& n : move_introductions(mv)) intro[n].insert(prefix);
    }
  }
  for (auto& [n, ctxs] : intro)
    if (ctxs.size() > 1) return false;
  return true;
}

std::string show_memory(const Memory& m) {
  std::vector<std::string> lines;
  for (auto& t : m.maximal()) lines.push_back(show_trace(t));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (auto& l : lines) out += l + "\n";
  return out;
}

Config initial_config(const TermPtr& e) {
  if (!is_closed(e)) throw MalformedConfig("initial_config: term is not closed");
  Config c;
  c.proponent = true;
  c.e = e;
  return c;
}

const AEntry* lookup_name(const Config& c, const std::string& base, int j) {
  for (auto& g : c.A) {
    if (g.j != j) continue;
    for (auto& n : g.names)
      if (n == base) return &g;
  }
  return nullptr;
}

int least_unused_index(const std::vector<AEntry>& A,
                       const std::vector<std::string>& names) {
  std::set<int> used;
  for (auto& g : A)
    for (auto& n : g.names)
      for (auto& m : names)
        if (n == m) used.insert(g.j);
  int j = 0;
  while (used.count(j)) ++j;
  return j;
}

namespace {

// Opponent pattern choices for a type under the mode.
std::vector<OPat> opponent_patterns(const TypePtr& ty, NameSupply& fresh,
                                    const Mode& mode) {
  if (mode.symbolic) return {symbolic_pattern(ty, fresh)};
  return enumerate_patterns(ty, mode.base_ints, fresh);
}

// Reconstructs an OPat view of a forced (recorded) move payload: names and
// symbolic constants are reused verbatim.
void collect_absnames(const TermPtr& v, std::vector<TermPtr>& out) {
  if (v->k == Term::K::AbsName) out.push_back(v);
  for (auto& x : v->xs) collect_absnames(x, out);
}

OPat replay_pattern(const TermPtr& payload) {
  OPat p;
  p.value = payload;
  collect_absnames(payload, p.names);
  return p;
}

std::vector<std::string> opat_names(const OPat& p) {
  std::vector<std::string> out;
  for (auto& n : p.names) out.push_back(n->name);
  return out;
}

// Shared tail of OpRet: pops the continuation and resumes the proponent.
TransResult apply_opret(const Config& c, const OPat& pat, bool forced) {
  const KFrame& fr = c.K.back();
  Trace t2 = c.t;
  Move mv{Move::K::OpRet, "", 0, pat.value};
  t2.push_back(mv);
  Config n = c;
  n.proponent = true;
  int j = least_unused_index(c.A, opat_names(pat));
  AEntry entry{opat_names(pat), j, c.knowledge};
  if (!entry.names.empty()) n.A.push_back(entry);
  n.M.add(t2);
  n.K.pop_back();
  n.t = fr.resume;
  n.e = plug_ctx(fr.ctx, index_names(pat.value, j));
  n.knowledge.clear();
  TransResult r;
  r.next = std::move(n);
  r.added_traces = {t2};
  r.forced = forced;
  if (!forced)
    for (auto& s : pat.syms) r.new_syms.push_back(s);
  return r;
}

TransResult apply_opcall(const Config& c, int i, const OPat& pat, bool forced) {
  const TermPtr& vi = c.knowledge[i - 1];
  Trace t2 = c.t;
  Move mv{Move::K::OpApp, "", i, pat.value};
  t2.push_back(mv);
  Config n = c;
  n.proponent = true;
  int j = least_unused_index(c.A, opat_names(pat));
  AEntry entry{opat_names(pat), j, c.knowledge};
  if (!entry.names.empty()) n.A.push_back(entry);
  n.M.add(t2);
  n.t = t2;
  n.e = mk_app(vi, index_names(pat.value, j));
  n.V.push_back(c.knowledge);
  n.knowledge.clear();
  TransResult r;
  r.next = std::move(n);
  r.added_traces = {t2};
  r.forced = forced;
  if (!forced)
    for (auto& s : pat.syms) r.new_syms.push_back(s);
  return r;
}

std::vector<TransResult> proponent_transitions(const Config& c, const Mode& mode) {
  std::vector<TransResult> out;
  Step s = step(c.e);
  switch (s.k) {
    case Step::K::Stepped: {
      TransResult r;
      r.next = c;
      r.next.e = s.term;
      out.push_back(std::move(r));
      return out;
    }
    case Step::K::Stuck:
      return out;  // dead end; read as divergence
    case Step::K::Branch: {
      if (!mode.symbolic)
        throw MalformedConfig("symbolic branch in concrete mode");
      TransResult thn, els;
      thn.next = c;
      thn.next.e = plug_ctx(s.ctx, s.thn);
      thn.constraints = {s.guard};
      els.next = c;
      els.next.e = plug_ctx(s.ctx, s.els);
      els.constraints = {sym_not(s.guard)};
      out.push_back(std::move(thn));
      out.push_back(std::move(els));
      return out;
    }
    case Step::K::AbsCall: {
      // PropCall
      if (s.alpha->index < 0)
        throw MalformedConfig("call to unindexed abstract name");
      const AEntry* entry = lookup_name(c, s.alpha->name, s.alpha->index);
      if (!entry) throw MalformedConfig("call to unregistered abstract name " +
                                        s.alpha->name);
      UPat up = ulpatt(s.arg);
      Move mv{Move::K::PropApp, s.alpha->name, 0, up.pattern};
      Trace t2{mv};
      TransResult r;
      r.next = c;
      r.next.proponent = false;
      r.next.M.add(t2);
      r.next.K.push_back({c.t, s.ctx, s.alpha->ty ? s.alpha->ty->cod : nullptr});
      r.next.t = t2;
      r.next.e = nullptr;
      r.next.knowledge = entry->knowledge;
      r.next.knowledge.insert(r.next.knowledge.end(), up.fns.begin(), up.fns.end());
      r.added_traces = {t2};
      out.push_back(std::move(r));
      return out;
    }
    case Step::K::Value: {
      UPat up = ulpatt(c.e);
      if (c.K.empty()) {
        // PropRetBarb: knowledge and trace are dropped at top level.
        TransResult r;
        r.label = Move{Move::K::PropRet, "", 0, up.pattern};
        r.next = c;
        r.next.proponent = false;
        r.next.t.clear();
        r.next.V.clear();
        r.next.e = nullptr;
        r.next.knowledge = up.fns;
        out.push_back(std::move(r));
        return out;
      }
      // PropRet (inner): τ, extends M, pops one V frame.
      if (c.V.empty()) throw MalformedConfig("inner return with empty V stack");
      Move mv{Move::K::PropRet, "", 0, up.pattern};
      Trace t2 = c.t;
      t2.push_back(mv);
      TransResult r;
      r.next = c;
      r.next.proponent = false;
      r.next.M.add(t2);
      r.next.t = t2;
      r.next.e = nullptr;
      r.next.knowledge = c.V.back();
      r.next.V.pop_back();
      r.next.knowledge.insert(r.next.knowledge.end(), up.fns.begin(), up.fns.end());
      r.added_traces = {t2};
      out.push_back(std::move(r));
      return out;
    }
  }
  return out;
}

std::vector<TransResult> opponent_transitions(const Config& c, NameSupply& fresh,
                                              const Mode& mode) {
  std::vector<TransResult> out;
  if (c.K.empty()) {
    // OpCallBarb: free choice of callee and argument pattern; fresh names
    // are registered at index 0 with empty knowledge.
    if (!c.t.empty() || !c.V.empty())
      throw MalformedConfig("final configuration with residual trace or V");
    for (size_t i = 1; i <= c.knowledge.size(); ++i) {
      TypePtr ty = value_type(c.knowledge[i - 1]);
      if (ty->k != Type::K::Arrow) throw MalformedConfig("non-function knowledge");
      for (auto& pat : opponent_patterns(ty->dom, fresh, mode)) {
        Config n = c;
        n.proponent = true;
        if (!pat.names.empty()) n.A.push_back({opat_names(pat), 0, {}});
        n.e = mk_app(c.knowledge[i - 1], index_names(pat.value, 0));
        n.knowledge.clear();
        TransResult r;
        r.label = Move{Move::K::OpApp, "", static_cast<int>(i), pat.value};
        r.next = std::move(n);
        for (auto& s : pat.syms) r.new_syms.push_back(s);
        out.push_back(std::move(r));
      }
    }
    return out;
  }
  // Inner level: forced by the memory when the trace has been seen before.
  if (auto forced = c.M.next(c.t)) {
    OPat pat = replay_pattern(forced->payload);
    if (forced->k == Move::K::OpRet) {
      out.push_back(apply_opret(c, pat, true));
    } else if (forced->k == Move::K::OpApp) {
      out.push_back(apply_opcall(c, forced->idx, pat, true));
    }
    return out;
  }
  // Free choices: return, or call any known proponent function.
  const KFrame& fr = c.K.back();
  if (!fr.hole_ty) throw MalformedConfig("continuation without a hole type");
  for (auto& pat : opponent_patterns(fr.hole_ty, fresh, mode))
    out.push_back(apply_opret(c, pat, false));
  for (size_t i = 1; i <= c.knowledge.size(); ++i) {
    TypePtr ty = value_type(c.knowledge[i - 1]);
    if (ty->k != Type::K::Arrow) throw MalformedConfig("non-function knowledge");
    for (auto& pat : opponent_patterns(ty->dom, fresh, mode))
      out.push_back(apply_opcall(c, static_cast<int>(i), pat, false));
  }
  return out;
}

}  // namespace

std::vector<TransResult> transitions(const Config& c, NameSupply& fresh,
                                     const Mode& mode) {
  return c.proponent ? proponent_transitions(c, mode)
                     : opponent_transitions(c, fresh, mode);
}

std::vector<BigStep> big_step(const Config& c, NameSupply& fresh, const Mode& mode,
                              int fuel) {
  std::vector<BigStep> out;
  struct Item {
    Config cfg;
    std::vector<TermPtr> constraints;
    int fuel;
  };
  std::vector<Item> stack{{c, {}, fuel}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    if (it.fuel <= 0) {
      BigStep b;
      b.fuel_exhausted = true;
      b.next = it.cfg;
      b.constraints = it.constraints;
      out.push_back(std::move(b));
      continue;
    }
    for (auto& tr : transitions(it.cfg, fresh, mode)) {
      std::vector<TermPtr> cs = it.constraints;
      cs.insert(cs.end(), tr.constraints.begin(), tr.constraints.end());
      if (tr.label) {
        out.push_back({*tr.label, tr.next, cs, false});
      } else {
        stack.push_back({tr.next, std::move(cs), it.fuel - 1});
      }
    }
  }
  return out;
}

namespace {

// Greedy canonical renaming of abstract names in a block of serialized
// trace lines: resolve names in order of appearance in the visible trace,
// then repeatedly from the lexicographically least unresolved line.
std::string canonicalize_names(const std::string& visible,
                               std::vector<std::string> lines) {
  std::map<std::string, std::string> ren;
  int next = 0;
  auto rename_in = [&](const std::string& s) {
    std::string out;
    for (size_t i = 0; i < s.size();) {
      if (s[i] == '$') {
        size_t j = i + 1;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                                s[j] == '_'))
          ++j;
        std::string name = s.substr(i, j - i);
        auto it = ren.find(name);
        out += it == ren.end() ? name : it->second;
        i = j;
      } else {
        out += s[i++];
      }
    }
    return out;
  };
  auto assign_all = [&](const std::string& s) {
    for (size_t i = 0; i < s.size();) {
      if (s[i] == '$') {
        size_t j = i + 1;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                                s[j] == '_'))
          ++j;
        std::string name = s.substr(i, j - i);
        if (!ren.count(name)) ren[name] = "$n" + std::to_string(++next);
        i = j;
      } else {
        ++i;
      }
    }
  };
  assign_all(visible);
  for (;;) {
    std::vector<std::string> partial;
    for (auto& l : lines) partial.push_back(rename_in(l));
    std::sort(partial.begin(), partial.end());
    bool open = false;
    // find the least line still containing an unmapped name
    std::string pick;
    for (auto& l : partial) {
      bool unmapped = false;
      for (size_t i = 0; i < l.size();) {
        if (l[i] == '$') {
          size_t j = i + 1;
          while (j < l.size() && (std::isalnum(static_cast<unsigned char>(l[j])) ||
                                  l[j] == '_'))
            ++j;
          if (l.compare(i, 2, "$n") != 0) unmapped = true;
          i = j;
        } else {
          ++i;
        }
      }
      if (unmapped) {
        pick = l;
        open = true;
        break;
      }
    }
    if (!open) {
      std::string out = rename_in(visible) + "\n";
      for (auto& l : partial) out += l + "\n";
      return out;
    }
    assign_all(pick);
  }
}

}  // namespace

std::vector<std::string> semantics(const TermPtr& e, int depth, const Mode& mode) {
  struct Node {
    Config cfg;
    Trace visible;
    int depth;
  };
  NameSupply fresh;
  std::set<std::string> results;
  std::vector<Node> stack{{initial_config(e), {}, depth}};
  while (!stack.empty()) {
    Node nd = std::move(stack.back());
    stack.pop_back();
    if (nd.cfg.final_config()) {
      std::vector<std::string> lines;
      for (auto& t : nd.cfg.M.maximal()) lines.push_back(show_trace(t));
      results.insert(canonicalize_names(show_trace(nd.visible), lines));
      if (nd.depth <= 0) continue;
    }
    if (nd.depth <= 0) continue;
    for (auto& b : big_step(nd.cfg, fresh, mode)) {
      if (b.fuel_exhausted) continue;
      Trace vis = nd.visible;
      vis.push_back(b.label);
      stack.push_back({b.next, std::move(vis), nd.depth - 1});
    }
  }
  return {results.begin(), results.end()};
}

}  // namespace nfb
