#include "nfb/game.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nfb/reduce.hpp"

namespace nfb {

bool gmove_proponent(const GMove& m) {
  return m.k == GMove::K::PropApp || m.k == GMove::K::PropRet;
}

std::string show_gmove(const GMove& m) {
  std::ostringstream out;
  switch (m.k) {
    case GMove::K::PropApp: out << "pq " << m.target << " "; break;
    case GMove::K::PropRet: out << "pa "; break;
    case GMove::K::OpApp: out << "oq " << m.target << " "; break;
    case GMove::K::OpRet: out << "oa "; break;
  }
  out << "(" << show_term(m.payload) << ")[";
  for (size_t i = 0; i < m.intro.size(); ++i)
    out << (i ? " " : "") << m.intro[i];
  out << "]";
  return out.str();
}

std::string show_gtrace(const GTrace& t) {
  std::ostringstream out;
  for (size_t i = 0; i < t.size(); ++i) out << (i ? " . " : "") << show_gmove(t[i]);
  return out.str();
}

bool GameConfig::p_final() const {
  return proponent && K.empty() && V.empty() && e &&
         e->k == Term::K::Const && e->c.tag == Const::Tag::Unit;
}

bool GameConfig::o_final() const { return !proponent && K.empty() && V.empty(); }

GameConfig g_initial_term(const TermPtr& e) {
  GameConfig c;
  c.proponent = true;
  c.e = e;
  c.V.push_back({});  // singleton stack holding the empty sequence
  return c;
}

GameConfig g_initial_ctx(const TermPtr& E, const TypePtr& hole_ty) {
  GameConfig c;
  c.proponent = false;
  c.K.push_back({E, hole_ty, {}});
  return c;
}

namespace {

struct MalformedGame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

TermPtr payload_value(const GMove& m) {
  std::vector<TermPtr> vals;
  for (size_t i = 0; i < m.intro.size(); ++i)
    vals.push_back(mk_absname(m.intro[i], m.intro_tys[i], 0));
  return plug(m.payload, vals);
}

// Every hole-pattern of a type: base leaves over the finite domain, one
// numbered hole per arrow position.
struct HP {
  TermPtr payload;
  std::vector<TypePtr> tys;
};

void renumber(const TermPtr& p, int& n, std::vector<TypePtr>& tys,
              TermPtr& out) {
  if (p->k == Term::K::Hole) {
    tys.push_back(p->ty);
    out = mk_hole(++n, p->ty);
    return;
  }
  if (p->k == Term::K::Tuple) {
    std::vector<TermPtr> xs;
    for (auto& x : p->xs) {
      TermPtr y;
      renumber(x, n, tys, y);
      xs.push_back(y);
    }
    out = mk_tuple(std::move(xs));
    return;
  }
  out = p;
}

std::vector<TermPtr> raw_patterns(const TypePtr& ty,
                                  const std::vector<long long>& ints) {
  switch (ty->k) {
    case Type::K::Unit: return {mk_unit()};
    case Type::K::Bool: return {mk_bool(true), mk_bool(false)};
    case Type::K::Int: {
      std::vector<TermPtr> out;
      for (auto c : ints) out.push_back(mk_int(c));
      if (out.empty()) out.push_back(mk_int(0));
      return out;
    }
    case Type::K::Arrow: return {mk_hole(0, ty)};
    case Type::K::Product: {
      std::vector<std::vector<TermPtr>> parts;
      for (auto& c : ty->items) parts.push_back(raw_patterns(c, ints));
      std::vector<std::vector<TermPtr>> acc{{}};
      for (auto& opts : parts) {
        std::vector<std::vector<TermPtr>> next;
        for (auto& pre : acc)
          for (auto& o : opts) {
            auto row = pre;
            row.push_back(o);
            next.push_back(row);
          }
        acc = std::move(next);
      }
      std::vector<TermPtr> out;
      for (auto& row : acc) out.push_back(mk_tuple(row));
      return out;
    }
    default: throw MalformedGame("pattern of non-ground type");
  }
}

std::vector<HP> hole_patterns(const TypePtr& ty,
                              const std::vector<long long>& ints) {
  std::vector<HP> out;
  for (auto& raw : raw_patterns(ty, ints)) {
    HP hp;
    int n = 0;
    renumber(raw, n, hp.tys, hp.payload);
    out.push_back(std::move(hp));
  }
  return out;
}

GStep apply_pret(const GameConfig& c, GSupply& sup) {
  UPat up = ulpatt(c.e);
  GameConfig n = c;
  GMove mv{GMove::K::PropRet, "", up.pattern, {}, {}};
  for (auto& v : up.fns) {
    std::string b = sup.fresh_p();
    mv.intro.push_back(b);
    mv.intro_tys.push_back(value_type(v));
    n.kappa[b] = {v, c.avail};
  }
  if (n.V.empty()) throw MalformedGame("return with empty V stack");
  std::vector<std::string> resumed = n.V.back();
  n.V.pop_back();
  resumed.insert(resumed.end(), mv.intro.begin(), mv.intro.end());
  n.proponent = false;
  n.e = nullptr;
  n.avail = std::move(resumed);
  n.t.push_back(mv);
  return {mv, std::move(n)};
}

GStep apply_pcall(const GameConfig& c, const Step& s, GSupply& sup) {
  UPat up = ulpatt(s.arg);
  GameConfig n = c;
  GMove mv{GMove::K::PropApp, s.alpha->name, up.pattern, {}, {}};
  for (auto& v : up.fns) {
    std::string b = sup.fresh_p();
    mv.intro.push_back(b);
    mv.intro_tys.push_back(value_type(v));
    n.kappa[b] = {v, c.avail};
  }
  auto it = c.A.find(s.alpha->name);
  if (it == c.A.end()) throw MalformedGame("call to unknown opponent name");
  if (!s.alpha->ty || s.alpha->ty->k != Type::K::Arrow)
    throw MalformedGame("untyped opponent name");
  n.K.push_back({s.ctx, s.alpha->ty->cod, c.avail});
  std::vector<std::string> bs = it->second;
  bs.insert(bs.end(), mv.intro.begin(), mv.intro.end());
  n.proponent = false;
  n.e = nullptr;
  n.avail = std::move(bs);
  n.t.push_back(mv);
  return {mv, std::move(n)};
}

}  // namespace

GameConfig g_apply_omove(const GameConfig& c, const GMove& mv) {
  if (c.proponent) throw MalformedGame("opponent move at proponent config");
  GameConfig n = c;
  for (auto& a : mv.intro) n.A[a] = c.avail;
  if (mv.k == GMove::K::OpRet) {
    if (c.K.empty()) throw MalformedGame("opponent return with empty K");
    GKFrame fr = c.K.back();
    n.K.pop_back();
    n.e = plug_ctx(fr.ctx, payload_value(mv));
    n.avail = fr.als;
  } else if (mv.k == GMove::K::OpApp) {
    auto it = c.kappa.find(mv.target);
    if (it == c.kappa.end()) throw MalformedGame("call to unknown proponent name");
    n.V.push_back(c.avail);
    n.e = mk_app(it->second.v, payload_value(mv));
    n.avail = it->second.als;
  } else {
    throw MalformedGame("proponent move passed to g_apply_omove");
  }
  n.avail.insert(n.avail.end(), mv.intro.begin(), mv.intro.end());
  n.proponent = true;
  n.t.push_back(mv);
  return n;
}

std::vector<GStep> g_transitions(const GameConfig& c,
                                 const std::vector<long long>& ints,
                                 GSupply& sup) {
  std::vector<GStep> out;
  if (c.proponent) {
    Step s = step(c.e);
    switch (s.k) {
      case Step::K::Stepped: {
        GameConfig n = c;
        n.e = s.term;
        out.push_back({std::nullopt, std::move(n)});
        break;
      }
      case Step::K::Value:
        if (!c.V.empty()) out.push_back(apply_pret(c, sup));
        break;
      case Step::K::AbsCall: out.push_back(apply_pcall(c, s, sup)); break;
      case Step::K::Stuck:
      case Step::K::Branch: break;  // divergence / not a concrete run
    }
    return out;
  }
  // Innocence: a repeated O-view forces the recorded reply.
  if (auto forced = next_o(c.t)) {
    GMove mv = *forced;
    for (auto& nm : mv.intro) nm = sup.fresh_o();
    out.push_back({mv, g_apply_omove(c, mv)});
    return out;
  }
  if (!c.K.empty()) {
    for (auto& hp : hole_patterns(c.K.back().hole_ty, ints)) {
      GMove mv{GMove::K::OpRet, "", hp.payload, {}, hp.tys};
      for (auto& ty : hp.tys) {
        (void)ty;
        mv.intro.push_back(sup.fresh_o());
      }
      out.push_back({mv, g_apply_omove(c, mv)});
    }
  }
  std::set<std::string> seen;
  for (auto& b : c.avail) {
    if (!seen.insert(b).second) continue;
    TypePtr ty = value_type(c.kappa.at(b).v);
    if (ty->k != Type::K::Arrow) throw MalformedGame("non-function proponent name");
    for (auto& hp : hole_patterns(ty->dom, ints)) {
      GMove mv{GMove::K::OpApp, b, hp.payload, {}, hp.tys};
      for (auto& t2 : hp.tys) {
        (void)t2;
        mv.intro.push_back(sup.fresh_o());
      }
      out.push_back({mv, g_apply_omove(c, mv)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plays, views, innocence.

std::optional<std::vector<int>> justifiers(const GTrace& t) {
  std::vector<int> just(t.size(), -1);
  std::vector<int> pending;  // unanswered calls
  std::map<std::string, int> introducer;
  for (size_t i = 0; i < t.size(); ++i) {
    const GMove& m = t[i];
    bool call = m.k == GMove::K::PropApp || m.k == GMove::K::OpApp;
    if (call) {
      auto it = introducer.find(m.target);
      if (it == introducer.end()) return std::nullopt;
      just[i] = it->second;
      pending.push_back(static_cast<int>(i));
    } else {
      if (pending.empty()) {
        if (i != 0) return std::nullopt;
        just[i] = -1;
      } else {
        just[i] = pending.back();
        pending.pop_back();
      }
    }
    for (auto& nm : m.intro) {
      if (introducer.count(nm)) return std::nullopt;
      introducer[nm] = static_cast<int>(i);
    }
  }
  return just;
}

namespace {

// View of the prefix t[0..n) as index sequence; player selects P- or O-view.
std::vector<int> view_of(const GTrace& t, const std::vector<int>& just,
                         size_t n, bool pv) {
  if (n == 0) return {};
  if (n == 1) return {0};
  size_t last = n - 1;
  bool own = gmove_proponent(t[last]) == pv;
  if (own) {
    auto v = view_of(t, just, n - 1, pv);
    v.push_back(static_cast<int>(last));
    return v;
  }
  int j = just[last];
  if (j < 0) return {static_cast<int>(last)};
  auto v = view_of(t, just, static_cast<size_t>(j), pv);
  v.push_back(j);
  v.push_back(static_cast<int>(last));
  return v;
}

}  // namespace

std::vector<int> pview(const GTrace& t) {
  auto j = justifiers(t);
  if (!j) throw std::runtime_error("pview: illegal trace");
  return view_of(t, *j, t.size(), true);
}

std::vector<int> oview(const GTrace& t) {
  auto j = justifiers(t);
  if (!j) throw std::runtime_error("oview: illegal trace");
  return view_of(t, *j, t.size(), false);
}

std::string canon_view(const GTrace& t, const std::vector<int>& just,
                       const std::vector<int>& view) {
  std::map<std::string, int> ren;
  auto id = [&](const std::string& nm) {
    auto [it, fresh] = ren.emplace(nm, static_cast<int>(ren.size()));
    (void)fresh;
    return it->second;
  };
  std::ostringstream out;
  for (size_t vi = 0; vi < view.size(); ++vi) {
    const GMove& m = t[view[vi]];
    out << static_cast<int>(m.k) << ":";
    if (!m.target.empty()) out << "t" << id(m.target);
    out << "(" << show_term(m.payload) << ")";
    for (auto& nm : m.intro) out << " n" << id(nm);
    int jpos = -1;
    if (just[view[vi]] >= 0) {
      jpos = -2;
      for (size_t k = 0; k < vi; ++k)
        if (view[k] == just[view[vi]]) jpos = static_cast<int>(k);
    }
    out << " j" << jpos << ";";
  }
  return out.str();
}

std::optional<GMove> next_o(const GTrace& t) {
  if (t.empty() || !gmove_proponent(t.back())) return std::nullopt;
  auto justOpt = justifiers(t);
  if (!justOpt) return std::nullopt;
  const auto& just = *justOpt;
  auto ov_now = view_of(t, just, t.size(), false);
  std::string key = canon_view(t, just, ov_now);
  for (size_t L = 0; L + 1 < t.size(); ++L) {
    if (gmove_proponent(t[L])) continue;  // need an O-move at position L
    auto ov_pre = view_of(t, just, L, false);
    if (canon_view(t, just, ov_pre) != key) continue;
    // Transport the recorded reply: map its target through the two views'
    // canonical renamings.
    const GMove& o = t[L];
    GMove mv = o;
    if (!o.target.empty()) {
      std::map<std::string, int> ren_pre, ren_now;
      auto collect = [&](const std::vector<int>& view,
                         std::map<std::string, int>& ren) {
        for (int vi : view) {
          const GMove& m = t[vi];
          if (!m.target.empty()) ren.emplace(m.target, (int)ren.size());
          for (auto& nm : m.intro) ren.emplace(nm, (int)ren.size());
        }
      };
      collect(ov_pre, ren_pre);
      collect(ov_now, ren_now);
      auto it = ren_pre.find(o.target);
      if (it == ren_pre.end()) return std::nullopt;
      mv.target.clear();
      for (auto& [nm, cid] : ren_now)
        if (cid == it->second) mv.target = nm;
      if (mv.target.empty()) return std::nullopt;
    }
    return mv;  // intro names must be refreshed by the caller
  }
  return std::nullopt;
}

PlayCheck is_play(const GTrace& t) {
  for (size_t i = 1; i < t.size(); ++i)
    if (gmove_proponent(t[i]) == gmove_proponent(t[i - 1]))
      return {false, "alternation violated at move " + std::to_string(i)};
  auto justOpt = justifiers(t);
  if (!justOpt) return {false, "illegal trace (introductions/bracketing)"};
  const auto& just = *justOpt;
  // Call targets must have been introduced by the other player.
  {
    std::map<std::string, bool> owner;  // name -> introduced by proponent
    for (size_t i = 0; i < t.size(); ++i) {
      const GMove& m = t[i];
      if (!m.target.empty()) {
        auto it = owner.find(m.target);
        if (it == owner.end() || it->second == gmove_proponent(m))
          return {false, "call to own or unknown name at move " + std::to_string(i)};
      }
      for (auto& nm : m.intro) owner[nm] = gmove_proponent(m);
    }
  }
  // Visibility.
  for (size_t i = 0; i < t.size(); ++i) {
    if (just[i] < 0) continue;
    auto v = view_of(t, just, i, gmove_proponent(t[i]));
    if (std::find(v.begin(), v.end(), just[i]) == v.end())
      return {false, "justifier outside view at move " + std::to_string(i)};
  }
  // Innocence: equal views (up to renaming) extend equally.
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j) {
      if (gmove_proponent(t[i]) != gmove_proponent(t[j])) continue;
      bool pv = gmove_proponent(t[i]);
      auto vi = view_of(t, just, i, pv);
      auto vj = view_of(t, just, j, pv);
      if (canon_view(t, just, vi) != canon_view(t, just, vj)) continue;
      auto vi2 = view_of(t, just, i + 1, pv);
      auto vj2 = view_of(t, just, j + 1, pv);
      if (canon_view(t, just, vi2) != canon_view(t, just, vj2))
        return {false, "innocence violated at moves " + std::to_string(i) +
                           "," + std::to_string(j)};
    }
  return {true, ""};
}

GTrace dual(const GTrace& t, const std::map<std::string, std::string>& phi) {
  GTrace out;
  for (auto& m : t) {
    GMove d = m;
    switch (m.k) {
      case GMove::K::PropApp: d.k = GMove::K::OpApp; break;
      case GMove::K::PropRet: d.k = GMove::K::OpRet; break;
      case GMove::K::OpApp: d.k = GMove::K::PropApp; break;
      case GMove::K::OpRet: d.k = GMove::K::PropRet; break;
    }
    auto map1 = [&](std::string& nm) {
      if (nm.empty()) return;
      auto it = phi.find(nm);
      if (it == phi.end()) throw std::runtime_error("dual: unmapped name " + nm);
      nm = it->second;
    };
    map1(d.target);
    for (auto& nm : d.intro) map1(nm);
    out.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Semantic composition: the expression engine against the context engine,
// synchronized move-by-move while the name bijection grows.

ComposeResult compose_run(const TermPtr& e, const TermPtr& E,
                          const TypePtr& hole_ty, long long fuel) {
  GSupply sup;
  GameConfig L = g_initial_term(e);
  GameConfig R = g_initial_ctx(E, hole_ty);
  std::map<std::string, std::string> l2r, r2l;
  while (fuel-- > 0) {
    if (L.proponent == R.proponent)
      throw std::runtime_error("compose_run: desynchronized engines");
    GameConfig& P = L.proponent ? L : R;
    GameConfig& O = L.proponent ? R : L;
    auto& toOther = L.proponent ? l2r : r2l;
    auto& fromOther = L.proponent ? r2l : l2r;
    Step s = step(P.e);
    if (s.k == Step::K::Stepped) {
      P.e = s.term;
      continue;
    }
    if (s.k == Step::K::Stuck || s.k == Step::K::Branch)
      return ComposeResult::Exhausted;
    if (s.k == Step::K::Value && &P == &R && R.K.empty())
      return ComposeResult::Terminated;  // context returns () at top level
    GStep gs = s.k == Step::K::Value ? apply_pret(P, sup) : apply_pcall(P, s, sup);
    GMove pm = *gs.move;
    P = std::move(gs.next);
    GMove om;
    om.k = pm.k == GMove::K::PropApp ? GMove::K::OpApp : GMove::K::OpRet;
    om.payload = pm.payload;
    om.intro_tys = pm.intro_tys;
    if (pm.k == GMove::K::PropApp) {
      auto it = toOther.find(pm.target);
      if (it == toOther.end())
        throw std::runtime_error("compose_run: unmapped call target");
      om.target = it->second;
    }
    for (size_t i = 0; i < pm.intro.size(); ++i) om.intro.push_back(sup.fresh_o());
    O = g_apply_omove(O, om);
    for (size_t i = 0; i < pm.intro.size(); ++i) {
      toOther[pm.intro[i]] = om.intro[i];
      fromOther[om.intro[i]] = pm.intro[i];
    }
  }
  return ComposeResult::Exhausted;
}

}  // namespace nfb
