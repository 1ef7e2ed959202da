#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nfb/checker.hpp"
#include "nfb/lts.hpp"
#include "nfb/oracle.hpp"
#include "nfb/parse.hpp"
#include "nfb/typecheck.hpp"

using nlohmann::json;
using namespace nfb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PairInput {
  TermPtr lhs, rhs;
  std::string raw;  // for directive comments
};

PairInput load_pair(const std::string& file, const std::string& left,
                    const std::string& right) {
  PairInput p;
  if (!file.empty()) {
    p.raw = slurp(file);
    PairFile pf = parse_pair_file(p.raw);
    p.lhs = pf.lhs;
    p.rhs = pf.rhs;
  } else {
    std::string l = slurp(left), r = slurp(right);
    p.raw = l + "\n" + r;
    p.lhs = parse_term(l);
    p.rhs = parse_term(r);
  }
  return p;
}

// Pair files may carry `(* bound: N *)` and `(* expect: VERDICT *)`.
std::optional<int> directive_bound(const std::string& raw) {
  std::smatch m;
  if (std::regex_search(raw, m, std::regex(R"(\(\*\s*bound:\s*(\d+)\s*\*\))")))
    return std::stoi(m[1]);
  return std::nullopt;
}
std::optional<std::string> directive_expect(const std::string& raw) {
  std::smatch m;
  if (std::regex_search(raw, m,
                        std::regex(R"(\(\*\s*expect:\s*([A-Z]+)\s*\*\))")))
    return m[1];
  return std::nullopt;
}

int verdict_exit(Verdict::V v) {
  switch (v) {
    case Verdict::V::Equivalent: return 0;
    case Verdict::V::Inequivalent: return 1;
    default: return 2;
  }
}

struct CommonOpts {
  std::string file, left, right;
  int bound = 6;
  bool bound_set = false;
  std::string solver = "internal";
  double timeout = 0;
  bool as_json = false;
  unsigned long long seed = 0;
  bool no_memo = false, no_identity = false, no_normalise = false;
  bool no_pcache = false, no_oskip = false, no_loopdetect = false;
};

void add_pair_opts(CLI::App* c, CommonOpts& o) {
  c->add_option("file", o.file, "pair file (two programs separated by a ||| line)");
  c->add_option("--left", o.left, "left program file");
  c->add_option("--right", o.right, "right program file");
}

void add_check_opts(CLI::App* c, CommonOpts& o) {
  c->add_option("--bound", o.bound, "challenge bound (default 6)");
  c->add_option("--solver", o.solver, "internal | smtlib:<path>");
  c->add_option("--timeout", o.timeout, "per-pair timeout in seconds");
  c->add_flag("--json", o.as_json, "JSON output");
  c->add_option("--seed", o.seed, "seed for generators");
  c->add_flag("--no-memo", o.no_memo);
  c->add_flag("--no-identity", o.no_identity);
  c->add_flag("--no-normalise", o.no_normalise);
  c->add_flag("--no-pcache", o.no_pcache);
  c->add_flag("--no-oskip", o.no_oskip);
  c->add_flag("--no-loopdetect", o.no_loopdetect);
}

CheckOpts make_opts(const CommonOpts& o) {
  CheckOpts co;
  co.bound = o.bound;
  co.memo = !o.no_memo;
  co.identity = !o.no_identity;
  co.normalise = !o.no_normalise;
  co.pcache = !o.no_pcache;
  co.oskip = !o.no_oskip;
  co.loopdetect = !o.no_loopdetect;
  if (o.solver.rfind("smtlib:", 0) == 0) co.smtlib_path = o.solver.substr(7);
  else if (o.solver != "internal")
    throw CLI::ValidationError("--solver", "expected internal or smtlib:<path>");
  if (o.timeout > 0) co.timeout_ms = (long long)(o.timeout * 1000);
  return co;
}

json verdict_json(const Verdict& v, long long ms) {
  json j;
  j["verdict"] = show_verdict_line(v);
  j["time_ms"] = ms;
  if (v.v == Verdict::V::Inequivalent) {
    j["witness"] = show_trace(v.witness);
    json model = json::object();
    for (auto& [k, c] : v.model) model[k] = show_const(c);
    j["model"] = model;
  }
  if (v.v == Verdict::V::Inconclusive) j["reason"] = v.reason;
  j["stats"] = {{"pairs", v.stats.pairs},
                {"challenges", v.stats.challenges},
                {"solver_queries", v.stats.solver_queries},
                {"memo_hits", v.stats.memo_hits},
                {"identity_hits", v.stats.identity_hits},
                {"loop_skips", v.stats.loop_skips},
                {"oskip_hits", v.stats.oskip_hits},
                {"forced_replays", v.stats.forced_replays}};
  return j;
}

int run_check(const CommonOpts& o) {
  PairInput p = load_pair(o.file, o.left, o.right);
  CheckOpts co = make_opts(o);
  if (!o.bound_set)
    if (auto b = directive_bound(p.raw)) co.bound = *b;
  auto t0 = std::chrono::steady_clock::now();
  Verdict v = check(p.lhs, p.rhs, co);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  if (o.as_json) {
    std::cout << verdict_json(v, ms).dump(2) << "\n";
  } else {
    std::cout << show_verdict_line(v);
    if (v.v == Verdict::V::Inconclusive) std::cout << " (" << v.reason << ")";
    std::cout << " [" << ms << "ms]\n";
    if (v.v == Verdict::V::Inequivalent) {
      std::cout << "witness: " << show_trace(v.witness) << "\n";
      for (auto& [k, c] : v.model)
        std::cout << "  " << k << " = " << show_const(c) << "\n";
    }
  }
  return verdict_exit(v.v);
}

int run_trace(const std::string& file, int depth,
              const std::vector<long long>& ints, bool as_json) {
  std::string raw = slurp(file);
  PairInput p;
  if (raw.find("|||") != std::string::npos) {
    PairFile pf = parse_pair_file(raw);
    p.lhs = pf.lhs;
    p.rhs = pf.rhs;
  } else {
    p.lhs = parse_term(raw);
  }
  Mode mode;
  mode.symbolic = false;
  mode.base_ints = ints.empty() ? std::vector<long long>{0, 1} : ints;
  auto dump = [&](const char* tag, const TermPtr& e) {
    TermPtr t = typecheck(e).term;
    auto lines = semantics(t, depth, mode);
    if (as_json) {
      json j = {{"side", tag}, {"semantics", lines}};
      std::cout << j.dump(2) << "\n";
    } else {
      if (p.rhs) std::cout << "-- " << tag << " --\n";
      for (auto& l : lines) std::cout << l << "\n";
    }
  };
  dump("left", p.lhs);
  if (p.rhs) dump("right", p.rhs);
  return 0;
}

int run_oracle(const CommonOpts& o, int depth, long long fuel,
               std::vector<long long> ints) {
  PairInput p = load_pair(o.file, o.left, o.right);
  if (ints.empty()) ints = {0, 1};
  TermPtr l = typecheck(p.lhs).term, r = typecheck(p.rhs).term;
  auto t0 = std::chrono::steady_clock::now();
  OracleResult res = oracle_equiv(l, r, depth, fuel, ints);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  const char* name = res.v == OracleResult::V::Equivalent     ? "EQUIVALENT"
                     : res.v == OracleResult::V::Inequivalent ? "INEQUIVALENT"
                                                              : "INCONCLUSIVE";
  if (o.as_json) {
    json j = {{"verdict", name}, {"time_ms", ms}};
    if (res.context) j["context"] = show_term(res.context);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << name << " [" << ms << "ms]\n";
    if (res.context) std::cout << "context: " << show_term(res.context) << "\n";
  }
  return res.v == OracleResult::V::Equivalent     ? 0
         : res.v == OracleResult::V::Inequivalent ? 1
                                                  : 2;
}

int run_bench(const std::string& dir, const CommonOpts& o) {
  std::vector<fs::path> files;
  for (auto& ent : fs::directory_iterator(dir))
    if (ent.path().extension() == ".pcf") files.push_back(ent.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no .pcf pair files in " << dir << "\n";
    return 3;
  }
  int eq = 0, ineq = 0, inc = 0, mismatched = 0;
  long long total_ms = 0;
  json rows = json::array();
  for (auto& f : files) {
    std::string raw = slurp(f.string());
    PairFile pf = parse_pair_file(raw);
    CheckOpts co = make_opts(o);
    if (!o.bound_set)
      if (auto b = directive_bound(raw)) co.bound = *b;
    auto t0 = std::chrono::steady_clock::now();
    Verdict v = check(pf.lhs, pf.rhs, co);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    total_ms += ms;
    std::string name = show_verdict_line(v);
    switch (v.v) {
      case Verdict::V::Equivalent: ++eq; break;
      case Verdict::V::Inequivalent: ++ineq; break;
      default: ++inc; break;
    }
    std::string note;
    if (auto exp = directive_expect(raw))
      if (*exp != name) {
        ++mismatched;
        note = " (expected " + *exp + ")";
      }
    if (o.as_json)
      rows.push_back({{"file", f.filename().string()},
                      {"verdict", name},
                      {"bound", co.bound},
                      {"time_ms", ms}});
    else
      std::printf("%-28s %-13s bound=%d %5lldms%s\n",
                  f.filename().string().c_str(), name.c_str(), co.bound, (long long)ms,
                  note.c_str());
  }
  if (o.as_json) {
    json j = {{"pairs", rows},
              {"total", (int)files.size()},
              {"equivalent", eq},
              {"inequivalent", ineq},
              {"inconclusive", inc},
              {"expect_mismatches", mismatched},
              {"total_ms", total_ms}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("%zu pairs: %d equivalent, %d inequivalent, %d inconclusive, %lldms total\n",
                files.size(), eq, ineq, inc, total_ms);
    if (mismatched) std::printf("%d pairs disagree with their expect annotation\n", mismatched);
  }
  return mismatched == 0 && inc == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normal-form bisimulation equivalence checker"};
  app.require_subcommand(1);

  CommonOpts co;
  int depth = 3;
  long long fuel = 800;
  std::vector<long long> ints;
  std::string bench_dir;

  auto* c_check = app.add_subcommand("check", "decide equivalence of a pair");
  add_pair_opts(c_check, co);
  add_check_opts(c_check, co);

  auto* c_trace = app.add_subcommand("trace", "dump concrete trace semantics");
  std::string trace_file;
  c_trace->add_option("file", trace_file, "program or pair file")->required();
  c_trace->add_option("--depth", depth, "visible-move depth");
  c_trace->add_option("--ints", ints, "base Int domain");
  c_trace->add_flag("--json", co.as_json);

  auto* c_oracle = app.add_subcommand("oracle", "brute-force context search");
  add_pair_opts(c_oracle, co);
  c_oracle->add_option("--depth", depth, "context/value size bound");
  c_oracle->add_option("--fuel", fuel, "evaluation fuel");
  c_oracle->add_option("--ints", ints, "base Int domain");
  c_oracle->add_flag("--json", co.as_json);
  c_oracle->add_option("--seed", co.seed, "seed for generators");

  auto* c_bench = app.add_subcommand("bench", "run a directory of pairs");
  c_bench->add_option("dir", bench_dir, "directory of .pcf pair files")->required();
  add_check_opts(c_bench, co);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? 0 : 3;
  }
  co.bound_set = c_check->count("--bound") || c_bench->count("--bound");

  try {
    if (*c_check) {
      if (co.file.empty() && (co.left.empty() || co.right.empty()))
        throw std::runtime_error("need a pair file or --left/--right");
      return run_check(co);
    }
    if (*c_trace) return run_trace(trace_file, depth, ints, co.as_json);
    if (*c_oracle) {
      if (co.file.empty() && (co.left.empty() || co.right.empty()))
        throw std::runtime_error("need a pair file or --left/--right");
      return run_oracle(co, depth, fuel, ints);
    }
    if (*c_bench) return run_bench(bench_dir, co);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
