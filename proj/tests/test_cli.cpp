#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

struct RunOut {
  int code;
  std::string out;
};

RunOut run(const std::string& args) {
  std::string cmd = std::string(NFBEQ_BIN) + " " + args + " 2>&1";
  std::array<char, 4096> buf;
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  while (fgets(buf.data(), buf.size(), p)) out += buf.data();
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string corpus(const std::string& f) {
  return std::string(NFB_CORPUS_DIR) + "/" + f;
}

std::string write_tmp(const std::string& name, const std::string& body) {
  std::string path = "/tmp/" + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("check: equivalent pair exits 0") {
  RunOut r = run("check " + corpus("call_once_twice.pcf"));
  CHECK(r.code == 0);
  CHECK(r.out.find("EQUIVALENT") == 0);
}

TEST_CASE("check: inequivalent pair exits 1 and prints a witness") {
  RunOut r = run("check " + corpus("negation.pcf"));
  CHECK(r.code == 1);
  CHECK(r.out.find("INEQUIVALENT") == 0);
  CHECK(r.out.find("witness:") != std::string::npos);
}

TEST_CASE("check: bound directive in the pair file is honoured") {
  RunOut r = run("check " + corpus("ex3_curried.pcf"));
  CHECK(r.code == 1);
  // an explicit flag overrides it
  RunOut low = run("check " + corpus("ex3_curried.pcf") + " --bound 4");
  CHECK(low.code == 2);
  CHECK(low.out.find("INCONCLUSIVE") == 0);
}

TEST_CASE("check: --left/--right form") {
  std::string l = write_tmp("cli_l.pcf", "fun (b:bool) -> b\n");
  std::string rr = write_tmp("cli_r.pcf", "fun (b:bool) -> if b then true else false\n");
  RunOut r = run("check --left " + l + " --right " + rr);
  CHECK(r.code == 0);
}

TEST_CASE("check: ill-typed pair exits 3") {
  std::string f = write_tmp("cli_bad.pcf", "true\n|||\n1\n");
  RunOut r = run("check " + f);
  CHECK(r.code == 3);
  std::string g = write_tmp("cli_sep.pcf", "true\nfalse\n");
  CHECK(run("check " + g).code == 3);
  CHECK(run("check /nonexistent.pcf").code == 3);
  CHECK(run("frobnicate").code == 3);
}

TEST_CASE("check: --json emits a parseable report") {
  RunOut r = run("check " + corpus("negation.pcf") + " --json");
  CHECK(r.code == 1);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "INEQUIVALENT");
  CHECK(j.contains("witness"));
  CHECK(j["stats"]["challenges"].get<long long>() > 0);
}

TEST_CASE("enhancement toggles are accepted") {
  RunOut r = run("check " + corpus("call_once_twice.pcf") +
                 " --no-memo --no-identity --no-normalise --no-pcache --no-oskip --no-loopdetect");
  CHECK(r.code == 0);
}

TEST_CASE("trace subcommand dumps both sides of a pair") {
  RunOut r = run("trace " + corpus("negation.pcf") + " --depth 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("-- left --") != std::string::npos);
  CHECK(r.out.find("-- right --") != std::string::npos);
}

TEST_CASE("oracle subcommand") {
  RunOut r = run("oracle " + corpus("negation.pcf") + " --depth 2");
  CHECK(r.code == 1);
  CHECK(r.out.find("INEQUIVALENT") == 0);
  CHECK(r.out.find("context:") != std::string::npos);
}

TEST_CASE("bench totals equal per-pair counts") {
  RunOut r = run("bench " + std::string(NFB_CORPUS_DIR) + " --json");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  int total = j["total"].get<int>();
  CHECK(total >= 20);
  CHECK(j["equivalent"].get<int>() + j["inequivalent"].get<int>() +
            j["inconclusive"].get<int>() ==
        total);
  CHECK(j["pairs"].size() == (size_t)total);
  CHECK(j["expect_mismatches"].get<int>() == 0);
}
