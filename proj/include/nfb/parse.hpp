#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nfb/term.hpp"

namespace nfb {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at line " + std::to_string(line_) + ", column " +
                           std::to_string(col_)),
        line(line_),
        col(col_) {}
};

// Parses a single closed expression in the ML-like surface syntax.
// Non-recursive `let x = e in e'` and `fun x -> e` are desugared to Fix.
TermPtr parse_term(const std::string& src);

TypePtr parse_type(const std::string& src);

// A pair file holds two expressions separated by a line containing `|||`.
// Comments `(* ... *)` may carry metadata but are not interpreted here.
struct PairFile {
  TermPtr lhs, rhs;
  std::string lhs_src, rhs_src;
};
PairFile parse_pair_file(const std::string& contents);

}  // namespace nfb
