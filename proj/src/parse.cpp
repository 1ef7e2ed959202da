#include "nfb/parse.hpp"

#include <cctype>
#include <optional>
#include <sstream>

namespace nfb {

namespace {

struct Token {
  enum class K { Ident, Int, Sym, Eof };
  K k;
  std::string text;
  long long num = 0;
  int line = 1, col = 1;
};

const char* kKeywords[] = {"fun",  "let",  "rec",  "in",  "if",   "then", "else",
                           "true", "false", "not", "mod", "_bot_", "bool", "int", "unit"};

bool is_keyword(const std::string& s) {
  for (auto* k : kKeywords)
    if (s == k) return true;
  return false;
}

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line, col); }

  char peek(size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }

  void advance() {
    if (pos < src.size()) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void skip_ws_and_comments() {
    for (;;) {
      while (std::isspace(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '(' && peek(1) == '*') {
        int start_line = line, start_col = col;
        advance();
        advance();
        int depth = 1;
        while (depth > 0) {
          if (pos >= src.size())
            throw ParseError("unterminated comment", start_line, start_col);
          if (peek() == '(' && peek(1) == '*') {
            advance();
            advance();
            ++depth;
          } else if (peek() == '*' && peek(1) == ')') {
            advance();
            advance();
            --depth;
          } else {
            advance();
          }
        }
        continue;
      }
      break;
    }
  }

  Token next() {
    skip_ws_and_comments();
    Token t;
    t.line = line;
    t.col = col;
    char c = peek();
    if (c == '\0') {
      t.k = Token::K::Eof;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += peek();
        advance();
      }
      t.k = Token::K::Int;
      t.text = digits;
      try {
        t.num = std::stoll(digits);
      } catch (...) {
        throw ParseError("integer literal out of range", t.line, t.col);
      }
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
             peek() == '\'') {
        id += peek();
        advance();
      }
      t.k = Token::K::Ident;
      t.text = id;
      return t;
    }
    // Longest-match punctuation.
    static const char* two[] = {"->", "||", "&&", "==", "<>", "<=", ">="};
    for (auto* s : two) {
      if (c == s[0] && peek(1) == s[1]) {
        advance();
        advance();
        t.k = Token::K::Sym;
        t.text = s;
        return t;
      }
    }
    static const std::string one = "()+-*/<>=,:";
    if (one.find(c) != std::string::npos) {
      advance();
      t.k = Token::K::Sym;
      t.text = std::string(1, c);
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

struct Parser {
  std::vector<Token> toks;
  size_t i = 0;

  explicit Parser(const std::string& src) {
    Lexer lex(src);
    for (;;) {
      Token t = lex.next();
      bool eof = t.k == Token::K::Eof;
      toks.push_back(std::move(t));
      if (eof) break;
    }
  }

  const Token& cur() const { return toks[i]; }
  const Token& peek(size_t off = 1) const {
    return toks[std::min(i + off, toks.size() - 1)];
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, cur().line, cur().col);
  }

  bool at_sym(const std::string& s) const {
    return cur().k == Token::K::Sym && cur().text == s;
  }
  bool at_kw(const std::string& s) const {
    return cur().k == Token::K::Ident && cur().text == s;
  }

  void eat() { if (i + 1 < toks.size()) ++i; }

  void expect_sym(const std::string& s) {
    if (!at_sym(s)) fail("expected '" + s + "'");
    eat();
  }
  void expect_kw(const std::string& s) {
    if (!at_kw(s)) fail("expected '" + s + "'");
    eat();
  }

  std::string expect_ident() {
    if (cur().k != Token::K::Ident || is_keyword(cur().text))
      fail("expected identifier");
    std::string s = cur().text;
    eat();
    return s;
  }

  // --- types -------------------------------------------------------------

  TypePtr type_atom() {
    if (at_kw("bool")) { eat(); return t_bool(); }
    if (at_kw("int")) { eat(); return t_int(); }
    if (at_kw("unit")) { eat(); return t_unit(); }
    if (at_sym("(")) {
      eat();
      TypePtr t = type_expr();
      expect_sym(")");
      return t;
    }
    fail("expected a type");
  }

  TypePtr type_product() {
    std::vector<TypePtr> items{type_atom()};
    while (at_sym("*")) {
      eat();
      items.push_back(type_atom());
    }
    return items.size() == 1 ? items[0] : t_product(std::move(items));
  }

  TypePtr type_expr() {
    TypePtr lhs = type_product();
    if (at_sym("->")) {
      eat();
      return t_arrow(lhs, type_expr());
    }
    return lhs;
  }

  // --- expressions -------------------------------------------------------

  struct Binder {
    std::string name;
    TypePtr ann;  // may be null
  };

  Binder binder() {
    if (at_sym("(")) {
      eat();
      std::string n = expect_ident();
      expect_sym(":");
      TypePtr t = type_expr();
      expect_sym(")");
      return {n, t};
    }
    return {expect_ident(), nullptr};
  }

  static TermPtr annot(TermPtr e, TypePtr t) {
    Term node;
    node.k = Term::K::Prim;
    node.name = "@annot";
    node.xs = {std::move(e)};
    node.ty = std::move(t);
    return std::make_shared<const Term>(std::move(node));
  }

  static TermPtr lambda(const Binder& b, TypePtr ret_ann, TermPtr body) {
    if (ret_ann) body = annot(body, ret_ann);
    TypePtr fn_ty = (b.ann || ret_ann) ? t_arrow(b.ann, ret_ann) : nullptr;
    return mk_fix("_self" + std::to_string(fresh_id()), fn_ty, b.name, body);
  }

  TermPtr expr() {
    if (at_kw("fun")) {
      eat();
      std::vector<Binder> bs;
      do {
        bs.push_back(binder());
      } while (!at_sym("->"));
      expect_sym("->");
      TermPtr body = expr();
      for (auto it = bs.rbegin(); it != bs.rend(); ++it)
        body = lambda(*it, nullptr, body);
      return body;
    }
    if (at_kw("let")) {
      eat();
      if (at_kw("rec")) {
        eat();
        std::string f = expect_ident();
        std::vector<Binder> bs;
        while (!at_sym("=") && !at_sym(":")) bs.push_back(binder());
        if (bs.empty()) fail("recursive definition needs a parameter");
        TypePtr ret_ann = nullptr;
        if (at_sym(":")) {
          eat();
          ret_ann = type_expr();
        }
        expect_sym("=");
        TermPtr body = expr();
        expect_kw("in");
        TermPtr rest = expr();
        // Inner parameters become plain lambdas; the outermost carries `rec`.
        for (size_t j = bs.size(); j-- > 1;) {
          body = lambda(bs[j], j + 1 == bs.size() ? ret_ann : nullptr, body);
          ret_ann = nullptr;
        }
        if (ret_ann) body = annot(body, ret_ann);
        TypePtr fn_ty = bs[0].ann ? t_arrow(bs[0].ann, nullptr) : nullptr;
        TermPtr fix = mk_fix(f, fn_ty, bs[0].name, body);
        return mk_lettuple({f}, fix, rest);
      }
      if (at_sym("(")) {
        // Could be tuple destructuring or an annotated first parameter of a
        // function definition; disambiguate on the token after the ident.
        bool tuple = peek(2).k == Token::K::Sym &&
                     (peek(2).text == "," || peek(2).text == ")");
        if (tuple) {
          eat();
          std::vector<std::string> names{expect_ident()};
          while (at_sym(",")) {
            eat();
            names.push_back(expect_ident());
          }
          expect_sym(")");
          expect_sym("=");
          TermPtr bound = expr();
          expect_kw("in");
          TermPtr rest = expr();
          return mk_lettuple(std::move(names), bound, rest);
        }
      }
      std::string x = expect_ident();
      std::vector<Binder> bs;
      while (!at_sym("=") && !at_sym(":")) bs.push_back(binder());
      TypePtr ret_ann = nullptr;
      if (at_sym(":")) {
        eat();
        ret_ann = type_expr();
      }
      expect_sym("=");
      TermPtr bound = expr();
      expect_kw("in");
      TermPtr rest = expr();
      for (auto it = bs.rbegin(); it != bs.rend(); ++it) {
        bound = lambda(*it, ret_ann, bound);
        ret_ann = nullptr;
      }
      if (ret_ann) bound = annot(bound, ret_ann);
      return mk_lettuple({x}, bound, rest);
    }
    if (at_kw("if")) {
      eat();
      TermPtr g = expr();
      expect_kw("then");
      TermPtr thn = expr();
      expect_kw("else");
      TermPtr els = expr();
      return mk_cond(g, thn, els);
    }
    return or_expr();
  }

  TermPtr or_expr() {
    TermPtr lhs = and_expr();
    while (at_sym("||")) {
      eat();
      lhs = mk_prim("||", {lhs, and_expr()});
    }
    return lhs;
  }

  TermPtr and_expr() {
    TermPtr lhs = cmp_expr();
    while (at_sym("&&")) {
      eat();
      lhs = mk_prim("&&", {lhs, cmp_expr()});
    }
    return lhs;
  }

  TermPtr cmp_expr() {
    TermPtr lhs = add_expr();
    static const char* ops[] = {"==", "<>", "<=", ">=", "<", ">"};
    for (auto* op : ops) {
      if (at_sym(op)) {
        eat();
        return mk_prim(op, {lhs, add_expr()});
      }
    }
    return lhs;
  }

  TermPtr add_expr() {
    TermPtr lhs = mul_expr();
    while (at_sym("+") || at_sym("-")) {
      std::string op = cur().text;
      eat();
      lhs = mk_prim(op, {lhs, mul_expr()});
    }
    return lhs;
  }

  TermPtr mul_expr() {
    TermPtr lhs = unary_expr();
    while (at_sym("*") || at_sym("/") || at_kw("mod")) {
      std::string op = at_kw("mod") ? "mod" : cur().text;
      eat();
      lhs = mk_prim(op, {lhs, unary_expr()});
    }
    return lhs;
  }

  TermPtr unary_expr() {
    if (at_kw("not")) {
      eat();
      return mk_prim("not", {unary_expr()});
    }
    if (at_sym("-")) {
      eat();
      TermPtr e = unary_expr();
      if (e->k == Term::K::Const && e->c.tag == Const::Tag::Int)
        return mk_int(-e->c.n);
      return mk_prim("-", {mk_int(0), e});
    }
    return app_expr();
  }

  bool at_atom_start() const {
    if (cur().k == Token::K::Int) return true;
    if (at_sym("(")) return true;
    if (cur().k == Token::K::Ident)
      return !is_keyword(cur().text) || cur().text == "true" ||
             cur().text == "false" || cur().text == "_bot_";
    return false;
  }

  TermPtr app_expr() {
    TermPtr lhs = atom();
    while (at_atom_start()) lhs = mk_app(lhs, atom());
    return lhs;
  }

  TermPtr atom() {
    if (cur().k == Token::K::Int) {
      long long n = cur().num;
      eat();
      return mk_int(n);
    }
    if (at_kw("true")) { eat(); return mk_bool(true); }
    if (at_kw("false")) { eat(); return mk_bool(false); }
    if (at_kw("_bot_")) { eat(); return mk_bot(nullptr); }
    if (cur().k == Token::K::Ident && !is_keyword(cur().text)) {
      std::string n = cur().text;
      eat();
      return mk_var(n);
    }
    if (at_sym("(")) {
      eat();
      if (at_sym(")")) {
        eat();
        return mk_unit();
      }
      TermPtr e = expr();
      if (at_sym(":")) {
        eat();
        TypePtr t = type_expr();
        expect_sym(")");
        return annot(e, t);
      }
      if (at_sym(",")) {
        std::vector<TermPtr> items{e};
        while (at_sym(",")) {
          eat();
          items.push_back(expr());
        }
        expect_sym(")");
        return mk_tuple(std::move(items));
      }
      expect_sym(")");
      return e;
    }
    fail("expected an expression");
  }
};

}  // namespace

TermPtr parse_term(const std::string& src) {
  Parser p(src);
  TermPtr e = p.expr();
  if (p.cur().k != Token::K::Eof) p.fail("trailing input after expression");
  return e;
}

TypePtr parse_type(const std::string& src) {
  Parser p(src);
  TypePtr t = p.type_expr();
  if (p.cur().k != Token::K::Eof) p.fail("trailing input after type");
  return t;
}

PairFile parse_pair_file(const std::string& contents) {
  std::istringstream in(contents);
  std::string line, lhs_src, rhs_src;
  bool seen_sep = false;
  while (std::getline(in, line)) {
    std::string trimmed = line;
    size_t a = trimmed.find_first_not_of(" \t\r");
    size_t b = trimmed.find_last_not_of(" \t\r");
    trimmed = a == std::string::npos ? "" : trimmed.substr(a, b - a + 1);
    if (trimmed == "|||") {
      if (seen_sep) throw ParseError("multiple '|||' separators", 0, 0);
      seen_sep = true;
      continue;
    }
    (seen_sep ? rhs_src : lhs_src) += line + "\n";
  }
  if (!seen_sep) throw ParseError("pair file is missing the '|||' separator", 0, 0);
  PairFile pf;
  pf.lhs_src = lhs_src;
  pf.rhs_src = rhs_src;
  pf.lhs = parse_term(lhs_src);
  pf.rhs = parse_term(rhs_src);
  return pf;
}

}  // namespace nfb
