#include "slick/parse.hpp"

#include <cctype>
#include <utility>

namespace slick {

std::string Diag::render() const {
  return std::to_string(line) + ":" + std::to_string(col) + ": " + message;
}

namespace {

enum class Tok {
  Ident,
  Var,
  If,
  And,
  Not,
  Same,
  Diff,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Dot,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

bool is_punct(char c) {
  return c == '(' || c == ')' || c == '{' || c == '}' || c == '.';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> toks;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int tl = line;
    int tc = col;
    if (is_punct(c)) {
      Tok k = c == '(' ? Tok::LParen
              : c == ')' ? Tok::RParen
              : c == '{' ? Tok::LBrace
              : c == '}' ? Tok::RBrace
                         : Tok::Dot;
      toks.push_back({k, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    std::size_t start = i;
    while (i < src.size()) {
      char d = src[i];
      if (std::isspace(static_cast<unsigned char>(d)) || is_punct(d)) break;
      if (d == '/' && i + 1 < src.size() && src[i + 1] == '/') break;
      advance(1);
    }
    std::string text(src.substr(start, i - start));
    Tok k = Tok::Ident;
    if (text == "if") k = Tok::If;
    else if (text == "and") k = Tok::And;
    else if (text == "not") k = Tok::Not;
    else if (text == "same") k = Tok::Same;
    else if (text == "diff") k = Tok::Diff;
    else if (std::isupper(static_cast<unsigned char>(text.front()))) k = Tok::Var;
    toks.push_back({k, std::move(text), tl, tc});
  }
  toks.push_back({Tok::End, "", line, col});
  return toks;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  ParseResult run() {
    ParseResult out;
    while (peek().kind != Tok::End) {
      std::size_t before = pos_;
      parse_rule(out);
      if (pos_ == before) recover();
    }
    out.policy = std::move(policy_);
    out.diags = std::move(diags_);
    return out;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  void error(const Token& at, std::string msg) {
    diags_.push_back({at.line, at.col, std::move(msg)});
  }

  // Skip to just past the next '.' (or end of input).
  void recover() {
    while (peek().kind != Tok::End) {
      if (next().kind == Tok::Dot) break;
    }
  }

  bool at_atom_start() const {
    Tok k = peek().kind;
    return k == Tok::Ident || k == Tok::Var || k == Tok::LParen;
  }

  // element := ident | var | '(' element+ ')'
  // A parenthesised group of one element is a node of one child.
  bool parse_element(Atom& out) {
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      out = Atom::lit(next().text);
      return true;
    }
    if (t.kind == Tok::Var) {
      out = Atom::var(next().text);
      return true;
    }
    if (t.kind == Tok::LParen) {
      next();
      std::vector<Atom> elems;
      while (at_atom_start()) {
        Atom e;
        if (!parse_element(e)) return false;
        elems.push_back(std::move(e));
      }
      if (peek().kind != Tok::RParen) {
        error(peek(), "expected ')'");
        return false;
      }
      next();
      if (elems.empty()) {
        error(t, "empty parentheses");
        return false;
      }
      out = Atom::node(std::move(elems));
      return true;
    }
    error(t, "expected an identifier, variable, or '('");
    return false;
  }

  // atom := element+ ; a sequence of one element collapses to it.
  bool parse_atom(Atom& out) {
    std::vector<Atom> elems;
    while (at_atom_start()) {
      Atom e;
      if (!parse_element(e)) return false;
      elems.push_back(std::move(e));
    }
    if (elems.empty()) {
      error(peek(), "expected an atom");
      return false;
    }
    if (elems.size() == 1) {
      out = std::move(elems.front());
    } else {
      out = Atom::node(std::move(elems));
    }
    return true;
  }

  bool parse_cond(Cond& out) {
    out = Cond{};
    if (peek().kind == Tok::Not) {
      next();
      out.sign = Sign::Neg;
    }
    if (peek().kind == Tok::Same || peek().kind == Tok::Diff) {
      const Token& kw = next();
      out.kind = kw.kind == Tok::Same ? CondKind::Same : CondKind::Diff;
      if (peek().kind != Tok::LBrace) {
        error(peek(), "expected '{' after '" + kw.text + "'");
        return false;
      }
      next();
      while (at_atom_start()) {
        Atom e;
        if (!parse_element(e)) return false;
        out.atoms.push_back(std::move(e));
      }
      if (peek().kind != Tok::RBrace) {
        error(peek(), "expected '}'");
        return false;
      }
      next();
      if (out.atoms.size() < 2) {
        error(kw, "'" + kw.text + "' needs at least two atoms");
        return false;
      }
      return true;
    }
    out.kind = CondKind::True;
    Atom a;
    if (!parse_atom(a)) return false;
    out.atoms.push_back(std::move(a));
    return true;
  }

  void parse_rule(ParseResult&) {
    const Token& start = peek();
    std::vector<Atom> heads;
    Atom h;
    if (!parse_atom(h)) {
      recover();
      return;
    }
    heads.push_back(std::move(h));
    while (peek().kind == Tok::And) {
      next();
      Atom more;
      if (!parse_atom(more)) {
        recover();
        return;
      }
      heads.push_back(std::move(more));
    }
    std::vector<Cond> body;
    if (peek().kind == Tok::If) {
      next();
      Cond c;
      if (!parse_cond(c)) {
        recover();
        return;
      }
      body.push_back(std::move(c));
      while (peek().kind == Tok::And) {
        next();
        Cond more;
        if (!parse_cond(more)) {
          recover();
          return;
        }
        body.push_back(std::move(more));
      }
    }
    if (peek().kind != Tok::Dot) {
      error(peek(), "expected '.' at end of rule");
      recover();
      return;
    }
    next();
    for (Atom& head : heads) {
      Rule rule{std::move(head), body};
      std::vector<std::string> unsafe = unsafe_head_vars(rule);
      if (!unsafe.empty()) {
        std::string names;
        for (const std::string& v : unsafe) {
          if (!names.empty()) names += ", ";
          names += v;
        }
        error(start, "unsafe rule: head variable(s) " + names +
                         " not bound by a positive condition");
        continue;
      }
      policy_.rules.push_back(std::move(rule));
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Policy policy_;
  std::vector<Diag> diags_;
};

}  // namespace

ParseResult parse_policy(std::string_view src) { return Parser(src).run(); }

FactParse parse_fact(std::string_view src) {
  // Reuse the rule parser on "<src>." and demand a single ground-headed rule
  // with no body.
  FactParse out;
  ParseResult r = parse_policy(std::string(src) + " .");
  if (!r.ok()) {
    out.diags = std::move(r.diags);
    return out;
  }
  if (r.policy.rules.size() != 1 || !r.policy.rules.front().body.empty()) {
    out.diags.push_back({1, 1, "expected a single fact"});
    return out;
  }
  const Atom& head = r.policy.rules.front().head;
  if (!head.is_ground()) {
    out.diags.push_back({1, 1, "fact contains variables"});
    return out;
  }
  out.fact = head.to_fact();
  return out;
}

}  // namespace slick
