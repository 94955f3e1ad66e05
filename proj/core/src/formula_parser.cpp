#include "ahmc/formula.hpp"

#include <cctype>
#include <set>

namespace ahmc {

namespace {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  Dot,
  Bang,
  Amp,
  Pipe,
  Arrow,
  Less,
  LessEq,
  Equal,
  NotEqual,
  GreaterEq,
  Greater,
  Plus,
  Minus,
  Star,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> tokens;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t count) {
    for (std::size_t c = 0; c < count; ++c) {
      if (src[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int startLine = line;
    const int startColumn = column;
    auto push = [&](Tok kind, std::size_t length) {
      tokens.push_back({kind, std::string(src.substr(i, length)), startLine, startColumn});
      advance(length);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::Ident, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      auto digits = [&] {
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      };
      digits();
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        digits();
      }
      if (j + 1 < src.size() && src[j] == '/' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        digits();
      }
      push(Tok::Number, j - i);
      continue;
    }
    const std::string_view rest = src.substr(i);
    if (rest.starts_with("->")) { push(Tok::Arrow, 2); continue; }
    if (rest.starts_with("<=")) { push(Tok::LessEq, 2); continue; }
    if (rest.starts_with(">=")) { push(Tok::GreaterEq, 2); continue; }
    if (rest.starts_with("!=")) { push(Tok::NotEqual, 2); continue; }
    switch (c) {
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '.': push(Tok::Dot, 1); continue;
      case '!': push(Tok::Bang, 1); continue;
      case '&': push(Tok::Amp, 1); continue;
      case '|': push(Tok::Pipe, 1); continue;
      case '<': push(Tok::Less, 1); continue;
      case '=': push(Tok::Equal, 1); continue;
      case '>': push(Tok::Greater, 1); continue;
      case '+': push(Tok::Plus, 1); continue;
      case '-': push(Tok::Minus, 1); continue;
      case '*': push(Tok::Star, 1); continue;
      default: break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, column);
  }
  tokens.push_back({Tok::End, "", line, column});
  return tokens;
}

const std::set<std::string>& reserved() {
  static const std::set<std::string> words{"exists", "forall", "sched", "state", "stutter", "true",
                                           "false",  "P",      "X",     "U",     "F",       "G"};
  return words;
}

class Parser {
public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  HyperFormula formula() {
    HyperFormula f;
    bool haveScheduler = false;
    enum class Stage { Scheduler, States, Stutters } stage = Stage::Scheduler;
    while (peekIdent("exists") || peekIdent("forall")) {
      const Quantifier q = next().text == "forall" ? Quantifier::Forall : Quantifier::Exists;
      const Token kind = expect(Tok::Ident, "quantifier kind 'sched', 'state' or 'stutter'");
      const Token name = variableName();
      if (kind.text == "sched") {
        if (haveScheduler)
          throw UnsupportedFragment("only a single scheduler quantifier is supported (line " +
                                    std::to_string(kind.line) + ")");
        if (stage != Stage::Scheduler) fail(kind, "scheduler quantifier must come first");
        haveScheduler = true;
        f.scheduler = {q, name.text};
        stage = Stage::States;
      } else if (kind.text == "state") {
        if (stage == Stage::Stutters) fail(kind, "state quantifiers must precede stutter quantifiers");
        expect(Tok::LParen, "'('");
        const Token bound = variableName();
        expect(Tok::RParen, "')'");
        f.states.push_back({q, name.text, bound.text});
        stage = Stage::States;
      } else if (kind.text == "stutter") {
        expect(Tok::LParen, "'('");
        const Token bound = variableName();
        expect(Tok::RParen, "')'");
        f.stutters.push_back({q, name.text, bound.text});
        stage = Stage::Stutters;
      } else {
        fail(kind, "expected quantifier kind 'sched', 'state' or 'stutter'");
      }
      expect(Tok::Dot, "'.'");
    }
    if (!haveScheduler) fail(peek(), "formula must start with a scheduler quantifier");
    f.body = body();
    expect(Tok::End, "end of input");
    return f;
  }

  NodePtr bodyOnly() {
    NodePtr b = body();
    expect(Tok::End, "end of input");
    return b;
  }

private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool peekIdent(std::string_view word) const { return at(Tok::Ident) && peek().text == word; }

  [[noreturn]] static void fail(const Token& token, const std::string& message) {
    throw ParseError(message + (token.kind == Tok::End ? " at end of input" : ", found '" + token.text + "'"),
                     token.line, token.column);
  }

  Token expect(Tok kind, const std::string& what) {
    if (!at(kind)) fail(peek(), "expected " + what);
    return next();
  }

  Token variableName() {
    Token t = expect(Tok::Ident, "identifier");
    if (reserved().count(t.text)) fail(t, "reserved word used as a name");
    return t;
  }

  NodePtr body() { return implication(); }

  NodePtr implication() {
    NodePtr lhs = disjunction();
    while (at(Tok::Arrow)) {
      next();
      lhs = mkImplies(lhs, disjunction());
    }
    return lhs;
  }

  NodePtr disjunction() {
    NodePtr lhs = conjunction();
    while (at(Tok::Pipe)) {
      next();
      lhs = mkOr(lhs, conjunction());
    }
    return lhs;
  }

  NodePtr conjunction() {
    NodePtr lhs = unary();
    while (at(Tok::Amp)) {
      next();
      lhs = mkAnd(lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (at(Tok::Bang)) {
      next();
      return mkNot(unary());
    }
    return primary();
  }

  NodePtr primary() {
    if (peekIdent("true")) {
      next();
      return mkTrue();
    }
    if (peekIdent("false")) {
      next();
      return mkFalse();
    }
    if (peekIdent("P") || at(Tok::Number)) return comparison();
    if (at(Tok::LParen)) {
      // Either a parenthesised probability expression starting a comparison,
      // or a parenthesised state formula.
      const std::size_t saved = pos_;
      try {
        return comparison();
      } catch (const ParseError&) {
        pos_ = saved;
      }
      next();
      NodePtr inner = body();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (at(Tok::Ident)) {
      const Token name = next();
      if (reserved().count(name.text)) fail(name, "unexpected keyword");
      expect(Tok::LParen, "'(' after proposition '" + name.text + "'");
      const Token var = variableName();
      expect(Tok::RParen, "')'");
      return mkAtom(name.text, var.text);
    }
    fail(peek(), "expected a state formula");
  }

  NodePtr comparison() {
    NodePtr lhs = probSum();
    CompareOp op;
    switch (peek().kind) {
      case Tok::Less: op = CompareOp::Less; break;
      case Tok::LessEq: op = CompareOp::LessEq; break;
      case Tok::Equal: op = CompareOp::Equal; break;
      case Tok::NotEqual: op = CompareOp::NotEqual; break;
      case Tok::GreaterEq: op = CompareOp::GreaterEq; break;
      case Tok::Greater: op = CompareOp::Greater; break;
      default: fail(peek(), "expected comparison operator");
    }
    next();
    return mkCompare(op, lhs, probSum());
  }

  NodePtr probSum() {
    NodePtr lhs = probProduct();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const NodeKind kind = next().kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
      lhs = mkArith(kind, lhs, probProduct());
    }
    return lhs;
  }

  NodePtr probProduct() {
    NodePtr lhs = probFactor();
    while (at(Tok::Star)) {
      next();
      lhs = mkArith(NodeKind::Mul, lhs, probFactor());
    }
    return lhs;
  }

  NodePtr probFactor() {
    bool negative = false;
    if (at(Tok::Minus)) {
      next();
      if (!at(Tok::Number)) fail(peek(), "expected a number after unary '-'");
      negative = true;
    }
    if (at(Tok::Number)) {
      const Token number = next();
      try {
        const Rational value = parseRational(number.text);
        return mkConst(negative ? Rational(-value) : value);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), number.line, number.column);
      }
    }
    if (peekIdent("P")) {
      next();
      expect(Tok::LParen, "'(' after P");
      NodePtr path = pathFormula();
      expect(Tok::RParen, "')' closing P(...)");
      return path;
    }
    if (at(Tok::LParen)) {
      next();
      NodePtr inner = probSum();
      expect(Tok::RParen, "')'");
      return inner;
    }
    fail(peek(), "expected a probability expression");
  }

  NodePtr pathFormula() {
    if (peekIdent("X")) {
      next();
      return mkNext(body());
    }
    if (peekIdent("F")) {
      next();
      return mkFinally(body());
    }
    if (peekIdent("G")) {
      next();
      return mkGlobally(body());
    }
    NodePtr lhs = unary();
    if (!peekIdent("U")) fail(peek(), "expected 'U' in path formula");
    next();
    return mkUntil(lhs, unary());
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void checkAtomScope(const Node& node, const std::set<std::string>& stutterVars) {
  if (node.kind == NodeKind::Atom && !stutterVars.count(node.variable))
    throw WellFormednessError("atom '" + node.ap + "(" + node.variable + ")' uses unbound stutter variable '" +
                              node.variable + "'");
  for (const auto& child : node.children) checkAtomScope(*child, stutterVars);
}

}  // namespace

void checkWellFormed(const HyperFormula& formula) {
  std::set<std::string> names{formula.scheduler.variable};
  auto declare = [&](const std::string& name) {
    if (!names.insert(name).second) throw WellFormednessError("variable '" + name + "' is quantified twice");
  };
  std::set<std::string> stateVars;
  for (const auto& q : formula.states) {
    declare(q.variable);
    if (q.scheduler != formula.scheduler.variable)
      throw WellFormednessError("state quantifier '" + q.variable + "' refers to unbound scheduler variable '" +
                                q.scheduler + "'");
    stateVars.insert(q.variable);
  }
  std::set<std::string> stutterVars;
  for (const auto& q : formula.stutters) {
    declare(q.variable);
    if (!stateVars.count(q.state))
      throw WellFormednessError("stutter quantifier '" + q.variable + "' refers to unbound state variable '" +
                                q.state + "'");
    stutterVars.insert(q.variable);
  }
  if (formula.states.empty()) throw WellFormednessError("formula needs at least one state quantifier");
  if (formula.stutters.empty()) throw WellFormednessError("formula needs at least one stutter quantifier");
  if (!formula.body) throw WellFormednessError("formula has no body");
  checkAtomScope(*formula.body, stutterVars);
}

HyperFormula parseFormula(std::string_view text) {
  HyperFormula f = Parser(text).formula();
  checkWellFormed(f);
  return f;
}

NodePtr parseBody(std::string_view text) { return Parser(text).bodyOnly(); }

}  // namespace ahmc
