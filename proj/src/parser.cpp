#include "joinmatch/parser.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <vector>

namespace joinmatch {

namespace {

enum class Tok {
  Ident,
  Int,
  KwType,
  KwDef,
  KwIn,
  KwOr,
  KwMatch,
  KwWith,
  KwInt,
  KwUnit,
  KwChan,
  LParen,
  RParen,
  Comma,
  Amp,
  Bar,
  Arrow,     // ->
  Triangle,  // |>
  Equal,
  Colon,
  Underscore,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  long long value = 0;
  Loc loc;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::KwType: return "'type'";
    case Tok::KwDef: return "'def'";
    case Tok::KwIn: return "'in'";
    case Tok::KwOr: return "'or'";
    case Tok::KwMatch: return "'match'";
    case Tok::KwWith: return "'with'";
    case Tok::KwInt: return "'int'";
    case Tok::KwUnit: return "'unit'";
    case Tok::KwChan: return "'chan'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::Triangle: return "'|>'";
    case Tok::Equal: return "'='";
    case Tok::Colon: return "':'";
    case Tok::Underscore: return "'_'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  Lexer(const std::string& text, bool loader) : src_(text), loader_(loader) {}

  std::vector<Token> lex() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Loc loc{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::Eof, "", 0, loc});
        return out;
      }
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '-' && pos_ + 1 < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        out.push_back(lex_int(loc));
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(lex_ident(loc));
        continue;
      }
      switch (c) {
        case '(': advance(); out.push_back({Tok::LParen, "(", 0, loc}); break;
        case ')': advance(); out.push_back({Tok::RParen, ")", 0, loc}); break;
        case ',': advance(); out.push_back({Tok::Comma, ",", 0, loc}); break;
        case '&': advance(); out.push_back({Tok::Amp, "&", 0, loc}); break;
        case '=': advance(); out.push_back({Tok::Equal, "=", 0, loc}); break;
        case ':': advance(); out.push_back({Tok::Colon, ":", 0, loc}); break;
        case '|':
          advance();
          if (peek() == '>') {
            advance();
            out.push_back({Tok::Triangle, "|>", 0, loc});
          } else {
            out.push_back({Tok::Bar, "|", 0, loc});
          }
          break;
        case '-':
          advance();
          if (peek() == '>') {
            advance();
            out.push_back({Tok::Arrow, "->", 0, loc});
          } else {
            throw SyntaxError("stray '-'", loc);
          }
          break;
        default:
          throw SyntaxError(std::string("unexpected character '") + c + "'", loc);
      }
    }
  }

 private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void advance() {
    if (pos_ >= src_.size()) return;
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_])))
        advance();
      // (* ... *) comments, nested.
      if (pos_ + 1 < src_.size() && src_[pos_] == '(' && src_[pos_ + 1] == '*') {
        Loc start{line_, col_};
        advance();
        advance();
        int depth = 1;
        while (depth > 0) {
          if (pos_ >= src_.size())
            throw SyntaxError("unterminated comment", start);
          if (pos_ + 1 < src_.size() && src_[pos_] == '(' && src_[pos_ + 1] == '*') {
            depth++;
            advance();
            advance();
          } else if (pos_ + 1 < src_.size() && src_[pos_] == '*' &&
                     src_[pos_ + 1] == ')') {
            depth--;
            advance();
            advance();
          } else {
            advance();
          }
        }
        continue;
      }
      break;
    }
  }

  Token lex_int(Loc loc) {
    bool neg = false;
    if (peek() == '-') {
      neg = true;
      advance();
    }
    long long v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      advance();
    }
    return {Tok::Int, "", neg ? -v : v, loc};
  }

  Token lex_ident(Loc loc) {
    std::string s;
    auto ident_char = [&](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' ||
             (loader_ && c == '@');
    };
    while (ident_char(peek())) {
      s += peek();
      advance();
    }
    if (s == "_") return {Tok::Underscore, s, 0, loc};
    if (s == "type") return {Tok::KwType, s, 0, loc};
    if (s == "def") return {Tok::KwDef, s, 0, loc};
    if (s == "in") return {Tok::KwIn, s, 0, loc};
    if (s == "or") return {Tok::KwOr, s, 0, loc};
    if (s == "match") return {Tok::KwMatch, s, 0, loc};
    if (s == "with") return {Tok::KwWith, s, 0, loc};
    if (s == "int") return {Tok::KwInt, s, 0, loc};
    if (s == "unit") return {Tok::KwUnit, s, 0, loc};
    if (s == "chan") return {Tok::KwChan, s, 0, loc};
    return {Tok::Ident, s, 0, loc};
  }

  const std::string& src_;
  bool loader_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseOptions& opts)
      : toks_(std::move(toks)), opts_(opts) {}

  Program parse_program() {
    Program prog;
    while (at(Tok::KwType)) prog.decls.push_back(parse_typedecl());
    for (const auto& d : prog.decls)
      for (const auto& c : d.ctors) ctors_.insert(c.name);
    prog.main = parse_process();
    expect(Tok::Eof);
    return prog;
  }

 private:
  const Token& cur() const { return toks_[idx_]; }
  bool at(Tok t) const { return cur().kind == t; }

  Token take() { return toks_[idx_++]; }

  Token expect(Tok t) {
    if (!at(t))
      throw SyntaxError(std::string("expected ") + tok_name(t) + ", found " +
                            tok_name(cur().kind),
                        cur().loc);
    return take();
  }

  bool is_ctor(const Name& n) const { return ctors_.count(n) > 0; }

  // --- types ---------------------------------------------------------------

  TypeDecl parse_typedecl() {
    Loc loc = expect(Tok::KwType).loc;
    Name name = expect(Tok::Ident).text;
    expect(Tok::Equal);
    TypeDecl decl;
    decl.name = name;
    decl.loc = loc;
    for (;;) {
      TypeDecl::Ctor c;
      Token t = expect(Tok::Ident);
      c.name = t.text;
      c.loc = t.loc;
      if (at(Tok::LParen)) {
        take();
        c.arg_types.push_back(parse_type());
        while (at(Tok::Comma)) {
          take();
          c.arg_types.push_back(parse_type());
        }
        expect(Tok::RParen);
      }
      decl.ctors.push_back(std::move(c));
      if (!at(Tok::Bar)) break;
      take();
    }
    return decl;
  }

  TypePtr parse_type() {
    if (at(Tok::KwInt)) {
      take();
      return Type::integer();
    }
    if (at(Tok::KwUnit)) {
      take();
      return Type::unit();
    }
    if (at(Tok::KwChan)) {
      take();
      expect(Tok::LParen);
      TypePtr t = parse_type();
      expect(Tok::RParen);
      return Type::chan(t);
    }
    if (at(Tok::LParen)) {
      take();
      if (at(Tok::RParen)) {
        take();
        return Type::unit();
      }
      std::vector<TypePtr> elems;
      elems.push_back(parse_type());
      while (at(Tok::Comma)) {
        take();
        elems.push_back(parse_type());
      }
      expect(Tok::RParen);
      if (elems.size() == 1) return elems[0];
      return Type::tuple(std::move(elems));
    }
    Token t = expect(Tok::Ident);
    return Type::named(t.text);
  }

  // --- processes -------------------------------------------------------------

  ProcessPtr parse_process() {
    ProcessPtr p = parse_prefix_process();
    while (at(Tok::Amp)) {
      take();
      ProcessPtr q = parse_prefix_process();
      p = Process::par(std::move(p), std::move(q));
    }
    return p;
  }

  ProcessPtr parse_prefix_process() {
    Loc loc = cur().loc;
    if (at(Tok::Int)) {
      Token t = take();
      if (t.value != 0)
        throw SyntaxError("expected a process; '0' is the only literal process",
                          t.loc);
      return Process::null();
    }
    if (at(Tok::KwDef)) {
      take();
      auto def = std::make_shared<Definition>();
      def->loc = loc;
      def->rules.push_back(parse_rule());
      while (at(Tok::KwOr)) {
        take();
        def->rules.push_back(parse_rule());
      }
      expect(Tok::KwIn);
      ProcessPtr body = parse_process();
      return Process::def(std::move(def), std::move(body), loc);
    }
    if (at(Tok::KwMatch)) {
      take();
      ExprPtr subject = parse_expr();
      expect(Tok::KwWith);
      std::vector<MatchClause> clauses;
      if (at(Tok::Bar)) take();
      clauses.push_back(parse_clause());
      while (at(Tok::Bar)) {
        take();
        clauses.push_back(parse_clause());
      }
      return Process::match(std::move(subject), std::move(clauses), loc);
    }
    if (at(Tok::LParen)) {
      take();
      ProcessPtr p = parse_process();
      expect(Tok::RParen);
      return p;
    }
    if (at(Tok::Ident)) {
      Token t = take();
      if (is_ctor(t.text))
        throw SyntaxError("constructor '" + t.text + "' used as a channel", t.loc);
      expect(Tok::LParen);
      ExprPtr arg;
      if (at(Tok::RParen)) {
        arg = Expression::unit(t.loc);
      } else {
        arg = parse_expr();
      }
      expect(Tok::RParen);
      return Process::send(t.text, std::move(arg), t.loc);
    }
    throw SyntaxError(std::string("expected a process, found ") + tok_name(cur().kind),
                      cur().loc);
  }

  MatchClause parse_clause() {
    PatternPtr p = parse_pattern();
    expect(Tok::Arrow);
    ProcessPtr body = parse_process();
    return {std::move(p), std::move(body), false};
  }

  // --- join patterns ---------------------------------------------------------
  //
  // Parsed as a small or/and tree, then normalized to the conjunct-of-
  // alternatives form. `or` inside join patterns is loader-only syntax.

  struct JTree {
    enum class Kind { Msg, And, Or } kind;
    MessagePattern msg;
    std::vector<JTree> kids;
  };

  ReactionRule parse_rule() {
    Loc loc = cur().loc;
    JTree t = parse_jor();
    expect(Tok::Triangle);
    ProcessPtr body = parse_process();
    ReactionRule rule;
    rule.pattern = normalize_join(t, loc);
    rule.body = std::move(body);
    rule.loc = loc;
    return rule;
  }

  JTree parse_jor() {
    JTree t = parse_jand();
    if (!at(Tok::KwOr)) return t;
    if (!opts_.loader)
      throw SyntaxError("'or' in join patterns is produced by the compiler only",
                        cur().loc);
    JTree out{JTree::Kind::Or, {}, {}};
    out.kids.push_back(std::move(t));
    while (at(Tok::KwOr)) {
      take();
      out.kids.push_back(parse_jand());
    }
    return out;
  }

  JTree parse_jand() {
    JTree t = parse_jatom();
    if (!at(Tok::Amp)) return t;
    JTree out{JTree::Kind::And, {}, {}};
    out.kids.push_back(std::move(t));
    while (at(Tok::Amp)) {
      take();
      out.kids.push_back(parse_jatom());
    }
    return out;
  }

  JTree parse_jatom() {
    if (at(Tok::LParen)) {
      take();
      JTree t = parse_jor();
      expect(Tok::RParen);
      return t;
    }
    Token t = expect(Tok::Ident);
    if (is_ctor(t.text))
      throw SyntaxError("constructor '" + t.text + "' used as a channel", t.loc);
    expect(Tok::LParen);
    MessagePattern m;
    m.channel = t.text;
    m.loc = t.loc;
    if (at(Tok::RParen)) {
      m.arg = Pattern::ctor(tuple_ctor_name(0), {});
    } else {
      m.arg = parse_pattern();
    }
    if (at(Tok::Colon)) {
      take();
      m.annot = parse_type();
    }
    expect(Tok::RParen);
    return JTree{JTree::Kind::Msg, std::move(m), {}};
  }

  // Expands a join tree into flat alternatives (lists of messages).
  static std::vector<JoinAlternative> flatten(const JTree& t) {
    switch (t.kind) {
      case JTree::Kind::Msg:
        return {{t.msg}};
      case JTree::Kind::Or: {
        std::vector<JoinAlternative> out;
        for (const auto& k : t.kids) {
          auto sub = flatten(k);
          out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
      }
      case JTree::Kind::And: {
        std::vector<JoinAlternative> out{{}};
        for (const auto& k : t.kids) {
          auto sub = flatten(k);
          std::vector<JoinAlternative> next;
          for (const auto& prefix : out)
            for (const auto& alt : sub) {
              JoinAlternative merged = prefix;
              merged.insert(merged.end(), alt.begin(), alt.end());
              next.push_back(std::move(merged));
            }
          out = std::move(next);
        }
        return out;
      }
    }
    return {};
  }

  JoinPattern normalize_join(const JTree& t, Loc loc) {
    JoinPattern out;
    if (t.kind == JTree::Kind::And) {
      for (const auto& k : t.kids) {
        JoinConjunct conj;
        conj.alts = flatten(k);
        out.conjuncts.push_back(std::move(conj));
      }
    } else {
      JoinConjunct conj;
      conj.alts = flatten(t);
      out.conjuncts.push_back(std::move(conj));
    }
    for (const auto& conj : out.conjuncts)
      if (conj.alts.empty() || conj.alts[0].empty())
        throw SyntaxError("empty join pattern", loc);
    return out;
  }

  // --- patterns and expressions ----------------------------------------------

  PatternPtr parse_pattern() {
    if (at(Tok::Underscore)) {
      take();
      return Pattern::wildcard();
    }
    if (at(Tok::Int)) {
      Token t = take();
      return Pattern::integer(t.value);
    }
    if (at(Tok::LParen)) {
      take();
      if (at(Tok::RParen)) {
        take();
        return Pattern::ctor(tuple_ctor_name(0), {});
      }
      std::vector<PatternPtr> elems;
      elems.push_back(parse_pattern());
      while (at(Tok::Comma)) {
        take();
        elems.push_back(parse_pattern());
      }
      expect(Tok::RParen);
      if (elems.size() == 1) return elems[0];
      return Pattern::ctor(tuple_ctor_name(elems.size()), std::move(elems));
    }
    if (at(Tok::Ident)) {
      Token t = take();
      if (is_ctor(t.text)) {
        std::vector<PatternPtr> args;
        if (at(Tok::LParen)) {
          take();
          args.push_back(parse_pattern());
          while (at(Tok::Comma)) {
            take();
            args.push_back(parse_pattern());
          }
          expect(Tok::RParen);
        }
        return Pattern::ctor(t.text, std::move(args));
      }
      return Pattern::var(t.text);
    }
    throw SyntaxError(std::string("expected a pattern, found ") + tok_name(cur().kind),
                      cur().loc);
  }

  ExprPtr parse_expr() {
    Loc loc = cur().loc;
    if (at(Tok::Int)) {
      Token t = take();
      return Expression::integer(t.value, t.loc);
    }
    if (at(Tok::LParen)) {
      take();
      if (at(Tok::RParen)) {
        take();
        return Expression::unit(loc);
      }
      std::vector<ExprPtr> elems;
      elems.push_back(parse_expr());
      while (at(Tok::Comma)) {
        take();
        elems.push_back(parse_expr());
      }
      expect(Tok::RParen);
      if (elems.size() == 1) return elems[0];
      return Expression::ctor(tuple_ctor_name(elems.size()), std::move(elems), loc);
    }
    if (at(Tok::Ident)) {
      Token t = take();
      if (is_ctor(t.text)) {
        std::vector<ExprPtr> args;
        if (at(Tok::LParen)) {
          take();
          args.push_back(parse_expr());
          while (at(Tok::Comma)) {
            take();
            args.push_back(parse_expr());
          }
          expect(Tok::RParen);
        }
        return Expression::ctor(t.text, std::move(args), t.loc);
      }
      if (at(Tok::LParen))
        throw SyntaxError("'" + t.text + "' is not a constructor", t.loc);
      return Expression::var(t.text, t.loc);
    }
    throw SyntaxError(std::string("expected an expression, found ") +
                          tok_name(cur().kind),
                      cur().loc);
  }

  std::vector<Token> toks_;
  ParseOptions opts_;
  size_t idx_ = 0;
  std::set<Name> ctors_;
};

}  // namespace

Program parse(const std::string& text, const ParseOptions& opts) {
  Lexer lexer(text, opts.loader);
  Parser parser(lexer.lex(), opts);
  return parser.parse_program();
}

}  // namespace joinmatch
