#pragma once
// Lexer and recursive-descent parser for .qpel files and proof scripts.

#include "qpel/printer.hpp"
#include "qpel/source.hpp"

#include <json.hpp>

#include <cctype>
#include <map>
#include <set>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <vector>

namespace qpel {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, std::vector<std::string> expected, const std::string& found,
             const std::string& detail = "")
      : std::runtime_error(format(line, column, expected, found, detail)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string format(int line, int column, const std::vector<std::string>& expected, const std::string& found,
                            const std::string& detail) {
    std::string s = std::to_string(line) + ":" + std::to_string(column) + ": ";
    if (!detail.empty()) return s + detail;
    s += "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) s += (i ? ", " : "") + expected[i];
    return s + " but found " + found;
  }
  int line_, column_;
  std::vector<std::string> expected_;
};

struct Token {
  enum class Kind { Ident, Number, String, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1, column = 1;
  std::size_t offset = 0;

  std::string describe() const {
    if (kind == Kind::End) return "end of input";
    return "'" + text + "'";
  }
};

class Lexer {
 public:
  explicit Lexer(std::string text) : src_(std::move(text)) {}

  const Token& peek() {
    if (!cached_) {
      tok_ = lex();
      cached_ = true;
    }
    return tok_;
  }
  Token next() {
    Token t = peek();
    cached_ = false;
    return t;
  }

  /// Reads a rule name ([a-z0-9-]+) starting at the next token.
  Token rule_name() {
    const Token& t = peek();
    cached_ = false;
    pos_ = t.offset;
    line_ = t.line;
    col_ = t.column;
    Token out;
    out.kind = Token::Kind::Ident;
    out.line = line_;
    out.column = col_;
    out.offset = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '-')) {
      // Stop before a "->" arrow.
      if (src_[pos_] == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') break;
      out.text += src_[pos_];
      advance();
    }
    if (out.text.empty()) throw ParseError(t.line, t.column, {"rule name"}, t.describe());
    return out;
  }

 private:
  void advance() {
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
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (pos_ + 1 < src_.size() && src_[pos_] == '-' && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      return;
    }
  }

  bool at(const char* s) const { return src_.compare(pos_, std::char_traits<char>::length(s), s) == 0; }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

  Token lex() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = col_;
    t.offset = pos_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    auto take = [&](std::size_t n, Token::Kind k) {
      t.kind = k;
      for (std::size_t i = 0; i < n; ++i) {
        t.text += src_[pos_];
        advance();
      }
      return t;
    };
    if (at("_|_")) return take(3, Token::Kind::Sym);
    if (at("o+")) return take(2, Token::Kind::Sym);
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      t.kind = Token::Kind::Number;
      t.text += c;
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        t.text += src_[pos_];
        advance();
      }
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        t.text += '/';
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          t.text += src_[pos_];
          advance();
        }
      }
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::Kind::Ident;
      while (pos_ < src_.size() && ident_char(src_[pos_])) {
        t.text += src_[pos_];
        advance();
      }
      return t;
    }
    if (c == '"') {
      t.kind = Token::Kind::String;
      advance();
      while (pos_ < src_.size() && src_[pos_] != '"') {
        t.text += src_[pos_];
        advance();
      }
      if (pos_ >= src_.size()) throw ParseError(t.line, t.column, {}, "", "unterminated string");
      advance();
      return t;
    }
    for (const char* two : {"->", "<=", "=="})
      if (at(two)) return take(2, Token::Kind::Sym);
    if (std::string("(){}[],;:=|*+.").find(c) != std::string::npos) return take(1, Token::Kind::Sym);
    throw ParseError(line_, col_, {}, "", std::string("unexpected character '") + c + "'");
  }

  std::string src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
  bool cached_ = false;
};

/// Earlier declarations visible to later ones; references are inlined.
struct ParseEnv {
  std::map<std::string, TypePtr> types;
  std::map<std::string, TermPtr> terms;
  std::map<std::string, EffectPtr> effects;
};

inline const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "let",   "in",    "case",  "of",    "inl",   "inr",   "measure", "unit",  "plus",  "X",
      "Z",     "E",     "I",     "qbit",  "caseE", "bot",   "proj",    "scalar", "type", "term",
      "effect", "lemma", "check", "on",    "by",    "and",   "using",   "sidecar"};
  return words;
}

class Parser {
 public:
  explicit Parser(std::string text, ParseEnv env = {}) : lex_(std::move(text)), env_(std::move(env)) {}

  SourceFile parse_file() {
    SourceFile f;
    std::set<std::string> names;
    while (lex_.peek().kind != Token::Kind::End) {
      Token head = lex_.peek();
      Decl d = parse_decl();
      d.loc = {head.line, head.column};
      if (!std::holds_alternative<CheckDecl>(d.body) && !names.insert(d.name()).second)
        throw ParseError(head.line, head.column, {}, "", "duplicate declaration '" + d.name() + "'");
      f.decls.push_back(std::move(d));
    }
    return f;
  }

  TypePtr parse_type() {
    TypePtr t = type_tensor();
    while (is_sym("+")) {
      lex_.next();
      t = sum_type(t, type_tensor());
    }
    return t;
  }

  TermPtr parse_term() {
    if (is_kw("let")) return term_let();
    if (is_kw("case")) return term_case();
    if (is_kw("measure")) return term_measure();
    TermPtr acc = term_app();
    while (is_sym("*")) {
      lex_.next();
      acc = mk::pair(acc, term_app());
    }
    return acc;
  }

  EffectPtr parse_effect() {
    if (is_kw("caseE")) {
      lex_.next();
      TermPtr m = parse_term();
      expect_kw("of");
      expect_kw("inl");
      std::string x = ident("variable");
      expect_sym("->");
      EffectPtr l = scoped({x}, [&] { return parse_effect(); });
      expect_sym("|");
      expect_kw("inr");
      std::string y = ident("variable");
      expect_sym("->");
      EffectPtr r = scoped({y}, [&] { return parse_effect(); });
      return mk::case_eff(m, x, l, y, r);
    }
    EffectPtr a = effect_mult();
    if (!is_sym("o+")) return a;
    lex_.next();
    EffectPtr b = effect_mult();
    if (is_sym("o+")) fail_detail("'o+' is non-associative; add parentheses");
    return mk::ovee(a, b);
  }

  Context parse_context() {
    expect_sym("(");
    Context ctx;
    if (!is_sym(")")) {
      for (;;) {
        Token at = lex_.peek();
        std::string x = ident("variable");
        expect_sym(":");
        TypePtr a = parse_type();
        if (lookup(ctx, x)) throw ParseError(at.line, at.column, {}, "", "duplicate variable '" + x + "' in context");
        ctx.push_back({x, a});
        if (!is_sym(",")) break;
        lex_.next();
      }
    }
    expect_sym(")");
    return ctx;
  }

  Script parse_script(bool validate_names) {
    Token name = lex_.rule_name();
    if (validate_names && name.text != "auto" && !is_rule_name(name.text))
      throw ParseError(name.line, name.column, {}, "", "unknown rule '" + name.text + "'");
    Script s;
    s.rule = name.text;
    if (is_sym("[")) {
      lex_.next();
      for (;;) {
        parse_arg(s.args);
        if (!is_sym(",")) break;
        lex_.next();
      }
      expect_sym("]");
    }
    if (is_sym("{")) {
      lex_.next();
      for (;;) {
        s.premises.push_back(parse_script(validate_names));
        if (!is_sym(";")) break;
        lex_.next();
      }
      expect_sym("}");
    }
    return s;
  }

  void expect_end() {
    if (lex_.peek().kind != Token::Kind::End) fail({"end of input"});
  }

  const ParseEnv& env() const { return env_; }

 private:
  // ---- helpers
  bool is_sym(const char* s) {
    const Token& t = lex_.peek();
    return t.kind == Token::Kind::Sym && t.text == s;
  }
  bool is_kw(const char* s) {
    const Token& t = lex_.peek();
    return t.kind == Token::Kind::Ident && t.text == s;
  }
  [[noreturn]] void fail(std::vector<std::string> expected) {
    const Token& t = lex_.peek();
    throw ParseError(t.line, t.column, std::move(expected), t.describe());
  }
  [[noreturn]] void fail_detail(const std::string& msg) {
    const Token& t = lex_.peek();
    throw ParseError(t.line, t.column, {}, "", msg);
  }
  void expect_sym(const char* s) {
    if (!is_sym(s)) fail({std::string("'") + s + "'"});
    lex_.next();
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail({std::string("'") + s + "'"});
    lex_.next();
  }
  std::string ident(const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Ident || reserved_words().count(t.text)) fail({what});
    return lex_.next().text;
  }
  Rational number(const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Number) fail({what});
    return parse_rational(lex_.next().text);
  }
  int integer(const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Number || t.text.find('/') != std::string::npos) fail({what});
    return std::stoi(lex_.next().text);
  }

  template <class F>
  std::invoke_result_t<F&> scoped(std::vector<std::string> names, F&& f) {
    for (auto& n : names) scope_.push_back(n);
    auto r = f();
    scope_.resize(scope_.size() - names.size());
    return r;
  }
  bool in_scope(const std::string& n) const {
    for (const auto& s : scope_)
      if (s == n) return true;
    return false;
  }

  // ---- types
  TypePtr type_tensor() {
    TypePtr t = type_atom();
    while (is_sym("*")) {
      lex_.next();
      t = tensor_type(t, type_atom());
    }
    return t;
  }
  TypePtr type_atom() {
    if (is_kw("I")) {
      lex_.next();
      return unit_type();
    }
    if (is_kw("qbit")) {
      lex_.next();
      return qbit_type();
    }
    if (is_sym("(")) {
      lex_.next();
      TypePtr t = parse_type();
      expect_sym(")");
      return t;
    }
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Ident) {
      auto it = env_.types.find(t.text);
      if (it != env_.types.end()) {
        lex_.next();
        return it->second;
      }
    }
    fail({"'I'", "'qbit'", "'('", "type name"});
  }

  // ---- terms
  TermPtr term_let() {
    lex_.next();
    std::string x = ident("variable");
    if (is_sym("=")) {
      lex_.next();
      TermPtr m = parse_term();
      expect_kw("in");
      TermPtr n = scoped({x}, [&] { return parse_term(); });
      return desugar_let(x, m, n);
    }
    expect_sym("*");
    std::string y = ident("variable");
    expect_sym("=");
    TermPtr m = parse_term();
    expect_kw("in");
    TermPtr n = scoped({x, y}, [&] { return parse_term(); });
    return mk::let_pair(x, y, m, n);
  }

  TermPtr term_case() {
    lex_.next();
    TermPtr m = parse_term();
    expect_kw("of");
    expect_kw("inl");
    std::string x = ident("variable");
    expect_sym("->");
    TermPtr n = scoped({x}, [&] { return parse_term(); });
    expect_sym("|");
    expect_kw("inr");
    std::string y = ident("variable");
    expect_sym("->");
    TermPtr p = scoped({y}, [&] { return parse_term(); });
    return mk::case_of(m, x, n, y, p);
  }

  TermPtr term_measure() {
    lex_.next();
    expect_sym("{");
    std::vector<MeasureBranch> bs;
    for (;;) {
      EffectPtr e = parse_effect();
      expect_sym("->");
      TermPtr m = parse_term();
      bs.push_back({e, m});
      if (!is_sym("|")) break;
      lex_.next();
    }
    expect_sym("}");
    return mk::measure(std::move(bs));
  }

  TermPtr term_app() {
    if (is_kw("inl")) {
      lex_.next();
      return mk::inl(term_app());
    }
    if (is_kw("inr")) {
      lex_.next();
      return mk::inr(term_app());
    }
    if (is_kw("X")) {
      lex_.next();
      return mk::pauli_x(term_app());
    }
    if (is_kw("Z")) {
      lex_.next();
      return mk::pauli_z(term_app());
    }
    if (is_kw("E")) {
      lex_.next();
      TermPtr a = term_atom();
      return mk::cz(a, term_atom());
    }
    return term_atom();
  }

  TermPtr term_atom() {
    if (is_kw("unit")) {
      lex_.next();
      return mk::unit();
    }
    if (is_kw("plus")) {
      lex_.next();
      return mk::new_plus();
    }
    if (is_sym("(")) {
      lex_.next();
      TermPtr t = parse_term();
      expect_sym(")");
      return t;
    }
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Ident && !reserved_words().count(t.text)) {
      std::string n = lex_.next().text;
      if (!in_scope(n)) {
        auto it = env_.terms.find(n);
        if (it != env_.terms.end()) return it->second;
      }
      return mk::var(n);
    }
    fail({"variable", "'unit'", "'plus'", "'('", "'let'", "'case'", "'measure'", "'inl'", "'inr'", "'X'", "'Z'",
          "'E'"});
  }

  // ---- effects
  EffectPtr effect_mult() {
    EffectPtr a = effect_atom();
    if (!is_sym(".")) return a;
    lex_.next();
    EffectPtr b = effect_atom();
    if (is_sym(".")) fail_detail("'.' is non-associative; add parentheses");
    return mk::mult(a, b);
  }

  EffectPtr effect_atom() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Number && (t.text == "0" || t.text == "1")) {
      bool zero = t.text == "0";
      lex_.next();
      return zero ? mk::zero() : mk::one();
    }
    if (is_kw("bot")) {
      lex_.next();
      expect_sym("(");
      EffectPtr e = parse_effect();
      expect_sym(")");
      return mk::bot(e);
    }
    if (is_kw("proj")) {
      lex_.next();
      expect_sym("(");
      TermPtr m = parse_term();
      expect_sym(",");
      Token at = lex_.peek();
      Rational q = number("angle (multiple of pi)");
      if (!Angle::in_range(q))
        throw ParseError(at.line, at.column, {}, "", "angle " + to_string(q) + " outside [0, 2)");
      expect_sym(")");
      return mk::proj_plus(m, Angle(q));
    }
    if (is_kw("scalar")) {
      lex_.next();
      expect_sym("(");
      Token at = lex_.peek();
      Rational v = number("rational in [0, 1]");
      if (v < 0 || v > 1) throw ParseError(at.line, at.column, {}, "", "scalar " + to_string(v) + " outside [0, 1]");
      expect_sym(")");
      return mk::scalar(v);
    }
    if (is_sym("(")) {
      lex_.next();
      EffectPtr e = parse_effect();
      expect_sym(")");
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      auto it = env_.effects.find(t.text);
      if (it != env_.effects.end()) {
        lex_.next();
        return it->second;
      }
    }
    fail({"'0'", "'1'", "'bot'", "'proj'", "'scalar'", "'caseE'", "'('", "effect name"});
  }

  // ---- scripts
  void parse_arg(ScriptArgs& a) {
    Token key = lex_.peek();
    if (key.kind != Token::Kind::Ident) fail({"argument name"});
    std::string k = lex_.next().text;
    expect_sym("=");
    if (k == "term") {
      a.term = parse_term();
    } else if (k == "effect") {
      a.effect = parse_effect();
    } else if (k == "type") {
      a.type = parse_type();
    } else if (k == "perm") {
      expect_sym("(");
      for (;;) {
        a.perm.push_back(integer("integer"));
        if (!is_sym(",")) break;
        lex_.next();
      }
      expect_sym(")");
    } else if (k == "var") {
      a.var = ident("variable");
    } else if (k == "pos") {
      a.pos = integer("integer");
    } else if (k == "depth") {
      a.depth = integer("integer");
    } else {
      throw ParseError(key.line, key.column, {"term", "effect", "type", "perm", "var", "pos", "depth"},
                       "'" + k + "'");
    }
  }

  std::vector<Script> parse_using() {
    std::vector<Script> out;
    if (!is_kw("using")) return out;
    lex_.next();
    do {
      expect_sym("{");
      out.push_back(parse_script(false));
      expect_sym("}");
    } while (is_sym("{"));
    return out;
  }

  // ---- declarations
  Decl parse_decl() {
    Decl d;
    if (is_kw("type")) {
      lex_.next();
      TypeDecl t;
      t.name = ident("type name");
      expect_sym("=");
      t.type = parse_type();
      env_.types[t.name] = t.type;
      d.body = std::move(t);
    } else if (is_kw("term")) {
      lex_.next();
      TermDecl t;
      t.name = ident("declaration name");
      t.ctx = parse_context();
      expect_sym(":");
      t.type = parse_type();
      expect_sym("=");
      t.term = with_ctx(t.ctx, [&] { return parse_term(); });
      t.obligations = parse_using();
      env_.terms[t.name] = t.term;
      d.body = std::move(t);
    } else if (is_kw("effect")) {
      lex_.next();
      EffectDecl e;
      e.name = ident("declaration name");
      e.ctx = parse_context();
      expect_sym("=");
      e.effect = with_ctx(e.ctx, [&] { return parse_effect(); });
      e.obligations = parse_using();
      env_.effects[e.name] = e.effect;
      d.body = std::move(e);
    } else if (is_kw("lemma")) {
      lex_.next();
      d.body = parse_lemma();
    } else if (is_kw("check")) {
      lex_.next();
      CheckDecl c;
      c.target = ident("declaration name");
      if (is_kw("on")) {
        lex_.next();
        c.backend = ident("backend name");
      }
      d.body = std::move(c);
    } else {
      fail({"'type'", "'term'", "'effect'", "'lemma'", "'check'"});
    }
    return d;
  }

  template <class F>
  std::invoke_result_t<F&> with_ctx(const Context& ctx, F&& f) {
    std::vector<std::string> names;
    for (const auto& b : ctx) names.push_back(b.name);
    return scoped(names, std::forward<F>(f));
  }

  LemmaDecl parse_lemma() {
    LemmaDecl l;
    l.name = ident("lemma name");
    Context ctx = parse_context();
    with_ctx(ctx, [&] {
      if (is_kw("term")) {
        lex_.next();
        TermPtr m = parse_term();
        if (is_sym("=")) {
          lex_.next();
          TermPtr n = parse_term();
          expect_sym(":");
          l.goal = Judgement::term_eq(ctx, m, n, parse_type());
        } else {
          expect_sym(":");
          l.goal = Judgement::typing(ctx, m, parse_type());
        }
      } else if (is_kw("effect")) {
        lex_.next();
        EffectPtr phi = parse_effect();
        if (is_sym("<=")) {
          lex_.next();
          l.goal = Judgement::leq(ctx, phi, parse_effect());
        } else if (is_sym("==")) {
          lex_.next();
          l.goal = Judgement::equiv(ctx, phi, parse_effect());
        } else if (is_sym("_|_")) {
          lex_.next();
          l.goal = Judgement::perp(ctx, phi, parse_effect());
          l.perp_notation = true;
        } else {
          l.goal = Judgement::eff(ctx, phi);
        }
      } else {
        fail({"'term'", "'effect'"});
      }
      if (is_kw("by")) {
        lex_.next();
        if (is_kw("sidecar")) {
          lex_.next();
          const Token& t = lex_.peek();
          if (t.kind != Token::Kind::String) fail({"string"});
          l.sidecar = lex_.next().text;
        } else {
          expect_sym("{");
          l.proofs.push_back(parse_script(false));
          expect_sym("}");
          if (is_kw("and")) {
            lex_.next();
            expect_sym("{");
            l.proofs.push_back(parse_script(false));
            expect_sym("}");
          }
        }
      }
      return 0;
    });
    return l;
  }

  Lexer lex_;
  ParseEnv env_;
  std::vector<std::string> scope_;
};

// ---------------------------------------------------------------------------
// Entry points

inline SourceFile parse(const std::string& text) { return Parser(text).parse_file(); }

inline TypePtr parse_type_text(const std::string& text, const ParseEnv& env = {}) {
  Parser p(text, env);
  TypePtr t = p.parse_type();
  p.expect_end();
  return t;
}
inline TermPtr parse_term_text(const std::string& text, const ParseEnv& env = {}) {
  Parser p(text, env);
  TermPtr t = p.parse_term();
  p.expect_end();
  return t;
}
inline EffectPtr parse_effect_text(const std::string& text, const ParseEnv& env = {}) {
  Parser p(text, env);
  EffectPtr e = p.parse_effect();
  p.expect_end();
  return e;
}
inline Context parse_context_text(const std::string& text, const ParseEnv& env = {}) {
  Parser p(text, env);
  Context c = p.parse_context();
  p.expect_end();
  return c;
}
/// Standalone scripts reject rule names outside the inventory.
inline Script parse_script_text(const std::string& text, const ParseEnv& env = {}) {
  Parser p(text, env);
  Script s = p.parse_script(true);
  p.expect_end();
  return s;
}

/// Declarations of `f` as an environment for parsing text that refers to them.
inline ParseEnv make_env(const SourceFile& f) {
  ParseEnv env;
  for (const auto& d : f.decls) {
    if (const auto* t = std::get_if<TypeDecl>(&d.body)) env.types[t->name] = t->type;
    if (const auto* t = std::get_if<TermDecl>(&d.body)) env.terms[t->name] = t->term;
    if (const auto* e = std::get_if<EffectDecl>(&d.body)) env.effects[e->name] = e->effect;
  }
  return env;
}

// ---------------------------------------------------------------------------
// JSON sidecar scripts: {"rule": ..., "args": {...}, "premises": [...]}

inline nlohmann::json script_to_json(const Script& s) {
  nlohmann::json j;
  j["rule"] = s.rule;
  nlohmann::json args = nlohmann::json::object();
  if (s.args.term) args["term"] = print(s.args.term);
  if (s.args.effect) args["effect"] = print(s.args.effect);
  if (s.args.type) args["type"] = print(s.args.type);
  if (!s.args.perm.empty()) args["perm"] = s.args.perm;
  if (s.args.var) args["var"] = *s.args.var;
  if (s.args.pos) args["pos"] = *s.args.pos;
  if (s.args.depth) args["depth"] = *s.args.depth;
  j["args"] = args;
  j["premises"] = nlohmann::json::array();
  for (const auto& p : s.premises) j["premises"].push_back(script_to_json(p));
  return j;
}

/// Throws std::invalid_argument for malformed documents or unknown rules.
inline Script script_from_json(const nlohmann::json& j, const ParseEnv& env = {}) {
  if (!j.is_object() || !j.contains("rule") || !j["rule"].is_string())
    throw std::invalid_argument("script node needs a string field 'rule'");
  Script s;
  s.rule = j["rule"].get<std::string>();
  if (s.rule != "auto" && !is_rule_name(s.rule)) throw std::invalid_argument("unknown rule '" + s.rule + "'");
  if (j.contains("args")) {
    for (const auto& [k, v] : j["args"].items()) {
      if (k == "term")
        s.args.term = parse_term_text(v.get<std::string>(), env);
      else if (k == "effect")
        s.args.effect = parse_effect_text(v.get<std::string>(), env);
      else if (k == "type")
        s.args.type = parse_type_text(v.get<std::string>(), env);
      else if (k == "perm")
        s.args.perm = v.get<std::vector<int>>();
      else if (k == "var")
        s.args.var = v.get<std::string>();
      else if (k == "pos")
        s.args.pos = v.get<int>();
      else if (k == "depth")
        s.args.depth = v.get<int>();
      else
        throw std::invalid_argument("unknown script argument '" + k + "'");
    }
  }
  if (j.contains("premises"))
    for (const auto& p : j["premises"]) s.premises.push_back(script_from_json(p, env));
  return s;
}

}  // namespace qpel
