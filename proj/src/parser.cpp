#include "tinylinks/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <utility>

namespace tinylinks {

namespace {

enum class Tok {
  Ident,
  IntLit,
  StrLit,
  KwVar,
  KwFun,
  KwGet,
  KwPost,
  KwEvent,
  KwAssert,
  KwSwitch,
  KwCase,
  KwHref,
  KwForm,
  Ctor,  // Unit Zero Succ Nil Cons Tuple Elem Text
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Equals,
  Arrow,
  Plus,
  Minus,
  Star,
  Slash,
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  long long number = 0;
  int line = 1;
  int col = 1;
};

const std::map<std::string, Tok, std::less<>> keywords = {
    {"var", Tok::KwVar},       {"fun", Tok::KwFun},     {"get", Tok::KwGet},
    {"post", Tok::KwPost},     {"event", Tok::KwEvent}, {"assert", Tok::KwAssert},
    {"switch", Tok::KwSwitch}, {"case", Tok::KwCase},   {"href", Tok::KwHref},
    {"form", Tok::KwForm},
};

const std::set<std::string, std::less<>> ctor_names = {"Unit", "Zero", "Succ", "Nil",
                                                       "Cons", "Tuple", "Elem", "Text"};

struct Lexer {
  std::string_view src;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  std::vector<Token> tokens;
  std::set<std::string> idents_seen;  // so generated temporaries never collide

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col, msg); }

  char peek() const { return pos < src.size() ? src[pos] : '\0'; }

  char advance() {
    char c = src[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  void push(Tok kind, std::string text, long long number, int l, int c) {
    tokens.push_back(Token{kind, std::move(text), number, l, c});
  }

  void run() {
    while (pos < src.size()) {
      int l = line, c = col;
      char ch = peek();
      if (ch == '#') {  // line comment
        while (pos < src.size() && peek() != '\n') advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        std::string digits;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(peek())))
          digits.push_back(advance());
        push(Tok::IntLit, digits, std::stoll(digits), l, c);
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::string word;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
          word.push_back(advance());
        if (auto it = keywords.find(word); it != keywords.end()) {
          push(it->second, word, 0, l, c);
        } else if (ctor_names.count(word)) {
          push(Tok::Ctor, word, 0, l, c);
        } else {
          idents_seen.insert(word);
          push(Tok::Ident, word, 0, l, c);
        }
        continue;
      }
      if (ch == '"') {
        advance();
        std::string text;
        while (true) {
          if (pos >= src.size()) fail("unterminated string literal");
          char d = advance();
          if (d == '"') break;
          if (d == '\\') {
            if (pos >= src.size()) fail("unterminated escape sequence");
            char e = advance();
            switch (e) {
              case '"': text.push_back('"'); break;
              case '\\': text.push_back('\\'); break;
              case 'n': text.push_back('\n'); break;
              case 't': text.push_back('\t'); break;
              default: fail(std::string("unknown escape \\") + e);
            }
          } else {
            text.push_back(d);
          }
        }
        push(Tok::StrLit, std::move(text), 0, l, c);
        continue;
      }
      advance();
      switch (ch) {
        case '(': push(Tok::LParen, "(", 0, l, c); break;
        case ')': push(Tok::RParen, ")", 0, l, c); break;
        case '{': push(Tok::LBrace, "{", 0, l, c); break;
        case '}': push(Tok::RBrace, "}", 0, l, c); break;
        case ',': push(Tok::Comma, ",", 0, l, c); break;
        case ';': push(Tok::Semi, ";", 0, l, c); break;
        case '=': push(Tok::Equals, "=", 0, l, c); break;
        case '+': push(Tok::Plus, "+", 0, l, c); break;
        case '*': push(Tok::Star, "*", 0, l, c); break;
        case '/': push(Tok::Slash, "/", 0, l, c); break;
        case '-':
          if (peek() == '>') {
            advance();
            push(Tok::Arrow, "->", 0, l, c);
          } else {
            push(Tok::Minus, "-", 0, l, c);
          }
          break;
        default:
          throw ParseError(l, c, std::string("unexpected character '") + ch + "'");
      }
    }
    push(Tok::Eof, "", 0, line, col);
  }
};

// Pending administrative bindings introduced when an expression occurs where
// the grammar demands a value; they wrap the enclosing expression as lets.
using Bindings = std::vector<std::pair<std::string, ExprPtr>>;

struct Parser {
  std::vector<Token> toks;
  size_t at = 0;
  std::set<std::string> used_names;
  int next_temp = 0;

  const Token& peek(int ahead = 0) const {
    size_t i = at + static_cast<size_t>(ahead);
    return i < toks.size() ? toks[i] : toks.back();
  }

  const Token& advance() { return toks[at++]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(t.line, t.col, msg);
  }

  bool check(Tok k) const { return peek().kind == k; }

  bool accept(Tok k) {
    if (check(k)) {
      ++at;
      return true;
    }
    return false;
  }

  const Token& expect(Tok k, const std::string& what) {
    if (!check(k)) fail(peek(), "expected " + what);
    return toks[at++];
  }

  std::string fresh_temp() {
    for (;;) {
      std::string name = "_t" + std::to_string(next_temp++);
      if (!used_names.count(name)) return name;
    }
  }

  // Coerces a parsed expression into value position, recording a binding
  // when it is not already a syntactic value.
  ValuePtr force_value(ExprPtr e, Bindings& binds) {
    if (const auto* val = std::get_if<Expr::Val>(&e->node)) return val->value;
    std::string tmp = fresh_temp();
    binds.emplace_back(tmp, std::move(e));
    return v_var(binds.back().first);
  }

  static ExprPtr wrap(Bindings binds, ExprPtr body) {
    for (auto it = binds.rbegin(); it != binds.rend(); ++it)
      body = e_let(it->first, std::move(it->second), std::move(body));
    return body;
  }

  bool at_seq_end() const {
    Tok k = peek().kind;
    return k == Tok::Eof || k == Tok::RParen || k == Tok::RBrace;
  }

  // seq := "var" IDENT "=" expr ";" seq
  //      | "fun" IDENT "(" params ")" "{" seq "}" [";"] [seq]
  //      | expr
  ExprPtr parse_seq() {
    if (check(Tok::KwVar)) {
      advance();
      const Token& name = expect(Tok::Ident, "binder name after 'var'");
      expect(Tok::Equals, "'=' in var binding");
      ExprPtr bound = parse_expr();
      expect(Tok::Semi, "';' after var binding");
      ExprPtr body = parse_seq();
      return e_let(name.text, std::move(bound), std::move(body));
    }
    if (check(Tok::KwFun) && peek(1).kind == Tok::Ident) {
      advance();
      std::string name = advance().text;
      ValuePtr fn = parse_fun_tail();
      accept(Tok::Semi);
      ExprPtr rest = at_seq_end() ? e_val(v_var(name)) : parse_seq();
      return e_let(std::move(name), e_val(std::move(fn)), std::move(rest));
    }
    return parse_expr();
  }

  // Shared by named and anonymous functions: "(" params ")" "{" seq "}",
  // currying multi-parameter headers.
  ValuePtr parse_fun_tail() {
    expect(Tok::LParen, "'(' before parameter list");
    std::vector<std::string> params;
    params.push_back(expect(Tok::Ident, "parameter name").text);
    while (accept(Tok::Comma)) params.push_back(expect(Tok::Ident, "parameter name").text);
    expect(Tok::RParen, "')' after parameter list");
    expect(Tok::LBrace, "'{' before function body");
    ExprPtr body = parse_seq();
    expect(Tok::RBrace, "'}' after function body");
    ValuePtr fn;
    for (auto it = params.rbegin(); it != params.rend(); ++it)
      fn = v_lambda(*it, fn ? e_val(std::move(fn)) : std::move(body));
    return fn;
  }

  ExprPtr parse_expr() { return parse_additive(); }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    for (;;) {
      if (accept(Tok::Plus)) {
        lhs = e_prim(PrimOp::Add, std::move(lhs), parse_multiplicative());
      } else if (check(Tok::Minus)) {
        advance();
        lhs = e_prim(PrimOp::Sub, std::move(lhs), parse_multiplicative());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_call();
    for (;;) {
      if (accept(Tok::Star)) {
        lhs = e_prim(PrimOp::Mul, std::move(lhs), parse_call());
      } else if (accept(Tok::Slash)) {
        lhs = e_prim(PrimOp::Div, std::move(lhs), parse_call());
      } else {
        return lhs;
      }
    }
  }

  // primary followed by zero or more application suffixes "(args)".
  ExprPtr parse_call() {
    ExprPtr cur = parse_primary();
    while (check(Tok::LParen)) {
      advance();
      std::vector<ExprPtr> args;
      args.push_back(parse_expr());
      while (accept(Tok::Comma)) args.push_back(parse_expr());
      expect(Tok::RParen, "')' after arguments");
      Bindings binds;
      ValuePtr fn = force_value(std::move(cur), binds);
      cur = nullptr;
      for (size_t i = 0; i < args.size(); ++i) {
        if (cur) fn = force_value(std::move(cur), binds);
        ValuePtr arg = force_value(std::move(args[i]), binds);
        cur = e_app(std::move(fn), std::move(arg));
      }
      cur = wrap(std::move(binds), std::move(cur));
    }
    return cur;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::IntLit:
        advance();
        return e_val(v_int(t.number));
      case Tok::Minus:
        if (peek(1).kind == Tok::IntLit) {
          advance();
          const Token& n = advance();
          return e_val(v_int(-n.number));
        }
        fail(t, "unexpected '-'");
      case Tok::StrLit:
        advance();
        return e_val(v_str(t.text));
      case Tok::Ident:
        advance();
        return e_val(v_var(t.text));
      case Tok::Ctor:
        return parse_ctor_value();
      case Tok::KwHref: {
        advance();
        expect(Tok::LParen, "'(' after href");
        ExprPtr body = parse_seq();
        expect(Tok::RParen, "')' after href body");
        return e_val(v_href(std::move(body)));
      }
      case Tok::KwForm: {
        advance();
        expect(Tok::LParen, "'(' after form");
        expect(Tok::LBrace, "'{' before form labels");
        std::vector<std::string> labels;
        if (!check(Tok::RBrace)) {
          labels.push_back(expect(Tok::Ident, "form label").text);
          while (accept(Tok::Comma)) labels.push_back(expect(Tok::Ident, "form label").text);
        }
        expect(Tok::RBrace, "'}' after form labels");
        expect(Tok::Comma, "',' between form labels and body");
        ExprPtr body = parse_seq();
        expect(Tok::RParen, "')' after form body");
        return e_val(v_form(std::move(labels), std::move(body)));
      }
      case Tok::KwFun: {
        advance();
        return e_val(parse_fun_tail());
      }
      case Tok::KwGet: {
        advance();
        expect(Tok::LParen, "'(' after get");
        ExprPtr inner = parse_seq();
        expect(Tok::RParen, "')' after get");
        Bindings binds;
        ValuePtr target = force_value(std::move(inner), binds);
        return wrap(std::move(binds), e_get(std::move(target)));
      }
      case Tok::KwPost: {
        advance();
        expect(Tok::LParen, "'(' after post");
        expect(Tok::LBrace, "'{' before post fields");
        Bindings binds;
        std::vector<std::pair<std::string, ValuePtr>> fields;
        if (!check(Tok::RBrace)) {
          do {
            std::string label = expect(Tok::Ident, "post field label").text;
            expect(Tok::Equals, "'=' in post field");
            ExprPtr fe = parse_expr();
            fields.emplace_back(std::move(label), force_value(std::move(fe), binds));
          } while (accept(Tok::Comma));
        }
        expect(Tok::RBrace, "'}' after post fields");
        expect(Tok::Comma, "',' between post fields and target");
        ExprPtr te = parse_expr();
        ValuePtr target = force_value(std::move(te), binds);
        expect(Tok::RParen, "')' after post");
        return wrap(std::move(binds), e_post(std::move(fields), std::move(target)));
      }
      case Tok::KwEvent:
      case Tok::KwAssert: {
        bool is_event = t.kind == Tok::KwEvent;
        advance();
        std::string pred = expect(Tok::Ident, "predicate name").text;
        expect(Tok::LParen, "'(' after predicate name");
        ExprPtr inner = parse_expr();
        expect(Tok::RParen, "')' after predicate argument");
        Bindings binds;
        ValuePtr arg = force_value(std::move(inner), binds);
        ExprPtr ann =
            is_event ? e_event(std::move(pred), std::move(arg)) : e_assert(std::move(pred), std::move(arg));
        return wrap(std::move(binds), std::move(ann));
      }
      case Tok::KwSwitch:
        return parse_switch();
      case Tok::LParen: {
        advance();
        ExprPtr inner = parse_seq();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail(t, "expected an expression, got '" + (t.kind == Tok::Eof ? "end of input" : t.text) + "'");
    }
  }

  ExprPtr parse_ctor_value() {
    const Token& t = advance();
    std::vector<ExprPtr> args;
    if (check(Tok::LParen)) {
      // A paren after a nullary constructor is not an argument list; leave it
      // for parse_call (e.g. Zero(1) is an application of Zero).
      bool takes_args = t.text == "Succ" || t.text == "Cons" || t.text == "Elem" ||
                        t.text == "Text" || t.text == "Tuple";
      if (takes_args) {
        advance();
        if (!check(Tok::RParen)) {
          args.push_back(parse_expr());
          while (accept(Tok::Comma)) args.push_back(parse_expr());
        }
        expect(Tok::RParen, "')' after constructor arguments");
      } else if (peek(1).kind == Tok::RParen) {
        // allow explicit empty argument lists on nullary constructors: Unit(), Nil()
        advance();
        advance();
      }
    }
    Constructor ctor;
    if (t.text == "Unit") ctor = Constructor::unit();
    else if (t.text == "Zero") ctor = Constructor::zero();
    else if (t.text == "Succ") ctor = Constructor::succ();
    else if (t.text == "Nil") ctor = Constructor::nil();
    else if (t.text == "Cons") ctor = Constructor::cons();
    else if (t.text == "Tuple") ctor = Constructor::tuple(static_cast<int>(args.size()));
    else if (t.text == "Elem") ctor = Constructor::elem();
    else ctor = Constructor::xml_text();
    if (ctor.tag == Constructor::Tag::Tuple && args.size() < 2)
      fail(t, "Tuple needs at least 2 arguments");
    if (static_cast<int>(args.size()) != ctor.arity())
      fail(t, ctor.name() + " expects " + std::to_string(ctor.arity()) + " arguments, got " +
                 std::to_string(args.size()));
    Bindings binds;
    std::vector<ValuePtr> vargs;
    vargs.reserve(args.size());
    for (auto& a : args) vargs.push_back(force_value(std::move(a), binds));
    return wrap(std::move(binds), e_val(v_con(std::move(ctor), std::move(vargs))));
  }

  // switch (E) { case Pat(x, ...) -> seq  _ -> seq }
  ExprPtr parse_switch() {
    advance();
    expect(Tok::LParen, "'(' after switch");
    ExprPtr scrut_e = parse_expr();
    expect(Tok::RParen, "')' after switch scrutinee");
    expect(Tok::LBrace, "'{' before switch arms");
    expect(Tok::KwCase, "'case'");

    Constructor ctor;
    std::vector<std::string> binders;
    const Token& pat = peek();
    if (pat.kind == Tok::IntLit) {
      advance();
      ctor = Constructor::integer(pat.number);
    } else if (pat.kind == Tok::Minus && peek(1).kind == Tok::IntLit) {
      advance();
      ctor = Constructor::integer(-advance().number);
    } else if (pat.kind == Tok::StrLit) {
      advance();
      ctor = Constructor::str(pat.text);
    } else if (pat.kind == Tok::Ctor) {
      advance();
      if (accept(Tok::LParen)) {
        if (!check(Tok::RParen)) {
          binders.push_back(expect(Tok::Ident, "pattern binder").text);
          while (accept(Tok::Comma)) binders.push_back(expect(Tok::Ident, "pattern binder").text);
        }
        expect(Tok::RParen, "')' after pattern binders");
      }
      if (pat.text == "Unit") ctor = Constructor::unit();
      else if (pat.text == "Zero") ctor = Constructor::zero();
      else if (pat.text == "Succ") ctor = Constructor::succ();
      else if (pat.text == "Nil") ctor = Constructor::nil();
      else if (pat.text == "Cons") ctor = Constructor::cons();
      else if (pat.text == "Tuple") ctor = Constructor::tuple(static_cast<int>(binders.size()));
      else if (pat.text == "Elem") ctor = Constructor::elem();
      else ctor = Constructor::xml_text();
      if (static_cast<int>(binders.size()) != ctor.arity())
        fail(pat, "pattern " + ctor.name() + " expects " + std::to_string(ctor.arity()) +
                      " binders, got " + std::to_string(binders.size()));
    } else {
      fail(pat, "expected a constructor pattern");
    }
    expect(Tok::Arrow, "'->' after pattern");
    ExprPtr matched = parse_seq();
    if (!(check(Tok::Ident) && peek().text == "_")) fail(peek(), "expected '_' default arm");
    advance();
    expect(Tok::Arrow, "'->' after '_'");
    ExprPtr otherwise = parse_seq();
    expect(Tok::RBrace, "'}' after switch arms");

    Bindings binds;
    ValuePtr scrut = force_value(std::move(scrut_e), binds);
    return wrap(std::move(binds),
                e_switch(std::move(scrut), std::move(ctor), std::move(binders), std::move(matched),
                         std::move(otherwise)));
  }
};

}  // namespace

ExprPtr parse(std::string_view source) {
  Lexer lexer{source};
  lexer.run();
  Parser parser;
  parser.toks = std::move(lexer.tokens);
  parser.used_names = std::move(lexer.idents_seen);
  ExprPtr program = parser.parse_seq();
  if (!parser.check(Tok::Eof))
    parser.fail(parser.peek(), "unexpected '" + parser.peek().text + "' after program");
  return program;
}

}  // namespace tinylinks
