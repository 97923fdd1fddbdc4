#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace tinylinks {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Data constructors. Str and Int carry their payload and take no arguments;
// Tuple records its width.
struct Constructor {
  enum class Tag { Unit, Zero, Succ, Str, Int, Nil, Cons, Tuple, Elem, Text };

  Tag tag = Tag::Unit;
  std::string text;      // payload for Tag::Str
  long long number = 0;  // payload for Tag::Int
  int width = 0;         // arity for Tag::Tuple (>= 2)

  int arity() const;
  std::string name() const;

  static Constructor unit() { return {Tag::Unit, "", 0, 0}; }
  static Constructor zero() { return {Tag::Zero, "", 0, 0}; }
  static Constructor succ() { return {Tag::Succ, "", 0, 0}; }
  static Constructor str(std::string s) { return {Tag::Str, std::move(s), 0, 0}; }
  static Constructor integer(long long n) { return {Tag::Int, "", n, 0}; }
  static Constructor nil() { return {Tag::Nil, "", 0, 0}; }
  static Constructor cons() { return {Tag::Cons, "", 0, 0}; }
  static Constructor tuple(int width) { return {Tag::Tuple, "", 0, width}; }
  static Constructor elem() { return {Tag::Elem, "", 0, 0}; }
  static Constructor xml_text() { return {Tag::Text, "", 0, 0}; }

  friend bool operator==(const Constructor& a, const Constructor& b);
  friend bool operator!=(const Constructor& a, const Constructor& b) { return !(a == b); }
};

enum class PrimOp { Add, Sub, Mul, Div };

const char* prim_op_symbol(PrimOp op);

struct Value;
struct Expr;
using ValuePtr = std::shared_ptr<const Value>;
using ExprPtr = std::shared_ptr<const Expr>;

// An event annotation: predicate name applied to a value.
struct Event {
  std::string pred;
  ValuePtr arg;
};

struct Value {
  struct Var {
    std::string name;
  };
  struct Con {
    Constructor ctor;
    std::vector<ValuePtr> args;
  };
  struct Href {
    ExprPtr body;  // suspended; resumed by get
  };
  struct Lambda {
    std::string param;
    ExprPtr body;
  };
  struct Form {
    std::vector<std::string> labels;
    ExprPtr body;  // suspended; resumed by post
  };

  std::variant<Var, Con, Href, Lambda, Form> node;
};

struct Expr {
  struct Val {
    ValuePtr value;
  };
  struct Let {
    std::string name;
    ExprPtr bound;
    ExprPtr body;
  };
  struct Prim {
    PrimOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct App {
    ValuePtr fn;
    ValuePtr arg;  // single argument; multi-arg calls are curried
  };
  struct Post {
    std::vector<std::pair<std::string, ValuePtr>> fields;
    ValuePtr target;
  };
  struct Get {
    ValuePtr target;
  };
  struct EventAnn {
    Event event;
  };
  struct AssertAnn {
    Event event;
  };
  struct Switch {
    ValuePtr scrutinee;
    Constructor ctor;
    std::vector<std::string> binders;  // one per constructor argument
    ExprPtr matched;
    ExprPtr otherwise;
  };

  std::variant<Val, Let, Prim, App, Post, Get, EventAnn, AssertAnn, Switch> node;
};

// Node factories. Construction is the only place arity invariants are
// enforced; violations throw std::invalid_argument.
ValuePtr v_var(std::string name);
ValuePtr v_con(Constructor ctor, std::vector<ValuePtr> args);
ValuePtr v_int(long long n);
ValuePtr v_str(std::string s);
ValuePtr v_unit();
ValuePtr v_text(ValuePtr s);
ValuePtr v_elem(ValuePtr tag, ValuePtr child);
ValuePtr v_href(ExprPtr body);
ValuePtr v_lambda(std::string param, ExprPtr body);
ValuePtr v_form(std::vector<std::string> labels, ExprPtr body);

ExprPtr e_val(ValuePtr v);
ExprPtr e_let(std::string name, ExprPtr bound, ExprPtr body);
ExprPtr e_prim(PrimOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr e_app(ValuePtr fn, ValuePtr arg);
ExprPtr e_post(std::vector<std::pair<std::string, ValuePtr>> fields, ValuePtr target);
ExprPtr e_get(ValuePtr target);
ExprPtr e_event(std::string pred, ValuePtr arg);
ExprPtr e_assert(std::string pred, ValuePtr arg);
ExprPtr e_switch(ValuePtr scrutinee, Constructor ctor, std::vector<std::string> binders,
                 ExprPtr matched, ExprPtr otherwise);

// Deep structural equality.
bool equal(const Value& a, const Value& b);
bool equal(const Expr& a, const Expr& b);
bool equal(const ValuePtr& a, const ValuePtr& b);
bool equal(const ExprPtr& a, const ExprPtr& b);

// Free program variables (used for closedness and scope checks).
void free_vars(const Value& v, std::set<std::string>& bound, std::set<std::string>& out);
void free_vars(const Expr& e, std::set<std::string>& bound, std::set<std::string>& out);
std::set<std::string> free_vars(const ExprPtr& e);

}  // namespace tinylinks
