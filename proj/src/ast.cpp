#include "tinylinks/ast.hpp"

#include <stdexcept>

namespace tinylinks {

int Constructor::arity() const {
  switch (tag) {
    case Tag::Unit:
    case Tag::Zero:
    case Tag::Str:
    case Tag::Int:
    case Tag::Nil:
      return 0;
    case Tag::Succ:
    case Tag::Text:
      return 1;
    case Tag::Cons:
    case Tag::Elem:
      return 2;
    case Tag::Tuple:
      return width;
  }
  return 0;
}

std::string Constructor::name() const {
  switch (tag) {
    case Tag::Unit: return "Unit";
    case Tag::Zero: return "Zero";
    case Tag::Succ: return "Succ";
    case Tag::Str: return "string";
    case Tag::Int: return "int";
    case Tag::Nil: return "Nil";
    case Tag::Cons: return "Cons";
    case Tag::Tuple: return "Tuple";
    case Tag::Elem: return "Elem";
    case Tag::Text: return "Text";
  }
  return "?";
}

bool operator==(const Constructor& a, const Constructor& b) {
  if (a.tag != b.tag) return false;
  switch (a.tag) {
    case Constructor::Tag::Str: return a.text == b.text;
    case Constructor::Tag::Int: return a.number == b.number;
    case Constructor::Tag::Tuple: return a.width == b.width;
    default: return true;
  }
}

const char* prim_op_symbol(PrimOp op) {
  switch (op) {
    case PrimOp::Add: return "+";
    case PrimOp::Sub: return "-";
    case PrimOp::Mul: return "*";
    case PrimOp::Div: return "/";
  }
  return "?";
}

ValuePtr v_var(std::string name) {
  return std::make_shared<Value>(Value{Value::Var{std::move(name)}});
}

ValuePtr v_con(Constructor ctor, std::vector<ValuePtr> args) {
  if (static_cast<int>(args.size()) != ctor.arity())
    throw std::invalid_argument("constructor " + ctor.name() + " expects " +
                                std::to_string(ctor.arity()) + " arguments, got " +
                                std::to_string(args.size()));
  if (ctor.tag == Constructor::Tag::Tuple && ctor.width < 2)
    throw std::invalid_argument("tuple width must be at least 2");
  return std::make_shared<Value>(Value{Value::Con{std::move(ctor), std::move(args)}});
}

ValuePtr v_int(long long n) { return v_con(Constructor::integer(n), {}); }
ValuePtr v_str(std::string s) { return v_con(Constructor::str(std::move(s)), {}); }
ValuePtr v_unit() { return v_con(Constructor::unit(), {}); }
ValuePtr v_text(ValuePtr s) { return v_con(Constructor::xml_text(), {std::move(s)}); }
ValuePtr v_elem(ValuePtr tag, ValuePtr child) {
  return v_con(Constructor::elem(), {std::move(tag), std::move(child)});
}

ValuePtr v_href(ExprPtr body) {
  return std::make_shared<Value>(Value{Value::Href{std::move(body)}});
}

ValuePtr v_lambda(std::string param, ExprPtr body) {
  return std::make_shared<Value>(Value{Value::Lambda{std::move(param), std::move(body)}});
}

ValuePtr v_form(std::vector<std::string> labels, ExprPtr body) {
  return std::make_shared<Value>(Value{Value::Form{std::move(labels), std::move(body)}});
}

ExprPtr e_val(ValuePtr v) { return std::make_shared<Expr>(Expr{Expr::Val{std::move(v)}}); }

ExprPtr e_let(std::string name, ExprPtr bound, ExprPtr body) {
  return std::make_shared<Expr>(Expr{Expr::Let{std::move(name), std::move(bound), std::move(body)}});
}

ExprPtr e_prim(PrimOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<Expr>(Expr{Expr::Prim{op, std::move(lhs), std::move(rhs)}});
}

ExprPtr e_app(ValuePtr fn, ValuePtr arg) {
  return std::make_shared<Expr>(Expr{Expr::App{std::move(fn), std::move(arg)}});
}

ExprPtr e_post(std::vector<std::pair<std::string, ValuePtr>> fields, ValuePtr target) {
  return std::make_shared<Expr>(Expr{Expr::Post{std::move(fields), std::move(target)}});
}

ExprPtr e_get(ValuePtr target) {
  return std::make_shared<Expr>(Expr{Expr::Get{std::move(target)}});
}

ExprPtr e_event(std::string pred, ValuePtr arg) {
  return std::make_shared<Expr>(Expr{Expr::EventAnn{Event{std::move(pred), std::move(arg)}}});
}

ExprPtr e_assert(std::string pred, ValuePtr arg) {
  return std::make_shared<Expr>(Expr{Expr::AssertAnn{Event{std::move(pred), std::move(arg)}}});
}

ExprPtr e_switch(ValuePtr scrutinee, Constructor ctor, std::vector<std::string> binders,
                 ExprPtr matched, ExprPtr otherwise) {
  if (static_cast<int>(binders.size()) != ctor.arity())
    throw std::invalid_argument("switch pattern " + ctor.name() + " expects " +
                                std::to_string(ctor.arity()) + " binders, got " +
                                std::to_string(binders.size()));
  return std::make_shared<Expr>(Expr{Expr::Switch{std::move(scrutinee), std::move(ctor),
                                                  std::move(binders), std::move(matched),
                                                  std::move(otherwise)}});
}

bool equal(const ValuePtr& a, const ValuePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return equal(*a, *b);
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return equal(*a, *b);
}

namespace {

bool equal_values(const std::vector<ValuePtr>& a, const std::vector<ValuePtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool equal(const Value& a, const Value& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Value::Var& x) { return x.name == std::get<Value::Var>(b.node).name; },
          [&](const Value::Con& x) {
            const auto& y = std::get<Value::Con>(b.node);
            return x.ctor == y.ctor && equal_values(x.args, y.args);
          },
          [&](const Value::Href& x) { return equal(x.body, std::get<Value::Href>(b.node).body); },
          [&](const Value::Lambda& x) {
            const auto& y = std::get<Value::Lambda>(b.node);
            return x.param == y.param && equal(x.body, y.body);
          },
          [&](const Value::Form& x) {
            const auto& y = std::get<Value::Form>(b.node);
            return x.labels == y.labels && equal(x.body, y.body);
          },
      },
      a.node);
}

bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Expr::Val& x) { return equal(x.value, std::get<Expr::Val>(b.node).value); },
          [&](const Expr::Let& x) {
            const auto& y = std::get<Expr::Let>(b.node);
            return x.name == y.name && equal(x.bound, y.bound) && equal(x.body, y.body);
          },
          [&](const Expr::Prim& x) {
            const auto& y = std::get<Expr::Prim>(b.node);
            return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
          },
          [&](const Expr::App& x) {
            const auto& y = std::get<Expr::App>(b.node);
            return equal(x.fn, y.fn) && equal(x.arg, y.arg);
          },
          [&](const Expr::Post& x) {
            const auto& y = std::get<Expr::Post>(b.node);
            if (x.fields.size() != y.fields.size()) return false;
            for (size_t i = 0; i < x.fields.size(); ++i) {
              if (x.fields[i].first != y.fields[i].first) return false;
              if (!equal(x.fields[i].second, y.fields[i].second)) return false;
            }
            return equal(x.target, y.target);
          },
          [&](const Expr::Get& x) { return equal(x.target, std::get<Expr::Get>(b.node).target); },
          [&](const Expr::EventAnn& x) {
            const auto& y = std::get<Expr::EventAnn>(b.node);
            return x.event.pred == y.event.pred && equal(x.event.arg, y.event.arg);
          },
          [&](const Expr::AssertAnn& x) {
            const auto& y = std::get<Expr::AssertAnn>(b.node);
            return x.event.pred == y.event.pred && equal(x.event.arg, y.event.arg);
          },
          [&](const Expr::Switch& x) {
            const auto& y = std::get<Expr::Switch>(b.node);
            return equal(x.scrutinee, y.scrutinee) && x.ctor == y.ctor && x.binders == y.binders &&
                   equal(x.matched, y.matched) && equal(x.otherwise, y.otherwise);
          },
      },
      a.node);
}

void free_vars(const Value& v, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const Value::Var& x) {
                   if (!bound.count(x.name)) out.insert(x.name);
                 },
                 [&](const Value::Con& x) {
                   for (const auto& a : x.args) free_vars(*a, bound, out);
                 },
                 [&](const Value::Href& x) { free_vars(*x.body, bound, out); },
                 [&](const Value::Lambda& x) {
                   bool fresh = bound.insert(x.param).second;
                   free_vars(*x.body, bound, out);
                   if (fresh) bound.erase(x.param);
                 },
                 [&](const Value::Form& x) {
                   std::vector<std::string> added;
                   for (const auto& l : x.labels)
                     if (bound.insert(l).second) added.push_back(l);
                   free_vars(*x.body, bound, out);
                   for (const auto& l : added) bound.erase(l);
                 },
             },
             v.node);
}

void free_vars(const Expr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const Expr::Val& x) { free_vars(*x.value, bound, out); },
                 [&](const Expr::Let& x) {
                   free_vars(*x.bound, bound, out);
                   bool fresh = bound.insert(x.name).second;
                   free_vars(*x.body, bound, out);
                   if (fresh) bound.erase(x.name);
                 },
                 [&](const Expr::Prim& x) {
                   free_vars(*x.lhs, bound, out);
                   free_vars(*x.rhs, bound, out);
                 },
                 [&](const Expr::App& x) {
                   free_vars(*x.fn, bound, out);
                   free_vars(*x.arg, bound, out);
                 },
                 [&](const Expr::Post& x) {
                   for (const auto& [label, value] : x.fields) free_vars(*value, bound, out);
                   free_vars(*x.target, bound, out);
                 },
                 [&](const Expr::Get& x) { free_vars(*x.target, bound, out); },
                 [&](const Expr::EventAnn& x) { free_vars(*x.event.arg, bound, out); },
                 [&](const Expr::AssertAnn& x) { free_vars(*x.event.arg, bound, out); },
                 [&](const Expr::Switch& x) {
                   free_vars(*x.scrutinee, bound, out);
                   std::vector<std::string> added;
                   for (const auto& b : x.binders)
                     if (bound.insert(b).second) added.push_back(b);
                   free_vars(*x.matched, bound, out);
                   for (const auto& b : added) bound.erase(b);
                   free_vars(*x.otherwise, bound, out);
                 },
             },
             e.node);
}

std::set<std::string> free_vars(const ExprPtr& e) {
  std::set<std::string> bound, out;
  free_vars(*e, bound, out);
  return out;
}

}  // namespace tinylinks
