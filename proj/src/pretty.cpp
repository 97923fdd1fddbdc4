#include "tinylinks/pretty.hpp"

#include <variant>

namespace tinylinks {

namespace {

void print_value(const Value& v, std::string& out);
void print_expr(const Expr& e, bool at_seq, std::string& out);

// Values are self-delimiting in every position, so they never take parens.
void print_value(const Value& v, std::string& out) {
  std::visit(
      overloaded{
          [&](const Value::Var& n) { out += n.name; },
          [&](const Value::Con& c) {
            switch (c.ctor.tag) {
              case Constructor::Tag::Int:
                out += std::to_string(c.ctor.number);
                return;
              case Constructor::Tag::Str:
                out += quote_string(c.ctor.text);
                return;
              default:
                break;
            }
            out += c.ctor.name();
            if (!c.args.empty()) {
              out += '(';
              for (size_t i = 0; i < c.args.size(); ++i) {
                if (i) out += ", ";
                print_value(*c.args[i], out);
              }
              out += ')';
            }
          },
          [&](const Value::Href& h) {
            out += "href(";
            print_expr(*h.body, true, out);
            out += ')';
          },
          [&](const Value::Lambda& l) {
            out += "fun (";
            out += l.param;
            out += ") { ";
            print_expr(*l.body, true, out);
            out += " }";
          },
          [&](const Value::Form& f) {
            out += "form({";
            for (size_t i = 0; i < f.labels.size(); ++i) {
              if (i) out += ", ";
              out += f.labels[i];
            }
            out += "}, ";
            print_expr(*f.body, true, out);
            out += ')';
          },
      },
      v.node);
}

void print_pattern(const Constructor& ctor, const std::vector<std::string>& binders,
                   std::string& out) {
  switch (ctor.tag) {
    case Constructor::Tag::Int:
      out += std::to_string(ctor.number);
      return;
    case Constructor::Tag::Str:
      out += quote_string(ctor.text);
      return;
    default:
      break;
  }
  out += ctor.name();
  if (!binders.empty()) {
    out += '(';
    for (size_t i = 0; i < binders.size(); ++i) {
      if (i) out += ", ";
      out += binders[i];
    }
    out += ')';
  }
}

// at_seq: whether a let chain may extend here without parentheses (top level,
// bodies of fun/href/form, switch arms, parenthesised groups). In operand
// positions (let right-hand sides, primitive operands) a Let must be wrapped.
void print_expr(const Expr& e, bool at_seq, std::string& out) {
  std::visit(
      overloaded{
          [&](const Expr::Val& v) { print_value(*v.value, out); },
          [&](const Expr::Let& l) {
            if (!at_seq) out += '(';
            out += "var ";
            out += l.name;
            out += " = ";
            print_expr(*l.bound, false, out);
            out += "; ";
            print_expr(*l.body, true, out);
            if (!at_seq) out += ')';
          },
          [&](const Expr::Prim& p) {
            out += '(';
            print_expr(*p.lhs, false, out);
            out += ' ';
            out += prim_op_symbol(p.op);
            out += ' ';
            print_expr(*p.rhs, false, out);
            out += ')';
          },
          [&](const Expr::App& a) {
            print_value(*a.fn, out);
            out += '(';
            print_value(*a.arg, out);
            out += ')';
          },
          [&](const Expr::Post& p) {
            out += "post({";
            for (size_t i = 0; i < p.fields.size(); ++i) {
              if (i) out += ", ";
              out += p.fields[i].first;
              out += " = ";
              print_value(*p.fields[i].second, out);
            }
            out += "}, ";
            print_value(*p.target, out);
            out += ')';
          },
          [&](const Expr::Get& g) {
            out += "get(";
            print_value(*g.target, out);
            out += ')';
          },
          [&](const Expr::EventAnn& ev) {
            out += "event ";
            out += ev.event.pred;
            out += '(';
            print_value(*ev.event.arg, out);
            out += ')';
          },
          [&](const Expr::AssertAnn& as) {
            out += "assert ";
            out += as.event.pred;
            out += '(';
            print_value(*as.event.arg, out);
            out += ')';
          },
          [&](const Expr::Switch& s) {
            out += "switch (";
            print_value(*s.scrutinee, out);
            out += ") { case ";
            print_pattern(s.ctor, s.binders, out);
            out += " -> ";
            print_expr(*s.matched, true, out);
            out += " _ -> ";
            print_expr(*s.otherwise, true, out);
            out += " }";
          },
      },
      e.node);
}

}  // namespace

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c; break;
    }
  }
  out += '"';
  return out;
}

std::string pretty(const ValuePtr& v) {
  std::string out;
  print_value(*v, out);
  return out;
}

std::string pretty(const ExprPtr& e) {
  std::string out;
  print_expr(*e, true, out);
  return out;
}

}  // namespace tinylinks
