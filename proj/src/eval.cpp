#include "tinylinks/eval.hpp"

#include <optional>
#include <set>

#include "tinylinks/pretty.hpp"

namespace tinylinks {

namespace {

template <class T>
EvalPtr mk(T&& node) {
  return std::make_shared<const Eval>(Eval{std::forward<T>(node)});
}

const EvalPtr& wrong_v() {
  static const EvalPtr v = mk(Eval::Wrong{});
  return v;
}

const EvalPtr& unit_v() {
  static const EvalPtr v = mk(Eval::Unit{});
  return v;
}

EvalPtr int_v(long long n) { return mk(Eval::Int{n}); }

struct StepLimit {};  // internal: unwinds to the public entry points

struct Budget {
  long long left;
  int depth = 0;
};

// Caps the interpreter's own recursion depth: object-level loops are built
// from nested applications, and the budget alone would let them exhaust the
// host stack long before the step count ran out.
constexpr int kMaxEvalDepth = 2000;

struct DepthGuard {
  Budget* budget;
  explicit DepthGuard(Budget* b) : budget(b) {
    if (budget->left <= 0 || budget->depth >= kMaxEvalDepth) throw StepLimit{};
    --budget->left;
    ++budget->depth;
  }
  ~DepthGuard() { --budget->depth; }
  DepthGuard(const DepthGuard&) = delete;
  DepthGuard& operator=(const DepthGuard&) = delete;
};

// The interpreter proper. Closures capture a copy (one shared budget pointer),
// so a suspension resumed later in the same run keeps drawing from the budget
// of the run that created it.
struct Interp {
  std::shared_ptr<Budget> budget;

  static EvalResult error() { return {wrong_v(), {}}; }

  EvalPtr value(const ValuePtr& vp, const Env& rho) const {
    return std::visit(
        overloaded{
            [&](const Value::Var& x) -> EvalPtr {
              auto it = rho.find(x.name);
              return it == rho.end() ? wrong_v() : it->second;
            },
            [&](const Value::Con& c) -> EvalPtr {
              std::vector<EvalPtr> args;
              args.reserve(c.args.size());
              for (const auto& a : c.args) {
                EvalPtr w = value(a, rho);
                if (is_wrong(w)) return wrong_v();
                args.push_back(std::move(w));
              }
              switch (c.ctor.tag) {
                case Constructor::Tag::Unit:
                  return unit_v();
                case Constructor::Tag::Zero:
                  return int_v(0);
                case Constructor::Tag::Succ:
                  if (const auto* i = std::get_if<Eval::Int>(&args[0]->node))
                    return int_v(i->n + 1);
                  return wrong_v();
                case Constructor::Tag::Str:
                  return mk(Eval::Str{c.ctor.text});
                case Constructor::Tag::Int:
                  return int_v(c.ctor.number);
                case Constructor::Tag::Nil:
                  return mk(Eval::Nil{});
                case Constructor::Tag::Cons:
                  return mk(Eval::Cons{std::move(args[0]), std::move(args[1])});
                case Constructor::Tag::Tuple:
                  return mk(Eval::Tuple{std::move(args)});
                case Constructor::Tag::Elem:
                  return mk(Eval::XmlElem{std::move(args[0]), std::move(args[1])});
                case Constructor::Tag::Text:
                  if (const auto* s = std::get_if<Eval::Str>(&args[0]->node))
                    return mk(Eval::XmlText{s->s});
                  return wrong_v();
              }
              return wrong_v();
            },
            [&](const Value::Href& h) -> EvalPtr {
              Interp self = *this;
              return mk(Eval::HrefC{[self, body = h.body, env = rho](const CEventsEnv& phi) {
                return self.expr(body, env, phi);
              }});
            },
            [&](const Value::Lambda& l) -> EvalPtr {
              Interp self = *this;
              return mk(Eval::FunC{[self, param = l.param, body = l.body, env = rho](
                                       const CEventsEnv& phi, const EvalPtr& arg) {
                Env inner = env;
                inner.insert_or_assign(param, arg);
                return self.expr(body, inner, phi);
              }});
            },
            [&](const Value::Form& f) -> EvalPtr {
              Interp self = *this;
              return mk(Eval::FormC{[self, labels = f.labels, body = f.body, env = rho](
                                        const CEventsEnv& phi, const std::vector<EvalPtr>& vals) {
                if (vals.size() != labels.size()) return error();
                Env inner = env;
                for (size_t i = 0; i < labels.size(); ++i)
                  inner.insert_or_assign(labels[i], vals[i]);
                return self.expr(body, inner, phi);
              }});
            },
        },
        vp->node);
  }

  // Matches a runtime value against a constructor pattern, collecting the
  // component values for the pattern binders. Integer values decompose as the
  // Zero/Succ naturals they were injected from; Text yields its payload string.
  static bool match_pattern(const Constructor& ctor, const EvalPtr& v,
                            std::vector<EvalPtr>& parts) {
    switch (ctor.tag) {
      case Constructor::Tag::Unit:
        return std::holds_alternative<Eval::Unit>(v->node);
      case Constructor::Tag::Zero: {
        const auto* i = std::get_if<Eval::Int>(&v->node);
        return i && i->n == 0;
      }
      case Constructor::Tag::Succ: {
        const auto* i = std::get_if<Eval::Int>(&v->node);
        if (!i || i->n < 1) return false;
        parts.push_back(int_v(i->n - 1));
        return true;
      }
      case Constructor::Tag::Int: {
        const auto* i = std::get_if<Eval::Int>(&v->node);
        return i && i->n == ctor.number;
      }
      case Constructor::Tag::Str: {
        const auto* s = std::get_if<Eval::Str>(&v->node);
        return s && s->s == ctor.text;
      }
      case Constructor::Tag::Nil:
        return std::holds_alternative<Eval::Nil>(v->node);
      case Constructor::Tag::Cons: {
        const auto* c = std::get_if<Eval::Cons>(&v->node);
        if (!c) return false;
        parts.push_back(c->head);
        parts.push_back(c->tail);
        return true;
      }
      case Constructor::Tag::Tuple: {
        const auto* t = std::get_if<Eval::Tuple>(&v->node);
        if (!t || static_cast<int>(t->items.size()) != ctor.width) return false;
        parts = t->items;
        return true;
      }
      case Constructor::Tag::Elem: {
        const auto* x = std::get_if<Eval::XmlElem>(&v->node);
        if (!x) return false;
        parts.push_back(x->tag);
        parts.push_back(x->children);
        return true;
      }
      case Constructor::Tag::Text: {
        const auto* x = std::get_if<Eval::XmlText>(&v->node);
        if (!x) return false;
        parts.push_back(mk(Eval::Str{x->s}));
        return true;
      }
    }
    return false;
  }

  EvalResult expr(const ExprPtr& ep, const Env& rho, const CEventsEnv& phi) const {
    DepthGuard guard(budget.get());
    return std::visit(
        overloaded{
            [&](const Expr::Val& n) -> EvalResult {
              EvalPtr w = value(n.value, rho);
              if (is_wrong(w)) return error();
              return {std::move(w), phi};
            },
            [&](const Expr::Let& n) -> EvalResult {
              EvalResult bound = expr(n.bound, rho, phi);
              if (is_wrong(bound.value)) return error();
              Env inner = rho;
              inner.insert_or_assign(n.name, bound.value);
              EvalResult body = expr(n.body, inner, bound.events);
              if (is_wrong(body.value)) return error();
              return body;
            },
            [&](const Expr::Prim& n) -> EvalResult {
              EvalResult lhs = expr(n.lhs, rho, phi);
              if (is_wrong(lhs.value)) return error();
              EvalResult rhs = expr(n.rhs, rho, lhs.events);
              if (is_wrong(rhs.value)) return error();
              const auto* a = std::get_if<Eval::Int>(&lhs.value->node);
              const auto* b = std::get_if<Eval::Int>(&rhs.value->node);
              if (!a || !b) return error();
              auto r = prim_arith(n.op, a->n, b->n);
              if (!r) return error();
              return {int_v(*r), std::move(rhs.events)};
            },
            [&](const Expr::App& n) -> EvalResult {
              EvalPtr fn = value(n.fn, rho);
              if (is_wrong(fn)) return error();
              EvalPtr arg = value(n.arg, rho);
              if (is_wrong(arg)) return error();
              const auto* f = std::get_if<Eval::FunC>(&fn->node);
              if (!f) return error();
              EvalResult r = f->call(phi, arg);
              if (is_wrong(r.value)) return error();
              return r;
            },
            [&](const Expr::Post& n) -> EvalResult {
              std::set<std::string> seen;
              for (const auto& [label, unused] : n.fields)
                if (!seen.insert(label).second) return error();
              EvalPtr target = value(n.target, rho);
              if (is_wrong(target)) return error();
              std::vector<EvalPtr> vals;
              vals.reserve(n.fields.size());
              for (const auto& [label, fv] : n.fields) {
                EvalPtr w = value(fv, rho);
                if (is_wrong(w)) return error();
                if (!std::holds_alternative<Eval::Str>(w->node)) return error();
                vals.push_back(std::move(w));
              }
              const auto* f = std::get_if<Eval::FormC>(&target->node);
              if (!f) return error();
              EvalResult r = f->resume(phi, vals);
              if (is_wrong(r.value)) return error();
              return r;
            },
            [&](const Expr::Get& n) -> EvalResult {
              EvalPtr target = value(n.target, rho);
              if (is_wrong(target)) return error();
              const auto* h = std::get_if<Eval::HrefC>(&target->node);
              if (!h) return error();
              EvalResult r = h->resume(phi);
              if (is_wrong(r.value)) return error();
              return r;
            },
            [&](const Expr::EventAnn& n) -> EvalResult {
              EvalPtr arg = value(n.event.arg, rho);
              if (is_wrong(arg)) return error();
              const auto* i = std::get_if<Eval::Int>(&arg->node);
              if (!i) return error();
              CEventsEnv next = phi;
              next[n.event.pred] = {i->n, Mark::E};
              return {unit_v(), std::move(next)};
            },
            [&](const Expr::AssertAnn& n) -> EvalResult {
              EvalPtr arg = value(n.event.arg, rho);
              if (is_wrong(arg)) return error();
              const auto* i = std::get_if<Eval::Int>(&arg->node);
              if (!i) return error();
              auto it = phi.find(n.event.pred);
              if (it == phi.end() || it->second.first != i->n) return error();
              CEventsEnv next = phi;
              next[n.event.pred] = {i->n, Mark::EA};
              return {unit_v(), std::move(next)};
            },
            [&](const Expr::Switch& n) -> EvalResult {
              EvalPtr scrut = value(n.scrutinee, rho);
              if (is_wrong(scrut)) return error();
              std::vector<EvalPtr> parts;
              EvalResult r;
              if (match_pattern(n.ctor, scrut, parts)) {
                Env inner = rho;
                for (size_t i = 0; i < n.binders.size(); ++i)
                  inner.insert_or_assign(n.binders[i], parts[i]);
                r = expr(n.matched, inner, phi);
              } else {
                r = expr(n.otherwise, rho, phi);
              }
              if (is_wrong(r.value)) return error();
              return r;
            },
        },
        ep->node);
  }
};

}  // namespace

bool is_wrong(const Eval& v) { return std::holds_alternative<Eval::Wrong>(v.node); }
bool is_wrong(const EvalPtr& v) { return v && is_wrong(*v); }

std::optional<long long> prim_arith(PrimOp op, long long a, long long b) {
  switch (op) {
    case PrimOp::Add: return a + b;
    case PrimOp::Sub: return a - b;
    case PrimOp::Mul: return a * b;
    case PrimOp::Div:
      if (b == 0) return std::nullopt;
      return a / b;
  }
  return std::nullopt;
}

std::string render(const Eval& v) {
  return std::visit(
      overloaded{
          [](const Eval::Int& i) { return "Int(" + std::to_string(i.n) + ")"; },
          [](const Eval::Str& s) { return "Str(" + quote_string(s.s) + ")"; },
          [](const Eval::Unit&) { return std::string("Unit"); },
          [](const Eval::XmlText& t) { return "Xml(Text(" + quote_string(t.s) + "))"; },
          [](const Eval::XmlElem& e) {
            return "Xml(Elem(" + render(e.tag) + ", " + render(e.children) + "))";
          },
          [](const Eval::Nil&) { return std::string("Nil"); },
          [](const Eval::Cons& c) { return "Cons(" + render(c.head) + ", " + render(c.tail) + ")"; },
          [](const Eval::Tuple& t) {
            std::string out = "Tuple(";
            for (size_t i = 0; i < t.items.size(); ++i) {
              if (i) out += ", ";
              out += render(t.items[i]);
            }
            return out + ")";
          },
          [](const Eval::HrefC&) { return std::string("<link>"); },
          [](const Eval::FormC&) { return std::string("<form>"); },
          [](const Eval::FunC&) { return std::string("<fun>"); },
          [](const Eval::Wrong&) { return std::string("Wrong"); },
      },
      v.node);
}

std::string render(const EvalPtr& v) { return v ? render(*v) : std::string("StepLimit"); }

std::string render_events(const CEventsEnv& phi) {
  std::string out = "{";
  bool first = true;
  for (const auto& [pred, entry] : phi) {
    if (!first) out += ", ";
    first = false;
    out += pred + " -> (" + std::to_string(entry.first) + ", " + mark_name(entry.second) + ")";
  }
  return out + "}";
}

EvalPtr eval_value(const ValuePtr& v, const Env& rho) {
  Interp interp{std::make_shared<Budget>(Budget{100000})};
  return interp.value(v, rho);
}

EvalOutcome eval_expr(const ExprPtr& e, const Env& rho, const CEventsEnv& phi,
                      long long max_steps) {
  Interp interp{std::make_shared<Budget>(Budget{max_steps})};
  try {
    EvalResult r = interp.expr(e, rho, phi);
    return {std::move(r.value), std::move(r.events), false};
  } catch (const StepLimit&) {
    return {nullptr, {}, true};
  }
}

RunReport run(const ExprPtr& program, long long max_steps) {
  EvalOutcome out = eval_expr(program, {}, {}, max_steps);
  RunReport report;
  report.step_limit_hit = out.step_limit_hit;
  if (out.step_limit_hit) {
    report.rendered_value = "StepLimit";
    report.rendered_events = "{}";
    return report;
  }
  report.value = out.value;
  report.events = out.events;
  report.wrong = is_wrong(out.value);
  report.rendered_value = render(out.value);
  report.rendered_events = render_events(out.events);
  return report;
}

}  // namespace tinylinks
