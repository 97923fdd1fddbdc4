#include "tinylinks/legacy.hpp"

#include <utility>

#include "tinylinks/pretty.hpp"

// The five published rules — get, post, event, assert, application — are
// implemented verbatim below and use their original rule names in failure
// reports. Every other rule is the minimal standard completion and is marked
// "completion". The completion keeps the published commitments: pages, links
// and forms all have the single type xml, and unannotated parameters get the
// wildcard type any.

namespace tinylinks {

namespace {

LTypePtr make(LType t) { return std::make_shared<const LType>(std::move(t)); }

// --- value/expression substitution (shadow-aware) ----------------------------

ValuePtr subst_value(const ValuePtr& v, const std::string& x, const ValuePtr& r);
ExprPtr subst_expr(const ExprPtr& e, const std::string& x, const ValuePtr& r);

ValuePtr subst_value(const ValuePtr& v, const std::string& x, const ValuePtr& r) {
  return std::visit(
      overloaded{
          [&](const Value::Var& n) -> ValuePtr { return n.name == x ? r : v; },
          [&](const Value::Con& n) -> ValuePtr {
            std::vector<ValuePtr> args;
            args.reserve(n.args.size());
            for (const auto& a : n.args) args.push_back(subst_value(a, x, r));
            return v_con(n.ctor, std::move(args));
          },
          [&](const Value::Href& n) -> ValuePtr { return v_href(subst_expr(n.body, x, r)); },
          [&](const Value::Lambda& n) -> ValuePtr {
            if (n.param == x) return v;
            return v_lambda(n.param, subst_expr(n.body, x, r));
          },
          [&](const Value::Form& n) -> ValuePtr {
            for (const auto& l : n.labels)
              if (l == x) return v;
            return v_form(n.labels, subst_expr(n.body, x, r));
          },
      },
      v->node);
}

ExprPtr subst_expr(const ExprPtr& e, const std::string& x, const ValuePtr& r) {
  return std::visit(
      overloaded{
          [&](const Expr::Val& n) -> ExprPtr { return e_val(subst_value(n.value, x, r)); },
          [&](const Expr::Let& n) -> ExprPtr {
            ExprPtr bound = subst_expr(n.bound, x, r);
            ExprPtr body = n.name == x ? n.body : subst_expr(n.body, x, r);
            return e_let(n.name, std::move(bound), std::move(body));
          },
          [&](const Expr::Prim& n) -> ExprPtr {
            return e_prim(n.op, subst_expr(n.lhs, x, r), subst_expr(n.rhs, x, r));
          },
          [&](const Expr::App& n) -> ExprPtr {
            return e_app(subst_value(n.fn, x, r), subst_value(n.arg, x, r));
          },
          [&](const Expr::Post& n) -> ExprPtr {
            std::vector<std::pair<std::string, ValuePtr>> fields;
            fields.reserve(n.fields.size());
            for (const auto& [label, value] : n.fields)
              fields.emplace_back(label, subst_value(value, x, r));
            return e_post(std::move(fields), subst_value(n.target, x, r));
          },
          [&](const Expr::Get& n) -> ExprPtr { return e_get(subst_value(n.target, x, r)); },
          [&](const Expr::EventAnn& n) -> ExprPtr {
            return e_event(n.event.pred, subst_value(n.event.arg, x, r));
          },
          [&](const Expr::AssertAnn& n) -> ExprPtr {
            return e_assert(n.event.pred, subst_value(n.event.arg, x, r));
          },
          [&](const Expr::Switch& n) -> ExprPtr {
            ValuePtr scrut = subst_value(n.scrutinee, x, r);
            bool shadowed = false;
            for (const auto& b : n.binders)
              if (b == x) shadowed = true;
            ExprPtr matched = shadowed ? n.matched : subst_expr(n.matched, x, r);
            return e_switch(std::move(scrut), n.ctor, n.binders, std::move(matched),
                            subst_expr(n.otherwise, x, r));
          },
      },
      e->node);
}

// --- substitution and free variables on types and effect sets ----------------

EffectSet subst_effects(const EffectSet& f, const std::string& x, const ValuePtr& r) {
  EffectSet out;
  for (const auto& ev : f) out.insert(levent(ev.pred, subst_value(ev.arg, x, r)));
  return out;
}

LTypePtr subst_ltype(const LTypePtr& t, const std::string& x, const ValuePtr& r) {
  switch (t->tag) {
    case LType::Tag::List:
      return lt_list(subst_ltype(t->elems[0], x, r));
    case LType::Tag::Tuple: {
      std::vector<LTypePtr> elems;
      elems.reserve(t->elems.size());
      for (const auto& c : t->elems) elems.push_back(subst_ltype(c, x, r));
      return lt_tuple(std::move(elems));
    }
    case LType::Tag::DepFun: {
      LTypePtr pt = subst_ltype(t->param_type, x, r);
      if (t->param == x)  // the parameter shadows x in pre, result and post
        return lt_fun(t->param, std::move(pt), t->pre, t->result, t->post);
      return lt_fun(t->param, std::move(pt), subst_effects(t->pre, x, r),
                    subst_ltype(t->result, x, r), subst_effects(t->post, x, r));
    }
    default:
      return t;
  }
}

void fv_ltype(const LTypePtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t->tag) {
    case LType::Tag::List:
    case LType::Tag::Tuple:
      for (const auto& c : t->elems) fv_ltype(c, bound, out);
      return;
    case LType::Tag::DepFun: {
      fv_ltype(t->param_type, bound, out);
      bool fresh = bound.insert(t->param).second;
      for (const auto& ev : t->pre) free_vars(*ev.arg, bound, out);
      fv_ltype(t->result, bound, out);
      for (const auto& ev : t->post) free_vars(*ev.arg, bound, out);
      if (fresh) bound.erase(t->param);
      return;
    }
    default:
      return;
  }
}

std::set<std::string> fv_ltype(const LTypePtr& t) {
  std::set<std::string> bound, out;
  fv_ltype(t, bound, out);
  return out;
}

// Greatest lower bound of two compatible types; any yields the other side.
LTypePtr lmeet(const LTypePtr& a, const LTypePtr& b) {
  if (a->tag == LType::Tag::Any) return b;
  if (b->tag == LType::Tag::Any) return a;
  switch (a->tag) {
    case LType::Tag::List:
      return lt_list(lmeet(a->elems[0], b->elems[0]));
    case LType::Tag::Tuple: {
      std::vector<LTypePtr> elems;
      elems.reserve(a->elems.size());
      for (size_t i = 0; i < a->elems.size(); ++i) elems.push_back(lmeet(a->elems[i], b->elems[i]));
      return lt_tuple(std::move(elems));
    }
    default:
      return a;
  }
}

}  // namespace

LEvent levent(std::string pred, ValuePtr arg) {
  LEvent ev;
  ev.key = pred + "<" + pretty(arg) + ">";
  ev.pred = std::move(pred);
  ev.arg = std::move(arg);
  return ev;
}

LTypePtr lt_any() {
  static const LTypePtr t = make({});
  return t;
}
LTypePtr lt_unit() {
  static const LTypePtr t = make({LType::Tag::Unit, {}, "", nullptr, nullptr, {}, {}});
  return t;
}
LTypePtr lt_int() {
  static const LTypePtr t = make({LType::Tag::Int, {}, "", nullptr, nullptr, {}, {}});
  return t;
}
LTypePtr lt_string() {
  static const LTypePtr t = make({LType::Tag::String, {}, "", nullptr, nullptr, {}, {}});
  return t;
}
LTypePtr lt_xml() {
  static const LTypePtr t = make({LType::Tag::Xml, {}, "", nullptr, nullptr, {}, {}});
  return t;
}
LTypePtr lt_list(LTypePtr elem) {
  return make({LType::Tag::List, {std::move(elem)}, "", nullptr, nullptr, {}, {}});
}
LTypePtr lt_tuple(std::vector<LTypePtr> elems) {
  return make({LType::Tag::Tuple, std::move(elems), "", nullptr, nullptr, {}, {}});
}
LTypePtr lt_fun(std::string param, LTypePtr param_type, EffectSet pre, LTypePtr result,
                EffectSet post) {
  return make({LType::Tag::DepFun, {}, std::move(param), std::move(param_type), std::move(result),
               std::move(pre), std::move(post)});
}

bool lcompat(const LTypePtr& a, const LTypePtr& b) {
  if (a->tag == LType::Tag::Any || b->tag == LType::Tag::Any) return true;
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case LType::Tag::List:
      return lcompat(a->elems[0], b->elems[0]);
    case LType::Tag::Tuple: {
      if (a->elems.size() != b->elems.size()) return false;
      for (size_t i = 0; i < a->elems.size(); ++i)
        if (!lcompat(a->elems[i], b->elems[i])) return false;
      return true;
    }
    case LType::Tag::DepFun:
      return a->param == b->param && lcompat(a->param_type, b->param_type) && a->pre == b->pre &&
             lcompat(a->result, b->result) && a->post == b->post;
    default:
      return true;
  }
}

std::string render(const LTypePtr& t) {
  switch (t->tag) {
    case LType::Tag::Any:
      return "any";
    case LType::Tag::Unit:
      return "unit";
    case LType::Tag::Int:
      return "int";
    case LType::Tag::String:
      return "string";
    case LType::Tag::Xml:
      return "xml";
    case LType::Tag::List:
      return "list(" + render(t->elems[0]) + ")";
    case LType::Tag::Tuple: {
      std::string out = "tuple(";
      for (size_t i = 0; i < t->elems.size(); ++i) {
        if (i) out += ", ";
        out += render(t->elems[i]);
      }
      return out + ")";
    }
    case LType::Tag::DepFun:
      return "<" + t->param + ":" + render(t->param_type) + ">" + render(t->pre) + " -> " +
             render(t->result) + render(t->post);
  }
  return "?";
}

std::string render(const EffectSet& f) {
  std::string out = "{";
  bool first = true;
  for (const auto& ev : f) {
    if (!first) out += ", ";
    first = false;
    out += ev.key;
  }
  return out + "}";
}

std::nullopt_t LegacyChecker::fail(const std::string& rule, const std::string& premise) {
  rule_ = rule;
  premise_ = premise;
  return std::nullopt;
}

std::optional<LTypePtr> LegacyChecker::val(const ValuePtr& v, const Gamma& gamma,
                                           const EffectSet& available) {
  using R = std::optional<LTypePtr>;
  return std::visit(
      overloaded{
          [&](const Value::Var& n) -> R {  // completion
            auto it = gamma.find(n.name);
            if (it == gamma.end()) return fail("T-Var", "unbound variable " + n.name);
            return it->second;
          },
          [&](const Value::Con& n) -> R {  // completion
            switch (n.ctor.tag) {
              case Constructor::Tag::Unit:
                return lt_unit();
              case Constructor::Tag::Zero:
              case Constructor::Tag::Int:
                return lt_int();
              case Constructor::Tag::Str:
                return lt_string();
              case Constructor::Tag::Succ: {
                auto t = val(n.args[0], gamma, available);
                if (!t) return std::nullopt;
                if (!lcompat(*t, lt_int())) return fail("T-Succ", "argument is not an integer");
                return lt_int();
              }
              case Constructor::Tag::Text: {
                auto t = val(n.args[0], gamma, available);
                if (!t) return std::nullopt;
                if (!lcompat(*t, lt_string())) return fail("T-Text", "argument is not a string");
                return lt_xml();  // pages share the one type xml
              }
              case Constructor::Tag::Elem: {
                auto tt = val(n.args[0], gamma, available);
                if (!tt) return std::nullopt;
                if (!lcompat(*tt, lt_string())) return fail("T-Elem", "tag is not a string");
                auto tc = val(n.args[1], gamma, available);
                if (!tc) return std::nullopt;
                if (!lcompat(*tc, lt_xml())) return fail("T-Elem", "child is not xml");
                return lt_xml();
              }
              case Constructor::Tag::Nil:
                return lt_list(lt_any());
              case Constructor::Tag::Cons: {
                auto th = val(n.args[0], gamma, available);
                if (!th) return std::nullopt;
                auto tt = val(n.args[1], gamma, available);
                if (!tt) return std::nullopt;
                if (!lcompat(*tt, lt_list(lt_any())))
                  return fail("T-Cons", "tail is not a list");
                LTypePtr elem = (*tt)->tag == LType::Tag::List ? (*tt)->elems[0] : lt_any();
                if (!lcompat(*th, elem))
                  return fail("T-Cons", "head and tail element types disagree");
                return lt_list(lmeet(*th, elem));
              }
              case Constructor::Tag::Tuple: {
                std::vector<LTypePtr> elems;
                elems.reserve(n.args.size());
                for (const auto& a : n.args) {
                  auto t = val(a, gamma, available);
                  if (!t) return std::nullopt;
                  elems.push_back(*t);
                }
                return lt_tuple(std::move(elems));
              }
            }
            return fail("T-Con", "unknown constructor");
          },
          [&](const Value::Href& n) -> R {  // completion; the link is just xml
            auto j = exp(n.body, gamma, available);
            if (!j) return std::nullopt;
            if (!lcompat(j->type, lt_xml()))
              return fail("T-Href", "suspended body is not xml");
            return lt_xml();
          },
          [&](const Value::Lambda& n) -> R {  // completion
            Gamma g2 = gamma;
            g2[n.param] = lt_any();
            EffectSet collected;
            synth_.push_back(&collected);
            auto j = exp(n.body, g2, available);
            synth_.pop_back();
            if (!j) return std::nullopt;
            return lt_fun(n.param, lt_any(), std::move(collected), j->type, j->effects);
          },
          [&](const Value::Form& n) -> R {  // completion; the form is just xml
            Gamma g2 = gamma;
            for (const auto& l : n.labels) g2[l] = lt_string();
            auto j = exp(n.body, g2, available);
            if (!j) return std::nullopt;
            if (!lcompat(j->type, lt_xml()))
              return fail("T-Form", "suspended body is not xml");
            return lt_xml();
          },
      },
      v->node);
}

std::optional<LegacyChecker::Judgment> LegacyChecker::exp(const ExprPtr& e, const Gamma& gamma,
                                                          const EffectSet& available) {
  using R = std::optional<Judgment>;
  return std::visit(
      overloaded{
          [&](const Expr::Val& n) -> R {  // completion: values generate no events
            auto t = val(n.value, gamma, available);
            if (!t) return std::nullopt;
            return Judgment{*t, {}};
          },
          [&](const Expr::Let& n) -> R {  // completion: events flow left to right
            auto j1 = exp(n.bound, gamma, available);
            if (!j1) return std::nullopt;
            Gamma g2 = gamma;
            g2[n.name] = j1->type;
            EffectSet avail2 = available;
            avail2.insert(j1->effects.begin(), j1->effects.end());
            auto j2 = exp(n.body, g2, avail2);
            if (!j2) return std::nullopt;
            EffectSet eff = j1->effects;
            eff.insert(j2->effects.begin(), j2->effects.end());
            return Judgment{j2->type, std::move(eff)};
          },
          [&](const Expr::Prim& n) -> R {  // completion
            auto j1 = exp(n.lhs, gamma, available);
            if (!j1) return std::nullopt;
            EffectSet avail2 = available;
            avail2.insert(j1->effects.begin(), j1->effects.end());
            auto j2 = exp(n.rhs, gamma, avail2);
            if (!j2) return std::nullopt;
            if (!lcompat(j1->type, lt_int()) || !lcompat(j2->type, lt_int()))
              return fail("T-Prim", "operands are not integers");
            EffectSet eff = j1->effects;
            eff.insert(j2->effects.begin(), j2->effects.end());
            return Judgment{lt_int(), std::move(eff)};
          },
          [&](const Expr::App& n) -> R {  // published rule, verbatim
            auto tf = val(n.fn, gamma, available);
            if (!tf) return std::nullopt;
            if ((*tf)->tag != LType::Tag::DepFun)
              return fail("T-App", "applied value does not have a function type");
            if (!fv_ltype(*tf).empty())
              return fail("T-App", "function type mentions variables other than its parameter");
            auto ta = val(n.arg, gamma, available);
            if (!ta) return std::nullopt;
            if (!lcompat(*ta, (*tf)->param_type))
              return fail("T-App", "argument type does not match the parameter type");
            EffectSet pre = subst_effects((*tf)->pre, (*tf)->param, n.arg);
            for (const auto& ev : pre)
              if (!available.count(ev))
                return fail("T-App",
                            "required event " + ev.key + " is not among the available events");
            return Judgment{subst_ltype((*tf)->result, (*tf)->param, n.arg),
                            subst_effects((*tf)->post, (*tf)->param, n.arg)};
          },
          [&](const Expr::Post& n) -> R {  // published rule, verbatim
            std::set<std::string> seen;
            for (const auto& [label, value] : n.fields) {
              if (!seen.insert(label).second)
                return fail("T-Post", "duplicate field label " + label);
              auto t = val(value, gamma, available);
              if (!t) return std::nullopt;
              if (!lcompat(*t, lt_string()))
                return fail("T-Post", "field " + label + " is not a string");
            }
            auto tt = val(n.target, gamma, available);
            if (!tt) return std::nullopt;
            // The published premise checks the target against xml — the same
            // type every page has — so any page can be posted to.
            if (!lcompat(*tt, lt_xml())) return fail("T-Post", "target is not xml");
            return Judgment{lt_xml(), {}};
          },
          [&](const Expr::Get& n) -> R {  // published rule, verbatim
            auto tt = val(n.target, gamma, available);
            if (!tt) return std::nullopt;
            // Same conflation: any page passes for a link.
            if (!lcompat(*tt, lt_xml())) return fail("T-Get", "target is not xml");
            return Judgment{lt_xml(), {}};
          },
          [&](const Expr::EventAnn& n) -> R {  // published rule, verbatim
            auto t = val(n.event.arg, gamma, available);
            if (!t) return std::nullopt;
            return Judgment{lt_unit(), {levent(n.event.pred, n.event.arg)}};
          },
          [&](const Expr::AssertAnn& n) -> R {  // published rule, verbatim
            auto t = val(n.event.arg, gamma, available);
            if (!t) return std::nullopt;
            LEvent ev = levent(n.event.pred, n.event.arg);
            if (available.count(ev)) return Judgment{lt_unit(), {ev}};
            if (!synth_.empty()) {
              // Inside a function body the unmet label becomes part of the
              // synthesized precondition instead of failing the derivation.
              synth_.back()->insert(ev);
              return Judgment{lt_unit(), {ev}};
            }
            return fail("T-Assert",
                        "asserted event " + ev.key + " is not among the available events");
          },
          [&](const Expr::Switch& n) -> R {  // completion
            auto ts = val(n.scrutinee, gamma, available);
            if (!ts) return std::nullopt;
            LTypePtr need;
            std::vector<LTypePtr> binder_types;
            switch (n.ctor.tag) {
              case Constructor::Tag::Unit:
                need = lt_unit();
                break;
              case Constructor::Tag::Zero:
              case Constructor::Tag::Int:
                need = lt_int();
                break;
              case Constructor::Tag::Succ:
                need = lt_int();
                binder_types = {lt_int()};
                break;
              case Constructor::Tag::Str:
                need = lt_string();
                break;
              case Constructor::Tag::Text:
                need = lt_xml();
                binder_types = {lt_string()};
                break;
              case Constructor::Tag::Elem:
                need = lt_xml();
                binder_types = {lt_string(), lt_xml()};
                break;
              case Constructor::Tag::Nil:
                need = lt_list(lt_any());
                break;
              case Constructor::Tag::Cons: {
                need = lt_list(lt_any());
                LTypePtr elem = (*ts)->tag == LType::Tag::List ? (*ts)->elems[0] : lt_any();
                binder_types = {elem, lt_list(elem)};
                break;
              }
              case Constructor::Tag::Tuple: {
                int w = n.ctor.width;
                if ((*ts)->tag == LType::Tag::Tuple) {
                  if (static_cast<int>((*ts)->elems.size()) != w)
                    return fail("T-Switch", "tuple width does not match the pattern");
                  binder_types = (*ts)->elems;
                } else {
                  binder_types.assign(static_cast<size_t>(w), lt_any());
                }
                need = lt_tuple(std::vector<LTypePtr>(static_cast<size_t>(w), lt_any()));
                break;
              }
            }
            if (!lcompat(*ts, need))
              return fail("T-Switch", "scrutinee does not match the pattern constructor");
            Gamma g2 = gamma;
            for (size_t i = 0; i < n.binders.size(); ++i) g2[n.binders[i]] = binder_types[i];
            auto j1 = exp(n.matched, g2, available);
            if (!j1) return std::nullopt;
            auto j2 = exp(n.otherwise, gamma, available);
            if (!j2) return std::nullopt;
            if (!lcompat(j1->type, j2->type)) return fail("T-Switch", "branch types disagree");
            EffectSet eff = j1->effects;
            eff.insert(j2->effects.begin(), j2->effects.end());
            return Judgment{lmeet(j1->type, j2->type), std::move(eff)};
          },
      },
      e->node);
}

LegacyReport legacy_check(const ExprPtr& program) {
  LegacyChecker checker;
  LegacyReport report;
  auto j = checker.exp(program, {}, {});
  if (!j) {
    report.rule = checker.failed_rule();
    report.premise = checker.failed_premise();
    report.rendered = "FAIL(" + report.rule + ": " + report.premise + ")";
    return report;
  }
  report.derivable = true;
  report.type = j->type;
  report.effects = j->effects;
  report.accepted = j->type->tag == LType::Tag::Xml && j->effects.empty();
  report.rendered = "<_:" + render(j->type) + "> " + render(j->effects);
  return report;
}

}  // namespace tinylinks
