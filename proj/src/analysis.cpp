#include "tinylinks/analysis.hpp"

#include <algorithm>

#include "tinylinks/eval.hpp"  // prim_arith is shared with the interpreter

namespace tinylinks {

namespace {

std::set<std::string> constraint_preds(const ConstraintSet& c) {
  std::set<std::string> out;
  for (const auto& pair : c) out.insert(pair.second);
  return out;
}

Correspondence combine2(const Correspondence& a, const Correspondence& b) {
  Correspondence out = a;
  for (const auto& [pred, d] : b) {
    auto it = out.find(pred);
    if (it == out.end()) {
      out.emplace(pred, d);
    } else if (it->second == d || d.tag == AbsDval::Tag::NoDval) {
      // keep
    } else if (it->second.tag == AbsDval::Tag::NoDval) {
      it->second = d;
    } else {
      it->second = AbsDval::top();
    }
  }
  return out;
}

void push_subst(Equations& eqs, const Subst& s) {
  for (auto& eq : subst_to_equations(s)) eqs.push_back(std::move(eq));
}

ConstraintSet set_minus(const ConstraintSet& a, const ConstraintSet& b) {
  ConstraintSet out;
  for (const auto& p : a)
    if (!b.count(p)) out.insert(p);
  return out;
}

// The branch-join of two events environments. Occurrence is a guarantee and
// merges by intersection (values that disagree widen to Top; EA survives only
// when both sides asserted). A pending assertion (mark A) is an obligation and
// survives from either side, so that a single branch's unchecked assert still
// blocks the top-level verdict.
AbsEEnv merge_branch_envs(const AbsEEnv& a, const AbsEEnv& b) {
  AbsEEnv out;
  for (const auto& [pred, ea] : a) {
    auto it = b.find(pred);
    if (it == b.end()) {
      if (ea.second == Mark::A) out[pred] = ea;
      continue;
    }
    const auto& eb = it->second;
    AbsDval d = ea.first == eb.first ? ea.first : AbsDval::top();
    if (mark_occurred(ea.second) && mark_occurred(eb.second)) {
      Mark m = (ea.second == Mark::EA && eb.second == Mark::EA) ? Mark::EA : Mark::E;
      out[pred] = {d, m};
    } else {
      out[pred] = {d, Mark::A};
    }
  }
  for (const auto& [pred, eb] : b)
    if (!a.count(pred) && eb.second == Mark::A) out[pred] = eb;
  return out;
}

AbsValue make_value(TermPtr t, Subst theta, AbsDval d, ConstraintSet c, Correspondence f) {
  AbsValue out;
  out.ts = {std::move(t), std::move(theta)};
  out.d = std::move(d);
  out.cons = std::move(c);
  out.corr = std::move(f);
  return out;
}

}  // namespace

// --- algebra ----------------------------------------------------------------

std::string render(const AbsDval& d) {
  switch (d.tag) {
    case AbsDval::Tag::NoDval: return "No_dval";
    case AbsDval::Tag::NInt: return std::to_string(d.n);
    case AbsDval::Tag::VarD: return render(d.ide);
    case AbsDval::Tag::Top: return "Unknown";
  }
  return "No_dval";
}

Correspondence combine(const std::vector<Correspondence>& fs) {
  Correspondence out;
  for (const auto& f : fs) out = combine2(out, f);
  return out;
}

Correspondence restrict_out(const Correspondence& f, const ConstraintSet& c) {
  std::set<std::string> preds = constraint_preds(c);
  Correspondence out;
  for (const auto& entry : f)
    if (!preds.count(entry.first)) out.insert(entry);
  return out;
}

Correspondence restrict_in(const Correspondence& f, const ConstraintSet& c) {
  std::set<std::string> preds = constraint_preds(c);
  Correspondence out;
  for (const auto& entry : f)
    if (preds.count(entry.first)) out.insert(entry);
  return out;
}

Correspondence bind_param(const Correspondence& f, const TermVar& x, const AbsDval& d) {
  Correspondence out = f;
  for (auto& entry : out)
    if (entry.second.tag == AbsDval::Tag::VarD && entry.second.ide == x) entry.second = d;
  return out;
}

bool check(const Correspondence& f, const AbsEEnv& phi) {
  for (const auto& [pred, required] : f) {
    // A requirement whose value is statically unknown can never be shown to
    // match what actually occurred.
    if (required.tag == AbsDval::Tag::Top || required.tag == AbsDval::Tag::NoDval) return false;
    auto it = phi.find(pred);
    if (it == phi.end()) return false;
    if (!mark_occurred(it->second.second)) return false;
    if (it->second.first != required) return false;
  }
  return true;
}

EnvDelta env_delta(const AbsEEnv& now, const AbsEEnv& before) {
  EnvDelta out;
  for (const auto& [pred, entry] : now) {
    auto it = before.find(pred);
    bool had = it != before.end();
    if (mark_asserted(entry.second) && (!had || !mark_asserted(it->second.second)))
      out.asserted.insert(pred);
    if (mark_occurred(entry.second) && (!had || !mark_occurred(it->second.second)))
      out.evented.insert(pred);
    if (!had || it->second != entry) out.delta[pred] = entry;
  }
  return out;
}

Correspondence to_correspondence(const AbsEEnv& phi) {
  Correspondence out;
  for (const auto& [pred, entry] : phi) out.emplace(pred, entry.first);
  return out;
}

std::pair<std::set<TermVar>, std::set<TermVar>> pre_post_vars(const TermPtr& t) {
  std::pair<std::set<TermVar>, std::set<TermVar>> out;
  const Term::App* app = as_app(t);
  if (!app || app->sym != "fun") return out;
  if (const TermVar* pre = as_var(app->args[2])) out.first.insert(*pre);
  if (const TermVar* post = as_var(app->args[4])) out.second.insert(*post);
  return out;
}

AbsEEnv include_events(const AbsEEnv& phi, const Correspondence& f) {
  AbsEEnv out = phi;
  for (const auto& [pred, d] : f) out[pred] = {d, Mark::E};
  return out;
}

AbsDval apply_subst(const Subst& s, const AbsDval& d) {
  if (d.tag != AbsDval::Tag::VarD) return d;
  return AbsDval::var(apply_var(s, d.ide));
}

Correspondence apply_subst(const Subst& s, const Correspondence& f) {
  Correspondence out;
  for (const auto& [pred, d] : f) out.emplace(pred, apply_subst(s, d));
  return out;
}

ConstraintSet apply_subst(const Subst& s, const ConstraintSet& c) {
  ConstraintSet out;
  for (const auto& [var, pred] : c) out.insert({apply_var(s, var), pred});
  return out;
}

AbsEEnv apply_subst(const Subst& s, const AbsEEnv& phi) {
  AbsEEnv out;
  for (const auto& [pred, entry] : phi)
    out.emplace(pred, std::make_pair(apply_subst(s, entry.first), entry.second));
  return out;
}

std::string render_constraints(const ConstraintSet& c) {
  std::string out = "[";
  bool first = true;
  for (const auto& [var, pred] : c) {
    if (!first) out += ", ";
    first = false;
    out += "(" + render(var) + "," + pred + ")";
  }
  return out + "]";
}

std::string render_correspondence(const Correspondence& f) {
  std::string out = "{";
  bool first = true;
  for (const auto& [pred, d] : f) {
    if (!first) out += ", ";
    first = false;
    out += pred + " -> " + render(d);
  }
  return out + "}";
}

std::string render_events(const AbsEEnv& phi) {
  std::string out = "{";
  bool first = true;
  for (const auto& [pred, entry] : phi) {
    if (!first) out += ", ";
    first = false;
    out += pred + " -> (" + render(entry.first) + ", " + mark_name(entry.second) + ")";
  }
  return out + "}";
}

// --- analyser ----------------------------------------------------------------

AbsValue Analyzer::fail(const std::string& reason, const std::string& message) {
  if (reason_.empty()) {
    reason_ = reason;
    message_ = message;
  }
  AbsValue out;
  out.error = true;
  out.message = message;
  return out;
}

std::pair<AbsValue, AbsEEnv> Analyzer::fail_exp(const std::string& reason,
                                                const std::string& message) {
  return {fail(reason, message), AbsEEnv{}};
}

AbsValue Analyzer::aval(const ValuePtr& vp, const TypeEnv& rho, const AbsEEnv& phi) {
  return std::visit(
      overloaded{
          [&](const Value::Var& n) -> AbsValue {
            auto it = rho.find(n.name);
            if (it == rho.end()) return fail("type-clash", "unbound variable: " + n.name);
            return it->second;
          },
          [&](const Value::Con& n) -> AbsValue { return analyse_con(n, rho, phi); },
          [&](const Value::Href& n) -> AbsValue {
            return analyse_suspension(n.body, rho, phi, false, 0);
          },
          [&](const Value::Form& n) -> AbsValue {
            TypeEnv inner = rho;
            for (const auto& label : n.labels)
              inner[label] =
                  make_value(t_string(), Subst{}, AbsDval::no_dval(), {}, {});
            return analyse_suspension(n.body, inner, phi, true, n.labels.size());
          },
          [&](const Value::Lambda& n) -> AbsValue {
            TermVar x = fresh_ide(n.param);
            TermVar alpha = fresh_type();
            TermVar pre = fresh_ann();
            TermVar post = fresh_ann();
            TypeEnv inner = rho;
            inner[n.param] =
                make_value(t_var(alpha), Subst{}, AbsDval::var(x), {}, {});
            auto [body, phi_out] = aexp(n.body, inner, phi);
            if (body.error) return body;
            const Subst& theta = body.ts.theta;
            EnvDelta delta = env_delta(phi_out, apply_subst(theta, phi));
            ConstraintSet c = body.cons;
            for (const auto& pred : delta.asserted) c.insert({pre, pred});
            for (const auto& pred : delta.evented) c.insert({post, pred});
            Correspondence f = combine2(body.corr, to_correspondence(delta.delta));
            TermPtr t = apply_subst(theta, t_fun(x, t_var(alpha), pre, body.ts.t, post));
            return make_value(t, theta, AbsDval::no_dval(), apply_subst(theta, c),
                              apply_subst(theta, f));
          },
      },
      vp->node);
}

AbsValue Analyzer::analyse_suspension(const ExprPtr& body, const TypeEnv& rho,
                                      const AbsEEnv& phi, bool is_form,
                                      std::size_t label_count) {
  const char* what = is_form ? "form" : "href";
  TermVar g = fresh_ann();
  auto [bv, phi_out] = aexp(body, rho, phi);
  if (bv.error) return bv;
  EnvDelta delta = env_delta(phi_out, phi);
  if (!delta.evented.empty())
    return fail("bad-event-value",
                std::string(what) + ": suspended expression generates events");
  Equations eqs{{bv.ts.t, t_xml(g)}};
  push_subst(eqs, bv.ts.theta);
  auto theta = mgu(eqs);
  if (!theta)
    return fail("type-clash", std::string(what) + ": suspended expression is not xml");
  ConstraintSet c = bv.cons;
  for (const auto& pred : delta.asserted) c.insert({g, pred});
  Correspondence f = combine2(bv.corr, to_correspondence(delta.delta));
  TermPtr t = apply_subst(*theta, is_form ? t_form(g) : t_link(g));
  AbsDval d = is_form ? AbsDval::nint(static_cast<long long>(label_count))
                      : AbsDval::no_dval();
  return make_value(t, *theta, d, apply_subst(*theta, c), apply_subst(*theta, f));
}

AbsValue Analyzer::analyse_con(const Value::Con& n, const TypeEnv& rho, const AbsEEnv& phi) {
  using Tag = Constructor::Tag;
  switch (n.ctor.tag) {
    case Tag::Unit:
      return make_value(t_unit(), Subst{}, AbsDval::no_dval(), {}, {});
    case Tag::Int:
      return make_value(t_int(), Subst{}, AbsDval::nint(n.ctor.number), {}, {});
    case Tag::Str:
      return make_value(t_string(), Subst{}, AbsDval::no_dval(), {}, {});
    case Tag::Zero:
      return make_value(t_int(), Subst{}, AbsDval::nint(0), {}, {});
    case Tag::Succ: {
      AbsValue a = aval(n.args[0], rho, phi);
      if (a.error) return a;
      Equations eqs{{a.ts.t, t_int()}};
      push_subst(eqs, a.ts.theta);
      auto theta = mgu(eqs);
      if (!theta) return fail("type-clash", "Succ: argument is not an integer");
      AbsDval d = a.d.tag == AbsDval::Tag::NInt ? AbsDval::nint(a.d.n + 1) : AbsDval::top();
      return make_value(t_int(), *theta, d, apply_subst(*theta, a.cons),
                        apply_subst(*theta, a.corr));
    }
    case Tag::Text: {
      AbsValue a = aval(n.args[0], rho, phi);
      if (a.error) return a;
      Equations eqs{{a.ts.t, t_string()}};
      push_subst(eqs, a.ts.theta);
      auto theta = mgu(eqs);
      if (!theta) return fail("type-clash", "Text: argument is not a string");
      TermVar g = fresh_ann();
      return make_value(apply_subst(*theta, t_xml(g)), *theta, AbsDval::no_dval(),
                        apply_subst(*theta, a.cons), apply_subst(*theta, a.corr));
    }
    case Tag::Elem: {
      AbsValue tag = aval(n.args[0], rho, phi);
      if (tag.error) return tag;
      AbsValue child = aval(n.args[1], rho, phi);
      if (child.error) return child;
      Equations eqs{{tag.ts.t, t_string()}, {child.ts.t, t_xml(fresh_ann())}};
      push_subst(eqs, tag.ts.theta);
      push_subst(eqs, child.ts.theta);
      auto theta = mgu(eqs);
      if (!theta)
        return fail("type-clash", "Elem: expected a string tag and an xml child");
      TermVar g = fresh_ann();
      ConstraintSet c = tag.cons;
      c.insert(child.cons.begin(), child.cons.end());
      return make_value(apply_subst(*theta, t_xml(g)), *theta, AbsDval::no_dval(),
                        apply_subst(*theta, c),
                        apply_subst(*theta, combine2(tag.corr, child.corr)));
    }
    case Tag::Nil:
      return make_value(t_list(t_var(fresh_type())), Subst{}, AbsDval::no_dval(), {}, {});
    case Tag::Cons: {
      AbsValue head = aval(n.args[0], rho, phi);
      if (head.error) return head;
      AbsValue tail = aval(n.args[1], rho, phi);
      if (tail.error) return tail;
      Equations eqs{{tail.ts.t, t_list(head.ts.t)}};
      push_subst(eqs, head.ts.theta);
      push_subst(eqs, tail.ts.theta);
      auto theta = mgu(eqs);
      if (!theta) return fail("type-clash", "Cons: tail is not a list of the head's type");
      ConstraintSet c = head.cons;
      c.insert(tail.cons.begin(), tail.cons.end());
      return make_value(apply_subst(*theta, t_list(head.ts.t)), *theta, AbsDval::no_dval(),
                        apply_subst(*theta, c),
                        apply_subst(*theta, combine2(head.corr, tail.corr)));
    }
    case Tag::Tuple: {
      std::vector<AbsValue> items;
      Equations eqs;
      for (const auto& arg : n.args) {
        AbsValue a = aval(arg, rho, phi);
        if (a.error) return a;
        push_subst(eqs, a.ts.theta);
        items.push_back(std::move(a));
      }
      auto theta = mgu(eqs);
      if (!theta) return fail("type-clash", "tuple: components have conflicting instantiations");
      std::vector<TermPtr> elems;
      ConstraintSet c;
      Correspondence f;
      for (const auto& item : items) {
        elems.push_back(apply_subst(*theta, item.ts.t));
        c.insert(item.cons.begin(), item.cons.end());
        f = combine2(f, item.corr);
      }
      return make_value(t_tuple(std::move(elems)), *theta, AbsDval::no_dval(),
                        apply_subst(*theta, c), apply_subst(*theta, f));
    }
  }
  return fail("type-clash", "unknown constructor");
}

std::pair<AbsValue, AbsEEnv> Analyzer::aexp(const ExprPtr& ep, const TypeEnv& rho,
                                            const AbsEEnv& phi) {
  using R = std::pair<AbsValue, AbsEEnv>;
  return std::visit(
      overloaded{
          [&](const Expr::Val& n) -> R {
            AbsValue a = aval(n.value, rho, phi);
            if (a.error) return {a, AbsEEnv{}};
            return {a, phi};
          },
          [&](const Expr::Let& n) -> R {
            auto [bound, phi1] = aexp(n.bound, rho, phi);
            if (bound.error) return {bound, AbsEEnv{}};
            TypeEnv inner = rho;
            inner[n.name] = bound;
            auto [body, phi2] = aexp(n.body, inner, phi1);
            if (body.error) return {body, AbsEEnv{}};
            auto theta = merge_substs(bound.ts.theta, body.ts.theta);
            if (!theta)
              return fail_exp("type-clash",
                              "let: conflicting instantiations of a shared type variable");
            AbsValue out = make_value(apply_subst(*theta, body.ts.t), *theta,
                                      apply_subst(*theta, body.d),
                                      apply_subst(*theta, body.cons),
                                      apply_subst(*theta, body.corr));
            return {out, phi2};
          },
          [&](const Expr::Prim& n) -> R {
            auto [lhs, phi1] = aexp(n.lhs, rho, phi);
            if (lhs.error) return {lhs, AbsEEnv{}};
            auto [rhs, phi2] = aexp(n.rhs, rho, phi1);
            if (rhs.error) return {rhs, AbsEEnv{}};
            Equations eqs{{lhs.ts.t, t_int()}, {rhs.ts.t, t_int()}};
            push_subst(eqs, lhs.ts.theta);
            push_subst(eqs, rhs.ts.theta);
            auto theta = mgu(eqs);
            if (!theta) return fail_exp("type-clash", "arithmetic on non-integer operands");
            AbsDval d = AbsDval::top();
            if (n.op == PrimOp::Div) {
              if (rhs.d.tag != AbsDval::Tag::NInt)
                return fail_exp("type-clash", "division by a statically unknown divisor");
              if (rhs.d.n == 0) return fail_exp("type-clash", "division by zero");
              if (lhs.d.tag == AbsDval::Tag::NInt)
                d = AbsDval::nint(*prim_arith(n.op, lhs.d.n, rhs.d.n));
            } else if (lhs.d.tag == AbsDval::Tag::NInt && rhs.d.tag == AbsDval::Tag::NInt) {
              d = AbsDval::nint(*prim_arith(n.op, lhs.d.n, rhs.d.n));
            }
            ConstraintSet c = lhs.cons;
            c.insert(rhs.cons.begin(), rhs.cons.end());
            AbsValue out = make_value(t_int(), *theta, d, apply_subst(*theta, c),
                                      apply_subst(*theta, combine2(lhs.corr, rhs.corr)));
            return {out, phi2};
          },
          [&](const Expr::App& n) -> R {
            AbsValue fn = aval(n.fn, rho, phi);
            if (fn.error) return {fn, AbsEEnv{}};
            AbsValue arg = aval(n.arg, rho, phi);
            if (arg.error) return {arg, AbsEEnv{}};
            TermVar x = fresh_ide("x");
            TermVar alpha = fresh_type();
            TermVar pre = fresh_ann();
            TermVar post = fresh_ann();
            Equations eqs{{fn.ts.t, t_fun(x, arg.ts.t, pre, t_var(alpha), post)}};
            push_subst(eqs, fn.ts.theta);
            push_subst(eqs, arg.ts.theta);
            auto theta = mgu(eqs);
            if (!theta)
              return fail_exp("type-clash", "apply_fun: not a function of the argument's type");
            auto [pre_vars, post_vars] = pre_post_vars(apply_subst(*theta, fn.ts.t));
            ConstraintSet fn_cons = apply_subst(*theta, fn.cons);
            ConstraintSet c_pre, c_post;
            for (const auto& pair : fn_cons) {
              if (pre_vars.count(pair.first)) c_pre.insert(pair);
              if (post_vars.count(pair.first)) c_post.insert(pair);
            }
            Correspondence f1 = bind_param(apply_subst(*theta, fn.corr), apply_var(*theta, x),
                                           apply_subst(*theta, arg.d));
            if (!check(restrict_in(f1, c_pre), phi))
              return fail_exp("unmet-precondition", "apply_fun: no preconditions");
            ConstraintSet consumed = c_pre;
            consumed.insert(c_post.begin(), c_post.end());
            ConstraintSet all = fn.cons;
            all.insert(arg.cons.begin(), arg.cons.end());
            ConstraintSet c = set_minus(apply_subst(*theta, all), consumed);
            Correspondence f =
                combine2(restrict_out(f1, consumed), apply_subst(*theta, arg.corr));
            AbsValue out = make_value(apply_subst(*theta, t_var(alpha)), *theta,
                                      AbsDval::top(), std::move(c), std::move(f));
            return {out, include_events(phi, restrict_in(f1, c_post))};
          },
          [&](const Expr::Get& n) -> R {
            TermVar g = fresh_ann();
            AbsValue a = aval(n.target, rho, phi);
            if (a.error) return {a, AbsEEnv{}};
            Equations eqs{{a.ts.t, t_link(g)}};
            push_subst(eqs, a.ts.theta);
            auto theta = mgu(eqs);
            if (!theta) return fail_exp("type-clash", "get: target is not a link");
            TermVar gr = apply_var(*theta, g);
            ConstraintSet all = apply_subst(*theta, a.cons);
            ConstraintSet c_pre;
            for (const auto& pair : all)
              if (pair.first == gr) c_pre.insert(pair);
            Correspondence f = apply_subst(*theta, a.corr);
            if (!check(restrict_in(f, c_pre), phi))
              return fail_exp("unmet-precondition", "get: precondition not satisfied");
            AbsValue out = make_value(apply_subst(*theta, t_xml(g)), *theta,
                                      AbsDval::no_dval(), set_minus(all, c_pre),
                                      restrict_out(f, c_pre));
            return {out, phi};
          },
          [&](const Expr::Post& n) -> R {
            std::set<std::string> labels;
            for (const auto& field : n.fields)
              if (!labels.insert(field.first).second)
                return fail_exp("type-clash", "post: duplicate field label: " + field.first);
            Equations eqs;
            ConstraintSet all_cons;
            Correspondence all_corr;
            for (const auto& field : n.fields) {
              AbsValue fv = aval(field.second, rho, phi);
              if (fv.error) return {fv, AbsEEnv{}};
              eqs.push_back({fv.ts.t, t_string()});
              push_subst(eqs, fv.ts.theta);
              all_cons.insert(fv.cons.begin(), fv.cons.end());
              all_corr = combine2(all_corr, fv.corr);
            }
            AbsValue target = aval(n.target, rho, phi);
            if (target.error) return {target, AbsEEnv{}};
            TermVar g = fresh_ann();
            eqs.push_back({target.ts.t, t_form(g)});
            push_subst(eqs, target.ts.theta);
            auto theta = mgu(eqs);
            if (!theta)
              return fail_exp("type-clash",
                              "post: fields must be strings and the target a form");
            if (target.d.tag != AbsDval::Tag::NInt ||
                target.d.n != static_cast<long long>(n.fields.size()))
              return fail_exp("type-clash",
                              "post: form field count unknown or different from the posted fields");
            all_cons.insert(target.cons.begin(), target.cons.end());
            all_corr = combine2(all_corr, target.corr);
            TermVar gr = apply_var(*theta, g);
            ConstraintSet all = apply_subst(*theta, all_cons);
            ConstraintSet c_pre;
            for (const auto& pair : all)
              if (pair.first == gr) c_pre.insert(pair);
            Correspondence f = apply_subst(*theta, all_corr);
            if (!check(restrict_in(f, c_pre), phi))
              return fail_exp("unmet-precondition", "post: precondition not satisfied");
            AbsValue out = make_value(apply_subst(*theta, t_xml(g)), *theta,
                                      AbsDval::no_dval(), set_minus(all, c_pre),
                                      restrict_out(f, c_pre));
            return {out, phi};
          },
          [&](const Expr::EventAnn& n) -> R {
            return analyse_annotation(n.event, false, rho, phi);
          },
          [&](const Expr::AssertAnn& n) -> R {
            return analyse_annotation(n.event, true, rho, phi);
          },
          [&](const Expr::Switch& n) -> R { return analyse_switch(n, rho, phi); },
      },
      ep->node);
}

std::pair<AbsValue, AbsEEnv> Analyzer::analyse_annotation(const Event& ev, bool is_assert,
                                                          const TypeEnv& rho,
                                                          const AbsEEnv& phi) {
  const std::string what = is_assert ? "assert" : "event";
  AbsValue a = aval(ev.arg, rho, phi);
  if (a.error) return {a, AbsEEnv{}};
  if (a.d.tag != AbsDval::Tag::NInt && a.d.tag != AbsDval::Tag::VarD)
    return fail_exp("bad-event-value",
                    what + ": value is not a specific integer or parameter");
  Equations eqs{{a.ts.t, t_int()}};
  push_subst(eqs, a.ts.theta);
  auto theta = mgu(eqs);
  if (!theta) return fail_exp("bad-event-value", what + ": value is not an integer");
  AbsDval d = apply_subst(*theta, a.d);
  AbsEEnv out = phi;
  auto it = out.find(ev.pred);
  if (!is_assert) {
    if (it != out.end()) {
      AbsDval prev = apply_subst(*theta, it->second.first);
      if (!mark_occurred(it->second.second) || prev != d)
        return fail_exp("bad-event-value",
                        "event: " + ev.pred + " already carries a different value or is pending assertion");
    }
    out[ev.pred] = {d, Mark::E};
  } else {
    // A matching prior occurrence discharges the assertion. Anything else —
    // no entry, a different value, or a still-pending assertion — supersedes
    // the entry with a new pending assertion carrying the asserted value, so
    // that inside a suspended or function body the assertion surfaces as a
    // latent precondition instead of clashing with the caller's events.
    Mark m = Mark::A;
    if (it != out.end()) {
      AbsDval prev = apply_subst(*theta, it->second.first);
      if (prev == d && mark_occurred(it->second.second)) m = Mark::EA;
    }
    out[ev.pred] = {d, m};
  }
  AbsValue result = make_value(t_unit(), *theta, AbsDval::no_dval(),
                               apply_subst(*theta, a.cons), apply_subst(*theta, a.corr));
  return {result, out};
}

std::pair<AbsValue, AbsEEnv> Analyzer::analyse_switch(const Expr::Switch& n, const TypeEnv& rho,
                                                      const AbsEEnv& phi) {
  using Tag = Constructor::Tag;
  AbsValue sv = aval(n.scrutinee, rho, phi);
  if (sv.error) return {sv, AbsEEnv{}};
  Equations eqs;
  push_subst(eqs, sv.ts.theta);
  std::vector<std::pair<std::string, AbsValue>> binds;
  auto bind = [&](const std::string& name, TermPtr t, AbsDval d) {
    binds.emplace_back(name, make_value(std::move(t), Subst{}, std::move(d), {}, {}));
  };
  switch (n.ctor.tag) {
    case Tag::Unit:
      eqs.push_back({sv.ts.t, t_unit()});
      break;
    case Tag::Zero:
    case Tag::Int:
      eqs.push_back({sv.ts.t, t_int()});
      break;
    case Tag::Str:
      eqs.push_back({sv.ts.t, t_string()});
      break;
    case Tag::Succ: {
      eqs.push_back({sv.ts.t, t_int()});
      AbsDval d = sv.d.tag == AbsDval::Tag::NInt ? AbsDval::nint(sv.d.n - 1) : AbsDval::top();
      bind(n.binders[0], t_int(), d);
      break;
    }
    case Tag::Text:
      eqs.push_back({sv.ts.t, t_xml(fresh_ann())});
      bind(n.binders[0], t_string(), AbsDval::no_dval());
      break;
    case Tag::Elem:
      eqs.push_back({sv.ts.t, t_xml(fresh_ann())});
      bind(n.binders[0], t_string(), AbsDval::no_dval());
      bind(n.binders[1], t_xml(fresh_ann()), AbsDval::no_dval());
      break;
    case Tag::Nil:
      eqs.push_back({sv.ts.t, t_list(t_var(fresh_type()))});
      break;
    case Tag::Cons: {
      TermVar elem = fresh_type();
      eqs.push_back({sv.ts.t, t_list(t_var(elem))});
      bind(n.binders[0], t_var(elem), AbsDval::top());
      bind(n.binders[1], t_list(t_var(elem)), AbsDval::no_dval());
      break;
    }
    case Tag::Tuple: {
      std::vector<TermPtr> elems;
      for (const auto& name : n.binders) {
        TermPtr t = t_var(fresh_type());
        bind(name, t, AbsDval::top());
        elems.push_back(std::move(t));
      }
      eqs.push_back({sv.ts.t, t_tuple(std::move(elems))});
      break;
    }
  }
  auto theta0 = mgu(eqs);
  if (!theta0) return fail_exp("type-clash", "switch: scrutinee cannot match the pattern");
  TypeEnv matched_env = rho;
  for (auto& [name, av] : binds) {
    av.ts.t = apply_subst(*theta0, av.ts.t);
    av.ts.theta = *theta0;
    matched_env[name] = av;
  }
  auto [first, phi1] = aexp(n.matched, matched_env, phi);
  if (first.error) return {first, AbsEEnv{}};
  auto [second, phi2] = aexp(n.otherwise, rho, phi);
  if (second.error) return {second, AbsEEnv{}};
  Equations joined{{first.ts.t, second.ts.t}};
  push_subst(joined, *theta0);
  push_subst(joined, first.ts.theta);
  push_subst(joined, second.ts.theta);
  auto theta = mgu(joined);
  if (!theta) return fail_exp("type-clash", "switch: branch types differ");
  AbsDval d1 = apply_subst(*theta, first.d);
  AbsDval d2 = apply_subst(*theta, second.d);
  AbsDval d = d1 == d2 ? d1 : AbsDval::top();
  ConstraintSet c = sv.cons;
  c.insert(first.cons.begin(), first.cons.end());
  c.insert(second.cons.begin(), second.cons.end());
  Correspondence f = combine2(combine2(sv.corr, first.corr), second.corr);
  AbsEEnv merged =
      merge_branch_envs(apply_subst(*theta, phi1), apply_subst(*theta, phi2));
  AbsValue out = make_value(apply_subst(*theta, first.ts.t), *theta, d,
                            apply_subst(*theta, c), apply_subst(*theta, f));
  return {out, merged};
}

// --- whole-program verdict ----------------------------------------------------

AnalysisReport analyze(const ExprPtr& program) {
  Analyzer analyzer;
  auto [value, events] = analyzer.aexp(program, {}, {});
  AnalysisReport report;
  report.value = value;
  report.events = events;
  if (value.error) {
    report.safe = false;
    report.reason = analyzer.failure_reason().empty() ? "type-clash" : analyzer.failure_reason();
    report.message =
        analyzer.failure_message().empty() ? value.message : analyzer.failure_message();
    report.rendered = "No_type \"" + report.message + "\"";
    return report;
  }
  report.rendered = "(type - : " + render(value.ts.t) + " " + render(value.d) + " " +
                    render_constraints(value.cons) + " " +
                    render_correspondence(value.corr) + ", " + render_events(events) + ")";
  Equations eqs{{value.ts.t, t_xml(analyzer.fresh_ann())}};
  push_subst(eqs, value.ts.theta);
  if (!mgu(eqs).has_value()) {
    report.safe = false;
    report.reason = "not-xml";
    report.message = "the program's value is not an xml page";
    return report;
  }
  if (!value.cons.empty()) {
    report.safe = false;
    report.reason = "unmet-precondition";
    report.message = "undischarged effect constraints remain";
    return report;
  }
  for (const auto& [pred, entry] : events) {
    if (entry.second == Mark::A) {
      report.safe = false;
      report.reason = "unmet-precondition";
      report.message = "assertion on " + pred + " has no preceding event";
      return report;
    }
  }
  report.safe = true;
  return report;
}

}  // namespace tinylinks
