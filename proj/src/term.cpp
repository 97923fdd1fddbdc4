#include "tinylinks/term.hpp"

#include <stdexcept>

namespace tinylinks {

TermPtr t_var(TermVar v) { return std::make_shared<const Term>(Term{Term::Var{std::move(v)}}); }

TermPtr t_app(std::string sym, std::vector<TermPtr> args) {
  return std::make_shared<const Term>(Term{Term::App{std::move(sym), std::move(args)}});
}

TermPtr t_unit() { return t_app("unit", {}); }
TermPtr t_int() { return t_app("int", {}); }
TermPtr t_string() { return t_app("string", {}); }

namespace {
TermPtr ann_arg(const char* sym, TermVar ann) {
  if (ann.kind != Kind::Ann) throw std::invalid_argument(std::string(sym) + ": annotation variable expected");
  return t_app(sym, {t_var(std::move(ann))});
}
}  // namespace

TermPtr t_xml(TermVar ann) { return ann_arg("xml", std::move(ann)); }
TermPtr t_link(TermVar ann) { return ann_arg("link", std::move(ann)); }
TermPtr t_form(TermVar ann) { return ann_arg("form", std::move(ann)); }
TermPtr t_list(TermPtr elem) { return t_app("list", {std::move(elem)}); }

TermPtr t_fun(TermVar param, TermPtr arg, TermVar pre, TermPtr result, TermVar post) {
  if (param.kind != Kind::Ide) throw std::invalid_argument("fun: identifier variable expected");
  if (pre.kind != Kind::Ann || post.kind != Kind::Ann)
    throw std::invalid_argument("fun: annotation variables expected");
  return t_app("fun", {t_var(std::move(param)), std::move(arg), t_var(std::move(pre)),
                       std::move(result), t_var(std::move(post))});
}

TermPtr t_tuple(std::vector<TermPtr> elems) {
  if (elems.size() < 2) throw std::invalid_argument("tuple: needs at least 2 components");
  return t_app("tuple", std::move(elems));
}

Kind kind_of(const Term& t) {
  if (const auto* v = std::get_if<Term::Var>(&t.node)) return v->var.kind;
  return Kind::Type;  // every constructed term is a type
}

Kind kind_of(const TermPtr& t) { return kind_of(*t); }

const TermVar* as_var(const TermPtr& t) {
  const auto* v = std::get_if<Term::Var>(&t->node);
  return v ? &v->var : nullptr;
}

const Term::App* as_app(const TermPtr& t) { return std::get_if<Term::App>(&t->node); }

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (const auto* va = as_var(a)) {
    const auto* vb = as_var(b);
    return vb && *va == *vb;
  }
  const auto* fa = as_app(a);
  const auto* fb = as_app(b);
  if (!fa || !fb || fa->sym != fb->sym || fa->args.size() != fb->args.size()) return false;
  for (size_t i = 0; i < fa->args.size(); ++i)
    if (!term_equal(fa->args[i], fb->args[i])) return false;
  return true;
}

bool occurs(const TermVar& v, const TermPtr& t) {
  if (const auto* tv = as_var(t)) return *tv == v;
  for (const auto& a : as_app(t)->args)
    if (occurs(v, a)) return true;
  return false;
}

void collect_vars(const TermPtr& t, std::vector<TermVar>& out) {
  if (const auto* tv = as_var(t)) {
    out.push_back(*tv);
    return;
  }
  for (const auto& a : as_app(t)->args) collect_vars(a, out);
}

TermPtr apply_subst(const Subst& s, const TermPtr& t) {
  if (s.empty()) return t;
  if (const auto* tv = as_var(t)) {
    const TermPtr* bound = s.find(*tv);
    return bound ? *bound : t;  // ranges contain no domain variables
  }
  const auto* app = as_app(t);
  bool changed = false;
  std::vector<TermPtr> args;
  args.reserve(app->args.size());
  for (const auto& a : app->args) {
    TermPtr a2 = apply_subst(s, a);
    changed = changed || a2.get() != a.get();
    args.push_back(std::move(a2));
  }
  if (!changed) return t;
  return t_app(app->sym, std::move(args));
}

TermVar apply_var(const Subst& s, const TermVar& v) {
  if (const TermPtr* bound = s.find(v)) {
    const TermVar* tv = as_var(*bound);
    if (!tv) throw std::logic_error("apply_var: variable bound to a constructed term");
    return *tv;
  }
  return v;
}

namespace {

// Substitutes v ↦ t into every range of s, then records the binding. t must
// already be fully s-applied and must not contain v; both are guaranteed by
// the caller, which keeps s idempotent.
void bind(Subst& s, const TermVar& v, const TermPtr& t) {
  Subst single;
  single.map.emplace(v, t);
  for (auto& [u, r] : s.map) r = apply_subst(single, r);
  s.map.emplace(v, t);
}

}  // namespace

std::optional<Subst> mgu(const Equations& equations) {
  Subst s;
  std::vector<std::pair<TermPtr, TermPtr>> work(equations.begin(), equations.end());
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    a = apply_subst(s, a);
    b = apply_subst(s, b);
    if (term_equal(a, b)) continue;

    const TermVar* va = as_var(a);
    const TermVar* vb = as_var(b);
    if (va && vb) {
      if (va->kind != vb->kind) return std::nullopt;
      // Older variable wins: bind the younger to the older.
      if (*vb < *va) std::swap(va, vb), std::swap(a, b);
      bind(s, *vb, a);
      continue;
    }
    if (va || vb) {
      if (!va) {
        std::swap(va, vb);
        std::swap(a, b);
      }
      // Annotation and identifier variables unify only with variables, and a
      // constructed term is type-kinded.
      if (va->kind != Kind::Type) return std::nullopt;
      if (occurs(*va, b)) return std::nullopt;
      bind(s, *va, b);
      continue;
    }

    const auto* fa = as_app(a);
    const auto* fb = as_app(b);
    if (fa->sym != fb->sym || fa->args.size() != fb->args.size()) return std::nullopt;
    for (size_t i = 0; i < fa->args.size(); ++i) work.emplace_back(fa->args[i], fb->args[i]);
  }
  return s;
}

Equations subst_to_equations(const Subst& s) {
  Equations eqs;
  eqs.reserve(s.map.size());
  for (const auto& [v, t] : s.map) eqs.emplace_back(t_var(v), t);
  return eqs;
}

std::optional<Subst> merge_substs(const Subst& a, const Subst& b) {
  Equations eqs = subst_to_equations(a);
  Equations more = subst_to_equations(b);
  eqs.insert(eqs.end(), more.begin(), more.end());
  return mgu(eqs);
}

std::string render(const TermVar& v) {
  switch (v.kind) {
    case Kind::Type: return "_typevar" + std::to_string(v.index) + "_";
    case Kind::Ann: return "_annvar" + std::to_string(v.index) + "_";
    case Kind::Ide: return "_#" + v.label + "#var" + std::to_string(v.index) + "_";
  }
  return "_?_";
}

namespace {
const std::map<std::string, std::string>& display_names() {
  static const std::map<std::string, std::string> names = {
      {"unit", "Unit"}, {"int", "Integer"}, {"string", "String"}, {"xml", "Xml"},
      {"link", "Link"}, {"form", "Form"},   {"list", "List"},     {"fun", "Function"},
      {"tuple", "Tuple"},
  };
  return names;
}
}  // namespace

std::string render(const TermPtr& t) {
  if (const auto* v = as_var(t)) return render(*v);
  const auto* app = as_app(t);
  auto it = display_names().find(app->sym);
  std::string out = it != display_names().end() ? it->second : app->sym;
  out += '(';
  for (size_t i = 0; i < app->args.size(); ++i) {
    if (i) out += ", ";
    out += render(app->args[i]);
  }
  out += ')';
  return out;
}

}  // namespace tinylinks
