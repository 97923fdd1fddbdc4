#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

namespace tinylinks {

// Variables are segregated into three disjoint kinds: ordinary type variables,
// annotation variables (naming pre/post-condition slots), and identifier
// variables (term-level parameters appearing in dependent function types).
// A variable only ever unifies with a term of its own kind, and annotation
// and identifier variables only ever unify with variables.
enum class Kind { Type, Ann, Ide };

struct TermVar {
  Kind kind = Kind::Type;
  int index = 0;      // per-kind allocation counter
  std::string label;  // identifier variables carry their binder's name

  friend bool operator==(const TermVar& a, const TermVar& b) {
    return a.kind == b.kind && a.index == b.index && a.label == b.label;
  }
  friend bool operator!=(const TermVar& a, const TermVar& b) { return !(a == b); }
  friend bool operator<(const TermVar& a, const TermVar& b) {
    return std::tie(a.kind, a.index, a.label) < std::tie(b.kind, b.index, b.label);
  }
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// First-order terms over the type-constructor signature:
//   unit/0  int/0  string/0  xml/1  link/1  form/1  list/1  fun/5  tuple/n≥2
// fun's argument slots are (param: Ide, argument type, pre: Ann, result type,
// post: Ann). Constructed terms are always of kind Type.
struct Term {
  struct Var {
    TermVar var;
  };
  struct App {
    std::string sym;
    std::vector<TermPtr> args;
  };
  std::variant<Var, App> node;
};

TermPtr t_var(TermVar v);
TermPtr t_app(std::string sym, std::vector<TermPtr> args);
TermPtr t_unit();
TermPtr t_int();
TermPtr t_string();
TermPtr t_xml(TermVar ann);
TermPtr t_link(TermVar ann);
TermPtr t_form(TermVar ann);
TermPtr t_list(TermPtr elem);
TermPtr t_fun(TermVar param, TermPtr arg, TermVar pre, TermPtr result, TermVar post);
TermPtr t_tuple(std::vector<TermPtr> elems);

Kind kind_of(const Term& t);
Kind kind_of(const TermPtr& t);
const TermVar* as_var(const TermPtr& t);
const Term::App* as_app(const TermPtr& t);

bool term_equal(const TermPtr& a, const TermPtr& b);
bool occurs(const TermVar& v, const TermPtr& t);
void collect_vars(const TermPtr& t, std::vector<TermVar>& out);

// An idempotent substitution: no variable in its domain appears in any of its
// ranges. apply_subst() therefore never needs iteration.
struct Subst {
  std::map<TermVar, TermPtr> map;

  bool empty() const { return map.empty(); }
  const TermPtr* find(const TermVar& v) const {
    auto it = map.find(v);
    return it == map.end() ? nullptr : &it->second;
  }
};

TermPtr apply_subst(const Subst& s, const TermPtr& t);
// Resolves a variable that can only be bound to another variable (annotation
// and identifier variables); returns the representative.
TermVar apply_var(const Subst& s, const TermVar& v);

using Equations = std::vector<std::pair<TermPtr, TermPtr>>;

// Most general unifier of the equation set, or nullopt on symbol clash, kind
// clash, or occurs-check failure. When two variables meet, the older (lower
// index) becomes the representative, so variable names in reported types stay
// stable as substitutions accumulate.
std::optional<Subst> mgu(const Equations& equations);

// A substitution viewed as the equation set {v = t | v ↦ t}.
Equations subst_to_equations(const Subst& s);

// Most general common refinement of two substitutions: the unifier of the
// union of their equations. nullopt when they conflict.
std::optional<Subst> merge_substs(const Subst& a, const Subst& b);

// Renderings: type variables as _typevarN_, annotation variables as
// _annvarN_, identifier variables as _#label#varN_; constructors spelled
// Unit(), Integer(), String(), Xml(a), Link(a), Form(a), List(t),
// Function(x, t, pre, t, post), Tuple(t, ...).
std::string render(const TermVar& v);
std::string render(const TermPtr& t);

}  // namespace tinylinks
