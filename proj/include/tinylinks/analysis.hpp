#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tinylinks/ast.hpp"
#include "tinylinks/events.hpp"
#include "tinylinks/term.hpp"

namespace tinylinks {

// Abstract denotable values: the values an event may carry, as the analysis
// sees them. Flat lattice: NoDval below everything, Top above everything,
// NInt(n) and VarD(x) pairwise incomparable in between. Values that can never
// appear in an event (strings, xml, lists, ...) abstract to NoDval; VarD(x)
// stands for "whatever is bound to parameter x"; Top is a statically unknown
// integer.
struct AbsDval {
  enum class Tag { NoDval, NInt, VarD, Top };

  Tag tag = Tag::NoDval;
  long long n = 0;  // NInt payload
  TermVar ide{};    // VarD payload: an identifier variable

  static AbsDval no_dval() { return {}; }
  static AbsDval nint(long long v) { return {Tag::NInt, v, {}}; }
  static AbsDval var(TermVar x) { return {Tag::VarD, 0, std::move(x)}; }
  static AbsDval top() { return {Tag::Top, 0, {}}; }

  friend bool operator==(const AbsDval& a, const AbsDval& b) {
    if (a.tag != b.tag) return false;
    if (a.tag == Tag::NInt) return a.n == b.n;
    if (a.tag == Tag::VarD) return a.ide == b.ide;
    return true;
  }
  friend bool operator!=(const AbsDval& a, const AbsDval& b) { return !(a == b); }
};

// Rendered as No_dval, the integer itself, the identifier variable, or
// Unknown.
std::string render(const AbsDval& d);

// The events environment with abstract payloads.
using AbsEEnv = EventsEnv<AbsDval>;

// A correspondence function: which value each predicate's event carries.
// Absence means "no knowledge"; the empty map is the unit of combine().
using Correspondence = std::map<std::string, AbsDval>;

// Pending effect obligations: (annotation variable, predicate) pairs. A pair
// (a, q) records that the effect slot named by `a` contains predicate q.
using ConstraintSet = std::set<std::pair<TermVar, std::string>>;

// --- correspondence / constraint algebra -----------------------------------

// Pointwise merge of correspondence functions. Absent entries are neutral,
// equal entries are kept, NoDval yields to anything, and disagreeing specific
// values widen to Top. Associative and commutative with the empty map as
// unit.
Correspondence combine(const std::vector<Correspondence>& fs);

// Drop all predicates named in C.
Correspondence restrict_out(const Correspondence& f, const ConstraintSet& c);
// Keep only predicates named in C. Together with restrict_out this
// partitions f.
Correspondence restrict_in(const Correspondence& f, const ConstraintSet& c);

// Rebind every entry currently mapped to VarD(x) to d.
Correspondence bind_param(const Correspondence& f, const TermVar& x, const AbsDval& d);

// True iff every requirement in f is met by phi: the predicate has occurred
// (mark E or EA) with exactly the required value. Requirements that are
// statically unknown (Top / NoDval) cannot be verified and fail.
bool check(const Correspondence& f, const AbsEEnv& phi);

// The difference between two events environments.
struct EnvDelta {
  std::set<std::string> asserted;  // predicates that gained an assertion mark
  std::set<std::string> evented;   // predicates that gained an occurrence mark
  AbsEEnv delta;                   // entries new or changed in `now`
};
EnvDelta env_delta(const AbsEEnv& now, const AbsEEnv& before);

// Forget the marks, keep the values.
Correspondence to_correspondence(const AbsEEnv& phi);

// The pre/post annotation variables of the outermost function type; empty for
// non-function terms.
std::pair<std::set<TermVar>, std::set<TermVar>> pre_post_vars(const TermPtr& t);

// Record every entry of f in phi as an occurred event, overwriting.
AbsEEnv include_events(const AbsEEnv& phi, const Correspondence& f);

// Substitution application, extended pointwise. Only VarD payloads and
// constraint variables can change; map keys never do.
AbsDval apply_subst(const Subst& s, const AbsDval& d);
Correspondence apply_subst(const Subst& s, const Correspondence& f);
ConstraintSet apply_subst(const Subst& s, const ConstraintSet& c);
AbsEEnv apply_subst(const Subst& s, const AbsEEnv& phi);

std::string render_constraints(const ConstraintSet& c);    // [(_annvar0_,p), ...]
std::string render_correspondence(const Correspondence& f);  // {p -> 5, ...}
std::string render_events(const AbsEEnv& phi);             // {p -> (5, E), ...}

// --- abstract values --------------------------------------------------------

// A simple type paired with the instantiations discovered while computing it.
// Invariant: apply_subst(theta, t) == t and theta is idempotent.
struct SimpleType {
  TermPtr t;    // null encodes the type error bottom
  Subst theta;
};

// The abstract value domain: simple type, denotable value, pending
// constraints, and the correspondence function giving the constraint values.
// `error` is the domain's bottom; `message` then says what failed.
struct AbsValue {
  bool error = false;
  std::string message;
  SimpleType ts;
  AbsDval d;
  ConstraintSet cons;
  Correspondence corr;
};

// --- the analyser -----------------------------------------------------------

// One analysis run: owns the per-kind freshness counters and remembers the
// first failure. aval analyses value forms (no event effects possible); aexp
// analyses expressions, threading the events environment.
class Analyzer {
 public:
  using TypeEnv = std::map<std::string, AbsValue>;

  AbsValue aval(const ValuePtr& v, const TypeEnv& rho, const AbsEEnv& phi);
  std::pair<AbsValue, AbsEEnv> aexp(const ExprPtr& e, const TypeEnv& rho, const AbsEEnv& phi);

  TermVar fresh_type() { return {Kind::Type, next_type_++, ""}; }
  TermVar fresh_ann() { return {Kind::Ann, next_ann_++, ""}; }
  TermVar fresh_ide(std::string label) { return {Kind::Ide, next_ide_++, std::move(label)}; }

  // Classification and description of the first failure, if any. The reason
  // is one of: type-clash, unmet-precondition, bad-event-value.
  const std::string& failure_reason() const { return reason_; }
  const std::string& failure_message() const { return message_; }

 private:
  AbsValue fail(const std::string& reason, const std::string& message);
  std::pair<AbsValue, AbsEEnv> fail_exp(const std::string& reason, const std::string& message);

  AbsValue analyse_con(const Value::Con& n, const TypeEnv& rho, const AbsEEnv& phi);
  AbsValue analyse_suspension(const ExprPtr& body, const TypeEnv& rho, const AbsEEnv& phi,
                              bool is_form, std::size_t label_count);
  std::pair<AbsValue, AbsEEnv> analyse_annotation(const Event& ev, bool is_assert,
                                                  const TypeEnv& rho, const AbsEEnv& phi);
  std::pair<AbsValue, AbsEEnv> analyse_switch(const Expr::Switch& n, const TypeEnv& rho,
                                              const AbsEEnv& phi);

  int next_type_ = 0;
  int next_ann_ = 0;
  int next_ide_ = 0;
  std::string reason_;
  std::string message_;
};

// --- whole-program verdict ---------------------------------------------------

// Safe means: the analysis did not error, the program's value is an xml page,
// no constraint pairs remain undischarged, and no assertion is left pending
// (mark A) in the final events environment.
struct AnalysisReport {
  bool safe = false;
  std::string reason;   // empty when safe; else type-clash | unmet-precondition |
                        // bad-event-value | not-xml
  std::string message;  // human-readable failure description
  AbsValue value;
  AbsEEnv events;
  std::string rendered;  // (type - : <type> <dval> [<constraints>] {<corr>}, {<events>})
                         // or: No_type "<message>"
};

AnalysisReport analyze(const ExprPtr& program);

}  // namespace tinylinks
