#pragma once

// The original published type-and-effect system, implemented faithfully —
// including its unsoundness. Judgments have the form Γ;F ⊢ E : ⟨_:T⟩{F′}: F is
// the set of events assumed to have occurred (precondition), T the value type,
// F′ the set of events the expression generates (post-condition). The five
// published rules (get, post, event, assert, application) are kept verbatim;
// everything else is the minimal standard completion, marked "completion" in
// the implementation. The defining flaw is that pages, links, and forms all
// share the single type xml, so a page can be used where a link is required.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tinylinks/ast.hpp"

namespace tinylinks {

// A ground event label p⟨V⟩ with a syntactic value. Membership and the ⊆
// premise of the application rule use syntactic equality of the value, which
// the canonical printer decides.
struct LEvent {
  std::string pred;
  ValuePtr arg;
  std::string key;  // pred + rendered arg; the identity used by EffectSet

  friend bool operator<(const LEvent& a, const LEvent& b) { return a.key < b.key; }
  friend bool operator==(const LEvent& a, const LEvent& b) { return a.key == b.key; }
};

LEvent levent(std::string pred, ValuePtr arg);

using EffectSet = std::set<LEvent>;

// --- types -------------------------------------------------------------------

struct LType;
using LTypePtr = std::shared_ptr<const LType>;

// any is the wildcard assigned to unannotated function parameters; it is
// compatible with every type on either side of a premise.
struct LType {
  enum class Tag { Any, Unit, Int, String, Xml, List, Tuple, DepFun };
  Tag tag = Tag::Any;
  std::vector<LTypePtr> elems;  // List: 1 element type; Tuple: component types

  // DepFun ⟨param:param_type⟩{pre} → result{post}. Multi-parameter headers
  // curry into nested single-parameter dependent functions.
  std::string param;
  LTypePtr param_type;
  LTypePtr result;
  EffectSet pre;
  EffectSet post;
};

LTypePtr lt_any();
LTypePtr lt_unit();
LTypePtr lt_int();
LTypePtr lt_string();
LTypePtr lt_xml();
LTypePtr lt_list(LTypePtr elem);
LTypePtr lt_tuple(std::vector<LTypePtr> elems);
LTypePtr lt_fun(std::string param, LTypePtr param_type, EffectSet pre, LTypePtr result,
                EffectSet post);

// Compatibility is structural equality with any acting as a wildcard.
bool lcompat(const LTypePtr& a, const LTypePtr& b);

std::string render(const LTypePtr& t);
std::string render(const EffectSet& f);

// --- the checker --------------------------------------------------------------

// One run of the checker; remembers the first failed rule and premise.
class LegacyChecker {
 public:
  using Gamma = std::map<std::string, LTypePtr>;
  struct Judgment {
    LTypePtr type;
    EffectSet effects;
  };

  // Γ;F ⊢ e : ⟨_:T⟩{F′} — nullopt when no derivation exists.
  std::optional<Judgment> exp(const ExprPtr& e, const Gamma& gamma, const EffectSet& available);
  // Γ;F ⊢ v : T — the value judgment has no effect component.
  std::optional<LTypePtr> val(const ValuePtr& v, const Gamma& gamma, const EffectSet& available);

  const std::string& failed_rule() const { return rule_; }
  const std::string& failed_premise() const { return premise_; }

 private:
  std::nullopt_t fail(const std::string& rule, const std::string& premise);

  // Active precondition collectors, one per enclosing function body being
  // synthesized; an assert whose label is not yet available registers with the
  // innermost collector instead of failing.
  std::vector<EffectSet*> synth_;
  std::string rule_;
  std::string premise_;
};

// --- whole-program verdict ------------------------------------------------------

// A web program is accepted when ∅;∅ ⊢ E : ⟨_:xml⟩{} is derivable: the closed
// program needs no precondition, yields a page, and generates no events.
struct LegacyReport {
  bool derivable = false;
  bool accepted = false;
  LTypePtr type;  // null when not derivable
  EffectSet effects;
  std::string rule;      // failing rule when not derivable
  std::string premise;   // failing premise when not derivable
  std::string rendered;  // <_:xml> {} — or FAIL(rule: premise)
};

LegacyReport legacy_check(const ExprPtr& program);

}  // namespace tinylinks
