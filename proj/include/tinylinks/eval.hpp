#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tinylinks/ast.hpp"
#include "tinylinks/events.hpp"

namespace tinylinks {

struct Eval;
using EvalPtr = std::shared_ptr<const Eval>;

// Concrete events environment: predicates are bound to integers.
using CEventsEnv = EventsEnv<long long>;

// Result of evaluating an expression: a value plus the updated events
// environment.
struct EvalResult {
  EvalPtr value;
  CEventsEnv events;
};

// The concrete value domain. Suspended computations (links, forms) and
// functions are represented as closures that receive the events environment
// in force at their use site; they never capture one at definition time.
struct Eval {
  struct Int {
    long long n;
  };
  struct Str {
    std::string s;
  };
  struct Unit {};
  struct XmlText {
    std::string s;
  };
  struct XmlElem {
    EvalPtr tag;
    EvalPtr children;
  };
  struct Nil {};
  struct Cons {
    EvalPtr head;
    EvalPtr tail;
  };
  struct Tuple {
    std::vector<EvalPtr> items;
  };
  struct HrefC {
    std::function<EvalResult(const CEventsEnv&)> resume;
  };
  struct FormC {
    std::function<EvalResult(const CEventsEnv&, const std::vector<EvalPtr>&)> resume;
  };
  struct FunC {
    std::function<EvalResult(const CEventsEnv&, const EvalPtr&)> call;
  };
  struct Wrong {};  // the unique run-time type-error sentinel

  std::variant<Int, Str, Unit, XmlText, XmlElem, Nil, Cons, Tuple, HrefC, FormC, FunC, Wrong>
      node;
};

using Env = std::map<std::string, EvalPtr>;

bool is_wrong(const Eval& v);
bool is_wrong(const EvalPtr& v);

// Integer arithmetic shared by the interpreter and the analysis' constant
// folding, so the two can never disagree. Division by zero yields nullopt.
std::optional<long long> prim_arith(PrimOp op, long long a, long long b);

// Stable text renderings used by reports and golden tests.
std::string render(const Eval& v);
std::string render(const EvalPtr& v);
std::string render_events(const CEventsEnv& phi);

// Evaluates a syntactic value. Value evaluation never consults or changes the
// events environment and always terminates; shape violations yield Wrong.
EvalPtr eval_value(const ValuePtr& v, const Env& rho);

// Evaluates an expression under an identifier environment and an events
// environment. Dynamic type confusion yields (Wrong, empty env) — the error
// result is terminal and resets the events environment. `max_steps` bounds
// the number of expression-node visits and a fixed cap bounds the recursion
// depth (self-application can diverge); exhaustion of either is reported via
// step_limit_hit, not thrown.
struct EvalOutcome {
  EvalPtr value;  // null iff step_limit_hit
  CEventsEnv events;
  bool step_limit_hit = false;
};

EvalOutcome eval_expr(const ExprPtr& e, const Env& rho = {}, const CEventsEnv& phi = {},
                      long long max_steps = 100000);

// Whole-program execution report for a closed program.
struct RunReport {
  EvalPtr value;  // null iff step_limit_hit
  CEventsEnv events;
  bool wrong = false;           // the run produced the Wrong sentinel
  bool step_limit_hit = false;  // the step budget ran out (verdict unknown)
  std::string rendered_value;
  std::string rendered_events;
};

RunReport run(const ExprPtr& program, long long max_steps = 100000);

}  // namespace tinylinks
