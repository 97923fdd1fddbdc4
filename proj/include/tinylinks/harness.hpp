#pragma once

// Small-program enumeration and the differential soundness oracle. Every
// enumerated program is run under all three semantics — the concrete
// evaluator, the corrected analyser, and the original published checker — and
// the verdicts are compared. A soundness violation is a program judged safe
// that nevertheless goes wrong; the corrected analyser is expected to produce
// none, the original checker at least one.

#include <string>
#include <vector>

#include "tinylinks/ast.hpp"

namespace tinylinks {

struct GenConfig {
  int max_depth = 3;
  std::vector<std::string> predicates = {"p", "q"};
  std::vector<long long> int_literals = {0, 1};
  std::vector<std::string> string_literals = {"Hello!"};
  unsigned seed = 1;      // randomized mode only
  int random_count = 0;   // number of extra random programs (0 = exhaustive only)
  int random_depth = 5;   // depth budget for random programs
  long long max_steps = 100000;  // concrete-run budget; exceeding it skips
};

// One program judged under all three semantics.
struct Verdict {
  ExprPtr program;
  bool legacy_accepted = false;
  bool analysis_safe = false;
  bool wrong = false;    // the concrete run produced Wrong
  bool skipped = false;  // step budget exhausted; concrete verdict unknown
};

// Deterministic depth-bounded enumeration of closed programs over integer and
// string literals, Text, Elem, href, form, get, post, event, assert, let,
// single-parameter functions and application, and the arithmetic operators.
// Binders are named x0, x1, ... by nesting depth; forms use the single field
// label "a"; direct self-application (a value applied to itself) is excluded.
// Depth is expression height: literals have depth 1 and every constructor adds
// one to the maximum depth of its parts.
std::vector<ExprPtr> enumerate_exact_depth(const GenConfig& cfg, int depth);
std::vector<ExprPtr> enumerate_up_to(const GenConfig& cfg);  // depths 1..max_depth, in order

// Seeded random closed programs (depth ≤ random_depth); same seed, same list.
std::vector<ExprPtr> random_programs(const GenConfig& cfg);

// Judge one program under all three semantics.
Verdict verdict_for(const ExprPtr& program, long long max_steps = 100000);

struct SoundnessSummary {
  long long total = 0;
  long long skipped = 0;
  long long analysis_safe = 0;
  long long legacy_accepted = 0;
  long long wrong = 0;
  long long incomplete = 0;  // Wrong-free but judged unsafe by the analyser
  std::vector<Verdict> analysis_violations;  // analysis_safe && wrong — expected empty
  std::vector<Verdict> legacy_violations;    // legacy_accepted && wrong — expected non-empty
};

// Judge an explicit list of programs. Skipped runs never count as violations.
SoundnessSummary summarize(const std::vector<ExprPtr>& programs, long long max_steps = 100000);

// Exhaustive check over enumerate_up_to(cfg), plus random_programs(cfg) when
// random_count > 0. Deterministic for a fixed config.
SoundnessSummary soundness_check(const GenConfig& cfg);

// Line-oriented report: counts, then one pretty-printed line per violation.
std::string render(const SoundnessSummary& s);

// Checks that analysing a get or a post never changes the events environment:
// for `count` link/form programs — get and post wrapped around enumerated
// suspension bodies first, then seeded random dischargeable suspensions to
// fill the quota — the environment coming out of the analysis must equal the
// one going in. Only programs the analyser accepts are counted.
struct PurityReport {
  int checked = 0;     // successfully analysed and compared
  int enumerated = 0;  // how many of those used deterministically enumerated bodies
  std::vector<std::string> failures;  // programs whose events environment changed
};
PurityReport purity_check(const GenConfig& cfg, int count);

}  // namespace tinylinks
