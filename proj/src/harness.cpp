#include "tinylinks/harness.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "tinylinks/analysis.hpp"
#include "tinylinks/eval.hpp"
#include "tinylinks/legacy.hpp"
#include "tinylinks/pretty.hpp"

namespace tinylinks {

namespace {

using Scope = std::vector<std::string>;

std::string scope_key(int d, const Scope& scope) {
  std::string k = std::to_string(d);
  for (const auto& s : scope) k += "," + s;
  return k;
}

// Depth-indexed exhaustive enumeration with memoization per (depth, scope).
// std::map guarantees stable references, so memoized vectors can be iterated
// while deeper entries are being built.
class Enumerator {
 public:
  explicit Enumerator(const GenConfig& cfg) : cfg_(cfg) {}

  const std::vector<ValuePtr>& values(int d, const Scope& scope);
  const std::vector<ExprPtr>& exprs(int d, const Scope& scope);

 private:
  const GenConfig& cfg_;
  std::map<std::string, std::vector<ValuePtr>> vmemo_;
  std::map<std::string, std::vector<ExprPtr>> ememo_;
};

const std::vector<ValuePtr>& Enumerator::values(int d, const Scope& scope) {
  std::string k = scope_key(d, scope);
  auto it = vmemo_.find(k);
  if (it != vmemo_.end()) return it->second;
  std::vector<ValuePtr> out;
  if (d == 1) {
    for (long long n : cfg_.int_literals) out.push_back(v_int(n));
    for (const auto& s : cfg_.string_literals) out.push_back(v_str(s));
    std::set<std::string> names(scope.begin(), scope.end());
    for (const auto& x : names) out.push_back(v_var(x));
  } else {
    for (const auto& v : values(d - 1, scope)) out.push_back(v_text(v));
    for (int dt = 1; dt <= d - 1; ++dt)
      for (int dc = 1; dc <= d - 1; ++dc) {
        if (std::max(dt, dc) != d - 1) continue;
        for (const auto& t : values(dt, scope))
          for (const auto& c : values(dc, scope)) out.push_back(v_elem(t, c));
      }
    for (const auto& e : exprs(d - 1, scope)) out.push_back(v_href(e));
    Scope with_label = scope;
    with_label.push_back("a");
    for (const auto& e : exprs(d - 1, with_label)) out.push_back(v_form({"a"}, e));
    std::string binder = "x" + std::to_string(scope.size());
    Scope with_binder = scope;
    with_binder.push_back(binder);
    for (const auto& e : exprs(d - 1, with_binder)) out.push_back(v_lambda(binder, e));
  }
  return vmemo_.emplace(std::move(k), std::move(out)).first->second;
}

const std::vector<ExprPtr>& Enumerator::exprs(int d, const Scope& scope) {
  std::string k = scope_key(d, scope);
  auto it = ememo_.find(k);
  if (it != ememo_.end()) return it->second;
  std::vector<ExprPtr> out;
  for (const auto& v : values(d, scope)) out.push_back(e_val(v));
  if (d >= 2) {
    for (const auto& v : values(d - 1, scope)) out.push_back(e_get(v));
    for (const auto& v : values(d - 1, scope)) out.push_back(e_post({}, v));
    for (int df = 1; df <= d - 1; ++df)
      for (int dt = 1; dt <= d - 1; ++dt) {
        if (std::max(df, dt) != d - 1) continue;
        for (const auto& f : values(df, scope))
          for (const auto& t : values(dt, scope)) out.push_back(e_post({{"a", f}}, t));
      }
    for (const auto& p : cfg_.predicates)
      for (const auto& v : values(d - 1, scope)) out.push_back(e_event(p, v));
    for (const auto& p : cfg_.predicates)
      for (const auto& v : values(d - 1, scope)) out.push_back(e_assert(p, v));
    std::string binder = "x" + std::to_string(scope.size());
    Scope with_binder = scope;
    with_binder.push_back(binder);
    for (int d1 = 1; d1 <= d - 1; ++d1)
      for (int d2 = 1; d2 <= d - 1; ++d2) {
        if (std::max(d1, d2) != d - 1) continue;
        for (const auto& e1 : exprs(d1, scope))
          for (const auto& e2 : exprs(d2, with_binder)) out.push_back(e_let(binder, e1, e2));
      }
    for (int df = 1; df <= d - 1; ++df)
      for (int da = 1; da <= d - 1; ++da) {
        if (std::max(df, da) != d - 1) continue;
        for (const auto& f : values(df, scope))
          for (const auto& a : values(da, scope)) {
            if (equal(f, a)) continue;  // no direct self-application
            out.push_back(e_app(f, a));
          }
      }
    for (PrimOp op : {PrimOp::Add, PrimOp::Sub, PrimOp::Mul, PrimOp::Div})
      for (int d1 = 1; d1 <= d - 1; ++d1)
        for (int d2 = 1; d2 <= d - 1; ++d2) {
          if (std::max(d1, d2) != d - 1) continue;
          for (const auto& e1 : exprs(d1, scope))
            for (const auto& e2 : exprs(d2, scope)) out.push_back(e_prim(op, e1, e2));
        }
  }
  return ememo_.emplace(std::move(k), std::move(out)).first->second;
}

// Seeded random program generation over the same grammar subset.
class RandomGen {
 public:
  RandomGen(const GenConfig& cfg, unsigned seed) : cfg_(cfg), rng_(seed) {}

  ExprPtr expr(int budget, const Scope& scope) {
    if (budget <= 1) return e_val(leaf(scope));
    switch (pick(8)) {
      case 0:
        return e_val(value(budget, scope));
      case 1:
        return e_get(value(budget - 1, scope));
      case 2:
        if (pick(2) == 0) return e_post({}, value(budget - 1, scope));
        return e_post({{"a", value(budget - 1, scope)}}, value(budget - 1, scope));
      case 3:
        return e_event(pred(), value(budget - 1, scope));
      case 4:
        return e_assert(pred(), value(budget - 1, scope));
      case 5: {
        std::string binder = "x" + std::to_string(scope.size());
        Scope s2 = scope;
        s2.push_back(binder);
        return e_let(binder, expr(budget - 1, scope), expr(budget - 1, s2));
      }
      case 6: {
        ValuePtr f = value(budget - 1, scope);
        ValuePtr a = value(budget - 1, scope);
        for (int i = 0; i < 3 && equal(f, a); ++i) a = value(budget - 1, scope);
        if (equal(f, a)) return e_val(f);
        return e_app(f, a);
      }
      default:
        return e_prim(static_cast<PrimOp>(pick(4)), expr(budget - 1, scope),
                      expr(budget - 1, scope));
    }
  }

  ValuePtr value(int budget, const Scope& scope) {
    if (budget <= 1) return leaf(scope);
    switch (pick(6)) {
      case 0:
        return leaf(scope);
      case 1:
        return v_text(value(budget - 1, scope));
      case 2:
        return v_elem(value(budget - 1, scope), value(budget - 1, scope));
      case 3:
        return v_href(expr(budget - 1, scope));
      case 4: {
        Scope s2 = scope;
        s2.push_back("a");
        return v_form({"a"}, expr(budget - 1, s2));
      }
      default: {
        std::string binder = "x" + std::to_string(scope.size());
        Scope s2 = scope;
        s2.push_back(binder);
        return v_lambda(binder, expr(budget - 1, s2));
      }
    }
  }

  // A suspension body the analyser accepts under an events environment where
  // p carries 1 and q carries 0: a short chain of lets over quiet expressions
  // (arithmetic, function values, discharged asserts) ending in a page.
  ExprPtr dischargeable_body(const Scope& scope) {
    int lets = pick(4);
    return body_chain(lets, scope);
  }

 private:
  ExprPtr body_chain(int lets, const Scope& scope) {
    if (lets == 0) return page(scope);
    std::string binder = "x" + std::to_string(scope.size());
    Scope s2 = scope;
    s2.push_back(binder);
    return e_let(binder, quiet(scope), body_chain(lets - 1, s2));
  }

  ExprPtr page(const Scope& scope) {
    if (pick(2) == 0) return e_val(v_text(v_str(str_lit())));
    return e_val(v_elem(v_str(str_lit()), v_text(v_str(str_lit()))));
  }

  ExprPtr quiet(const Scope& scope) {
    switch (pick(4)) {
      case 0:
        return e_val(v_int(int_lit()));
      case 1:
        return e_prim(static_cast<PrimOp>(pick(3)),  // +, -, * only: no /0 risk
                      e_val(v_int(int_lit())), e_val(v_int(int_lit())));
      case 2:
        // Matches the seeded environment {p -> 1, q -> 0} exactly.
        return pick(2) == 0 ? e_assert("p", v_int(1)) : e_assert("q", v_int(0));
      default: {
        std::string binder = "x" + std::to_string(scope.size());
        return e_val(v_lambda(binder, e_val(v_int(int_lit()))));
      }
    }
  }

  ValuePtr leaf(const Scope& scope) {
    std::vector<ValuePtr> opts;
    for (long long n : cfg_.int_literals) opts.push_back(v_int(n));
    for (const auto& s : cfg_.string_literals) opts.push_back(v_str(s));
    std::set<std::string> names(scope.begin(), scope.end());
    for (const auto& x : names) opts.push_back(v_var(x));
    if (opts.empty()) return v_int(0);
    return opts[pick(opts.size())];
  }

  std::string pred() {
    if (cfg_.predicates.empty()) return "p";
    return cfg_.predicates[pick(cfg_.predicates.size())];
  }

  long long int_lit() {
    if (cfg_.int_literals.empty()) return 0;
    return cfg_.int_literals[pick(cfg_.int_literals.size())];
  }

  std::string str_lit() {
    if (cfg_.string_literals.empty()) return "Hello!";
    return cfg_.string_literals[pick(cfg_.string_literals.size())];
  }

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  const GenConfig& cfg_;
  std::mt19937 rng_;
};

}  // namespace

std::vector<ExprPtr> enumerate_exact_depth(const GenConfig& cfg, int depth) {
  Enumerator en(cfg);
  return en.exprs(depth, {});
}

std::vector<ExprPtr> enumerate_up_to(const GenConfig& cfg) {
  Enumerator en(cfg);
  std::vector<ExprPtr> out;
  for (int d = 1; d <= cfg.max_depth; ++d) {
    const auto& level = en.exprs(d, {});
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::vector<ExprPtr> random_programs(const GenConfig& cfg) {
  RandomGen rg(cfg, cfg.seed);
  std::vector<ExprPtr> out;
  out.reserve(static_cast<std::size_t>(std::max(cfg.random_count, 0)));
  for (int i = 0; i < cfg.random_count; ++i) out.push_back(rg.expr(cfg.random_depth, {}));
  return out;
}

Verdict verdict_for(const ExprPtr& program, long long max_steps) {
  Verdict v;
  v.program = program;
  RunReport rr = run(program, max_steps);
  v.wrong = rr.wrong;
  v.skipped = rr.step_limit_hit;
  v.analysis_safe = analyze(program).safe;
  v.legacy_accepted = legacy_check(program).accepted;
  return v;
}

SoundnessSummary summarize(const std::vector<ExprPtr>& programs, long long max_steps) {
  SoundnessSummary s;
  for (const auto& p : programs) {
    Verdict v = verdict_for(p, max_steps);
    ++s.total;
    if (v.skipped) {
      ++s.skipped;  // verdict unknown; never counted as a violation
      continue;
    }
    if (v.analysis_safe) ++s.analysis_safe;
    if (v.legacy_accepted) ++s.legacy_accepted;
    if (v.wrong) ++s.wrong;
    if (!v.wrong && !v.analysis_safe) ++s.incomplete;
    if (v.analysis_safe && v.wrong) s.analysis_violations.push_back(v);
    if (v.legacy_accepted && v.wrong) s.legacy_violations.push_back(v);
  }
  return s;
}

SoundnessSummary soundness_check(const GenConfig& cfg) {
  std::vector<ExprPtr> programs = enumerate_up_to(cfg);
  if (cfg.random_count > 0) {
    std::vector<ExprPtr> extra = random_programs(cfg);
    programs.insert(programs.end(), extra.begin(), extra.end());
  }
  return summarize(programs, cfg.max_steps);
}

std::string render(const SoundnessSummary& s) {
  long long judged = s.total - s.skipped;
  std::ostringstream out;
  out << "programs: " << s.total << " (skipped: " << s.skipped << ")\n";
  out << "analysis: safe " << s.analysis_safe << " / unsafe " << (judged - s.analysis_safe)
      << ", violations " << s.analysis_violations.size() << "\n";
  out << "legacy: accepted " << s.legacy_accepted << " / rejected " << (judged - s.legacy_accepted)
      << ", violations " << s.legacy_violations.size() << "\n";
  out << "concrete: wrong " << s.wrong << " / wrong-free " << (judged - s.wrong) << "\n";
  out << "incompleteness (wrong-free but unsafe): " << s.incomplete << "\n";
  for (const auto& v : s.analysis_violations)
    out << "analysis violation: " << pretty(v.program) << "\n";
  for (const auto& v : s.legacy_violations)
    out << "legacy violation: " << pretty(v.program) << "\n";
  return out.str();
}

PurityReport purity_check(const GenConfig& cfg, int count) {
  PurityReport rep;
  const AbsEEnv phi_in = {{"p", {AbsDval::nint(1), Mark::E}},
                          {"q", {AbsDval::nint(0), Mark::E}}};
  auto try_program = [&](const ExprPtr& program, bool from_enumeration) {
    if (rep.checked >= count) return;
    Analyzer analyzer;
    auto [value, phi_out] = analyzer.aexp(program, {}, phi_in);
    if (value.error) return;
    ++rep.checked;
    if (from_enumeration) ++rep.enumerated;
    if (!(phi_out == phi_in)) rep.failures.push_back(pretty(program));
  };
  auto wrap_both = [&](const ExprPtr& body, bool from_enumeration) {
    try_program(e_get(v_href(body)), from_enumeration);
    std::string field = cfg.string_literals.empty() ? "Hello!" : cfg.string_literals.front();
    try_program(e_post({{"a", v_str(field)}}, v_form({"a"}, body)), from_enumeration);
  };
  Enumerator en(cfg);
  for (int d = 1; d <= cfg.max_depth && rep.checked < count; ++d)
    for (const auto& body : en.exprs(d, {})) {
      wrap_both(body, true);
      if (rep.checked >= count) break;
    }
  RandomGen rg(cfg, cfg.seed);
  for (long long attempts = 0; rep.checked < count && attempts < 100LL * count; ++attempts)
    wrap_both(rg.dischargeable_body({}), false);
  return rep;
}

}  // namespace tinylinks
