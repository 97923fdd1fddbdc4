// Python bindings: the main operations — evaluate, analyse, check under the
// original rules, and differential-test — exposed over program source text.
// Reports come back as plain dicts mirroring the CLI's JSON output.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tinylinks/analysis.hpp"
#include "tinylinks/eval.hpp"
#include "tinylinks/harness.hpp"
#include "tinylinks/legacy.hpp"
#include "tinylinks/parser.hpp"
#include "tinylinks/pretty.hpp"

namespace py = pybind11;
using namespace tinylinks;

namespace {

ExprPtr parse_checked(const std::string& source) {
  try {
    return parse(source);
  } catch (const ParseError& e) {
    // std::invalid_argument surfaces as ValueError.
    throw std::invalid_argument(std::string("parse error: ") + e.what());
  }
}

std::string py_parse_pretty(const std::string& source) {
  return pretty(parse_checked(source));
}

py::dict py_run(const std::string& source, long long max_steps) {
  RunReport r = run(parse_checked(source), max_steps);
  py::dict events;
  for (const auto& [pred, entry] : r.events)
    events[py::str(pred)] = py::make_tuple(entry.first, mark_name(entry.second));
  py::dict out;
  out["verdict"] = r.step_limit_hit ? "step-limit" : (r.wrong ? "wrong" : "ok");
  out["value"] = r.rendered_value;
  out["events"] = events;
  return out;
}

py::dict py_analyze(const std::string& source) {
  AnalysisReport r = analyze(parse_checked(source));
  py::dict events;
  for (const auto& [pred, entry] : r.events)
    events[py::str(pred)] = py::make_tuple(render(entry.first), mark_name(entry.second));
  py::dict out;
  out["safe"] = r.safe;
  out["reason"] = r.reason;
  out["message"] = r.message;
  out["rendered"] = r.rendered;
  out["events"] = events;
  return out;
}

py::dict py_legacy_check(const std::string& source) {
  LegacyReport r = legacy_check(parse_checked(source));
  py::dict out;
  out["derivable"] = r.derivable;
  out["accepted"] = r.accepted;
  out["rendered"] = r.rendered;
  out["rule"] = r.rule;
  out["premise"] = r.premise;
  return out;
}

py::dict py_soundness(int depth, std::vector<std::string> predicates,
                      std::vector<long long> int_literals, unsigned seed,
                      int random_count, long long max_steps) {
  GenConfig cfg;
  cfg.max_depth = depth;
  cfg.predicates = std::move(predicates);
  cfg.int_literals = std::move(int_literals);
  cfg.seed = seed;
  cfg.random_count = random_count;
  cfg.max_steps = max_steps;
  SoundnessSummary s = soundness_check(cfg);

  auto programs_of = [](const std::vector<Verdict>& vs) {
    std::vector<std::string> out;
    out.reserve(vs.size());
    for (const Verdict& v : vs) out.push_back(pretty(v.program));
    return out;
  };
  py::dict out;
  out["programs"] = s.total;
  out["skipped"] = s.skipped;
  out["analysis_safe"] = s.analysis_safe;
  out["legacy_accepted"] = s.legacy_accepted;
  out["wrong"] = s.wrong;
  out["incomplete"] = s.incomplete;
  out["analysis_violations"] = programs_of(s.analysis_violations);
  out["legacy_violations"] = programs_of(s.legacy_violations);
  out["rendered"] = render(s);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Toolkit for a tiny web language with events and assertions: a "
      "concrete evaluator, a safety analyser, the original type-and-effect "
      "checker it corrects, and a differential test harness.";

  m.def("parse_pretty", &py_parse_pretty, py::arg("source"),
        "Parse a program and return its canonical pretty-printed form.\n"
        "Raises ValueError on a syntax error.");

  m.def("run", &py_run, py::arg("source"), py::arg("max_steps") = 100000,
        "Evaluate a program. Returns {'verdict': 'ok'|'wrong'|'step-limit',\n"
        "'value': str, 'events': {predicate: (int, mark)}}.");

  m.def("analyze", &py_analyze, py::arg("source"),
        "Statically analyse a program for event/assert safety. Returns\n"
        "{'safe': bool, 'reason': str, 'message': str, 'rendered': str,\n"
        "'events': {predicate: (value, mark)}}.");

  m.def("legacy_check", &py_legacy_check, py::arg("source"),
        "Check a program under the original published typing rules. Returns\n"
        "{'derivable': bool, 'accepted': bool, 'rendered': str, 'rule': str,\n"
        "'premise': str}; 'accepted' means an effect-free xml page judgment\n"
        "exists (the judgment the evaluator can contradict).");

  m.def("soundness", &py_soundness, py::arg("depth") = 2,
        py::arg("predicates") = std::vector<std::string>{"p", "q"},
        py::arg("int_literals") = std::vector<long long>{0, 1},
        py::arg("seed") = 1, py::arg("random_count") = 0,
        py::arg("max_steps") = 100000,
        "Enumerate every closed program up to the given depth (plus optional\n"
        "seeded random programs) and judge each one under all three\n"
        "semantics. Returns counts plus the violating programs.");
}
