// Command-line entry point. Subcommands: run (concrete execution), analyze
// (safety analysis), legacy (the original published checker), fuzz (the
// differential soundness check over enumerated programs).
//
// Exit codes: 0 success / Safe / accepted; 1 unsafe / rejected / violations
// found / step budget exhausted; 2 the concrete run went wrong; 3 parse
// error; 4 usage error. Diagnostics go to standard error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tinylinks/analysis.hpp"
#include "tinylinks/eval.hpp"
#include "tinylinks/harness.hpp"
#include "tinylinks/legacy.hpp"
#include "tinylinks/parser.hpp"
#include "tinylinks/pretty.hpp"

namespace {

using nlohmann::json;
using namespace tinylinks;

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kWrong = 2;
constexpr int kParseError = 3;
constexpr int kUsage = 4;

bool read_input(const std::string& path, std::string& out, std::string& error) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    out = buf.str();
    return true;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    error = "cannot open " + path;
    return false;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

json events_json(const CEventsEnv& events) {
  json out = json::object();
  for (const auto& [pred, entry] : events)
    out[pred] = json::array({entry.first, mark_name(entry.second)});
  return out;
}

json events_json(const AbsEEnv& events) {
  json out = json::object();
  for (const auto& [pred, entry] : events)
    out[pred] = json::array({render(entry.first), mark_name(entry.second)});
  return out;
}

int cmd_run(const ExprPtr& program, long long max_steps, bool as_json) {
  RunReport r = run(program, max_steps);
  if (as_json) {
    json out;
    out["verdict"] = r.step_limit_hit ? "step-limit" : (r.wrong ? "wrong" : "ok");
    out["value"] = r.rendered_value;
    out["events"] = events_json(r.events);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << r.rendered_value << "\n" << r.rendered_events << "\n";
  }
  if (r.step_limit_hit) {
    std::cerr << "step budget exhausted after " << max_steps << " steps\n";
    return kRejected;
  }
  return r.wrong ? kWrong : kOk;
}

int cmd_analyze(const ExprPtr& program, bool as_json) {
  AnalysisReport r = analyze(program);
  if (as_json) {
    json out;
    out["verdict"] = r.safe ? "Safe" : "Unsafe";
    out["rendered"] = r.rendered;
    if (!r.safe) {
      out["reason"] = r.reason;
      out["message"] = r.message;
    }
    if (!r.value.error) {
      out["type"] = render(r.value.ts.t);
      out["dval"] = render(r.value.d);
      json cons = json::array();
      for (const auto& [var, pred] : r.value.cons)
        cons.push_back(json::array({render(var), pred}));
      out["constraints"] = cons;
      json corr = json::object();
      for (const auto& [pred, dval] : r.value.corr) corr[pred] = render(dval);
      out["correspondence"] = corr;
      out["events"] = events_json(r.events);
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << r.rendered << "\n";
  }
  if (!r.safe) {
    std::cerr << "unsafe (" << r.reason << "): " << r.message << "\n";
    return kRejected;
  }
  return kOk;
}

int cmd_legacy(const ExprPtr& program, bool as_json) {
  LegacyReport r = legacy_check(program);
  if (as_json) {
    json out;
    out["verdict"] = r.accepted ? "accepted" : "rejected";
    out["derivable"] = r.derivable;
    out["rendered"] = r.rendered;
    if (r.derivable) {
      out["type"] = render(r.type);
      out["effects"] = render(r.effects);
    } else {
      out["rule"] = r.rule;
      out["premise"] = r.premise;
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << r.rendered << "\n";
  }
  if (!r.accepted) {
    if (r.derivable)
      std::cerr << "rejected: not an effect-free xml page\n";
    else
      std::cerr << "rejected (" << r.rule << "): " << r.premise << "\n";
    return kRejected;
  }
  return kOk;
}

int cmd_fuzz(const GenConfig& cfg, bool as_json) {
  SoundnessSummary s = soundness_check(cfg);
  if (as_json) {
    json out;
    out["programs"] = s.total;
    out["skipped"] = s.skipped;
    out["analysis_safe"] = s.analysis_safe;
    out["legacy_accepted"] = s.legacy_accepted;
    out["wrong"] = s.wrong;
    out["incomplete"] = s.incomplete;
    json av = json::array();
    for (const auto& v : s.analysis_violations) av.push_back(pretty(v.program));
    out["analysis_violations"] = av;
    json lv = json::array();
    for (const auto& v : s.legacy_violations) lv.push_back(pretty(v.program));
    out["legacy_violations"] = lv;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << render(s);
  }
  return s.analysis_violations.empty() ? kOk : kRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "TinyLinks toolkit: concrete runs, safety analysis, the original "
      "published checker, and differential soundness testing"};
  app.require_subcommand(1);

  std::string input = "-";
  bool as_json = false;
  long long max_steps = 100000;

  CLI::App* c_run = app.add_subcommand("run", "execute a program under the concrete semantics");
  c_run->add_option("input", input, "program file (`-` reads standard input)")->required();
  c_run->add_flag("--json", as_json, "machine-readable output");
  c_run->add_option("--max-steps", max_steps, "step budget for the run");

  CLI::App* c_analyze = app.add_subcommand("analyze", "analyse a program for safety");
  c_analyze->add_option("input", input, "program file (`-` reads standard input)")->required();
  c_analyze->add_flag("--json", as_json, "machine-readable output");

  CLI::App* c_legacy =
      app.add_subcommand("legacy", "check a program with the original published system");
  c_legacy->add_option("input", input, "program file (`-` reads standard input)")->required();
  c_legacy->add_flag("--json", as_json, "machine-readable output");

  GenConfig cfg;
  std::string preds = "p,q";
  CLI::App* c_fuzz =
      app.add_subcommand("fuzz", "differential soundness check over enumerated programs");
  c_fuzz->add_flag("--json", as_json, "machine-readable output");
  c_fuzz->add_option("--depth", cfg.max_depth, "exhaustive enumeration depth")
      ->check(CLI::PositiveNumber);
  c_fuzz->add_option("--seed", cfg.seed, "seed for the random supplement");
  c_fuzz->add_option("--preds", preds, "comma-separated predicate names");
  c_fuzz->add_option("--max-steps", cfg.max_steps, "step budget per program");
  c_fuzz->add_option("--random", cfg.random_count, "extra seeded random programs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (c_fuzz->parsed()) {
    cfg.predicates.clear();
    std::stringstream ss(preds);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) cfg.predicates.push_back(item);
    return cmd_fuzz(cfg, as_json);
  }

  std::string source, io_error;
  if (!read_input(input, source, io_error)) {
    std::cerr << io_error << "\n";
    return kUsage;
  }
  ExprPtr program;
  try {
    program = parse(source);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  }
  if (c_run->parsed()) return cmd_run(program, max_steps, as_json);
  if (c_analyze->parsed()) return cmd_analyze(program, as_json);
  return cmd_legacy(program, as_json);
}
