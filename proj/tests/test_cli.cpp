// End-to-end tests for the command-line tool: spawn the real binary against
// the sample corpus and check exit codes, golden output lines, and the JSON
// schema. TINYLINKS_BIN and SAMPLES_DIR are injected by the build.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct CmdResult {
  int exit_code;
  std::string output;  // standard output only
};

CmdResult shell(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int status = pclose(pipe);
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), out};
}

CmdResult cli(const std::string& args) { return shell(std::string(TINYLINKS_BIN) + " " + args); }

CmdResult cli_stdin(const std::string& args, const std::string& program) {
  return shell("echo '" + program + "' | " + std::string(TINYLINKS_BIN) + " " + args);
}

std::string sample(const std::string& name) { return std::string(SAMPLES_DIR) + "/" + name; }

}  // namespace

TEST_CASE("the three semantics disagree about a page used as a link") {
  CmdResult r = cli("run " + sample("hello_wrong.tl"));
  CHECK(r.exit_code == 2);
  CHECK(r.output == "Wrong\n{}\n");
  CmdResult a = cli("analyze " + sample("hello_wrong.tl"));
  CHECK(a.exit_code == 1);
  CHECK(a.output == "No_type \"get: target is not a link\"\n");
  CmdResult l = cli("legacy " + sample("hello_wrong.tl"));
  CHECK(l.exit_code == 0);
  CHECK(l.output == "<_:xml> {}\n");
}

TEST_CASE("analysing the purchase function prints its full latent type") {
  CmdResult r = cli("analyze " + sample("buy.tl"));
  CHECK(r.exit_code == 1);  // a function value is not a page
  CHECK(r.output ==
        "(type - : Function(_#value#var0_, Integer(), _annvar0_, "
        "Function(_#dbpass#var1_, _typevar1_, _annvar2_, Xml(_annvar4_), _annvar3_), "
        "_annvar1_) No_dval [(_annvar2_,PriceIs)] {PriceIs -> _#value#var0_}, {})\n");
}

TEST_CASE("partial application instantiates the price and keeps the obligation") {
  CmdResult r = cli("analyze " + sample("buy_partial.tl"));
  CHECK(r.exit_code == 1);
  CHECK(r.output ==
        "(type - : Function(_#dbpass#var1_, _typevar1_, _annvar2_, Xml(_annvar4_), "
        "_annvar3_) Unknown [(_annvar2_,PriceIs)] {PriceIs -> 5}, {})\n");
}

TEST_CASE("exit codes across the sample corpus") {
  struct Expected {
    const char* name;
    int run, analyze, legacy;
  };
  // run: 0 clean, 2 wrong; analyze: 0 safe, 1 unsafe; legacy: 0 accepted, 1 rejected.
  const Expected table[] = {
      {"hello_ok.tl", 0, 0, 0},
      {"buy_event.tl", 0, 0, 1},
      {"buy_noevent.tl", 2, 1, 1},
      {"event_assert.tl", 0, 0, 1},
      {"double_href.tl", 0, 1, 0},
      {"form_post.tl", 0, 0, 0},
      {"switch_list.tl", 0, 0, 0},
      {"counter_event_str.tl", 2, 1, 1},
      {"closure_event.tl", 0, 0, 1},
      {"arith.tl", 0, 0, 0},
  };
  for (const auto& row : table) {
    CAPTURE(row.name);
    CHECK(cli("run " + sample(row.name)).exit_code == row.run);
    CHECK(cli("analyze " + sample(row.name)).exit_code == row.analyze);
    CHECK(cli("legacy " + sample(row.name)).exit_code == row.legacy);
  }
}

TEST_CASE("dash reads the program from standard input") {
  CmdResult r = cli_stdin("run -", "get(Text(\"Hello!\"))");
  CHECK(r.exit_code == 2);
  CmdResult a = cli_stdin("analyze -", "Text(\"Hello!\")");
  CHECK(a.exit_code == 0);
}

TEST_CASE("failures map to distinct exit codes") {
  CHECK(cli_stdin("analyze -", "var broken").exit_code == 3);  // parse error
  CHECK(cli("").exit_code == 4);                               // missing subcommand
  CHECK(cli("analyze --bogus x.tl").exit_code == 4);           // unknown flag
  CHECK(cli("analyze /nonexistent-input.tl").exit_code == 4);  // unreadable input
  CHECK(cli("run --max-steps 1 " + sample("arith.tl")).exit_code == 1);  // budget
}

TEST_CASE("fuzz prints the differential summary and succeeds") {
  CmdResult r = cli("fuzz --depth 2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("programs: 107 (skipped: 0)") != std::string::npos);
  CHECK(r.output.find("analysis: safe 1 / unsafe 106, violations 0") != std::string::npos);
}

TEST_CASE("fuzz --json reports the depth-3 violations machine-readably") {
  CmdResult r = cli("fuzz --depth 3 --json");
  CHECK(r.exit_code == 0);  // zero corrected-analyser violations
  nlohmann::json out = nlohmann::json::parse(r.output);
  CHECK(out["programs"] == 67055);
  CHECK(out["analysis_violations"].empty());
  REQUIRE(out["legacy_violations"].size() == 8);
  bool canonical = false;
  for (const auto& v : out["legacy_violations"])
    if (v == "get(Text(\"Hello!\"))") canonical = true;
  CHECK(canonical);
}

TEST_CASE("json output is stable under re-runs") {
  CmdResult first = cli("analyze --json " + sample("buy_event.tl"));
  CmdResult second = cli("analyze --json " + sample("buy_event.tl"));
  CHECK(first.output == second.output);
  nlohmann::json out = nlohmann::json::parse(first.output);
  CHECK(out["verdict"] == "Safe");
  CHECK(out["events"]["PriceIs"] == nlohmann::json::array({"5", "E"}));
  CHECK(out["constraints"].empty());
}

TEST_CASE("run --json reports events with their marks") {
  nlohmann::json out =
      nlohmann::json::parse(cli("run --json " + sample("event_assert.tl")).output);
  CHECK(out["verdict"] == "ok");
  CHECK(out["value"] == "Xml(Text(\"Hello!\"))");
  CHECK(out["events"]["p"] == nlohmann::json::array({1, "EA"}));
}

TEST_CASE("run --json distinguishes wrong from an exhausted budget") {
  nlohmann::json wrong =
      nlohmann::json::parse(cli("run --json " + sample("hello_wrong.tl")).output);
  CHECK(wrong["verdict"] == "wrong");
  CHECK(wrong["value"] == "Wrong");
  nlohmann::json limited = nlohmann::json::parse(
      cli("run --json --max-steps 1 " + sample("arith.tl")).output);
  CHECK(limited["verdict"] == "step-limit");
}

TEST_CASE("legacy --json names the failing rule") {
  nlohmann::json out =
      nlohmann::json::parse(cli("legacy --json " + sample("buy_noevent.tl")).output);
  CHECK(out["verdict"] == "rejected");
  CHECK(out["derivable"] == false);
  CHECK(out["rule"] == "T-App");
}
