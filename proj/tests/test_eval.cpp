#include <string>

#include "doctest.h"
#include "tinylinks/eval.hpp"
#include "tinylinks/parser.hpp"

using namespace tinylinks;

namespace {

RunReport go(const std::string& src, long long max_steps = 100000) {
  return run(parse(src), max_steps);
}

void check_value(const std::string& src, const std::string& rendered) {
  CAPTURE(src);
  RunReport r = go(src);
  CHECK_FALSE(r.wrong);
  CHECK_FALSE(r.step_limit_hit);
  CHECK(r.rendered_value == rendered);
}

void check_wrong(const std::string& src) {
  CAPTURE(src);
  RunReport r = go(src);
  CHECK(r.wrong);
  CHECK_FALSE(r.step_limit_hit);
  CHECK(r.rendered_value == "Wrong");
  // The error result is terminal: it resets the events environment.
  CHECK(r.rendered_events == "{}");
}

}  // namespace

TEST_CASE("atoms evaluate to themselves") {
  check_value("3", "Int(3)");
  check_value("-3", "Int(-3)");
  check_value("\"a\"", "Str(\"a\")");
  check_value("Unit", "Unit");
  check_value("Nil", "Nil");
  check_value("Text(\"Hello!\")", "Xml(Text(\"Hello!\"))");
}

TEST_CASE("constructor injections and shape checks") {
  check_value("Zero", "Int(0)");
  check_value("Succ(Zero)", "Int(1)");
  check_value("Succ(Succ(Succ(Zero)))", "Int(3)");
  check_wrong("Succ(\"a\")");
  check_wrong("Text(3)");
  check_value("Cons(1, Nil)", "Cons(Int(1), Nil)");
  check_value("Tuple(1, \"a\")", "Tuple(Int(1), Str(\"a\"))");
  check_value("Elem(\"div\", Cons(Text(\"x\"), Nil))",
              "Xml(Elem(Str(\"div\"), Cons(Xml(Text(\"x\")), Nil)))");
  // Elem and Cons are unchecked injections.
  check_value("Elem(3, 4)", "Xml(Elem(Int(3), Int(4)))");
  check_wrong("Cons(x, Nil)");  // Wrong argument poisons the constructor
}

TEST_CASE("links suspend and get resumes") {
  check_value("get(href(Text(\"x\")))", "Xml(Text(\"x\"))");
  check_wrong("get(Text(\"Hello!\"))");
  check_wrong("get(3)");
  check_wrong("get(form({}, Text(\"x\")))");
  SUBCASE("suspension sees the events environment of its use site") {
    RunReport r = go("var h = href(assert p(1)); var e = event p(1); get(h)");
    CHECK_FALSE(r.wrong);
    CHECK(r.rendered_value == "Unit");
    CHECK(r.rendered_events == "{p -> (1, EA)}");
  }
  SUBCASE("suspension does not capture the definition-time events environment") {
    check_wrong("var e = event p(1); var h = href(assert p(1)); var e2 = event p(2); get(h)");
  }
  SUBCASE("events inside a link happen when it is resumed") {
    RunReport r = go("get(href(event p(1)))");
    CHECK(r.rendered_value == "Unit");
    CHECK(r.rendered_events == "{p -> (1, E)}");
  }
}

TEST_CASE("forms suspend and post resumes") {
  check_value("post({l = \"v\"}, form({x}, Text(\"ok\")))", "Xml(Text(\"ok\"))");
  check_value("post({l = \"v\"}, form({x}, x))", "Str(\"v\")");
  // Field values bind to the form's labels positionally.
  check_value("post({a = \"1\", b = \"2\"}, form({x, y}, y))", "Str(\"2\")");
  check_value("post({}, form({}, Text(\"e\")))", "Xml(Text(\"e\"))");
  check_wrong("post({}, form({x}, Text(\"ok\")))");          // arity mismatch
  check_wrong("post({l = \"v\"}, form({}, Text(\"ok\")))");  // arity mismatch
  check_wrong("post({l = 3}, form({x}, x))");                // fields must be strings
  check_wrong("post({l = \"a\", l = \"b\"}, form({x, y}, x))");  // duplicate labels
  check_wrong("post({l = \"v\"}, href(Text(\"x\")))");
  SUBCASE("posted form runs under the events environment at the post site") {
    RunReport r = go("var f = form({x}, assert p(1)); var e = event p(1); post({l = \"s\"}, f)");
    CHECK(r.rendered_value == "Unit");
    CHECK(r.rendered_events == "{p -> (1, EA)}");
  }
}

TEST_CASE("events and asserts") {
  SUBCASE("event then assert succeeds and marks EA") {
    RunReport r = go("var x = event q(3); assert q(3)");
    CHECK_FALSE(r.wrong);
    CHECK(r.rendered_value == "Unit");
    CHECK(r.rendered_events == "{q -> (3, EA)}");
  }
  check_wrong("assert q(3)");  // unbound predicate
  check_wrong("var x = event p(1); assert p(2)");
  check_wrong("event p(\"a\")");  // event values are integers only
  check_wrong("assert p(\"a\")");
  SUBCASE("a second event overwrites") {
    RunReport r = go("var a = event p(1); var b = event p(2); assert p(2)");
    CHECK(r.rendered_events == "{p -> (2, EA)}");
  }
  SUBCASE("an event after an assert resets the mark to E") {
    RunReport r = go("var a = event p(1); var b = assert p(1); event p(1)");
    CHECK(r.rendered_events == "{p -> (1, E)}");
  }
  SUBCASE("asserting twice keeps EA") {
    RunReport r = go("var a = event p(1); var b = assert p(1); assert p(1)");
    CHECK(r.rendered_events == "{p -> (1, EA)}");
  }
  SUBCASE("distinct predicates accumulate sorted") {
    RunReport r = go("var a = event q(2); var b = event p(1); assert q(2)");
    CHECK(r.rendered_events == "{p -> (1, E), q -> (2, EA)}");
  }
}

TEST_CASE("functions and application") {
  check_value("fun (x) { x }(1)", "Int(1)");
  check_value("var y = 3; fun (x) { y }(0)", "Int(3)");
  check_value("fun f(a, b) { a + b } f(1)(2)", "Int(3)");
  check_value("fun f(a, b) { a + b } f(1, 2)", "Int(3)");
  check_value("fun (x) { x }", "<fun>");
  check_value("href(Text(\"x\"))", "<link>");
  check_value("form({a}, Text(\"x\"))", "<form>");
  check_wrong("3(4)");
  check_wrong("x");  // unbound variable
  check_wrong("f(x)");
  SUBCASE("application threads events through the body") {
    RunReport r = go("var f = fun (x) { event p(x) }; var u = f(7); assert p(7)");
    CHECK(r.rendered_value == "Unit");
    CHECK(r.rendered_events == "{p -> (7, EA)}");
  }
}

TEST_CASE("primitive arithmetic") {
  check_value("1 + 2 * 3", "Int(7)");
  check_value("(10 - 4) / 3", "Int(2)");
  check_value("0 - 5", "Int(-5)");
  check_wrong("1 / 0");
  check_wrong("\"a\" + 1");
  check_wrong("1 + \"a\"");
  check_wrong("Unit + 1");
  SUBCASE("operands thread the events environment left to right") {
    RunReport r = go("(var a = event p(1); 1) + (var b = assert p(1); 2)");
    CHECK(r.rendered_value == "Int(3)");
    CHECK(r.rendered_events == "{p -> (1, EA)}");
  }
}

TEST_CASE("switch destructuring") {
  check_value("switch (Cons(1, Nil)) { case Cons(h, t) -> h _ -> 0 }", "Int(1)");
  check_value("switch (Cons(1, Nil)) { case Cons(h, t) -> t _ -> 0 }", "Nil");
  check_value("switch (3) { case 3 -> 1 _ -> 0 }", "Int(1)");
  check_value("switch (3) { case 4 -> 1 _ -> 0 }", "Int(0)");
  check_value("switch (\"a\") { case \"a\" -> 1 _ -> 0 }", "Int(1)");
  check_value("switch (\"a\") { case \"b\" -> 1 _ -> 0 }", "Int(0)");
  check_value("switch (0) { case Zero -> 5 _ -> 9 }", "Int(5)");
  check_value("switch (2) { case Succ(n) -> n _ -> 9 }", "Int(1)");
  check_value("switch (0) { case Succ(n) -> n _ -> 9 }", "Int(9)");
  check_value("switch (Unit) { case Unit -> 1 _ -> 0 }", "Int(1)");
  check_value("switch (Tuple(1, 2)) { case Tuple(a, b) -> b _ -> 0 }", "Int(2)");
  check_value("switch (Tuple(1, 2, 3)) { case Tuple(a, b) -> b _ -> 0 }", "Int(0)");
  check_value("switch (Text(\"s\")) { case Text(s) -> s _ -> \"n\" }", "Str(\"s\")");
  check_value("switch (Elem(\"d\", Nil)) { case Elem(t, c) -> t _ -> \"n\" }", "Str(\"d\")");
  check_value("switch (fun (x) { x }) { case 1 -> 1 _ -> 0 }", "Int(0)");
  check_wrong("switch (y) { case 1 -> 1 _ -> 0 }");
  SUBCASE("branches thread the events environment") {
    RunReport r = go("var e = event p(1); switch (0) { case Zero -> assert p(1) _ -> 0 }");
    CHECK(r.rendered_events == "{p -> (1, EA)}");
  }
}

TEST_CASE("wrong is terminal and resets the events environment") {
  check_wrong("var a = event p(1); get(3)");
  check_wrong("var a = event p(1); var b = 1 / 0; assert p(1)");
  check_wrong("var f = fun (x) { get(x) }; f(Text(\"Hello!\"))");
}

TEST_CASE("step budget") {
  RunReport loop = go("var w = fun (x) { x(x) }; w(w)", 10000);
  CHECK(loop.step_limit_hit);
  CHECK_FALSE(loop.wrong);
  CHECK(loop.value == nullptr);
  CHECK(loop.rendered_value == "StepLimit");

  RunReport fine = go("var f = fun (x) { x + 1 }; f(f(f(0)))");
  CHECK_FALSE(fine.step_limit_hit);
  CHECK(fine.rendered_value == "Int(3)");
}

TEST_CASE("determinism") {
  const std::string src =
      "var h = href(var e = event p(1); assert p(1)); var u = get(h); Text(\"done\")";
  RunReport a = go(src);
  RunReport b = go(src);
  CHECK(a.rendered_value == b.rendered_value);
  CHECK(a.rendered_events == b.rendered_events);
  CHECK(a.wrong == b.wrong);
}

TEST_CASE("direct value evaluation") {
  CHECK(render(eval_value(v_int(3), {})) == "Int(3)");
  CHECK(is_wrong(eval_value(v_var("nope"), {})));
  Env rho;
  rho["x"] = eval_value(v_int(9), {});
  CHECK(render(eval_value(v_var("x"), rho)) == "Int(9)");
  CHECK(render(eval_value(v_text(v_str("t")), {})) == "Xml(Text(\"t\"))");
}
