// Fidelity tests for the original published type-and-effect system. The five
// published rules must behave exactly as printed — including the flaw that
// pages, links and forms share the single type xml — and the whole-program
// acceptance judgment must be ∅;∅ ⊢ E : ⟨_:xml⟩{}.

#include <string>

#include "doctest.h"
#include "tinylinks/ast.hpp"
#include "tinylinks/eval.hpp"
#include "tinylinks/legacy.hpp"
#include "tinylinks/parser.hpp"

using namespace tinylinks;

namespace {

LegacyReport lcheck(const std::string& src) { return legacy_check(parse(src)); }

ValuePtr parsed_value(const std::string& src) {
  return std::get<Expr::Val>(parse(src)->node).value;
}

bool runs_wrong(const std::string& src) {
  RunReport r = run(parse(src));
  REQUIRE(!r.step_limit_hit);
  return r.wrong;
}

}  // namespace

// --- the three reference judgments -------------------------------------------

TEST_CASE("event is derivable under the empty effect context") {
  LegacyChecker c;
  auto j = c.exp(e_event("p", v_int(3)), {}, {});
  REQUIRE(j.has_value());
  CHECK(j->type->tag == LType::Tag::Unit);
  CHECK(j->effects == EffectSet{levent("p", v_int(3))});
}

TEST_CASE("assert fails under the empty effect context") {
  LegacyChecker c;
  auto j = c.exp(e_assert("p", v_int(3)), {}, {});
  REQUIRE(!j.has_value());
  CHECK(c.failed_rule() == "T-Assert");
  CHECK(c.failed_premise() == "asserted event p<3> is not among the available events");
}

TEST_CASE("assert succeeds when its exact label is available") {
  LegacyChecker c;
  auto j = c.exp(e_assert("p", v_int(3)), {}, {levent("p", v_int(3))});
  REQUIRE(j.has_value());
  CHECK(j->type->tag == LType::Tag::Unit);
  CHECK(j->effects == EffectSet{levent("p", v_int(3))});
}

TEST_CASE("effect membership is syntactic equality of the value") {
  LegacyChecker c;
  // p<3> available does not discharge assert p<4> or assert q<3>.
  EffectSet avail = {levent("p", v_int(3))};
  CHECK(!c.exp(e_assert("p", v_int(4)), {}, avail).has_value());
  CHECK(!c.exp(e_assert("q", v_int(3)), {}, avail).has_value());
  // Succ(2) and 3 are different syntax even though they evaluate alike.
  CHECK(!c.exp(e_assert("p", v_con(Constructor::succ(), {v_int(2)})), {}, avail).has_value());
}

// --- the unsoundness witness ---------------------------------------------------

TEST_CASE("a page used as a link is accepted yet goes wrong") {
  LegacyReport r = lcheck("get(Text(\"Hello!\"))");
  CHECK(r.derivable);
  CHECK(r.accepted);
  CHECK(r.rendered == "<_:xml> {}");
  CHECK(runs_wrong("get(Text(\"Hello!\"))"));
}

TEST_CASE("a page passed through a function still passes for a link") {
  const std::string src = "fun f(x) { get(x) } f(Text(\"h\"))";
  LegacyReport r = lcheck(src);
  CHECK(r.derivable);
  CHECK(r.accepted);
  CHECK(runs_wrong(src));
}

TEST_CASE("a form target accepts a get because forms are just xml") {
  const std::string src = "var f = form({a}, Text(\"x\")); get(f)";
  LegacyReport r = lcheck(src);
  CHECK(r.accepted);
  CHECK(runs_wrong(src));
}

TEST_CASE("posting to a page is accepted yet goes wrong") {
  const std::string src = "post({a = \"v\"}, Text(\"page\"))";
  LegacyReport r = lcheck(src);
  CHECK(r.accepted);
  CHECK(runs_wrong(src));
}

// --- get and post --------------------------------------------------------------

TEST_CASE("get requires an xml-typed target") {
  LegacyReport r = lcheck("get(5)");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-Get");
  CHECK(r.premise == "target is not xml");
  CHECK(r.rendered == "FAIL(T-Get: target is not xml)");
}

TEST_CASE("a genuine link is accepted and runs safely") {
  const std::string src = "var l = href(Text(\"ok\")); get(l)";
  LegacyReport r = lcheck(src);
  CHECK(r.accepted);
  CHECK(!runs_wrong(src));
}

TEST_CASE("post fields must be strings") {
  LegacyReport r = lcheck("post({a = 5}, form({a}, Text(\"x\")))");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-Post");
  CHECK(r.premise == "field a is not a string");
}

TEST_CASE("post rejects duplicate field labels") {
  LegacyChecker c;
  auto j = c.exp(e_post({{"a", v_str("1")}, {"a", v_str("2")}}, v_text(v_str("x"))), {}, {});
  CHECK(!j.has_value());
  CHECK(c.failed_rule() == "T-Post");
  CHECK(c.failed_premise() == "duplicate field label a");
}

TEST_CASE("post never checks the field count against the form") {
  // The published rule has no premise connecting the posted fields to the
  // target, so an arity mismatch is accepted — and goes wrong concretely.
  const std::string src = "var f = form({a}, Text(\"x\")); post({}, f)";
  LegacyReport r = lcheck(src);
  CHECK(r.accepted);
  CHECK(runs_wrong(src));
}

// --- events and asserts through programs ----------------------------------------

TEST_CASE("a top-level event leaves a visible effect, so the app is rejected") {
  LegacyReport r = lcheck("var _ = event p(1); Text(\"ok\")");
  CHECK(r.derivable);
  CHECK(r.type->tag == LType::Tag::Xml);
  CHECK(r.effects == EffectSet{levent("p", v_int(1))});
  CHECK(!r.accepted);
  CHECK(r.rendered == "<_:xml> {p<1>}");
}

TEST_CASE("an event makes its label available to a later assert") {
  LegacyReport r = lcheck("var _ = event p(1); var _ = assert p(1); Text(\"ok\")");
  CHECK(r.derivable);
  CHECK(r.effects == EffectSet{levent("p", v_int(1))});
  CHECK(!r.accepted);  // the effect set is non-empty
}

TEST_CASE("an assert before its event fails the derivation") {
  LegacyReport r = lcheck("var _ = assert p(1); var _ = event p(1); Text(\"ok\")");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-Assert");
}

TEST_CASE("event arguments may be any typed value") {
  // The published event rule only asks the values to be typeable; a string
  // label is derivable even though the runtime only records integers.
  LegacyReport r = lcheck("var _ = event p(\"x\"); Text(\"ok\")");
  CHECK(r.derivable);
  CHECK(!r.accepted);
  CHECK(runs_wrong("var _ = event p(\"x\"); Text(\"ok\")"));
}

TEST_CASE("an event on an unbound variable is not derivable") {
  LegacyReport r = lcheck("event p(x)");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-Var");
  CHECK(r.premise == "unbound variable x");
}

// --- application and synthesized function types ----------------------------------

namespace {
const std::string kBuy =
    "fun buy(value, dbpass) { var _ = assert PriceIs(value); Text(\"Hello\") }";
}

TEST_CASE("a lambda synthesizes its asserts as the precondition") {
  LegacyChecker c;
  auto t = c.val(parsed_value("fun(value) { fun(dbpass) { var _ = assert PriceIs(value); "
                              "Text(\"Hello\") } }"),
                 {}, {});
  REQUIRE(t.has_value());
  REQUIRE((*t)->tag == LType::Tag::DepFun);
  CHECK((*t)->param == "value");
  CHECK((*t)->pre.empty());
  const LTypePtr& inner = (*t)->result;
  REQUIRE(inner->tag == LType::Tag::DepFun);
  CHECK(inner->param == "dbpass");
  CHECK(inner->pre == EffectSet{levent("PriceIs", v_var("value"))});
  CHECK(inner->result->tag == LType::Tag::Xml);
  CHECK(inner->post == EffectSet{levent("PriceIs", v_var("value"))});
  CHECK(render(*t) ==
        "<value:any>{} -> <dbpass:any>{PriceIs<value>} -> xml{PriceIs<value>}{}");
}

TEST_CASE("application substitutes the argument into the precondition") {
  const std::string src = kBuy + " buy(5)(\"pass\")";
  LegacyReport r = lcheck(src);
  CHECK(!r.derivable);
  CHECK(r.rule == "T-App");
  CHECK(r.premise == "required event PriceIs<5> is not among the available events");
  CHECK(runs_wrong(src));
}

TEST_CASE("a matching event discharges the application precondition") {
  const std::string src = kBuy + " var _ = event PriceIs(5); buy(5)(\"pass\")";
  LegacyReport r = lcheck(src);
  CHECK(r.derivable);
  CHECK(r.type->tag == LType::Tag::Xml);
  // The call re-emits its post-condition, so the program has visible effects
  // and is not accepted as a web application.
  CHECK(r.effects == EffectSet{levent("PriceIs", v_int(5))});
  CHECK(!r.accepted);
  CHECK(!runs_wrong(src));
}

TEST_CASE("an event with a different value does not discharge the call") {
  const std::string src = kBuy + " var _ = event PriceIs(7); buy(5)(\"pass\")";
  LegacyReport r = lcheck(src);
  CHECK(!r.derivable);
  CHECK(r.rule == "T-App");
  CHECK(runs_wrong(src));
}

TEST_CASE("a function type with free variables cannot be applied") {
  const std::string src =
      "fun g(y) { fun h(x) { var _ = assert p(y); Text(\"a\") } h(1) } g(2)";
  LegacyReport r = lcheck(src);
  CHECK(!r.derivable);
  CHECK(r.rule == "T-App");
  CHECK(r.premise == "function type mentions variables other than its parameter");
}

TEST_CASE("only function-typed values can be applied") {
  LegacyReport r = lcheck("var x = 5; x(1)");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-App");
  CHECK(r.premise == "applied value does not have a function type");
}

// --- suspended bodies -------------------------------------------------------------

TEST_CASE("a suspended body must produce a page") {
  LegacyReport r = lcheck("var l = href(5); get(l)");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-Href");
  CHECK(r.premise == "suspended body is not xml");
}

TEST_CASE("an assert inside a link can use events from the definition site") {
  const std::string src =
      "var _ = event p(1); var l = href(var _ = assert p(1); Text(\"ok\")); get(l)";
  LegacyReport r = lcheck(src);
  CHECK(r.derivable);
  // Only the top-level event remains visible; the link swallowed its body's
  // effects because get returns none.
  CHECK(r.effects == EffectSet{levent("p", v_int(1))});
  CHECK(!runs_wrong(src));
}

TEST_CASE("form labels are strings inside the suspended body") {
  const std::string src = "var f = form({a}, Text(a)); post({a = \"v\"}, f)";
  LegacyReport r = lcheck(src);
  CHECK(r.accepted);
  CHECK(!runs_wrong(src));
}

// --- completion rules ----------------------------------------------------------------

TEST_CASE("arithmetic requires integer operands") {
  CHECK(lcheck("var x = 1 + 2 * 3; Text(\"ok\")").accepted);
  LegacyReport r = lcheck("var x = \"a\"; var y = x + 1; Text(\"ok\")");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-Prim");
  CHECK(r.premise == "operands are not integers");
}

TEST_CASE("switch joins branch types and unions branch effects") {
  CHECK(lcheck("var xs = Cons(1, Nil); switch (xs) { case Cons(h, t) -> Text(\"a\") "
               "_ -> Text(\"b\") }")
            .accepted);
  LegacyReport r = lcheck("switch (5) { case Succ(n) -> Text(\"a\") _ -> 0 }");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-Switch");
  CHECK(r.premise == "branch types disagree");
}

TEST_CASE("switch checks the scrutinee against the pattern constructor") {
  LegacyReport r = lcheck("switch (\"s\") { case Succ(n) -> 1 _ -> 0 }");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-Switch");
  CHECK(r.premise == "scrutinee does not match the pattern constructor");
}

TEST_CASE("constructors check their argument types") {
  LegacyReport r = lcheck("Text(5)");
  CHECK(!r.derivable);
  CHECK(r.rule == "T-Text");
  CHECK(r.premise == "argument is not a string");
  CHECK(!lcheck("Succ(\"a\")").derivable);
  CHECK(!lcheck("Elem(5, Text(\"x\"))").derivable);
  CHECK(!lcheck("Cons(1, 2)").derivable);
}

TEST_CASE("lists meet their element types through any") {
  LegacyChecker c;
  auto t = c.val(parsed_value("Cons(1, Nil)"), {}, {});
  REQUIRE(t.has_value());
  CHECK(render(*t) == "list(int)");
}

TEST_CASE("an unannotated parameter is the wildcard and passes every check") {
  // x : any flows into both an integer position and an xml position.
  CHECK(lcheck("fun f(x) { var y = x + 1; get(x) } f(1)").derivable);
}

// --- compatibility and rendering --------------------------------------------------

TEST_CASE("type compatibility treats any as a two-sided wildcard") {
  CHECK(lcompat(lt_any(), lt_int()));
  CHECK(lcompat(lt_xml(), lt_any()));
  CHECK(lcompat(lt_list(lt_any()), lt_list(lt_int())));
  CHECK(lcompat(lt_tuple({lt_int(), lt_string()}), lt_tuple({lt_any(), lt_string()})));
  CHECK(!lcompat(lt_int(), lt_string()));
  CHECK(!lcompat(lt_tuple({lt_int()}), lt_tuple({lt_int(), lt_int()})));
  CHECK(!lcompat(lt_list(lt_int()), lt_list(lt_string())));
}

TEST_CASE("rendered types and effect sets") {
  CHECK(render(lt_unit()) == "unit");
  CHECK(render(lt_tuple({lt_int(), lt_xml()})) == "tuple(int, xml)");
  CHECK(render(EffectSet{}) == "{}");
  CHECK(render(EffectSet{levent("p", v_int(1)), levent("q", v_str("a"))}) ==
        "{p<1>, q<\"a\">}");
}
