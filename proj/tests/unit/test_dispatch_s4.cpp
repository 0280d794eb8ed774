#include <doctest.h>

#include <random>

#include "mls/s4.hpp"
#include "session.hpp"
#include "support/oracles.hpp"

using namespace mls;
using namespace mls::testing;

namespace {

std::vector<std::string> names_of(const s4::SlotList& slots) {
  std::vector<std::string> out;
  for (const auto& [name, cls] : slots) out.push_back(name);
  return out;
}

s4::GenericFunction generic_over(std::size_t nargs) {
  s4::GenericFunction g;
  g.name = "g";
  for (std::size_t a = 0; a < nargs; ++a) {
    g.formals.push_back({"x" + std::to_string(a + 1), nullptr});
    g.signature.push_back("x" + std::to_string(a + 1));
  }
  return g;
}

std::vector<std::string> selected(const s4::GenericFunction& g, const std::vector<std::string>& actual,
                                  const s4::ClassRegistry& reg) {
  return s4::select_method(g, actual, reg).method->signature;
}

}  // namespace

TEST_CASE("inherited slots merge after own slots; linearization starts at self") {
  s4::ClassRegistry reg;
  reg.set_class("A", {{"x", "numeric"}}, {});
  const auto& b = reg.set_class("B", {{"y", "numeric"}}, {"A"});
  CHECK(names_of(b.slots) == std::vector<std::string>{"y", "x"});
  CHECK(b.linearization == s4::Lineage{{"B", 0}, {"A", 1}});
}

TEST_CASE("linearization is depth-first in declaration order with first occurrence kept") {
  s4::ClassRegistry reg;
  reg.set_class("Top", {}, {});
  reg.set_class("L", {}, {"Top"});
  reg.set_class("R", {}, {"Top"});
  reg.set_class("M", {}, {"R"});
  const auto& d = reg.set_class("D", {}, {"L", "M"});
  std::vector<std::string> order;
  for (const auto& a : d.linearization) order.push_back(a.name);
  CHECK(order == std::vector<std::string>{"D", "L", "Top", "M", "R"});
  // Top is reached through L at distance 2, the shortest path.
  CHECK(reg.superclass_distance("D", "Top") == 2);
  CHECK(reg.superclass_distance("D", "R") == 2);
}

TEST_CASE("class definition errors") {
  s4::ClassRegistry reg;
  reg.set_class("A", {{"x", "numeric"}}, {});
  CHECK_THROWS_WITH_AS(reg.set_class("C", {}, {"Nope"}), doctest::Contains("no definition found for superclass"),
                       Error);
  CHECK_THROWS_WITH_AS(reg.set_class("B", {{"x", "character"}}, {"A"}), doctest::Contains("x"), Error);
  CHECK_THROWS_AS(reg.set_class("D", {{"z", "numeric"}, {"z", "numeric"}}, {}), Error);
  reg.set_class("B", {}, {"A"});
  CHECK_THROWS_WITH_AS(reg.set_class("A", {}, {"B"}), doctest::Contains("cycle"), Error);
  // A failed redefinition leaves the registry unchanged.
  CHECK(reg.superclass_distance("B", "A") == 1);
  CHECK(reg.find("A")->contains.empty());
}

TEST_CASE("superclass distances") {
  s4::ClassRegistry reg;
  reg.set_class("A", {}, {});
  reg.set_class("B", {}, {"A"});
  CHECK(reg.superclass_distance("B", "B") == 0);
  CHECK(reg.superclass_distance("B", "A") == 1);
  CHECK_FALSE(reg.superclass_distance("A", "B").has_value());
  CHECK(reg.superclass_distance("B", "ANY") == 2);
  CHECK(reg.superclass_distance("A", "ANY") == 1);
}

TEST_CASE("selection examples") {
  s4::ClassRegistry reg;
  reg.set_class("A", {}, {});
  reg.set_class("B", {}, {"A"});
  reg.set_class("C", {}, {});

  auto only_any = generic_over(1);
  only_any.set_method({"ANY"}, Value::null());
  CHECK(selected(only_any, {"C"}, reg) == std::vector<std::string>{"ANY"});

  auto g1 = generic_over(1);
  g1.set_method({"A"}, Value::null());
  g1.set_method({"ANY"}, Value::null());
  CHECK(selected(g1, {"B"}, reg) == std::vector<std::string>{"A"});

  auto g2 = generic_over(2);
  g2.set_method({"A", "ANY"}, Value::null());
  g2.set_method({"ANY", "A"}, Value::null());
  g2.set_method({"A", "A"}, Value::null());
  CHECK(selected(g2, {"A", "A"}, reg) == std::vector<std::string>{"A", "A"});
  CHECK(selected(g2, {"A", "C"}, reg) == std::vector<std::string>{"A", "ANY"});
  CHECK(selected(g2, {"C", "A"}, reg) == std::vector<std::string>{"ANY", "A"});
}

TEST_CASE("no admissible method and exact ties raise dispatch errors") {
  s4::ClassRegistry reg;
  reg.set_class("A", {}, {});
  reg.set_class("L", {}, {});
  reg.set_class("R", {}, {});
  reg.set_class("D", {}, {"L", "R"});
  auto g = generic_over(1);
  g.set_method({"A"}, Value::null());
  try {
    s4::select_method(g, {"D"}, reg);
    FAIL("expected a dispatch error");
  } catch (const DispatchError& e) {
    CHECK(e.reason() == DispatchError::Reason::NoMethod);
    CHECK(e.message() == "unable to find an inherited method for function 'g' for signature 'x1 = \"D\"'");
  }
  g.set_method({"L"}, Value::null());
  g.set_method({"R"}, Value::null());
  try {
    s4::select_method(g, {"D"}, reg);
    FAIL("expected a dispatch error");
  } catch (const DispatchError& e) {
    CHECK(e.reason() == DispatchError::Reason::Ambiguous);
    CHECK(e.message().find("\"L\"") != std::string::npos);
    CHECK(e.message().find("\"R\"") != std::string::npos);
  }
}

TEST_CASE("adding a method never changes a selection it does not beat") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    S4Case c = random_s4_case(rng);
    S4Case fewer = c;
    fewer.signatures.pop_back();
    if (fewer.signatures.empty()) continue;
    S4Outcome before = s4_oracle(fewer);
    S4Outcome after = s4_oracle(c);
    CAPTURE(describe(c));
    if (before.kind == S4Outcome::Kind::Selected && after.kind == S4Outcome::Kind::Selected) {
      // Either the old winner stands or the new method won.
      CHECK((after.method == before.method || after.method == c.signatures.size() - 1));
    }
    if (before.kind == S4Outcome::Kind::Selected) CHECK(after.kind != S4Outcome::Kind::NoMethod);
  }
}

TEST_CASE("random hierarchies agree with the breadth-first oracle") {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 100; ++i) {
    S4Case c = random_s4_case(rng);
    CAPTURE(describe(c));
    Session s;
    S4Outcome got;
    try {
      std::string label = s.str(s4_program(c));
      got = {S4Outcome::Kind::Selected, std::stoul(label.substr(1))};
    } catch (const DispatchError& e) {
      got.kind = e.reason() == DispatchError::Reason::Ambiguous ? S4Outcome::Kind::Ambiguous
                                                                : S4Outcome::Kind::NoMethod;
    }
    CHECK(describe(got) == describe(s4_oracle(c)));
  }
}

TEST_CASE("instances are constructed and type-checked") {
  Session s;
  s.eval("setClass(\"A\", representation(x = \"numeric\"))\n"
         "setClass(\"B\", representation(y = \"numeric\"), contains = \"A\")");
  s.eval("b <- new(\"B\", x = 1, y = 2)");
  CHECK(s.num("slot(b, \"x\")") == 1);
  CHECK(s.num("slot(b, \"y\")") == 2);
  CHECK(s.error("new(\"B\", x = \"oops\", y = 2)") ==
        "invalid class \"B\" object: invalid object for slot \"x\" in class \"B\": got class \"character\", "
        "should be or extend class \"numeric\"");
  CHECK(s.error("new(\"B\", z = 1)").find("invalid name for slot") != std::string::npos);
  s.eval("b2 <- new(\"B\", y = 2)");
  CHECK(s.eval("slot(b2, \"x\")").kind() == Kind::Double);
  CHECK(s.eval("slot(b2, \"x\")").length() == 0);
  CHECK(structurally_equal(s.eval("slotNames(\"B\")"), Value::str(std::vector<std::string>{"y", "x"})));
}

TEST_CASE("slot values stay valid after construction") {
  Session s;
  s.eval("setClass(\"A\", representation(x = \"numeric\"))\na <- new(\"A\", x = 1)\n"
         "a2 <- set_slot(a, \"x\", 5)");
  CHECK(s.num("slot(a, \"x\")") == 1);
  CHECK(s.num("slot(a2, \"x\")") == 5);
  CHECK(s.error("set_slot(a, \"x\", \"text\")").find("should be or extend class \"numeric\"") != std::string::npos);
  s.eval("setClass(\"Box\", representation(content = \"A\"))\nsetClass(\"Sub\", contains = \"A\")");
  CHECK_NOTHROW(s.eval("new(\"Box\", content = new(\"Sub\", x = 2))"));
  CHECK(s.error("new(\"Box\")").find("must be initialized") != std::string::npos);
}

TEST_CASE("virtual classes cannot be instantiated") {
  Session s;
  s.eval("setClass(\"Shape\", representation(), virtual = TRUE)\nsetClass(\"Circle\", representation(r = \"numeric\"), contains = \"Shape\")");
  CHECK(s.lgl("isVirtualClass(\"Shape\")"));
  CHECK(s.error("new(\"Shape\")").find("virtual") != std::string::npos);
  CHECK(s.lgl("is(new(\"Circle\", r = 1), \"Shape\")"));
}

TEST_CASE("class and method definitions are inspectable values") {
  Session s;
  s.eval("def <- setClass(\"A\", representation(x = \"numeric\"))\n"
         "setClass(\"B\", representation(y = \"character\"), contains = \"A\")\n"
         "setGeneric(\"area\", function(shape, scale) standardGeneric(\"area\"))\n"
         "m <- setMethod(\"area\", \"A\", function(shape, scale) 1)");
  CHECK(s.str("slot(def, \"className\")") == "A");
  CHECK(structurally_equal(s.eval("slot(getClass(\"B\"), \"contains\")"), Value::str("A")));
  CHECK(structurally_equal(s.eval("names(slot(getClass(\"B\"), \"slots\"))"), Value::str(std::vector<std::string>{"y", "x"})));
  CHECK(s.lgl("isGeneric(\"area\")"));
  CHECK(structurally_equal(s.eval("getGeneric(\"area\")$signature"), Value::str(std::vector<std::string>{"shape", "scale"})));
  CHECK(s.lgl("existsMethod(\"area\", signature(\"A\", \"ANY\"))"));
  CHECK(s.lgl("is(m, \"MethodDefinition\")"));
  CHECK(s.num("superclassDistance(\"B\", \"A\")") == 1);
}

TEST_CASE("call_generic dispatches per instance") {
  Session s;
  s.eval(read_text(source_path("corpus/scripts/shapes.mls")));
  CHECK(s.num("area(new(\"Circle\", r = 1))") == doctest::Approx(3.141592653589793));
  CHECK(s.num("area(new(\"Square\", w = 2, h = 2))") == 4);
}

TEST_CASE("an existing S3 generic becomes the default S4 method") {
  Session s;
  s.eval("describe <- function(x) UseMethod(\"describe\")\n"
         "describe.default <- function(x) \"s3 default\"\ndescribe.tag <- function(x) \"s3 tag\"\n"
         "setGeneric(\"describe\")\nsetClass(\"P\", representation(v = \"numeric\"))\n"
         "setMethod(\"describe\", \"P\", function(x) \"s4 P\")");
  CHECK(s.str("describe(new(\"P\", v = 1))") == "s4 P");
  CHECK(s.str("describe(structure(list(), class = \"tag\"))") == "s3 tag");
  CHECK(s.str("describe(3)") == "s3 default");
}

TEST_CASE("non-dispatch arguments stay lazy and the method gets the original promises") {
  Session s;
  s.eval("n <- 0\nbump <- function() { n <<- n + 1; n }\n"
         "setGeneric(\"pick\", function(x, y) standardGeneric(\"pick\"), signature = \"x\")\n"
         "setMethod(\"pick\", \"numeric\", function(x, y) x + x)");
  CHECK(s.num("pick(bump(), stop(\"unforced\"))") == 2);
  CHECK(s.num("n") == 1);
}

TEST_CASE("missing arguments dispatch as 'missing'") {
  Session s;
  s.eval("setGeneric(\"opt\", function(x, y) standardGeneric(\"opt\"))\n"
         "setMethod(\"opt\", signature(\"numeric\", \"missing\"), function(x, y) \"one\")\n"
         "setMethod(\"opt\", signature(\"numeric\", \"numeric\"), function(x, y) \"two\")");
  CHECK(s.str("opt(1)") == "one");
  CHECK(s.str("opt(1, 2)") == "two");
}

TEST_CASE("method formals must match the generic") {
  Session s;
  s.eval("setGeneric(\"area\", function(shape) standardGeneric(\"area\"))");
  CHECK_FALSE(s.error("setMethod(\"area\", \"numeric\", function(other) 1)").empty());
}

TEST_CASE("operators dispatch through S4 methods") {
  Session s;
  s.eval("setClass(\"Money\", representation(v = \"numeric\"))\n"
         "setMethod(\"+\", signature(\"Money\", \"Money\"), function(e1, e2) new(\"Money\", v = slot(e1, \"v\") + slot(e2, \"v\")))\n"
         "setMethod(\"+\", signature(\"Money\", \"numeric\"), function(e1, e2) \"money+num\")");
  CHECK(s.num("slot(new(\"Money\", v = 1) + new(\"Money\", v = 2), \"v\")") == 3);
  CHECK(s.str("new(\"Money\", v = 1) + 5") == "money+num");
  CHECK(s.num("1 + 2") == 3);
}

TEST_CASE("replacing a method keeps one entry per signature") {
  Session s;
  s.eval("setGeneric(\"f\", function(x) standardGeneric(\"f\"))\nsetMethod(\"f\", \"numeric\", function(x) 1)\n"
         "setMethod(\"f\", \"numeric\", function(x) 2)");
  CHECK(s.num("f(0)") == 2);
  CHECK(s.interp.generics().find("f")->methods.size() == 1);
}
