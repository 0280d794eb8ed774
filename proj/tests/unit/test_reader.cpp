#include <doctest.h>

#include <random>

#include "mls/error.hpp"
#include "mls/reader.hpp"

using namespace mls;

namespace {

const expr::Call* as_call(const ExprPtr& e) { return e->as<expr::Call>(); }

std::string callee_of(const ExprPtr& e) {
  const auto* call = as_call(e);
  REQUIRE(call != nullptr);
  return callee_name(*call).value_or("");
}

/// Random source text drawn from the surface grammar.
class SourceGenerator {
 public:
  explicit SourceGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string expr(int depth) {
    if (depth == 0) return atom();
    int d = depth - 1;
    switch (pick(14)) {
      case 0: {
        // Comparisons do not chain, so each one is parenthesized.
        std::string op = binop();
        std::string text = expr(d) + " " + op + " " + expr(d);
        return is_comparison(op) ? "(" + text + ")" : text;
      }
      case 1: return "-" + expr(d);
      case 2: return "!" + expr(d);
      case 3: return "f(" + expr(d) + ", y = " + expr(d) + ")";
      case 4: return "function(x, y = " + expr(d) + ") " + expr(d);
      case 5: return "if (" + expr(d) + ") " + expr(d) + " else " + expr(d);
      case 6: return "if (" + expr(d) + ") " + expr(d);
      case 7: return "while (" + expr(d) + ") " + expr(d);
      case 8: return "{\n" + expr(d) + "\n" + expr(d) + "\n}";
      case 9: return "(" + name() + " <- " + expr(d) + ")";
      case 10: return "(" + name() + " <<- " + expr(d) + ")";
      case 11: return "(" + name() + "[" + expr(d) + "] <- " + expr(d) + ")";
      case 12: return "p$" + name() + "(" + expr(d) + ")";
      default: return "(" + expr(d) + ")[[" + expr(d) + "]]";
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::string name() {
    static const char* names[] = {"x", "y", "total", "a.b", ".hidden", "size"};
    return names[pick(6)];
  }
  std::string binop() {
    static const char* ops[] = {"+", "-", "*", "/", "^", "<", "<=", ">", ">=", "==", "!=", "&&", "||", ":"};
    return ops[pick(14)];
  }
  static bool is_comparison(const std::string& op) {
    return op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=";
  }
  std::string atom() {
    switch (pick(7)) {
      case 0: return std::to_string(pick(100));
      case 1: return "2.5";
      case 2: return "\"s\\\"q\"";
      case 3: return "TRUE";
      case 4: return "NULL";
      case 5: return "1e-8";
      default: return name();
    }
  }
  std::mt19937_64 rng_;
};

}  // namespace

TEST_CASE("assignment of a sum parses to an Assign over a call to +") {
  ExprPtr e = parse_expression("x <- 1 + 2");
  const auto* assign = e->as<expr::Assign>();
  REQUIRE(assign != nullptr);
  CHECK(assign->target->as<expr::Symbol>()->name == "x");
  CHECK(callee_of(assign->value) == "+");
  CHECK(as_call(assign->value)->args.size() == 2);
}

TEST_CASE("function literal keeps formals and defaults") {
  ExprPtr e = parse_expression("f <- function(x, y = 2) x * y");
  const auto* fn = e->as<expr::Assign>()->value->as<expr::FunctionLiteral>();
  REQUIRE(fn != nullptr);
  REQUIRE(fn->formals.size() == 2);
  CHECK(fn->formals[0].name == "x");
  CHECK(fn->formals[0].default_value == nullptr);
  CHECK(fn->formals[1].name == "y");
  REQUIRE(fn->formals[1].default_value != nullptr);
  CHECK(fn->formals[1].default_value->as<expr::Constant>()->value.doubles()[0] == 2.0);
}

TEST_CASE("if expression canonicalizes to a call") {
  ExprPtr e = parse_expression("if (x > 0) x * factorial(x - 1) else 1");
  CHECK(e->is<expr::If>());
  ExprPtr c = canonical_call(e);
  CHECK(callee_of(c) == "if");
  CHECK(as_call(c)->args.size() == 3);
}

TEST_CASE("every node kind has a call form") {
  const char* sources[] = {"{ a; b }", "x <- 1", "x <<- 1", "while (a) b", "x[1]", "x[[1]]",
                           "x[1] <- 2", "p$f", "p$f <- 3", "function(a) a", "if (a) b"};
  for (const char* src : sources) {
    ExprPtr c = canonical_call(parse_expression(src));
    CAPTURE(src);
    CHECK(c->is<expr::Call>());
  }
}

TEST_CASE("comments, newlines and semicolons separate expressions") {
  auto exprs = parse_program("a <- 1 # one\nb <- 2; c <- 3\n\n# trailing\n");
  CHECK(exprs.size() == 3);
}

TEST_CASE("nodes carry source locations") {
  auto exprs = parse_program("x <- 1\n  y <- f(x)\n");
  REQUIRE(exprs.size() == 2);
  CHECK(exprs[1]->loc.line == 2);
  CHECK(exprs[1]->loc.column == 5);  // binary forms sit at their operator
  CHECK(exprs[1]->as<expr::Assign>()->value->loc.column == 9);  // calls sit at their parenthesis
}

TEST_CASE("syntax errors report line, column and token") {
  try {
    parse_program("x <- 1\ny <- (2 + )\n");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.location().line == 2);
    CHECK(e.location().column == 11);
    CHECK(e.token() == ")");
    CHECK_FALSE(e.at_end());
  }
  try {
    parse_program("f <- function(x) {\n");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.at_end());
  }
}

TEST_CASE("= names arguments but is not a statement-level assignment") {
  CHECK_NOTHROW(parse_expression("f(x = 1)"));
  CHECK_THROWS_AS(parse_program("x = 1"), SyntaxError);
}

TEST_CASE("deparse of fixed forms") {
  CHECK(deparse(make_constant(Value::null())) == "NULL");
  ExprPtr super = parse_expression(deparse(parse_expression("x <<- 1")));
  CHECK(super->is<expr::SuperAssign>());
  ExprPtr method = parse_expression(deparse(parse_expression("p$evolve()")));
  const auto* call = method->as<expr::Call>();
  REQUIRE(call != nullptr);
  CHECK(call->callee->is<expr::FieldAccess>());
}

TEST_CASE("operator precedence follows the usual table") {
  CHECK(deparse(parse_expression("-2^2")) == deparse(parse_expression("-(2^2)")));
  CHECK(expr_equal(parse_expression("a + b * c"), parse_expression("a + (b * c)")));
  CHECK(expr_equal(parse_expression("a < b && c || d"), parse_expression("((a < b) && c) || d")));
  CHECK(expr_equal(parse_expression("1:n - 1"), parse_expression("(1:n) - 1")));
  CHECK(expr_equal(parse_expression("2^3^2"), parse_expression("2^(3^2)")));
}

TEST_CASE("deparse round-trips randomly generated programs") {
  SourceGenerator gen(2026);
  for (int i = 0; i < 500; ++i) {
    std::string src = gen.expr(4);
    CAPTURE(src);
    ExprPtr e = parse_expression(src);
    std::string text = deparse(e);
    CAPTURE(text);
    ExprPtr again = parse_expression(text);
    REQUIRE(expr_equal(e, again));
    CHECK(deparse(again) == text);
  }
}
