#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>

#include "gnep/expr.hpp"

using namespace gnep;

namespace {

VariableTable two_players_1d() { return VariableTable({1, 1}); }

VariableTable ex1_table() { return VariableTable({2, 1}); }

// Central finite difference of evaluate, the independent oracle for all
// derivative assertions in this file.
double fd_derivative(const Expr& e, std::vector<double> x, int i, double h = 1e-5) {
  x[i] += h;
  const double up = e.evaluate(x);
  x[i] -= 2 * h;
  const double dn = e.evaluate(x);
  return (up - dn) / (2 * h);
}

const char* kCorpus2d[] = {
    "1 - x1 - x2",
    "x1 - x2",
    "x2",
    "(x1 - x2)^2",
    "-x1 + x1*x2",
    "-x2 + 0.5*x1*x2",
    "-x1 + 0.05*x1^2",
    "x1^3 - 2*x1*x2 + x2^2",
    "(x1 + 5)/(x2 + 7)",
    "x1*x2/(1 + x1^2)",
};

}  // namespace

TEST_CASE("variable table layout") {
  const VariableTable t({2, 1});
  CHECK(t.total_dim() == 3);
  CHECK(t.name(0) == "x1_1");
  CHECK(t.name(1) == "x1_2");
  CHECK(t.name(2) == "x2");
  CHECK(t.block_offset(1) == 2);
  CHECK(t.player_of(1) == 0);
  CHECK(t.player_of(2) == 1);
  CHECK(t.index_of("x2").value() == 2);
  CHECK(!t.index_of("x3").has_value());
}

TEST_CASE("parse and evaluate basics") {
  const VariableTable t = two_players_1d();
  const Expr e = parse_expression("1 - x1 - x2", t);
  CHECK(e.evaluate(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.0).epsilon(1e-15));

  const Expr zero = parse_expression("0", t);
  CHECK(zero.evaluate(std::vector<double>{3.0, -7.0}) == 0.0);

  const Expr sq = parse_expression("(x1 - x2)^2", t);
  CHECK(sq.evaluate(std::vector<double>{3.0, 1.0}) == 4.0);
}

TEST_CASE("fixture constraint values") {
  const VariableTable t = ex1_table();
  const Expr g1 = parse_expression("1 - (x1_1 - x2)^2 - (x1_2 - (1 - 2*x2))^2", t);
  CHECK(g1.evaluate(std::vector<double>{0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-15));

  const VariableTable t2 = two_players_1d();
  const Expr g2 = parse_expression("1 - x1", t2);
  CHECK(g2.evaluate(std::vector<double>{0, 0}) == 1.0);
}

TEST_CASE("evaluation is deterministic") {
  const VariableTable t = two_players_1d();
  const Expr e = parse_expression("x1^3 - 2*x1*x2 + x2^2/(1 + x1^2)", t);
  const std::vector<double> x{0.37, -1.21};
  const double a = e.evaluate(x);
  const double b = e.evaluate(x);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("differentiate pinned values") {
  const VariableTable t = two_players_1d();

  const Expr sq = parse_expression("(x1 - x2)^2", t);
  CHECK(sq.differentiate(0).evaluate(std::vector<double>{0, 0}) == 0.0);

  const Expr f2 = parse_expression("-x2 + (1/2)*x1*x2", t);
  CHECK(f2.differentiate(1).evaluate(std::vector<double>{1, 0}) == doctest::Approx(-0.5));

  const Expr c = parse_expression("42", t);
  CHECK(c.differentiate(0).is_zero());
}

TEST_CASE("gradient and hessian evaluators") {
  const VariableTable t = two_players_1d();

  const Expr bilinear = parse_expression("x1*x2", t);
  const HessianEvaluator h(bilinear, t);
  const DenseMatrix m = h(std::vector<double>{2.5, -3.0});
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 0) == 1.0);
  CHECK(m(1, 1) == 0.0);

  const Expr g1 = parse_expression("1 - x1 - x2", t);
  const GradientEvaluator grad(g1, t);
  const std::vector<double> gv = grad(std::vector<double>{2.0 / 3.0, 1.0 / 3.0});
  CHECK(gv[0] == doctest::Approx(-1.0));
  CHECK(gv[1] == doctest::Approx(-1.0));
  CHECK(fd_derivative(g1, {2.0 / 3.0, 1.0 / 3.0}, 0) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("derivatives match central finite differences on the corpus") {
  const VariableTable t = two_players_1d();
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (const char* text : kCorpus2d) {
    const Expr e = parse_expression(text, t);
    const Expr d0 = e.differentiate(0);
    const Expr d1 = e.differentiate(1);
    for (int s = 0; s < 100; ++s) {
      const std::vector<double> x{uni(rng), uni(rng)};
      for (int i = 0; i < 2; ++i) {
        const double exact = (i == 0 ? d0 : d1).evaluate(x);
        const double fd = fd_derivative(e, x, i);
        CHECK(std::fabs(exact - fd) <= std::max(1e-6 * std::fabs(exact), 1e-8));
      }
    }
  }
}

TEST_CASE("second derivatives commute") {
  const VariableTable t = two_players_1d();
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (const char* text : kCorpus2d) {
    const Expr e = parse_expression(text, t);
    const Expr dxy = e.differentiate(0).differentiate(1);
    const Expr dyx = e.differentiate(1).differentiate(0);
    for (int s = 0; s < 25; ++s) {
      const std::vector<double> x{uni(rng), uni(rng)};
      CHECK(dxy.evaluate(x) == doctest::Approx(dyx.evaluate(x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("hessian is exactly symmetric") {
  const VariableTable t = two_players_1d();
  const Expr e = parse_expression("x1^3 - 2*x1*x2 + x2^2/(1 + x1^2)", t);
  const HessianEvaluator h(e, t);
  const DenseMatrix m = h(std::vector<double>{0.3, -0.9});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(m(i, j) == m(j, i));
}

TEST_CASE("print-parse round trip is evaluation equivalent") {
  const VariableTable t = two_players_1d();
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (const char* text : kCorpus2d) {
    const Expr e = parse_expression(text, t);
    const Expr back = parse_expression(e.to_string(), t);
    const Expr d0 = e.differentiate(0);
    const Expr dback = parse_expression(d0.to_string(), t);
    for (int s = 0; s < 100; ++s) {
      const std::vector<double> x{uni(rng), uni(rng)};
      CHECK(std::fabs(e.evaluate(x) - back.evaluate(x)) <= 1e-12);
      CHECK(std::fabs(d0.evaluate(x) - dback.evaluate(x)) <= 1e-12);
    }
  }
}

TEST_CASE("parse errors carry positions and names") {
  const VariableTable t = two_players_1d();
  CHECK_THROWS_AS(parse_expression("", t), SyntaxError);
  CHECK_THROWS_AS(parse_expression("x1 + ", t), SyntaxError);
  CHECK_THROWS_AS(parse_expression("(x1 + x2", t), SyntaxError);
  CHECK_THROWS_AS(parse_expression("x1 ^ x2", t), SyntaxError);
  CHECK_THROWS_AS(parse_expression("x1 + y3", t), UnknownVariableError);
  try {
    parse_expression("x1 + y3", t);
  } catch (const UnknownVariableError& e) {
    CHECK(e.name == "y3");
  }
  try {
    parse_expression("x1 + + x2", t);
    CHECK(false);
  } catch (const SyntaxError& e) {
    CHECK(e.position == 5);
  }
}

TEST_CASE("division by zero is reported") {
  const VariableTable t = two_players_1d();
  const Expr e = parse_expression("x1/x2", t);
  CHECK_THROWS_AS(e.evaluate(std::vector<double>{1.0, 0.0}), EvaluationError);
  CHECK(e.evaluate(std::vector<double>{1.0, 2.0}) == doctest::Approx(0.5));
}

TEST_CASE("integer powers") {
  const VariableTable t = two_players_1d();
  CHECK(parse_expression("x1^0", t).evaluate(std::vector<double>{5.0, 0.0}) == 1.0);
  CHECK(parse_expression("x1^1", t).evaluate(std::vector<double>{5.0, 0.0}) == 5.0);
  CHECK(parse_expression("-x1^2", t).evaluate(std::vector<double>{3.0, 0.0}) == -9.0);
  CHECK(parse_expression("2^3", t).evaluate(std::vector<double>{0.0, 0.0}) == 8.0);
  CHECK(parse_expression("((((x1))))", t).evaluate(std::vector<double>{7.0, 0.0}) == 7.0);
  CHECK_THROWS_AS(parse_expression("x1^2000", t), SyntaxError);
  CHECK_THROWS_AS(parse_expression("x1^-2", t), SyntaxError);
}

TEST_CASE("free variable collection") {
  const VariableTable t = ex1_table();
  const Expr e = parse_expression("1 - x1_1^2 - (x2 + 1)^2", t);
  const std::vector<int> vars = e.variables();
  CHECK(vars == std::vector<int>{0, 2});
}
