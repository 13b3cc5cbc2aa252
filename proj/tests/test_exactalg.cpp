#include "doctest.h"

#include <random>

#include "flagmirror/combinat.hpp"
#include "flagmirror/exactalg.hpp"

using namespace flagmirror;

namespace {

RMatrix random_matrix(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 4);
  RMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = Rational(num(rng), den(rng));
      a(i, j).canonicalize();
    }
  return a;
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
  MPoly x = MPoly::variable(2, 0), y = MPoly::variable(2, 1);
  MPoly p = (x + y).pow(3);
  CHECK(p.size() == 4);
  CHECK(p.coefficient({2, 1}) == 3);
  CHECK(p.total_degree() == 3);
  CHECK((p - p).is_zero());
  CHECK(p.derivative(0).coefficient({1, 1}) == 6);
  CHECK(p.exact_divide(x + y) == (x + y).pow(2));
  CHECK_THROWS_AS(p.exact_divide(x - y), std::domain_error);
  CHECK(p.evaluate(std::vector<Rational>{1, 2}) == 27);
  CHECK(p.str({"x", "y"}) == "x^3 + 3*x^2*y + 3*x*y^2 + y^3");
}

TEST_CASE("divided differences agree with exact division") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> ex(0, 4), co(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    MPoly f(3);
    for (int t = 0; t < 6; ++t) f.add_term({ex(rng), ex(rng), ex(rng)}, co(rng));
    for (int i = 0; i < 2; ++i) {
      MPoly num = f - f.swap_variables(i, i + 1);
      MPoly den = MPoly::variable(3, i) - MPoly::variable(3, i + 1);
      MPoly q = num.is_zero() ? MPoly(3) : num.exact_divide(den);
      CHECK(q == f.divided_difference(i));
    }
  }
}

TEST_CASE("rational determinants and inverses") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    RMatrix a = random_matrix(rng, 4);
    if (a.det() == 0) continue;
    CHECK(a * a.inverse() == RMatrix::identity(4));
    CHECK((a * a).det() == a.det() * a.det());
  }
  RMatrix s(2, 2);
  s(0, 0) = 1;
  s(0, 1) = 2;
  s(1, 0) = 2;
  s(1, 1) = 4;
  CHECK(s.det() == 0);
  CHECK_THROWS_AS(s.inverse(), std::domain_error);
}

TEST_CASE("inverse minors and generalized column replacement") {
  std::mt19937 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + trial % 4;
    RMatrix a = random_matrix(rng, n);
    Rational d = a.det();
    if (d == 0) continue;
    RMatrix ainv = a.inverse();
    std::uniform_int_distribution<int> sz(1, n);
    int l = sz(rng);
    auto all = subsets(interval(1, n), l);
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    auto J = all[pick(rng)], K = all[pick(rng)];
    // Minor of the inverse via complementary minor of A.
    Rational lhs = ainv.minor(J, K);
    Rational rhs = Rational(jacobi_sign(J, K)) * a.minor(set_minus(interval(1, n), K), set_minus(interval(1, n), J)) / d;
    CHECK(lhs == rhs);
    // A X = Y with X random: minors of X from column replacement in A.
    RMatrix x = random_matrix(rng, n);
    RMatrix y = a * x;
    CHECK(x.minor(J, K) == cramer_replace(a, y, J, K).det() / d);
    ++checked;
  }
  CHECK(checked >= 150);
}

TEST_CASE("polynomial determinant") {
  MPoly x = MPoly::variable(1, 0);
  MPoly one = MPoly::constant(1, 1);
  std::vector<std::vector<MPoly>> m{{x, one}, {one, x}};
  CHECK(poly_det(m) == x * x - one);
}
