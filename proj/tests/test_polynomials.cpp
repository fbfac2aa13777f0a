#include <doctest.h>

#include <cmath>

#include "marr/errors.hpp"
#include "marr/polynomials.hpp"

using namespace marr;

namespace {

// Independent oracle: H_n from the recurrence He_{n+1} = x He_n - n He_{n-1}
// in exact integers.
IntegerPolynomial hermite_by_recurrence(int n) {
  IntegerPolynomial prev = IntegerPolynomial::constant(1);
  if (n == 0)
    return prev;
  IntegerPolynomial x = IntegerPolynomial::monomial(1, {1, 0}, 1);
  IntegerPolynomial cur = x;
  for (int k = 1; k < n; ++k) {
    IntegerPolynomial next = x * cur - prev * BigInt(k);
    prev = cur;
    cur = next;
  }
  return cur;
}

// Plain Euclid over doubles, normalized: only used as a degree oracle.
int float_gcd_degree(std::vector<double> a, std::vector<double> b) {
  auto trim = [](std::vector<double> &p) {
    double m = 0;
    for (double c : p)
      m = std::max(m, std::abs(c));
    while (!p.empty() && std::abs(p.back()) <= 1e-9 * m)
      p.pop_back();
  };
  trim(a);
  trim(b);
  while (!b.empty()) {
    std::vector<double> r = a;
    while (r.size() >= b.size()) {
      const double f = r.back() / b.back();
      const std::size_t s = r.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i)
        r[i + s] -= f * b[i];
      r.pop_back();
      trim(r);
      if (r.empty())
        break;
    }
    a = b;
    b = r;
  }
  return static_cast<int>(a.size()) - 1;
}

std::vector<double> to_doubles(const IntegerPolynomial &p) {
  std::vector<double> out;
  for (const auto &c : p.ascending())
    out.push_back(static_cast<double>(c));
  return out;
}

} // namespace

TEST_CASE("hermite closed form") {
  CHECK(hermite(0) == IntegerPolynomial::constant(1));
  CHECK(hermite(2).to_string() == "x^2 - 1");
  CHECK(hermite(4).to_string() == "x^4 - 6x^2 + 3");
  for (int n = 0; n <= 30; ++n)
    CHECK(hermite(n) == hermite_by_recurrence(n));
}

TEST_CASE("derivative of hermite is n H_{n-1}") {
  CHECK(derivative(hermite(2)) == hermite(1) * BigInt(2));
  CHECK(derivative(IntegerPolynomial::constant(1)).is_zero());
  CHECK(derivative(hermite(5)) == hermite(4) * BigInt(5));
  for (int n = 1; n <= 30; ++n)
    CHECK(derivative(hermite(n)) == hermite(n - 1) * BigInt(n));
}

TEST_CASE("rational gcd") {
  const auto x = IntegerPolynomial::monomial(1, {1, 0}, 1);
  const auto one = IntegerPolynomial::constant(1);
  CHECK(rational_gcd(hermite(2), hermite(4)) == one);
  CHECK(rational_gcd(hermite(3), hermite(5)) == x);
  CHECK(rational_gcd(hermite(6), hermite(6)) == hermite(6));
  CHECK_THROWS_AS(rational_gcd(IntegerPolynomial(1), IntegerPolynomial(1)), Error);

  // gcd carries no content: scaling inputs never changes the result.
  CHECK(rational_gcd(hermite(3) * BigInt(6), hermite(5) * BigInt(-10)) == x);

  for (int n = 0; n <= 20; ++n)
    for (int m = 0; m <= 20; ++m) {
      if (n == m)
        continue;
      const auto g = rational_gcd(hermite(n), hermite(m));
      const bool both_odd = n % 2 == 1 && m % 2 == 1;
      CHECK(g == (both_odd ? x : one));
      if (n <= 12 && m <= 12)
        CHECK(float_gcd_degree(to_doubles(hermite(n)), to_doubles(hermite(m))) == g.degree());
    }
  for (int n = 1; n <= 20; ++n)
    CHECK(rational_gcd(hermite(n), derivative(hermite(n))) == one);
}

TEST_CASE("gcd reveals a constructed common factor") {
  // (x - 2)(x + 3) shared between two products.
  const auto p = IntegerPolynomial::from_coefficients({-6, 1, 1});
  const auto a = p * IntegerPolynomial::from_coefficients({1, 0, 5});
  const auto b = p * IntegerPolynomial::from_coefficients({7, -1});
  CHECK(rational_gcd(a, b) == p);
  CHECK(exact_primitive_quotient(a, p) == IntegerPolynomial::from_coefficients({1, 0, 5}));
}

TEST_CASE("real roots") {
  auto r2 = real_roots(hermite(2), -10, 10);
  REQUIRE(r2.size() == 2);
  CHECK(r2.roots[0] == doctest::Approx(-1).epsilon(1e-14));
  CHECK(r2.roots[1] == doctest::Approx(1).epsilon(1e-14));
  CHECK(r2.regular[0]);
  CHECK(r2.regular[1]);

  auto r1 = real_roots(hermite(1), -10, 10);
  REQUIRE(r1.size() == 1);
  CHECK(r1.roots[0] == 0.0);

  auto r3 = real_roots(hermite(3), -10, 10);
  REQUIRE(r3.size() == 3);
  CHECK(std::abs(r3.roots[0] + std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(r3.roots[1]) < 1e-12);
  CHECK(std::abs(r3.roots[2] - std::sqrt(3.0)) < 1e-12);

  for (int n = 1; n <= 20; ++n) {
    const auto r = real_roots(hermite(n), -10, 10);
    REQUIRE(r.size() == static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(r.multiplicities[i] == 1);
      CHECK(std::abs(r.roots[i] + r.roots[r.size() - 1 - i]) < 1e-12);
      if (i > 0)
        CHECK(r.roots[i] > r.roots[i - 1]);
      // one Newton step from the reported root moves it by less than 1e-12
      const double h = hermite_value(n, r.roots[i]);
      const double dh = n * hermite_value(n - 1, r.roots[i]);
      CHECK(std::abs(h / dh) < 1e-12);
    }
  }
}

TEST_CASE("real roots with multiplicity") {
  // (x-1)^2 (x+2)^3 x
  const auto a = IntegerPolynomial::from_coefficients({-1, 1});
  const auto b = IntegerPolynomial::from_coefficients({2, 1});
  const auto x = IntegerPolynomial::monomial(1, {1, 0}, 1);
  const auto p = a * a * b * b * b * x;
  const auto r = real_roots(p, -5, 5);
  REQUIRE(r.size() == 3);
  CHECK(r.roots[0] == doctest::Approx(-2));
  CHECK(r.multiplicities[0] == 3);
  CHECK(r.regular[0]);
  CHECK(r.roots[1] == doctest::Approx(0).epsilon(1e-14));
  CHECK(r.multiplicities[1] == 1);
  CHECK(r.roots[2] == doctest::Approx(1));
  CHECK(r.multiplicities[2] == 2);
  CHECK_FALSE(r.regular[2]);
}

TEST_CASE("real roots: endpoint on a root is widened") {
  const auto r = real_roots(hermite(2), -1, 1);
  CHECK(r.size() == 2);
  CHECK(real_roots(hermite(2), 2, 3).size() == 0);
}

TEST_CASE("exact sign agrees with the integer value at dyadic points") {
  const auto h = hermite(4);
  CHECK(exact_sign(h, 0.0) == 1);
  CHECK(exact_sign(h, 1.0) == -1); // H_4(1) = -2
  CHECK(exact_sign(h, 0.5) == 1);
  CHECK(exact_sign(h, 1024.0) == 1);
  // x^2 - 1/4 vanishes exactly at the dyadic 0.5
  CHECK(exact_sign(IntegerPolynomial::from_coefficients({-1, 0, 4}), 0.5) == 0);
}

TEST_CASE("laplace hermite") {
  const auto l00 = laplace_hermite({0, 0}, 2);
  IntegerPolynomial expect(2);
  expect.set_coeff({2, 0}, 1);
  expect.set_coeff({0, 2}, 1);
  expect.set_coeff({0, 0}, -2);
  CHECK(l00 == expect);
  CHECK(laplace_hermite({0}, 1) == hermite(2));
  CHECK(laplace_hermite({1, 2}, 2).degree() == 5);
  CHECK_THROWS_AS(laplace_hermite({0, 0, 0}, 3), Error);
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b)
      CHECK(laplace_hermite({a, b}, 2).degree() == a + b + 2);
}

TEST_CASE("floating hermite evaluation matches the exact polynomial") {
  for (int n = 0; n <= 17; ++n)
    for (double x : {-3.5, -1.0, 0.0, 0.3, 2.25, 5.0}) {
      const double exact = hermite(n).eval<double>(x);
      CHECK(hermite_value(n, x) == doctest::Approx(exact).epsilon(1e-10));
    }
  const auto l = laplace_hermite({2, 1}, 2);
  const double x1 = 0.4, x2 = -1.3;
  const double by_factors = hermite_value(4, x1) * hermite_value(1, x2) + hermite_value(2, x1) * hermite_value(3, x2);
  CHECK(l.eval<double>(x1, x2) == doctest::Approx(by_factors).epsilon(1e-12));
}
