#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "marr/errors.hpp"
#include "marr/kernels.hpp"

using namespace marr;
using boost::math::quadrature::gauss_kronrod;

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2 * std::numbers::pi);

// Five-point central difference; O(h^4) truncation.
template <typename F> double five_point(F f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

double integrate(const std::function<double(double)> &f, double a, double b) {
  double total = 0;
  const int panels = 16;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + (b - a) * i / panels, hi = a + (b - a) * (i + 1) / panels;
    total += gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14);
  }
  return total;
}

} // namespace

TEST_CASE("wavelet invariants") {
  CHECK(eval(Wavelet::gaussian(0), 0.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-15));
  CHECK(eval_partial(Wavelet::gaussian(0, 2), {0, 0}, 0.0, 0.0) ==
        doctest::Approx(1 / (2 * std::numbers::pi)).epsilon(1e-15));
  for (double x = -7; x <= 7; x += 0.37)
    for (int n = 0; n <= 5; ++n)
      CHECK(eval_derivative(Wavelet::ricker(), n, x) == eval_derivative(Wavelet::gaussian(2), n, x));
}

TEST_CASE("ricker values") {
  const auto m = Wavelet::ricker();
  CHECK(std::abs(eval(m, 1.0)) < 1e-17);
  CHECK(std::abs(eval(m, -1.0)) < 1e-17);
  CHECK(eval(m, 0.0) == doctest::Approx(-kInvSqrt2Pi).epsilon(1e-15));
  CHECK(eval(m, 0.0) == doctest::Approx(-0.3989422804).epsilon(1e-9));
  for (double x : {-2.5, -0.4, 0.0, 1.3, 3.1}) {
    const double h3 = x * x * x - 3 * x;
    CHECK(eval_derivative(m, 1, x) == doctest::Approx(-h3 * kInvSqrt2Pi * std::exp(-x * x / 2)).epsilon(1e-13));
  }
}

TEST_CASE("derivatives agree with finite differences of the previous order") {
  const std::vector<Wavelet> family{Wavelet::gaussian(0), Wavelet::gaussian(3), Wavelet::ricker(),
                                    Wavelet::custom(0.38, 0.28)};
  for (const auto &w : family)
    for (int n = 1; n <= 8; ++n) {
      double sup = 0, worst = 0;
      for (double x = -6; x <= 6.0001; x += 0.05) {
        const double exact = eval_derivative(w, n, x);
        const double fd = five_point([&](double t) { return eval_derivative(w, n - 1, t); }, x, 1e-3);
        sup = std::max(sup, std::abs(exact));
        worst = std::max(worst, std::abs(exact - fd));
      }
      INFO(w.descriptor(), " n=", n);
      CHECK(worst <= 1e-6 * sup);
    }
}

TEST_CASE("ricker integrates to zero against 1 and x") {
  const auto m = Wavelet::ricker();
  CHECK(std::abs(integrate([&](double x) { return eval(m, x); }, -40, 40)) < 1e-10);
  CHECK(std::abs(integrate([&](double x) { return x * eval(m, x); }, -40, 40)) < 1e-10);
  CHECK(integrate([&](double x) { return x * x * eval(m, x); }, -40, 40) == doctest::Approx(2).epsilon(1e-10));
}

TEST_CASE("scaled Gaussian keeps unit mass") {
  for (double s : {0.1, 1.0, 10.0}) {
    const auto k = scale(Wavelet::gaussian(0), s);
    CHECK(integrate([&](double x) { return k(x); }, -40 * s, 40 * s) == doctest::Approx(1).epsilon(1e-10));
  }
}

TEST_CASE("scale") {
  const auto m = Wavelet::ricker();
  for (double x : {-1.5, 0.0, 0.7})
    CHECK(scale(m, 1)(x) == eval(m, x));
  CHECK(std::abs(scale(m, 2)(2.0)) < 1e-17);
  CHECK(scale(m, 2)(0.6) == doctest::Approx(0.5 * eval(m, 0.3)).epsilon(1e-15));
  CHECK(scale(Wavelet::gaussian(0), 3)(0.0) == doctest::Approx(kInvSqrt2Pi / 3).epsilon(1e-15));
  CHECK_THROWS_AS(scale(m, 0), Error);
  CHECK_THROWS_AS(scale(m, -1), Error);
  const auto k = scale(m, 2.5);
  CHECK(k.derivative(1, 0.9) ==
        doctest::Approx(five_point([&](double t) { return k(t); }, 0.9, 1e-3)).epsilon(1e-9));
}

TEST_CASE("evaluation window") {
  CHECK(gaussian_derivative(0, 41.0) == 0.0);
  CHECK(gaussian_derivative(5, -80.0, 2.0) == 0.0);
  CHECK(gaussian_derivative(0, 37.0) > 0.0);
  CHECK(eval(Wavelet::ricker(), 40.5) == 0.0);
}

TEST_CASE("gaussian_derivative matches closed forms") {
  for (double s : {0.5, 1.0, 3.0})
    for (double x : {-2.0, 0.1, 1.7}) {
      const double g = kInvSqrt2Pi / s * std::exp(-x * x / (2 * s * s));
      CHECK(gaussian_derivative(0, x, s) == doctest::Approx(g).epsilon(1e-14));
      CHECK(gaussian_derivative(1, x, s) == doctest::Approx(-x / (s * s) * g).epsilon(1e-14));
      CHECK(gaussian_derivative(2, x, s) == doctest::Approx((x * x / (s * s) - 1) / (s * s) * g).epsilon(1e-13));
    }
}

TEST_CASE("custom wavelet") {
  const auto w = custom_wavelet(0.38, 0.28);
  const double r3 = std::sqrt(3.0);
  CHECK(std::abs(eval_derivative(w, 2, 0.0)) < 1e-15);
  CHECK(std::abs(eval_derivative(w, 2, r3)) < 1e-15);
  CHECK(std::abs(eval_derivative(w, 2, -r3)) < 1e-15);
  for (double x : {-2.0, -0.5, 0.9, 2.4}) {
    const double e = std::exp(-x * x / 2);
    CHECK(eval(w, x) == doctest::Approx(-x * e + 0.38 * x + 0.28).epsilon(1e-14));
    CHECK(eval_derivative(w, 1, x) == doctest::Approx((x * x - 1) * e + 0.38).epsilon(1e-14));
    CHECK(eval_derivative(w, 2, x) == doctest::Approx((3 * x - x * x * x) * e).epsilon(1e-13));
    CHECK(eval_derivative(custom_wavelet(5, -2), 2, x) == eval_derivative(w, 2, x));
  }
  const auto odd = custom_wavelet(0, 0);
  CHECK(eval(odd, 0.0) == 0.0);
  for (double x : {0.3, 1.1, 2.9})
    CHECK(eval(odd, -x) == -eval(odd, x));
  CHECK_THROWS_AS(custom_wavelet(std::nan(""), 0), Error);

  const auto zeros = regular_zeros_of_derivative(w, 2);
  REQUIRE(zeros.size() == 3);
  CHECK(std::abs(zeros[0] + r3) < 1e-12);
  CHECK(std::abs(zeros[1]) < 1e-12);
  CHECK(std::abs(zeros[2] - r3) < 1e-12);
  const auto z0 = regular_zeros_of_derivative(odd, 0);
  REQUIRE(z0.size() == 1);
  CHECK(std::abs(z0[0]) < 1e-12);
}

TEST_CASE("regular zeros follow Hermite roots") {
  const auto z = regular_zeros_of_derivative(Wavelet::ricker(), 1);
  REQUIRE(z.size() == 3);
  CHECK(z[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::abs(z[1]) < 1e-14);
  CHECK(regular_zeros_of_derivative(Wavelet::ricker(), 4).size() == 6);
  CHECK(regular_zeros_of_derivative(Wavelet::gaussian(0), 0).empty());
}

TEST_CASE("two-dimensional partials") {
  // Laplacian of G(x1)G(x2) by finite differences is the Ricker value.
  const auto g2 = [](double a, double b) { return eval_partial(Wavelet::gaussian(0, 2), {0, 0}, a, b); };
  const auto r = Wavelet::ricker(2);
  for (auto [x1, x2] : std::vector<std::pair<double, double>>{{0.3, -0.8}, {1.5, 0.2}, {-2.1, 1.4}}) {
    const double h = 1e-3;
    const double lap = (-g2(x1 + 2 * h, x2) + 16 * g2(x1 + h, x2) - 30 * g2(x1, x2) + 16 * g2(x1 - h, x2) -
                        g2(x1 - 2 * h, x2) - g2(x1, x2 + 2 * h) + 16 * g2(x1, x2 + h) - 30 * g2(x1, x2) +
                        16 * g2(x1, x2 - h) - g2(x1, x2 - 2 * h)) /
                       (12 * h * h);
    CHECK(eval_partial(r, {0, 0}, x1, x2) == doctest::Approx(lap).epsilon(1e-7));
    const double d1 = five_point([&](double t) { return eval_partial(r, {0, 0}, t, x2); }, x1, 1e-3);
    CHECK(eval_partial(r, {1, 0}, x1, x2) == doctest::Approx(d1).epsilon(1e-8));
    const double d2 = five_point([&](double t) { return eval_partial(r, {1, 0}, x1, t); }, x2, 1e-3);
    CHECK(eval_partial(r, {1, 1}, x1, x2) == doctest::Approx(d2).epsilon(1e-8));
  }
  CHECK_THROWS_AS(eval_partial(Wavelet::ricker(), {0, 0}, 0, 0), Error);
  CHECK_THROWS_AS(Wavelet::ricker(3), Error);
}

TEST_CASE("wavelet descriptors") {
  CHECK(parse_wavelet("ricker") == Wavelet::ricker());
  CHECK(parse_wavelet("gauss:3") == Wavelet::gaussian(3));
  CHECK(parse_wavelet("ricker@2d") == Wavelet::ricker(2));
  const auto c = parse_wavelet("custom:a=0.5,b=-1.25");
  CHECK(c == Wavelet::custom(0.5, -1.25));
  CHECK(parse_wavelet(c.descriptor()) == c);
  CHECK(parse_wavelet(Wavelet::gaussian(7).descriptor()) == Wavelet::gaussian(7));
  CHECK_THROWS_AS(parse_wavelet("morlet"), Error);
  CHECK_THROWS_AS(parse_wavelet("gauss:x"), Error);
  CHECK_THROWS_AS(parse_wavelet("custom:a=1"), Error);
  CHECK_THROWS_AS(parse_wavelet("custom:a=1,b=2,c=3"), Error);
}

TEST_CASE("gaussian expansion reproduces the scaled kernel") {
  const std::vector<Wavelet> family{Wavelet::gaussian(0), Wavelet::gaussian(2), Wavelet::ricker(),
                                    Wavelet::custom(0.38, 0.28)};
  for (const auto &w : family)
    for (double s : {0.5, 2.0, 7.0})
      for (int n = 0; n <= 3; ++n) {
        const auto k = scale(w, s);
        const auto e = gaussian_expansion(k, n);
        for (double x : {-3.0 * s, -0.4 * s, 0.0, 1.1 * s}) {
          double v = e.p0 + e.p1 * x;
          for (auto [order, c] : e.terms)
            v += c * gaussian_derivative(order, x, s);
          CHECK(v == doctest::Approx(k.derivative(n, x)).epsilon(1e-12).scale(1e-14));
        }
      }
}
