#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "marr/errors.hpp"
#include "marr/edges.hpp"
#include "marr/genericity.hpp"

using namespace marr;

namespace {

const double kSqrt3 = std::sqrt(3.0);

// L_{(1,0)} = -(x1^3 + x1 x2^2 - 4 x1) up to sign; only |.| matters on the circle.
double l10_on_circle(double theta) {
  const double r = std::sqrt(2.0);
  const double x1 = r * std::cos(theta), x2 = r * std::sin(theta);
  return x1 * x1 * x1 + x1 * x2 * x2 - 4 * x1;
}

} // namespace

TEST_CASE("1-D Ricker genericity") {
  const auto reports = check_1d_ricker_genericity(15);
  CHECK(reports.size() == 16 * 15);
  for (const auto &r : reports) {
    CHECK(r.first[0] != r.second[0]);
    CHECK(r.gcd_trivial);
    CHECK(r.simple_roots);
    CHECK(r.verdict == Containment::not_contained);
    CHECK(r.first_value < 1e-10);
    CHECK(r.second_value > 1e-4);
  }

  // (0, 1): the witness is the root x = 1 of H_2, and H_3(1) = -2 by the closed form
  const auto &r01 = reports.front();
  REQUIRE(r01.first[0] == 0);
  REQUIRE(r01.second[0] == 1);
  CHECK(r01.witness[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hermite(3).eval(1.0) == doctest::Approx(-2.0));

  // Verdicts never flip as n_max grows.
  const auto small = check_1d_ricker_genericity(4);
  for (const auto &r : small) {
    const auto it = std::find_if(reports.begin(), reports.end(),
                                 [&](const auto &q) { return q.first == r.first && q.second == r.second; });
    REQUIRE(it != reports.end());
    CHECK(it->verdict == r.verdict);
  }
  CHECK_THROWS_AS(check_1d_ricker_genericity(0), Error);
}

TEST_CASE("2-D Laplace-Hermite containment") {
  const auto r = check_2d_laplace_hermite({0, 0}, {1, 0});
  CHECK(r.verdict == Containment::not_contained);
  CHECK(r.points > 100);
  // The witness lies on the radius sqrt(2) circle.
  CHECK(std::hypot(r.witness[0], r.witness[1]) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  // Circle oracle: L_{(1,0)} is nonzero somewhere on the circle, e.g. at theta = 0.
  CHECK(std::abs(l10_on_circle(0)) > 1);
  CHECK(std::abs(l10_on_circle(std::numbers::pi / 2)) < 1e-12);
  CHECK(std::abs(l10_on_circle(std::atan2(r.witness[1], r.witness[0]))) > 1e-4);

  CHECK_THROWS_AS(check_2d_laplace_hermite({2, 1}, {2, 1}), Error);
  CHECK_THROWS_AS(check_2d_laplace_hermite({0, 0}, {-1, 0}), Error);

  // Reduced sweep in both directions; the full |beta| <= 15 sweep belongs to acceptance.
  const auto sweep = sweep_2d_laplace_hermite({0, 0}, 3);
  CHECK(sweep.size() == 2 * 9);
  for (const auto &s : sweep) {
    CHECK(s.verdict == Containment::not_contained);
    CHECK(s.first_value < 1e-10);
    CHECK(s.second_value > 1e-4);
  }
}

TEST_CASE("counterexample system") {
  const auto s = solve_counterexample_system();
  CHECK(s.residual < 1e-13);
  CHECK(std::round(s.a * 100) / 100 == doctest::Approx(0.38));
  CHECK(std::round(s.b * 100) / 100 == doctest::Approx(0.28));
  CHECK(std::round(s.x_star * 100) / 100 == doctest::Approx(0.71));
  CHECK(std::abs(s.x_star + kSqrt3) > 0.1);

  const auto res = counterexample_residuals(s.a, s.b, s.x_star);
  for (double v : res)
    CHECK(std::abs(v) < 1e-12);
  // Tangency: psi'(x*) = 0
  const double x = s.x_star;
  CHECK(std::abs((x * x - 1) * std::exp(-x * x / 2) + s.a) < 1e-12);
  // psi(-sqrt 3) = 0 in closed form
  CHECK(std::abs(kSqrt3 * std::exp(-1.5) - kSqrt3 * s.a + s.b) < 1e-12);

  // find_zeros on psi: a regular zero at -sqrt 3 and a non-regular one at x*
  const auto psi = custom_wavelet(s.a, s.b);
  const auto grid = UniformGrid::span(-6, 6, 12001);
  Eigen::VectorXd v(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i)
    v[static_cast<Eigen::Index>(i)] = eval(psi, grid.at(i));
  const PointEvaluator exact = [&](double t) { return eval(psi, t); };
  const auto zeros = find_zeros(SampledSignal(grid, v), exact);
  REQUIRE(zeros.size() == 2);
  CHECK(zeros[0].kind == ZeroKind::regular);
  CHECK(zeros[0].x == doctest::Approx(-kSqrt3).epsilon(1e-10));
  CHECK(zeros[1].kind == ZeroKind::non_regular);
  CHECK(zeros[1].x == doctest::Approx(x).epsilon(1e-6));
}

TEST_CASE("weak genericity failure") {
  const auto r = verify_weak_genericity_failure(0.01, 10);
  CHECK(r.indistinguishable);
  REQUIRE(r.regular_psi.size() == 1);
  REQUIRE(r.regular_perturbed.size() == 1);
  CHECK(std::abs(r.regular_psi[0] + kSqrt3) < 1e-6);
  CHECK(std::abs(r.regular_perturbed[0] + kSqrt3) < 1e-6);
  CHECK(r.c_max > 0.01);

  REQUIRE(r.psi2_zeros.size() == 3);
  CHECK(std::abs(r.psi2_zeros[0] + kSqrt3) < 1e-8);
  CHECK(std::abs(r.psi2_zeros[1]) < 1e-8);
  CHECK(std::abs(r.psi2_zeros[2] - kSqrt3) < 1e-8);

  const auto same = verify_weak_genericity_failure(0, 25);
  CHECK(same.all_psi == same.all_perturbed);
  CHECK(same.indistinguishable);

  CHECK_THROWS_AS(verify_weak_genericity_failure(-1, 10), Error);
}
