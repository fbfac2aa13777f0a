#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "marr/counterexamples.hpp"
#include "marr/errors.hpp"
#include "marr/polynomials.hpp"

using namespace marr;

namespace {

double normal_pdf(double x) { return std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// J * G_sigma at x from the four atoms written out by hand.
double j_smoothed(double alpha, double beta, double sigma, double x) {
  auto g = [&](double t) { return normal_pdf(t / sigma) / sigma; };
  return g(x + 1 + alpha + beta) - g(x + 1 - alpha + beta) - g(x - 1 + alpha - beta) + g(x - 1 - alpha - beta);
}

// Trapezoid L1 norm on a fine grid: an oracle independent of the exact segment formula.
double sampled_l1(const PiecewiseLinear &h, std::size_t n = 400001) {
  const double lo = h.x.front(), hi = h.x.back(), dx = (hi - lo) / static_cast<double>(n - 1);
  double s = 0;
  for (std::size_t i = 0; i < n; ++i)
    s += (i == 0 || i + 1 == n ? 0.5 : 1.0) * std::abs(h(lo + dx * static_cast<double>(i)));
  return s * dx;
}

// int_a^b x^m (1 + x)^{-p} dx by adaptive quadrature.
double tail_moment_oracle(double p, int m, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double s = 0;
  for (double lo = a; lo < b;) {
    const double hi = std::min(b, 1.5 * lo + 0.5);
    s += gauss_kronrod<double, 61>::integrate([&](double x) { return std::pow(x, m) * std::pow(1 + x, -p); }, lo, hi,
                                              8, 1e-14);
    lo = hi;
  }
  return s;
}

// Delta(f * G_sigma)(x) by direct quadrature of chi_C h * G_sigma, with the corrections written out.
double brute_force_laplacian(const TruncatedTailSide &s, double sigma, double x) {
  using boost::math::quadrature::gauss_kronrod;
  const double p = s.N + 1;
  auto h = [&](double y) { return s.amplitude * std::pow(1 + std::abs(y), -p); };
  double conv = 0;
  for (const auto &iv : s.half)
    for (double sign : {1.0, -1.0}) {
      // Only y within 40 sigma of sign * x contributes; split there at the Gaussian peak.
      const double c = sign * x, lo = std::max(iv.lo, c - 40 * sigma), hi = std::min(iv.hi, c + 40 * sigma);
      if (!(lo < hi))
        continue;
      auto k = [&](double y) { return h(y) * normal_pdf((c - y) / sigma) / sigma; };
      if (c > lo && c < hi)
        conv += gauss_kronrod<double, 61>::integrate(k, lo, c, 8, 1e-14) +
                gauss_kronrod<double, 61>::integrate(k, c, hi, 8, 1e-14);
      else
        conv += gauss_kronrod<double, 61>::integrate(k, lo, hi, 8, 1e-14);
    }
  double v = conv + gaussian_derivative(2, x, sigma);
  for (int m = 0; m <= s.N - 2; m += 2) {
    double a = 0;
    for (const auto &iv : s.half)
      a += 2 * s.amplitude * tail_moment_oracle(p, m, iv.lo, iv.hi) / std::tgamma(m + 1.0);
    v -= a * gaussian_derivative(m, x, sigma);
  }
  return v;
}

const AlgebraicDecayResult &algebraic_pair() {
  static const AlgebraicDecayResult r = build_algebraic_decay_pair(4, 2);
  return r;
}

} // namespace

TEST_CASE("small-scale base stage") {
  const auto r = build_small_scale_counterexample(1);
  REQUIRE(r.complete);
  REQUIRE(r.stages.size() == 1);
  const auto &s = r.stages[0];
  CHECK(s.c == 1);
  CHECK(0 < -s.beta);
  CHECK(-s.beta < s.alpha);
  CHECK(s.alpha < 1);
  const double x = std::sqrt(s.sigma * s.sigma + 1);
  CHECK(j_smoothed(s.alpha, s.beta, s.sigma, x) > 0);
  CHECK(j_smoothed(s.alpha, s.beta, s.sigma, -x) > 0);
  CHECK(r.table[0][1] == doctest::Approx(j_smoothed(s.alpha, s.beta, s.sigma, x)).epsilon(1e-12));
  CHECK(s.l1_increment == doctest::Approx(4 * s.alpha * (1 + s.beta)).epsilon(1e-12));
  CHECK(sampled_l1(s.h) == doctest::Approx(s.l1_expected).epsilon(1e-6));
  CHECK_THROWS_AS(build_small_scale_counterexample(0), Error);
}

TEST_CASE("small-scale construction, four stages") {
  const auto r = build_small_scale_counterexample(4);
  REQUIRE(r.complete);
  CHECK(r.strict);
  REQUIRE(r.stages.size() == 4);
  double l1_bound = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto &s = r.stages[i];
    const int k = static_cast<int>(i) + 1;
    CHECK((k % 2 == 0 ? s.beta : -s.beta) > 0);
    CHECK(std::abs(s.beta) < s.alpha);
    if (i > 0) {
      CHECK(s.c < r.stages[i - 1].c / 2);
      CHECK(s.sigma < r.stages[i - 1].sigma);
    }
    // Table entries against the hand-written atoms of every stage.
    const double x = std::sqrt(r.sigmas[i] * r.sigmas[i] + 1);
    double oracle = 0;
    for (const auto &t : r.stages)
      oracle += t.c * j_smoothed(t.alpha, t.beta, r.sigmas[i], x);
    CHECK(r.table[i][1] == doctest::Approx(oracle).epsilon(1e-10));
    CHECK((k % 2 == 1 ? 1 : -1) * r.table[i][0] > 1e-12);
    CHECK((k % 2 == 1 ? 1 : -1) * r.table[i][1] > 1e-12);
    CHECK(s.l1_increment == doctest::Approx(s.l1_expected).epsilon(1e-10));
    l1_bound += s.l1_expected;
  }
  CHECK(r.l1_norm <= l1_bound + 1e-12);
  CHECK(l1_bound < 8);
  CHECK(sampled_l1(r.h) == doctest::Approx(r.l1_norm).epsilon(1e-5));

  // Delta h_K agrees with the slope jumps of the returned piecewise-linear h_K.
  const auto jumps = r.h.second_derivative();
  for (double t : {0.9, 1.0, 1.01, 1.3})
    CHECK(smoothed_point_masses(jumps, 0.05, t) ==
          doctest::Approx(smoothed_point_masses(r.laplacian, 0.05, t)).epsilon(1e-9));

  // Edges of G and G + h_4 cross between consecutive witnesses.
  CHECK(r.crossing_sigmas.size() >= 3);
  CHECK(r.traced_contours == 1);
  for (std::size_t i = 0; i + 1 < r.sigmas.size(); ++i) {
    bool between = false;
    for (double s : r.crossing_sigmas)
      between = between || (s < r.sigmas[i] && s > r.sigmas[i + 1]);
    CHECK(between);
  }
}

TEST_CASE("small-scale budget exhaustion is partial") {
  SmallScaleOptions o;
  o.budget = 1;
  o.sigma_start = 5;
  const auto r = build_small_scale_counterexample(3, o);
  CHECK_FALSE(r.complete);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("algebraic-decay sides") {
  const TruncatedTailSide f{4, 6.0, {{0, 1}}};
  const TruncatedTailSide g{4, 6.0, {{0, 2}}};
  // mu_2(h) = 2 A B(3, 2) = A / 6 = 1 < 2
  CHECK(2 * 6.0 * tail_moment_oracle(5, 2, 0, 1e6) == doctest::Approx(1.0).epsilon(1e-9));

  const auto mu = f.laplacian_moments();
  const double target[] = {0, 0, 2, 0};
  for (int m = 0; m < 4; ++m)
    CHECK(std::abs(mu[static_cast<std::size_t>(m)] - target[m]) < 1e-8);
  CHECK(mu[4] == doctest::Approx(2 * 6.0 * tail_moment_oracle(5, 4, 0, 1)).epsilon(1e-10));
  // C_1 inside D_1: the sigma^{-N-1} coefficient is larger for g.
  CHECK(g.laplacian_moments()[4] > mu[4]);

  const auto a = f.corrections();
  CHECK(a[0] == doctest::Approx(2 * 6.0 * tail_moment_oracle(5, 0, 0, 1)).epsilon(1e-12));
  CHECK(a[2] == doctest::Approx(6.0 * tail_moment_oracle(5, 2, 0, 1)).epsilon(1e-12));

  for (double sigma : {0.7, 2.0, 5.0})
    for (double w : {0.3, 1.0, 1.7})
      CHECK(f.smoothed_laplacian(sigma, w) ==
            doctest::Approx(brute_force_laplacian(f, sigma, sigma * w)).epsilon(1e-9));
}

TEST_CASE("algebraic-decay pair, N = 4, two stages") {
  const auto &r = algebraic_pair();
  REQUIRE(r.complete);
  CHECK(r.amplitude == doctest::Approx(6.0));
  CHECK(r.orientation == (hermite_value(4, 1.0) > 0 ? 1 : -1));
  REQUIRE(r.witnesses.size() == 3);
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    const auto &w = r.witnesses[i];
    CHECK(w.strict);
    CHECK(w.f_value * w.g_value < 0);
    if (i > 0)
      CHECK(w.sigma > r.witnesses[i - 1].sigma + 1);
  }
  REQUIRE(r.mu_gap.size() == 2);
  for (double g : r.mu_gap)
    CHECK(g > 1);
  CHECK(r.max_moment_error < 1e-7);

  REQUIRE(r.stages.size() == 2);
  for (const auto &st : r.stages) {
    for (const auto *side : {&st.f, &st.g}) {
      // Moments of Delta f_k against the oracle: closed-form-free quadrature of chi_C h.
      for (int m = 0; m < 4; ++m) {
        double v = m == 2 ? 2.0 : 0.0;
        double am = 0;
        for (const auto &iv : side->half) {
          const double q = tail_moment_oracle(5, m, iv.lo, iv.hi);
          v += (m % 2 == 0 ? 2 : 0) * 6.0 * q;
          am += 2 * 6.0 * q / std::tgamma(m + 1.0);
        }
        if (m % 2 == 0)
          v -= std::tgamma(m + 1.0) * am;
        CHECK(std::abs(v - (m == 2 ? 2.0 : 0.0)) < 1e-7);
        CHECK(std::abs(side->laplacian_moments()[static_cast<std::size_t>(m)] - (m == 2 ? 2.0 : 0.0)) < 1e-7);
      }
    }
    // C_k and D_k grow outward; earlier witnesses keep their split.
    for (const auto &w : st.witnesses)
      CHECK(w.strict);
  }
  const auto &last = r.stages.back();
  CHECK(last.f.half.size() == 2);
  CHECK(last.g.half.size() == 2);
  CHECK(last.f.half[1].lo > last.f.half[0].hi);
  // Witness values reproduce on the final pair by the brute-force oracle at the first scale.
  const auto &w1 = last.witnesses[0];
  CHECK(last.f.smoothed_laplacian(w1.sigma, w1.w) ==
        doctest::Approx(brute_force_laplacian(last.f, w1.sigma, w1.sigma * w1.w)).epsilon(1e-7));

  CHECK_THROWS_AS(build_algebraic_decay_pair(6, 2), Error);
  CHECK_THROWS_AS(build_algebraic_decay_pair(0, 2), Error);
}

TEST_CASE("Q has exactly two zeros") {
  const Signal box = AlgebraicTailDensity{0, 1, {{-1, 1}}};
  const auto r = q_two_zero_check(box, {0.1, 0.5, 1, 3, 10});
  CHECK(r.a0 == doctest::Approx(2.0));
  CHECK(r.pass);
  for (const auto &l : r.levels) {
    REQUIRE(l.zeros.size() == 2);
    CHECK(l.zeros[0] == doctest::Approx(-l.zeros[1]).epsilon(1e-9));
    CHECK(l.q0 < 0);
    CHECK(l.positive_outside);
    // Closed form: chi * G_sigma = Phi((x + 1)/sigma) - Phi((x - 1)/sigma).
    const double s = l.sigma, z = l.zeros[1];
    const double oracle = -2 * normal_pdf(z / s) / s + normal_cdf((z + 1) / s) - normal_cdf((z - 1) / s);
    CHECK(std::abs(oracle) < 1e-10);
  }
  // Scaling h~ leaves the zeros unchanged.
  const auto scaled3 = q_two_zero_check(scaled(3, box), {1});
  REQUIRE(scaled3.levels.front().zeros.size() == 2);
  CHECK(scaled3.levels.front().zeros[1] == doctest::Approx(r.levels[2].zeros[1]).epsilon(1e-10));

  CHECK_THROWS_AS(q_two_zero_check(zero_signal(), {1}), Error);
}
