#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "marr/errors.hpp"
#include "marr/log.hpp"
#include "marr/signals.hpp"

using namespace marr;
using boost::math::quadrature::gauss;

namespace {

// Composite fixed-order Gauss-Legendre; independent of the library's adaptive panels.
double quad(const std::function<double(double)> &f, double a, double b, int panels = 32) {
  double total = 0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + (b - a) * i / panels, hi = a + (b - a) * (i + 1) / panels;
    total += gauss<double, 40>::integrate(f, lo, hi);
  }
  return total;
}

bool close(double value, double oracle, double rel, double abs_floor) {
  return std::abs(value - oracle) <= rel * std::abs(oracle) + abs_floor;
}

double normal_pdf(double x, double s) {
  return std::exp(-x * x / (2 * s * s)) / (s * std::sqrt(2 * std::numbers::pi));
}

struct SilenceLog {
  SilenceLog() { set_log_level(LogLevel::silent); }
  ~SilenceLog() { set_log_level(LogLevel::warning); }
};

} // namespace

TEST_CASE("moments: closed forms") {
  const auto g = moments(gaussian_signal(), 2);
  CHECK(g.n0 == 0);
  CHECK(g[0] == doctest::Approx(1).epsilon(1e-14));
  CHECK(std::abs(g[1]) < 1e-15);
  CHECK(g[2] == doctest::Approx(1).epsilon(1e-14));
  // standard normal moments by quadrature
  for (int n = 0; n <= 6; ++n) {
    const double oracle = quad([n](double x) { return std::pow(x, n) * normal_pdf(x, 1); }, -40, 40);
    CHECK(close(moments(gaussian_signal(), 6)[n], oracle, 1e-10, 1e-14));
  }

  const auto d2 = moments(delta_signal(0, 2), 3);
  CHECK(d2.mu == std::vector<double>{0, 0, 2, 0});
  CHECK(d2.n0 == 2);

  const auto shifted = moments(delta_signal(0.3), 5);
  for (int n = 0; n <= 5; ++n)
    CHECK(shifted[n] == doctest::Approx(std::pow(0.3, n)).epsilon(1e-15));

  // symmetric signals have vanishing odd moments
  const Signal sym = GaussianMixture{{{-1.5, 0.7, 0, 2.0}, {1.5, 0.7, 0, 2.0}, {0, 0.3, 0, -0.5}}};
  const auto ms = moments(sym, 9);
  for (int n = 1; n <= 9; n += 2)
    CHECK(std::abs(ms[n]) < 1e-12);

  CHECK(moments(zero_signal(), 4).n0 == -1);
  CHECK_THROWS_AS(moments(gaussian_signal(), 4).mu.at(5), std::out_of_range);
}

TEST_CASE("moments of Gaussian derivative terms match quadrature") {
  const Signal f = GaussianMixture{{{0.4, 1.3, 3, 0.8}}};
  const auto m = moments(f, 6);
  for (int n = 0; n <= 6; ++n) {
    const double oracle = quad([n](double x) { return std::pow(x, n) * 0.8 * gaussian_derivative(3, x - 0.4, 1.3); },
                               -50, 50);
    CHECK(close(m[n], oracle, 1e-9, 1e-14));
  }
  CHECK(m.n0 == 3);
}

TEST_CASE("moments are linear") {
  const Signal f = GaussianMixture{{{0.5, 1.0, 0, 1.0}, {-1.0, 0.5, 1, 0.3}}};
  const Signal g = PiecewiseLinear{{-1, 0, 2}, {0, 1, 0}};
  const double a = 2.5, b = -0.75;
  const auto mf = moments(f, 8), mg = moments(g, 8);
  const auto mc = moments(sum({{a, std::make_shared<Signal>(f)}, {b, std::make_shared<Signal>(g)}}), 8);
  for (int n = 0; n <= 8; ++n)
    CHECK(std::abs(mc[n] - (a * mf[n] + b * mg[n])) < 1e-10 * std::max(1.0, std::abs(mc[n])));
  const auto m7 = moments(scaled(7.3, f), 8);
  for (int n = 0; n <= 8; ++n)
    CHECK(m7[n] == doctest::Approx(7.3 * mf[n]).epsilon(1e-14));
}

TEST_CASE("moments of sampled and piecewise-linear signals") {
  const Signal hat = PiecewiseLinear{{-1, 0, 1}, {0, 1, 0}};
  const auto mh = moments(hat, 4);
  CHECK(mh[0] == doctest::Approx(1).epsilon(1e-15));
  CHECK(std::abs(mh[1]) < 1e-15);
  CHECK(mh[2] == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(mh[4] == doctest::Approx(1.0 / 15).epsilon(1e-14));

  const auto grid = UniformGrid::span(-12, 12, 4801);
  Eigen::VectorXd v(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i)
    v[i] = normal_pdf(grid.at(i), 1);
  const auto ms = moments(SampledSignal(grid, v), 4);
  CHECK(ms[0] == doctest::Approx(1).epsilon(1e-10));
  CHECK(ms[2] == doctest::Approx(1).epsilon(1e-10));
  CHECK(ms[4] == doctest::Approx(3).epsilon(1e-10));
}

TEST_CASE("algebraic tail moments") {
  const AlgebraicTailDensity h{6, 1.0, {}};
  const auto m = moments(Signal(h), 4);
  boost::math::quadrature::exp_sinh<double> es;
  for (int n = 0; n <= 4; ++n) {
    const double half = es.integrate([n](double x) { return x > 1e60 ? 0.0 : std::pow(x, n) * std::pow(1 + x, -6.0); });
    const double oracle = (n % 2 == 0) ? 2 * half : 0.0;
    CHECK(close(m[n], oracle, 1e-10, 1e-14));
  }
  CHECK(moment_budget(Signal(h)) == 4);
  CHECK_THROWS_AS(moments(Signal(h), 5), Error);
  try {
    moments(Signal(h), 5);
  } catch (const Error &e) {
    CHECK(e.code() == "divergent_moment");
    CHECK(std::string(e.what()).find("5") != std::string::npos);
  }

  // restricted support: every moment is finite
  const AlgebraicTailDensity r{5, 2.0, {{-30, -3}, {-1, 1}, {3, 30}}};
  CHECK_FALSE(moment_budget(Signal(r)).has_value());
  const auto mr = moments(Signal(r), 6);
  for (int n = 0; n <= 6; ++n) {
    const auto f = [&](double x) { return std::pow(x, n) * r(x); };
    const double oracle = quad(f, -30, -3) + quad(f, -1, 1) + quad(f, 3, 30);
    CHECK(close(mr[n], oracle, 1e-10, 1e-12));
  }
  CHECK(tail_interval_moment(5, 1, 2, -4, 7) ==
        doctest::Approx(quad([](double x) { return x * x * std::pow(1 + std::abs(x), -5.0); }, -4, 0) +
                        quad([](double x) { return x * x * std::pow(1 + std::abs(x), -5.0); }, 0, 7))
            .epsilon(1e-12));
  CHECK_THROWS_AS(moments(Signal(AlgebraicTailDensity{0.5, 1, {}}), 0), Error);
}

TEST_CASE("J distribution") {
  const auto j = j_distribution(0.5, -0.25);
  std::vector<double> locs;
  double mu0 = 0, mu1 = 0;
  for (const auto &a : j.atoms) {
    locs.push_back(a.x);
    mu0 += a.weight;
    mu1 += a.weight * a.x;
  }
  std::sort(locs.begin(), locs.end());
  CHECK(locs == std::vector<double>{-1.25, -0.25, 0.25, 1.25});
  CHECK(mu0 == 0);
  CHECK(mu1 == 0);
  const auto m = moments(Signal(j), 1);
  CHECK(m[0] == 0);
  CHECK(m[1] == 0);
  // symmetric as an atom set
  for (const auto &a : j.atoms) {
    const bool mirrored = std::any_of(j.atoms.begin(), j.atoms.end(),
                                      [&](const Atom &b) { return b.x == -a.x && b.weight == a.weight; });
    CHECK(mirrored);
  }
  CHECK_THROWS_AS(j_distribution(0.5, 0.5), Error);
  CHECK_THROWS_AS(j_distribution(0.5, 0.0), Error);
  CHECK_THROWS_AS(j_distribution(1.2, 0.1), Error);
  CHECK_NOTHROW(j_distribution(0.3, 0.2));
}

TEST_CASE("second antiderivative") {
  CHECK(second_antiderivative(PointMassDistribution{}).x.empty());

  const PointMassDistribution hat_atoms{{{-1, 0, 1}, {0, 0, -2}, {1, 0, 1}}};
  const auto hat = second_antiderivative(hat_atoms);
  for (double x : {-1.5, -1.0, -0.5, 0.0, 0.25, 1.0, 2.0})
    CHECK(hat(x) == doctest::Approx(std::max(0.0, 1 - std::abs(x))).epsilon(1e-15));

  for (auto [alpha, beta, c] : std::vector<std::tuple<double, double, double>>{{0.5, -0.25, 1.0}, {0.3, 0.1, 0.4}}) {
    PointMassDistribution j = j_distribution(alpha, beta);
    for (auto &a : j.atoms)
      a.weight *= c;
    const auto g = second_antiderivative(j);
    const double l1 = quad([&](double x) { return std::abs(g(x)); }, -3, 3, 240);
    CHECK(l1 == doctest::Approx(4 * c * alpha * (1 + beta)).epsilon(1e-10));

    // <g, phi''> == <d, phi> for cubic phi
    const auto phi = [](double x) { return 0.3 - 1.2 * x + 0.7 * x * x + 2.1 * x * x * x; };
    const auto phi2 = [](double x) { return 1.4 + 12.6 * x; };
    double lhs = 0;
    for (std::size_t i = 0; i + 1 < g.x.size(); ++i)
      lhs += quad([&](double x) { return g(x) * phi2(x); }, g.x[i], g.x[i + 1], 1);
    double rhs = 0;
    for (const auto &a : j.atoms)
      rhs += a.weight * phi(a.x);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
  CHECK_THROWS_AS(second_antiderivative(PointMassDistribution{{{0, 0, 1}}}), Error);
  CHECK_THROWS_AS(second_antiderivative(PointMassDistribution{{{-1, 0, -1}, {1, 0, 1}}}), Error);
  CHECK_THROWS_AS(second_antiderivative(PointMassDistribution{{{0, 1, 1}}}), Error);
}

TEST_CASE("convolution: Gaussian with Ricker has zeros at sqrt(sigma^2 + 1)") {
  for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const auto ev = convolution_evaluator(gaussian_signal(), scale(Wavelet::ricker(), s));
    REQUIRE(ev);
    const double z = std::sqrt(s * s + 1);
    CHECK(std::abs((*ev)(z)) < 1e-16);
    CHECK(std::abs((*ev)(-z)) < 1e-16);
    CHECK((*ev)(0.0) < 0);
  }
}

TEST_CASE("convolution: delta reproduces the kernel") {
  const auto grid = UniformGrid::span(-10, 10, 201);
  for (const auto &w : {Wavelet::ricker(), Wavelet::custom(0.38, 0.28), Wavelet::gaussian(3)}) {
    const auto k = scale(w, 1.7);
    const auto out = convolve_with_kernel(delta_signal(), k, grid);
    for (std::size_t i = 0; i < grid.count; ++i)
      CHECK(close(out.values[i], k(grid.at(i)), 1e-12, 1e-15));
  }
}

TEST_CASE("convolution: Gaussian-Gaussian closed form against quadrature") {
  for (double s : {0.5, 1.0, 4.0}) {
    const auto k = scale(Wavelet::gaussian(0), s);
    const auto ev = convolution_evaluator(gaussian_signal(), k);
    REQUIRE(ev);
    for (double x : {-3.0, -0.7, 0.0, 1.2, 4.5}) {
      const double oracle = quad([&](double y) { return normal_pdf(y, 1) * normal_pdf(x - y, s); }, -40, 40, 64);
      CHECK((*ev)(x) == doctest::Approx(oracle).epsilon(1e-8));
      CHECK((*ev)(x) == doctest::Approx(normal_pdf(x, std::sqrt(1 + s * s))).epsilon(1e-14));
    }
  }
}

TEST_CASE("convolution: piecewise linear against quadrature") {
  const PiecewiseLinear g{{-1.0, -0.2, 0.5, 2.0}, {0.0, 1.5, -0.5, 0.0}};
  for (const auto &w : {Wavelet::gaussian(0), Wavelet::gaussian(1), Wavelet::ricker(), Wavelet::custom(0.38, 0.28)})
    for (double s : {0.3, 1.0, 3.0})
      for (int n : {0, 1, 2}) {
        const auto k = scale(w, s);
        const auto ev = convolution_evaluator(Signal(g), k, n);
        REQUIRE(ev);
        for (double x : {-2.0, -0.2, 0.1, 1.7}) {
          double oracle = 0;
          for (std::size_t i = 0; i + 1 < g.x.size(); ++i)
            oracle += quad([&](double y) { return g(y) * k.derivative(n, x - y); }, g.x[i], g.x[i + 1], 8);
          INFO(w.descriptor(), " s=", s, " n=", n, " x=", x);
          CHECK(close((*ev)(x), oracle, 1e-9, 1e-12));
        }
      }
}

TEST_CASE("convolution: algebraic tail against an independent quadrature") {
  const AlgebraicTailDensity h{5, 0.8, {}};
  const AlgebraicTailDensity r{5, 0.8, {{-9, -2}, {2, 9}}};
  for (double s : {0.5, 2.0}) {
    const auto k = scale(Wavelet::ricker(), s);
    const auto ev = convolution_evaluator(Signal(h), k);
    const auto er = convolution_evaluator(Signal(r), k);
    for (double x : {0.0, 1.3, 5.0}) {
      // split at the kink of h
      const auto f = [&](double y) { return h(y) * k(x - y); };
      const double oracle = quad(f, x - 40 * s, 0, 200) + quad(f, 0, x + 40 * s, 200);
      INFO("s=", s, " x=", x, " value=", (*ev)(x), " oracle=", oracle);
      CHECK(close((*ev)(x), oracle, 1e-8, 1e-13));
      const double oracle_r = quad([&](double y) { return r(y) * k(x - y); }, -9, -2, 100) +
                              quad([&](double y) { return r(y) * k(x - y); }, 2, 9, 100);
      CHECK(close((*er)(x), oracle_r, 1e-8, 1e-13));
    }
  }
}

TEST_CASE("convolution: sampled path via FFT") {
  const auto in = UniformGrid::span(-15, 15, 3001);
  Eigen::VectorXd v(in.count);
  for (std::size_t i = 0; i < in.count; ++i)
    v[i] = normal_pdf(in.at(i), 1);
  const Signal sampled = SampledSignal(in, v);
  const auto out = UniformGrid::span(-8, 8, 161);
  for (const auto &w : {Wavelet::ricker(), Wavelet::gaussian(0), Wavelet::custom(0.38, 0.28)}) {
    const auto k = scale(w, 2.0);
    const auto fft = convolve_with_kernel(sampled, k, out);
    const auto exact = convolve_with_kernel(gaussian_signal(), k, out);
    const double sup = exact.values.cwiseAbs().maxCoeff();
    INFO(w.descriptor());
    CHECK((fft.values - exact.values).cwiseAbs().maxCoeff() < 1e-8 * sup);
  }
  // off-lattice output points are interpolated
  const auto shifted = UniformGrid::span(-8.0037, 8.0037, 117);
  const auto k = scale(Wavelet::ricker(), 2.0);
  const auto a = convolve_with_kernel(sampled, k, shifted);
  const auto b = convolve_with_kernel(gaussian_signal(), k, shifted);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-6);

  const auto heat = convolve_sampled_gaussian(std::get<SampledSignal>(sampled.value), 1.5, 2);
  for (std::size_t i = 500; i < 2500; i += 100)
    CHECK(close(heat.values[i], gaussian_derivative(2, in.at(i), std::sqrt(1 + 2.25)), 1e-8, 1e-12));
}

TEST_CASE("convolution: aliasing") {
  SilenceLog quiet;
  const auto in = UniformGrid::span(-5, 5, 11);
  const Signal coarse = SampledSignal(in, Eigen::VectorXd::Ones(11));
  const auto k = scale(Wavelet::ricker(), 1.0);
  CHECK_NOTHROW(convolve_with_kernel(coarse, k, in));
  try {
    convolve_with_kernel(coarse, k, in, {.strict = true});
    FAIL("expected aliasing error");
  } catch (const Error &e) {
    CHECK(e.code() == "aliasing");
  }
}

TEST_CASE("normal CDF differences are tail stable") {
  CHECK(normal_cdf_difference(1, -1) == doctest::Approx(std::erf(1 / std::sqrt(2.0))).epsilon(1e-15));
  const double far = normal_cdf_difference(39, 38);
  CHECK(far > 0);
  CHECK(far == doctest::Approx(0.5 * (std::erfc(38 / std::sqrt(2.0)) - std::erfc(39 / std::sqrt(2.0)))).epsilon(1e-12));
  CHECK(normal_cdf_difference(-38, -39) == doctest::Approx(-far).epsilon(1e-12));
  CHECK(normal_cdf_difference(0.3, 0.3) == 0);
}

TEST_CASE("sampled signals") {
  const auto g = UniformGrid::span(0, 1, 11);
  Eigen::VectorXd v(11);
  for (int i = 0; i < 11; ++i)
    v[i] = std::pow(g.at(i), 2);
  const SampledSignal s(g, v);
  CHECK(s.interpolate(0.55) == doctest::Approx(0.3025).epsilon(1e-12));
  CHECK(s.interpolate(0.3) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK_THROWS_AS(s.interpolate(1.2), Error);
  CHECK_THROWS_AS(SampledSignal(g, Eigen::VectorXd::Zero(3)), Error);
  CHECK_THROWS_AS(UniformGrid::span(1, 0, 10), Error);
}

TEST_CASE("support and evaluation") {
  CHECK(effective_support(Signal(PiecewiseLinear{{-1, 0, 1}, {0, 1, 0}})) == Interval{-1, 1});
  CHECK_FALSE(effective_support(Signal(AlgebraicTailDensity{3, 1, {}})).has_value());
  CHECK(effective_support(delta_signal(0.3)) == Interval{0.3, 0.3});
  CHECK(evaluate(gaussian_signal(), 0.0) == doctest::Approx(1 / std::sqrt(2 * std::numbers::pi)));
  CHECK_THROWS_AS(evaluate(delta_signal(), 0.0), Error);
  CHECK(is_zero_signal(zero_signal()));
  CHECK(is_zero_signal(scaled(0, gaussian_signal())));
  CHECK_FALSE(is_zero_signal(gaussian_signal()));
}
