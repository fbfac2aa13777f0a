#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "marr/counterexamples.hpp"
#include "marr/edges.hpp"
#include "marr/errors.hpp"
#include "marr/genericity.hpp"
#include "marr/io.hpp"
#include "marr/log.hpp"
#include "marr/parallel.hpp"
#include "marr/recovery.hpp"
#include "marr/transform.hpp"

using namespace marr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
  double time_limit = 0; // seconds, 0 when unbounded
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double normal_pdf(double x, double s = 1) {
  return std::exp(-x * x / (2 * s * s)) / (s * std::sqrt(2 * std::numbers::pi));
}

double kronrod(const std::function<double(double)> &f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-13);
}

// Moments of the unit normal: 0 for odd n, (n - 1)!! for even n.
double normal_moment(int n) {
  if (n % 2)
    return 0;
  double m = 1;
  for (int k = n - 1; k > 1; k -= 2)
    m *= k;
  return m;
}

Outcome closed_form_edges() {
  const std::vector<double> sigmas{0.5, 1, 2, 4, 8};
  const auto slices = wavelet_transform_scaled(gaussian_signal(), Wavelet::ricker(),
                                               ScaleLadder::explicit_scales(sigmas), 8, 4, 4001);
  double worst = 0;
  bool counts = true;
  for (const auto &sl : slices) {
    const auto z = find_zeros(sl);
    const double x = std::sqrt(sl.sigma * sl.sigma + 1);
    if (z.size() != 2) {
      counts = false;
      continue;
    }
    worst = std::max({worst, std::abs(z[0].x + x), std::abs(z[1].x - x)});
  }
  return {counts && worst < 1e-6, "max |x - (+-sqrt(sigma^2 + 1))| = " + fmt(worst)};
}

Outcome counterexample_system() {
  const auto s = solve_counterexample_system();
  const auto two = [](double v) { return std::round(v * 100) / 100; };
  const bool values = two(s.a) == 0.38 && two(s.b) == 0.28 && two(s.x_star) == 0.71;
  const auto psi = custom_wavelet(s.a, s.b);
  const auto grid = UniformGrid::span(-6, 6, 12001);
  Eigen::VectorXd v(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i)
    v[static_cast<Eigen::Index>(i)] = eval(psi, grid.at(i));
  const auto zeros = find_zeros(SampledSignal(grid, v), PointEvaluator([&](double t) { return eval(psi, t); }));
  const double r3 = std::sqrt(3.0);
  const bool psi_zeros = zeros.size() == 2 && zeros[0].kind == ZeroKind::regular &&
                         std::abs(zeros[0].x + r3) < 1e-8 && zeros[1].kind == ZeroKind::non_regular &&
                         std::abs(zeros[1].x - s.x_star) < 1e-6;
  const auto d2 = regular_zeros_of_derivative(psi, 2, -6, 6);
  const bool second = d2.size() == 3 && std::abs(d2[0] + r3) < 1e-8 && std::abs(d2[1]) < 1e-8 &&
                      std::abs(d2[2] - r3) < 1e-8;
  return {values && s.residual < 1e-12 && psi_zeros && second,
          "(a, b, x*) = (" + fmt(s.a) + ", " + fmt(s.b) + ", " + fmt(s.x_star) + "), residual " + fmt(s.residual) +
              ", psi zeros " + std::to_string(zeros.size()) + ", psi'' zeros " + std::to_string(d2.size())};
}

Outcome moment_round_trip() {
  const auto R = Wavelet::ricker();
  const auto g = recover_from_signal(gaussian_signal(), R).recovery.moments;
  const auto d = recover_from_signal(delta_signal(0.3), R).recovery.moments;
  if (g.n_max() < 4 || d.n_max() < 1)
    return {false, "recovery truncated early"};
  const double e2 = std::abs(g[2] / g[0] - normal_moment(2)), e3 = std::abs(g[3] / g[0]),
               e4 = std::abs(g[4] / g[0] - normal_moment(4)), e1 = std::abs(d[1] / d[0] - 0.3);
  return {e2 <= 0.05 && e3 <= 0.05 && e4 <= 0.15 && e1 <= 0.01,
          "G errors mu2 " + fmt(e2) + ", mu3 " + fmt(e3) + ", mu4 " + fmt(e4) + "; delta(x - 0.3) mu1 error " + fmt(e1)};
}

Outcome scalar_invariance() {
  const auto R = Wavelet::ricker();
  const auto a = recover_from_signal(gaussian_signal(), R).recovery.moments;
  const auto b = recover_from_signal(scaled(7.3, gaussian_signal()), R).recovery.moments;
  return {a.mu == b.mu && a.n0 == b.n0, a.mu == b.mu ? "bitwise equal normalized moments" : "moment vectors differ"};
}

Outcome genericity_1d() {
  const auto reports = check_1d_ricker_genericity(15);
  std::size_t bad = 0;
  for (const auto &r : reports)
    bad += !(r.gcd_trivial && r.simple_roots && r.verdict == Containment::not_contained);
  // Recomputed gcds and square-free checks, independent of the report flags.
  const auto x = IntegerPolynomial::monomial(1, {1, 0}, 1);
  const auto one = IntegerPolynomial::constant(1);
  for (int n = 0; n <= 15; ++n) {
    const auto hn = hermite(n + 2);
    bad += rational_gcd(hn, derivative(hn)) != one;
    for (int m = n + 1; m <= 15; ++m) {
      const auto gcd = rational_gcd(hn, hermite(m + 2));
      bad += gcd != one && gcd != x;
    }
  }
  return {bad == 0 && reports.size() == 240, std::to_string(reports.size()) + " ordered pairs, " + std::to_string(bad) +
                                                 " failures"};
}

Outcome genericity_2d() {
  const auto sweep = sweep_2d_laplace_hermite({0, 0}, 15);
  std::size_t bad = 0;
  for (const auto &s : sweep)
    bad += !(s.verdict == Containment::not_contained && s.first_value < 1e-10 && s.second_value > 1e-4);
  return {bad == 0 && sweep.size() == 270, std::to_string(sweep.size()) + " reports (both directions), " +
                                               std::to_string(bad) + " without a not_contained witness"};
}

Outcome expansion_rate() {
  const auto R = Wavelet::ricker();
  const std::vector<double> sig{8, 16, 32, 64};
  std::ostringstream d;
  bool pass = true;
  for (int N : {2, 4}) {
    const auto rep = moment_expansion_error(gaussian_signal(), R, N, sig);
    pass = pass && rep.slope <= -0.8;
    d << "slope N=" << N << " " << fmt(rep.slope) << "; ";
  }
  const Signal h = AlgebraicTailDensity{6, 1, {}};
  ExpansionErrorOptions fast;
  fast.w_points = 13;
  bool allowed = true, refused = false;
  try {
    moment_expansion_error(h, R, 4, {8, 16}, fast);
  } catch (const Error &) {
    allowed = false;
  }
  try {
    moment_expansion_error(h, R, 5, {8, 16}, fast);
  } catch (const Error &e) {
    refused = e.code() == "moment_cap";
  }
  d << "p=6: N=4 " << (allowed ? "allowed" : "refused") << ", N=5 " << (refused ? "refused" : "allowed");
  return {pass && allowed && refused, d.str()};
}

// Direct per-level zero counts of F_xx, independent of contour tracing.
bool counts_non_increasing(const Signal &f, const std::vector<double> &t_levels) {
  std::size_t prev = static_cast<std::size_t>(-1);
  for (double t : t_levels) {
    const double half = 12 + 8 * std::sqrt(t);
    const auto g = UniformGrid::span(-half, half, 8001);
    const auto z = find_zeros(heat_solution(f, t, g, 2), heat_evaluator(f, t, 2));
    if (z.size() > prev)
      return false;
    prev = z.size();
  }
  return true;
}

Outcome heat_geometry(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(-4, 4), width(0.3, 1.0), weight(0.5, 1.5);
  const int trials = 50;
  int violations = 0, inconclusive = 0, count_failures = 0;
  for (int i = 0; i < trials; ++i) {
    GaussianMixture m;
    for (int k = 0; k < 3; ++k) {
      const double c = center(rng), s = width(rng), w = weight(rng);
      m.terms.push_back({c, s, 0, w});
    }
    const Signal f = m;
    const auto r = check_subset_property(f, 0.25, 4);
    if (r.window_exit || r.subset == Verdict::inconclusive) {
      ++inconclusive;
      continue;
    }
    const bool ok = r.subset == Verdict::pass && r.crossings_t2 <= r.crossings_t1 && r.unmatched_ids.empty() &&
                    r.local_minima == 0 && r.multiple_crossings == 0;
    violations += !ok;
    count_failures += !counts_non_increasing(f, r.t_levels);
  }
  const bool pass = violations == 0 && count_failures == 0 && inconclusive <= trials * 2 / 100;
  return {pass, std::to_string(trials) + " mixtures: " + std::to_string(violations) + " violations, " +
                    std::to_string(inconclusive) + " inconclusive, " + std::to_string(count_failures) +
                    " direct count increases"};
}

Outcome small_scale() {
  const auto r = build_small_scale_counterexample(4);
  // Sign table re-evaluated from the atoms of Delta h_4 with an independent Gaussian.
  bool table = r.sigmas.size() == 4;
  double smallest = INFINITY;
  for (std::size_t k = 0; k < r.sigmas.size(); ++k) {
    const double s = r.sigmas[k], x = std::sqrt(s * s + 1);
    const double expected = k % 2 == 0 ? 1 : -1;
    for (double at : {-x, x}) {
      double v = 0;
      for (const auto &a : r.laplacian.atoms)
        v += a.weight * normal_pdf(at - a.x, s);
      table = table && expected * v > 1e-12;
      smallest = std::min(smallest, std::abs(v));
    }
  }
  return {r.complete && r.strict && table && r.crossing_sigmas.size() >= 3,
          "complete " + std::string(r.complete ? "yes" : "no") + ", min |table| " + fmt(smallest) + ", crossings " +
              std::to_string(r.crossing_sigmas.size())};
}

// int_C x^m (1 + |x|)^{-N-1} over the symmetric union, by quadrature on geometric panels.
double side_moment(const TruncatedTailSide &s, int m) {
  if (m % 2)
    return 0;
  double total = 0;
  for (const auto &iv : s.half)
    for (double lo = iv.lo; lo < iv.hi;) {
      const double hi = std::min(iv.hi, 1.5 * lo + 0.5);
      total += kronrod([&](double x) { return std::pow(x, m) * std::pow(1 + x, -(s.N + 1)); }, lo, hi);
      lo = hi;
    }
  return 2 * s.amplitude * total;
}

Outcome algebraic_decay() {
  const auto r = build_algebraic_decay_pair(4, 2);
  double worst = 0;
  for (const auto &st : r.stages)
    for (const auto *side : {&st.f, &st.g}) {
      const auto &a = side == &st.f ? st.a : st.b;
      for (int m = 0; m < 4; ++m) {
        // mu_m = <delta'', x^m> + int_C x^m h - m! a_m
        double mu = (m == 2 ? 2.0 : 0.0) + side_moment(*side, m);
        if (m % 2 == 0 && m <= r.N - 2)
          mu -= std::tgamma(m + 1.0) * a[static_cast<std::size_t>(m)];
        worst = std::max(worst, std::abs(mu - (m == 2 ? 2.0 : 0.0)));
      }
    }
  const bool strict = !r.witnesses.empty() &&
                      std::all_of(r.witnesses.begin(), r.witnesses.end(), [](const auto &w) { return w.strict; });
  const bool gaps = !r.mu_gap.empty() && std::all_of(r.mu_gap.begin(), r.mu_gap.end(), [](double g) { return g > 1; });
  const double least_gap = r.mu_gap.empty() ? 0 : *std::min_element(r.mu_gap.begin(), r.mu_gap.end());
  return {r.complete && worst <= 1e-7 && r.max_moment_error <= 1e-7 && strict && gaps,
          "moment error " + fmt(std::max(worst, r.max_moment_error)) + ", " + std::to_string(r.witnesses.size()) +
              " witnesses strict " + (strict ? "yes" : "no") + ", min mu_N gap " + fmt(least_gap)};
}

Outcome q_lemma(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> half(0.2, 2.0), height(0.1, 2.0);
  std::uniform_int_distribution<int> knots(1, 5);
  const std::vector<double> sigmas{0.5, 1, 2};
  int failures = 0;
  double worst_q0 = 0;
  for (int i = 0; i < 25; ++i) {
    const double b = half(rng);
    const int k = knots(rng);
    // Symmetric nonnegative tent profile: knots at b j / (k + 1), j = -k..k.
    PiecewiseLinear h;
    h.x.push_back(-b);
    h.y.push_back(0);
    std::vector<double> ys(static_cast<std::size_t>(k));
    for (auto &y : ys)
      y = height(rng);
    for (int j = -k; j <= k; ++j) {
      if (j == 0 && k > 0) {
        h.x.push_back(0);
        h.y.push_back(height(rng));
        continue;
      }
      h.x.push_back(b * j / (k + 1));
      h.y.push_back(ys[static_cast<std::size_t>(std::abs(j) - 1)]);
    }
    h.x.push_back(b);
    h.y.push_back(0);
    const auto rep = q_two_zero_check(h, sigmas);
    const double a0 = kronrod([&](double y) { return h(y); }, -b, b);
    for (const auto &l : rep.levels) {
      // Q(0, sigma) = int h (G_sigma(y) - G_sigma(0)) dy < 0 by quadrature.
      const double q0 = kronrod([&](double y) { return h(y) * normal_pdf(y, l.sigma); }, -b, b) -
                        a0 * normal_pdf(0, l.sigma);
      worst_q0 = std::max(worst_q0, std::abs(q0 - l.q0) / std::abs(q0));
      failures += !(l.exactly_two && l.zeros.size() == 2 && l.q0 < 0 && q0 < 0);
    }
  }
  return {failures == 0 && worst_q0 < 1e-6, "75 profiles, " + std::to_string(failures) +
                                                " failures, Q(0) relative deviation from quadrature " + fmt(worst_q0)};
}

Outcome reconstruction() {
  MomentVector m;
  m.n0 = 0;
  for (int n = 0; n <= 10; ++n)
    m.mu.push_back(normal_moment(n));
  const auto r = reconstruct_from_moments(m, 1.5, 11, UniformGrid::span(-4, 4, 81));
  double worst = 0;
  for (std::size_t i = 0; i < r.omega.size(); ++i) {
    const double ex = std::exp(-r.omega[i] * r.omega[i] / 2);
    worst = std::max(worst, std::abs(r.spectrum[i] - ex) / ex);
  }
  return {worst <= 1e-3, "max relative error on |omega| <= 1.5 with exact moments " + fmt(worst) +
                             " (first omitted Taylor term bounds it by 8.7e-3 at |omega| = 1.5)"};
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Acceptance criteria; one PASS/FAIL line each"};
  std::string expect_fail, only;
  std::uint64_t seed = 20240601;
  std::string json_path;
  app.add_option("--expect-fail", expect_fail, "comma-separated criteria expected to FAIL");
  app.add_option("--only", only, "comma-separated subset to run");
  app.add_option("--seed", seed, "seed for the randomized suites");
  app.add_option("--json", json_path, "write the results as JSON");
  CLI11_PARSE(app, argc, argv);
  set_log_level(LogLevel::silent);

  const auto ids = [](const std::string &text) {
    std::set<int> s;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty())
        s.insert(std::stoi(item));
    return s;
  };
  const std::set<int> expected = ids(expect_fail), selected = ids(only);

  const std::vector<Criterion> criteria{
      {1, "closed-form edge contours", closed_form_edges, 5},
      {2, "counterexample system", counterexample_system},
      {3, "moment recovery round trip", moment_round_trip, 60},
      {4, "scalar invariance", scalar_invariance},
      {5, "1-D genericity, exact", genericity_1d, 10},
      {6, "2-D genericity sweep", genericity_2d, 600},
      {7, "moment-expansion rate", expansion_rate},
      {8, "heat-node geometry", [&] { return heat_geometry(seed); }},
      {9, "small-scale counterexample", small_scale},
      {10, "algebraic-decay counterexample", algebraic_decay},
      {11, "Q-lemma property", [&] { return q_lemma(seed + 1); }},
      {12, "reconstruction", reconstruction},
  };

  std::set<int> failed;
  Json results = Json::array();
  for (const auto &c : criteria) {
    if (!selected.empty() && !selected.count(c.id))
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs >= c.time_limit) {
      o.pass = false;
      o.detail += "; over the " + fmt(c.time_limit) + " s limit";
    }
    if (!o.pass)
      failed.insert(c.id);
    char head[96];
    std::snprintf(head, sizeof head, "%s %2d  %-32s %7.2f s  ", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs);
    std::cout << head << o.detail << std::endl;
    results.push_back({{"id", c.id}, {"name", c.name}, {"pass", o.pass}, {"seconds", secs}, {"detail", o.detail}});
  }
  if (!json_path.empty())
    write_json(json_path, results);

  std::set<int> expected_run;
  for (int id : expected)
    if (selected.empty() || selected.count(id))
      expected_run.insert(id);
  if (failed != expected_run) {
    std::cout << "unexpected outcome: failed set differs from --expect-fail" << std::endl;
    return 1;
  }
  return 0;
}
