#include "marr/genericity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "marr/edges.hpp"
#include "marr/errors.hpp"
#include "marr/log.hpp"
#include "marr/parallel.hpp"

namespace marr {

std::string to_string(Containment c) {
  switch (c) {
  case Containment::not_contained:
    return "not_contained";
  case Containment::contained:
    return "contained";
  case Containment::inconclusive:
    return "inconclusive";
  }
  return "unknown";
}

namespace {

bool is_x(const IntegerPolynomial &g) {
  return g.degree() == 1 && g.coeff(0) == 0 && g.coeff(1) == 1;
}

double hermite_bound(int n) { return std::sqrt(4.0 * n + 2) + 1; }

// |P(x)| / sum_i |c_i| |x|^i in long double: the 1-D analogue of the 2-D residual.
double relative_value(const IntegerPolynomial &p, double x) {
  const long double t = x;
  long double value = 0, scale = 0;
  for (const auto &[e, c] : p.terms()) {
    const long double m = std::pow(t, e[0]);
    value += c.convert_to<long double>() * m;
    scale += std::abs(c.convert_to<long double>() * m);
  }
  return scale > 0 ? static_cast<double>(std::abs(value) / scale) : 0.0;
}

} // namespace

std::vector<ContainmentReport> check_1d_ricker_genericity(int n_max) {
  if (n_max < 1)
    throw Error("domain", "check_1d_ricker_genericity needs n_max >= 1");
  std::vector<IntegerPolynomial> H;
  std::vector<RootSet> roots;
  std::vector<bool> simple;
  for (int n = 0; n <= n_max; ++n) {
    H.push_back(hermite(n + 2));
    const double r = hermite_bound(n + 2);
    roots.push_back(real_roots(H.back(), -r, r));
    simple.push_back(rational_gcd(H.back(), derivative(H.back())).degree() == 0);
  }
  std::map<std::pair<int, int>, IntegerPolynomial> gcds;
  std::vector<ContainmentReport> out;
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m <= n_max; ++m) {
      if (n == m)
        continue;
      const auto key = std::minmax(n, m);
      auto it = gcds.find(key);
      if (it == gcds.end())
        it = gcds.emplace(key, rational_gcd(H[static_cast<std::size_t>(n)], H[static_cast<std::size_t>(m)])).first;
      const auto &g = it->second;
      ContainmentReport r;
      r.first = {n, 0};
      r.second = {m, 0};
      r.dimension = 1;
      r.gcd_trivial = g.degree() == 0 || is_x(g);
      r.simple_roots = simple[static_cast<std::size_t>(n)];
      r.detail = "gcd = " + g.to_string();
      const auto &P = H[static_cast<std::size_t>(n)];
      const auto &Q = H[static_cast<std::size_t>(m)];
      // Witness: the positive root of H_{n+2} where the relative value of H_{m+2} is largest.
      double best = -1;
      for (double x : roots[static_cast<std::size_t>(n)].roots) {
        if (x <= 0)
          continue;
        const double q = relative_value(Q, x);
        if (q > best) {
          best = q;
          r.witness = {x, 0};
          r.first_value = relative_value(P, x);
          r.second_value = q;
        }
      }
      r.min_abs_value = r.second_value;
      r.points = roots[static_cast<std::size_t>(n)].size();
      // Exact: H_{n+2} has >= 2 simple roots and shares at most x = 0 with H_{m+2}.
      if (g.degree() == P.degree())
        r.verdict = Containment::contained;
      else
        r.verdict = Containment::not_contained;
      out.push_back(std::move(r));
    }
  return out;
}

namespace {

// Precomputed evaluation of an exact bivariate polynomial in long double.
struct Evaluator {
  std::vector<std::array<int, 2>> exps;
  std::vector<long double> coef;

  explicit Evaluator(const IntegerPolynomial &p) {
    for (const auto &[e, c] : p.terms()) {
      exps.push_back(e);
      coef.push_back(static_cast<long double>(c));
    }
  }

  // Value and sum of absolute term magnitudes at (x1, x2).
  std::pair<long double, long double> operator()(long double x1, long double x2) const {
    long double v = 0, a = 0;
    for (std::size_t i = 0; i < coef.size(); ++i) {
      const long double t = coef[i] * std::pow(x1, exps[i][0]) * std::pow(x2, exps[i][1]);
      v += t;
      a += std::abs(t);
    }
    return {v, a};
  }

  long double relative(long double x1, long double x2) const {
    const auto [v, a] = (*this)(x1, x2);
    return a > 0 ? std::abs(v) / a : 0;
  }
};

// L_alpha through the separable form H_{a1+2}(x1) H_{a2}(x2) + H_{a1}(x1) H_{a2+2}(x2).
long double separable(std::array<int, 2> a, long double x1, long double x2) {
  return hermite_value(a[0] + 2, x1) * hermite_value(a[1], x2) + hermite_value(a[0], x1) * hermite_value(a[1] + 2, x2);
}

int sgn(long double v) { return (v > 0) - (v < 0); }

// Sign bisection along the segment p + s (q - p), s in [0, 1].
std::array<long double, 2> bisect_edge(std::array<int, 2> a, std::array<long double, 2> p,
                                       std::array<long double, 2> q, long double tol) {
  long double lo = 0, hi = 1;
  const int s0 = sgn(separable(a, p[0], p[1]));
  const long double len = std::hypot(q[0] - p[0], q[1] - p[1]);
  for (int it = 0; it < 200 && (hi - lo) * len > tol; ++it) {
    const long double mid = (lo + hi) / 2;
    const int sm = sgn(separable(a, p[0] + mid * (q[0] - p[0]), p[1] + mid * (q[1] - p[1])));
    if (sm == 0) {
      lo = hi = mid;
      break;
    }
    (sm == s0 ? lo : hi) = mid;
  }
  const long double s = (lo + hi) / 2;
  return {p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])};
}

ContainmentReport march(std::array<int, 2> alpha, std::array<int, 2> beta, const MarchingOptions &o,
                        std::size_t samples) {
  ContainmentReport r;
  r.first = alpha;
  r.second = beta;
  r.dimension = 2;
  const Evaluator first(laplace_hermite({alpha[0], alpha[1]}, 2));
  const Evaluator second(laplace_hermite({beta[0], beta[1]}, 2));
  const long double R = o.box_half_width;
  const std::size_t N = 2 * samples + 1;
  const long double h = R / static_cast<long double>(samples);
  std::vector<long double> xs(N), h2(N), h0(N), v2(N), v0(N);
  for (std::size_t i = 0; i < N; ++i) {
    xs[i] = -R + h * static_cast<long double>(i);
    h2[i] = hermite_value(alpha[0] + 2, xs[i]);
    h0[i] = hermite_value(alpha[0], xs[i]);
    v2[i] = hermite_value(alpha[1] + 2, xs[i]);
    v0[i] = hermite_value(alpha[1], xs[i]);
  }
  const auto node = [&](std::size_t i, std::size_t j) { return h2[i] * v0[j] + h0[i] * v2[j]; };

  double best = -1, least = std::numeric_limits<double>::infinity(), worst_residual = 0;
  std::size_t rejected = 0;
  const auto consider = [&](std::array<long double, 2> p) {
    const double res = static_cast<double>(first.relative(p[0], p[1]));
    if (!(res < o.zero_residual)) {
      ++rejected;
      return;
    }
    ++r.points;
    worst_residual = std::max(worst_residual, res);
    const double s = static_cast<double>(second.relative(p[0], p[1]));
    least = std::min(least, s);
    if (s > best) {
      best = s;
      r.witness = {static_cast<double>(p[0]), static_cast<double>(p[1])};
      r.first_value = res;
      r.second_value = s;
    }
  };
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const long double v = node(i, j);
      if (v == 0) {
        consider({xs[i], xs[j]});
        continue;
      }
      if (i + 1 < N && sgn(node(i + 1, j)) == -sgn(v))
        consider(bisect_edge(alpha, {xs[i], xs[j]}, {xs[i + 1], xs[j]}, o.refine_tolerance));
      if (j + 1 < N && sgn(node(i, j + 1)) == -sgn(v))
        consider(bisect_edge(alpha, {xs[i], xs[j]}, {xs[i], xs[j + 1]}, o.refine_tolerance));
    }
  r.min_abs_value = r.points ? least : 0;
  std::ostringstream os;
  os << "samples=" << samples << " points=" << r.points << " rejected=" << rejected
     << " max_zero_residual=" << worst_residual;
  r.detail = os.str();
  if (r.points == 0) {
    r.verdict = Containment::inconclusive;
    r.detail += "; no zero curve in the box, enlarge box_half_width";
  } else if (best > o.separation) {
    r.verdict = Containment::not_contained;
  } else {
    r.verdict = Containment::inconclusive;
  }
  return r;
}

} // namespace

ContainmentReport check_2d_laplace_hermite(std::array<int, 2> alpha, std::array<int, 2> beta,
                                           MarchingOptions options) {
  if (alpha == beta)
    throw Error("domain", "check_2d_laplace_hermite needs alpha != beta");
  if (alpha[0] < 0 || alpha[1] < 0 || beta[0] < 0 || beta[1] < 0)
    throw Error("domain", "multi-indices must be nonnegative");
  if (!(options.box_half_width > 0) || options.samples < 2)
    throw Error("config", "marching squares needs R > 0 and at least 2 samples");
  auto r = march(alpha, beta, options, options.samples);
  // Containment is never asserted: a flat sample set earns one refinement retry, then stays inconclusive.
  if (r.verdict == Containment::inconclusive && r.points > 0) {
    r = march(alpha, beta, options, 2 * options.samples);
    if (r.verdict == Containment::inconclusive)
      r.detail += "; all sampled |L_beta| below separation after refinement";
  }
  return r;
}

std::vector<ContainmentReport> sweep_2d_laplace_hermite(std::array<int, 2> alpha, int max_order,
                                                        MarchingOptions options, unsigned workers) {
  std::vector<std::pair<std::array<int, 2>, std::array<int, 2>>> pairs;
  for (int total = 0; total <= max_order; ++total)
    for (int b1 = total; b1 >= 0; --b1) {
      const std::array<int, 2> beta{b1, total - b1};
      if (beta == alpha)
        continue;
      pairs.push_back({alpha, beta});
      pairs.push_back({beta, alpha});
    }
  std::vector<ContainmentReport> out(pairs.size());
  parallel_for(
      pairs.size(), [&](std::size_t i) { out[i] = check_2d_laplace_hermite(pairs[i].first, pairs[i].second, options); },
      workers);
  return out;
}

std::array<double, 3> counterexample_residuals(double a, double b, double x) {
  const double e = std::exp(-x * x / 2);
  const double s3 = std::sqrt(3.0);
  return {-x * e + a * x + b, (x * x - 1) * e + a, s3 * std::exp(-1.5) - s3 * a + b};
}

namespace {

bool newton(Eigen::Vector3d &v, int &iterations) {
  for (iterations = 0; iterations < 100; ++iterations) {
    const double a = v[0], b = v[1], x = v[2];
    const auto r = counterexample_residuals(a, b, x);
    const Eigen::Vector3d F(r[0], r[1], r[2]);
    if (!F.allFinite())
      return false;
    if (F.cwiseAbs().maxCoeff() < 1e-15)
      return true;
    const double e = std::exp(-x * x / 2);
    Eigen::Matrix3d J;
    J << x, 1, (x * x - 1) * e + a, 1, 0, (3 * x - x * x * x) * e, -std::sqrt(3.0), 1, 0;
    const Eigen::Vector3d step = J.fullPivLu().solve(F);
    if (!step.allFinite())
      return false;
    v -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-17)
      return true;
  }
  return true;
}

double norm_inf(const Eigen::Vector3d &v) {
  const auto r = counterexample_residuals(v[0], v[1], v[2]);
  return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
}

bool acceptable(const Eigen::Vector3d &v) {
  return v.allFinite() && norm_inf(v) < 1e-13 && std::abs(v[2] + std::sqrt(3.0)) > 1e-6;
}

} // namespace

CounterexampleSolution solve_counterexample_system() {
  CounterexampleSolution s;
  Eigen::Vector3d v(0.4, 0.3, 0.7);
  int it = 0;
  newton(v, it);
  if (!acceptable(v)) {
    log_warning("counterexample Newton failed from (0.4, 0.3, 0.7); trying a start grid");
    s.fallback_used = true;
    bool found = false;
    for (double a0 = -1; a0 <= 1 && !found; a0 += 0.25)
      for (double b0 = -1; b0 <= 1 && !found; b0 += 0.25)
        for (double x0 = -3; x0 <= 3 && !found; x0 += 0.25) {
          Eigen::Vector3d w(a0, b0, x0);
          newton(w, it);
          if (acceptable(w)) {
            v = w;
            found = true;
          }
        }
    if (!found)
      throw Error("no_convergence", "counterexample system: Newton failed from every start");
  }
  s.a = v[0];
  s.b = v[1];
  s.x_star = v[2];
  s.residual = norm_inf(v);
  s.iterations = it;
  return s;
}

namespace {

struct ZeroLists {
  std::vector<double> regular, all;
};

ZeroLists scan(const PointEvaluator &f) {
  const auto g = UniformGrid::span(-6, 6, 12001);
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.count));
  for (std::size_t i = 0; i < g.count; ++i)
    v[static_cast<Eigen::Index>(i)] = f(g.at(i));
  ZeroLists z;
  for (const auto &p : find_zeros(SampledSignal(g, v), f)) {
    z.all.push_back(p.x);
    if (p.kind == ZeroKind::regular)
      z.regular.push_back(p.x);
  }
  return z;
}

bool only_minus_sqrt3(const std::vector<double> &z) {
  return z.size() == 1 && std::abs(z[0] + std::sqrt(3.0)) < 1e-6;
}

} // namespace

WeakGenericityReport verify_weak_genericity_failure(double c, double sigma) {
  if (!(c >= 0) || !(sigma > 0))
    throw Error("domain", "verify_weak_genericity_failure needs c >= 0 and sigma > 0");
  WeakGenericityReport rep;
  rep.c = c;
  rep.sigma = sigma;
  rep.solution = solve_counterexample_system();
  const auto w = Wavelet::custom(rep.solution.a, rep.solution.b);
  const PointEvaluator psi = [w](double x) { return eval(w, x); };
  const auto perturbed = [w, sigma](double cc) {
    return PointEvaluator([w, sigma, cc](double x) {
      return eval(w, x) + cc / (sigma * sigma) * eval_derivative(w, 2, x);
    });
  };
  const auto base = scan(psi);
  const auto pert = scan(perturbed(c));
  rep.regular_psi = base.regular;
  rep.all_psi = base.all;
  rep.regular_perturbed = pert.regular;
  rep.all_perturbed = pert.all;
  rep.indistinguishable = only_minus_sqrt3(base.regular) && only_minus_sqrt3(pert.regular);
  rep.psi2_zeros = scan([w](double x) { return eval_derivative(w, 2, x); }).all;

  // Bisection on c for the edge of the indistinguishability window.
  const auto holds = [&](double cc) { return only_minus_sqrt3(scan(perturbed(cc)).regular); };
  double lo = 0, hi = sigma * sigma;
  while (holds(hi) && hi < 1e12)
    hi *= 2;
  if (holds(hi)) {
    rep.c_max = std::numeric_limits<double>::infinity();
  } else {
    for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (holds(mid) ? lo : hi) = mid;
    }
    rep.c_max = lo;
  }
  if (!rep.indistinguishable)
    log_warning("regular zero sets differ at c = " + std::to_string(c) + "; empirical threshold c_max = " +
                std::to_string(rep.c_max));
  return rep;
}

} // namespace marr
