#include "marr/signals.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/FFT>

#include "marr/errors.hpp"
#include "marr/log.hpp"

namespace marr {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

// Quadrature span in units of sigma beyond which Gaussian-factor kernels are negligible.
constexpr double kQuadratureSpan = 12.0;

double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); } // 1 - Phi(z)

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i)
    r *= i;
  return r;
}

// E[(c + s Z)^k], Z standard normal, for k = 0..kmax.
std::vector<double> shifted_normal_moments(double c, double s, int kmax) {
  std::vector<double> m(static_cast<std::size_t>(std::max(kmax, 0) + 1), 0.0);
  m[0] = 1;
  if (kmax >= 1)
    m[1] = c;
  for (int k = 2; k <= kmax; ++k)
    m[k] = c * m[k - 1] + (k - 1) * s * s * m[k - 2];
  return m;
}

// <delta^{(order)}(x - a), x^n> = (-1)^order n!/(n-order)! a^(n-order).
double atom_moment(const Atom &a, int n) {
  if (n < a.order)
    return 0;
  double falling = 1;
  for (int i = 0; i < a.order; ++i)
    falling *= (n - i);
  const double sign = (a.order % 2 == 0) ? 1.0 : -1.0;
  return a.weight * sign * falling * std::pow(a.x, n - a.order);
}

// int_a^b x^m (1+x)^{-p} dx for 0 <= a <= b, by binomial expansion in t = 1 + x.
double positive_tail_moment(double p, int m, double a, double b) {
  if (b <= a)
    return 0;
  const double ta = 1 + a, tb = 1 + b;
  double acc = 0;
  for (int j = 0; j <= m; ++j) {
    const double e = j - p + 1;
    double piece;
    if (std::abs(e) < 1e-14)
      piece = std::log(tb / ta);
    else
      piece = (std::pow(tb, e) - std::pow(ta, e)) / e;
    acc += binomial(m, j) * (((m - j) % 2 == 0) ? 1.0 : -1.0) * piece;
  }
  return acc;
}

std::vector<Interval> normalized_support(const AlgebraicTailDensity &h) {
  std::vector<Interval> s = h.support;
  std::sort(s.begin(), s.end(), [](const Interval &a, const Interval &b) { return a.lo < b.lo; });
  return s;
}

void check_tail(const AlgebraicTailDensity &h) {
  // Integrability needs p > 1 only on unbounded support.
  if (h.support.empty() ? !(h.p > 1) : !std::isfinite(h.p))
    throw Error("domain", "algebraic tail requires p > 1 on unbounded support");
  if (!(h.amplitude > 0))
    throw Error("domain", "algebraic tail requires a positive amplitude");
  for (const auto &i : h.support)
    if (!(i.lo < i.hi) || !std::isfinite(i.lo) || !std::isfinite(i.hi))
      throw Error("domain", "algebraic tail support intervals must be finite and nonempty");
}

using Expansion = GaussianExpansion;

double expansion_gaussian_part(const Expansion &e, double u) {
  double v = 0;
  for (const auto &[k, c] : e.terms)
    v += c * gaussian_derivative(k, u, e.sigma);
  return v;
}

// Affine part of the kernel convolved against (mu0, mu1): p0 mu0 + p1 (x mu0 - mu1).
double affine_part(const Expansion &e, double x, double mu0, double mu1) {
  return e.p0 * mu0 + e.p1 * (x * mu0 - mu1);
}

bool has_affine(const Expansion &e) { return e.p0 != 0 || e.p1 != 0; }

PointEvaluator point_mass_evaluator(const PointMassDistribution &d, const Expansion &e) {
  return [d, e](double x) {
    double v = 0;
    for (const auto &a : d.atoms) {
      for (const auto &[k, c] : e.terms)
        v += a.weight * c * gaussian_derivative(k + a.order, x - a.x, e.sigma);
      if (a.order == 0)
        v += a.weight * (e.p0 + e.p1 * (x - a.x));
      else if (a.order == 1)
        v += a.weight * e.p1;
    }
    return v;
  };
}

PointEvaluator mixture_evaluator(const GaussianMixture &g, const Expansion &e) {
  double mu0 = 0, mu1 = 0;
  if (has_affine(e)) {
    const auto m = moments(Signal(g), 1);
    mu0 = m.mu[0];
    mu1 = m.mu[1];
  }
  return [g, e, mu0, mu1](double x) {
    double v = 0;
    for (const auto &t : g.terms)
      for (const auto &[k, c] : e.terms) {
        const double s = std::hypot(t.sigma, e.sigma);
        v += t.weight * c * gaussian_derivative(k + t.order, x - t.center, s);
      }
    return v + affine_part(e, x, mu0, mu1);
  };
}

PointEvaluator piecewise_linear_evaluator(const PiecewiseLinear &g, const Expansion &e) {
  struct Segment {
    double a, b, ya, slope;
  };
  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
    const double w = g.x[i + 1] - g.x[i];
    if (w <= 0)
      continue;
    segs.push_back({g.x[i], g.x[i + 1], g.y[i], (g.y[i + 1] - g.y[i]) / w});
  }
  const PointMassDistribution atoms = g.second_derivative();
  double mu0 = 0, mu1 = 0;
  if (has_affine(e)) {
    const auto m = moments(Signal(g), 1);
    mu0 = m.mu[0];
    mu1 = m.mu[1];
  }
  return [segs, atoms, e, mu0, mu1](double x) {
    const double s = e.sigma;
    double v = 0;
    for (const auto &[k, c] : e.terms) {
      if (k >= 2) {
        for (const auto &a : atoms.atoms)
          v += c * a.weight * gaussian_derivative(k - 2, x - a.x, s);
      } else if (k == 1) {
        for (const auto &sg : segs)
          v += c * sg.slope * normal_cdf_difference((x - sg.a) / s, (x - sg.b) / s);
      } else {
        for (const auto &sg : segs) {
          const double dphi = normal_cdf_difference((x - sg.a) / s, (x - sg.b) / s);
          const double dg = gaussian_derivative(0, x - sg.a, s) - gaussian_derivative(0, x - sg.b, s);
          v += c * ((sg.ya + sg.slope * (x - sg.a)) * dphi + sg.slope * s * s * dg);
        }
      }
    }
    return v + affine_part(e, x, mu0, mu1);
  };
}

PointEvaluator tail_evaluator(const AlgebraicTailDensity &h, const Expansion &e, double tol) {
  check_tail(h);
  double mu0 = 0, mu1 = 0;
  if (has_affine(e)) {
    const auto m = moments(Signal(h), 1);
    mu0 = m.mu[0];
    mu1 = m.mu[1];
  }
  std::vector<Interval> support = normalized_support(h);
  if (support.empty())
    support.push_back({-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()});
  return [h, e, mu0, mu1, support, tol](double x) {
    using boost::math::quadrature::gauss_kronrod;
    const double span = kQuadratureSpan * e.sigma;
    const double lo = x - span, hi = x + span;
    double v = 0;
    auto integrand = [&](double y) { return h(y) * expansion_gaussian_part(e, x - y); };
    for (const auto &iv : support) {
      const double a = std::max(lo, iv.lo), b = std::min(hi, iv.hi);
      if (!(a < b))
        continue;
      std::vector<double> cuts{a, b};
      for (double c : {0.0, x, x - 3 * e.sigma, x + 3 * e.sigma})
        if (c > a && c < b)
          cuts.push_back(c);
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        v += gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 15, tol);
    }
    return v + affine_part(e, x, mu0, mu1);
  };
}

SampledSignal fft_convolve(const SampledSignal &f, const std::function<double(double)> &kernel,
                           const UniformGrid &out, double p0, double p1) {
  const double h = f.grid.spacing;
  const double lo = std::min(f.grid.origin, out.origin);
  const double hi = std::max(f.grid.back(), out.back());
  const long i0 = static_cast<long>(std::floor((lo - f.grid.origin) / h + 1e-9));
  const long i1 = static_cast<long>(std::ceil((hi - f.grid.origin) / h - 1e-9));
  const std::size_t n = static_cast<std::size_t>(i1 - i0 + 1);
  const UniformGrid ext{f.grid.origin + static_cast<double>(i0) * h, h, n};

  std::size_t size = 1;
  while (size < 3 * n)
    size <<= 1;
  std::vector<double> fe(size, 0.0), kv(size, 0.0);
  for (std::size_t j = 0; j < f.grid.count; ++j)
    fe[j + static_cast<std::size_t>(-i0)] = f.values[static_cast<Eigen::Index>(j)];
  for (long d = -static_cast<long>(n - 1); d <= static_cast<long>(n - 1); ++d)
    kv[static_cast<std::size_t>(d + static_cast<long>(n) - 1)] = kernel(static_cast<double>(d) * h);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> F, K;
  fft.fwd(F, fe);
  fft.fwd(K, kv);
  for (std::size_t i = 0; i < F.size(); ++i)
    F[i] *= K[i];
  std::vector<double> conv;
  fft.inv(conv, F);

  Eigen::VectorXd ye(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    ye[static_cast<Eigen::Index>(i)] = h * conv[i + n - 1];

  if (p0 != 0 || p1 != 0) {
    // Discrete trapezoid moments for the non-decaying affine kernel part.
    double m0 = 0, m1 = 0;
    for (std::size_t j = 0; j < f.grid.count; ++j) {
      const double w = (j == 0 || j + 1 == f.grid.count) ? 0.5 * h : h;
      m0 += w * f.values[static_cast<Eigen::Index>(j)];
      m1 += w * f.values[static_cast<Eigen::Index>(j)] * f.grid.at(j);
    }
    for (std::size_t i = 0; i < n; ++i)
      ye[static_cast<Eigen::Index>(i)] += p0 * m0 + p1 * (ext.at(i) * m0 - m1);
  }

  const SampledSignal full(ext, ye);
  Eigen::VectorXd yo(static_cast<Eigen::Index>(out.count));
  for (std::size_t i = 0; i < out.count; ++i) {
    const double x = out.at(i);
    const double t = (x - ext.origin) / h;
    const double r = std::round(t);
    if (std::abs(t - r) < 1e-9 && r >= 0 && r < static_cast<double>(n))
      yo[static_cast<Eigen::Index>(i)] = ye[static_cast<Eigen::Index>(r)];
    else
      yo[static_cast<Eigen::Index>(i)] = full.interpolate(x);
  }
  return SampledSignal(out, yo);
}

} // namespace

Eigen::VectorXd UniformGrid::points() const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i)
    p[static_cast<Eigen::Index>(i)] = at(i);
  return p;
}

UniformGrid UniformGrid::span(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo))
    throw Error("domain", "grid needs hi > lo and at least 2 points");
  return UniformGrid{lo, (hi - lo) / static_cast<double>(count - 1), count};
}

SampledSignal::SampledSignal(UniformGrid g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
  if (!(grid.spacing > 0) || grid.count < 2)
    throw Error("domain", "sampled signal needs spacing > 0 and at least 2 samples");
  if (static_cast<std::size_t>(values.size()) != grid.count)
    throw Error("domain", "sampled signal value count does not match its grid");
}

double SampledSignal::interpolate(double x) const {
  const double t = (x - grid.origin) / grid.spacing;
  const double last = static_cast<double>(grid.count - 1);
  if (t < -1e-9 || t > last + 1e-9)
    throw Error("extrapolation", "interpolation point " + std::to_string(x) + " outside the sampled range");
  const double tc = std::clamp(t, 0.0, last);
  std::size_t i = static_cast<std::size_t>(std::floor(tc));
  if (i >= grid.count - 1)
    i = grid.count - 2;
  const double s = tc - static_cast<double>(i);
  const auto at = [&](long k) {
    const long n = static_cast<long>(grid.count);
    if (k < 0)
      return 2 * values[0] - values[1];
    if (k >= n)
      return 2 * values[n - 1] - values[n - 2];
    return values[k];
  };
  const long k = static_cast<long>(i);
  const double y0 = at(k - 1), y1 = at(k), y2 = at(k + 1), y3 = at(k + 2);
  // Catmull-Rom cubic through the four neighbours.
  return y1 + 0.5 * s * (y2 - y0 + s * (2 * y0 - 5 * y1 + 4 * y2 - y3 + s * (3 * (y1 - y2) + y3 - y0)));
}

double PiecewiseLinear::operator()(double t) const {
  if (x.empty() || t <= x.front() || t >= x.back())
    return 0;
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double w = x[i + 1] - x[i];
  if (w <= 0)
    return y[i + 1];
  return y[i] + (y[i + 1] - y[i]) * (t - x[i]) / w;
}

PointMassDistribution PiecewiseLinear::second_derivative() const {
  PointMassDistribution d;
  double left_slope = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double right_slope = 0;
    if (i + 1 < x.size() && x[i + 1] > x[i])
      right_slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    const double jump = right_slope - left_slope;
    if (jump != 0)
      d.atoms.push_back({x[i], 0, jump});
    left_slope = right_slope;
  }
  return d;
}

double AlgebraicTailDensity::operator()(double t) const {
  if (!support.empty()) {
    bool inside = false;
    for (const auto &i : support)
      if (t >= i.lo && t <= i.hi) {
        inside = true;
        break;
      }
    if (!inside)
      return 0;
  }
  return amplitude * std::pow(1 + std::abs(t), -p);
}

Signal gaussian_signal(double center, double sigma, double weight) {
  if (!(sigma > 0))
    throw Error("domain", "Gaussian sigma must be positive");
  return GaussianMixture{{GaussianTerm{center, sigma, 0, weight}}};
}

Signal delta_signal(double x, int order, double weight) { return PointMassDistribution{{Atom{x, order, weight}}}; }

Signal zero_signal() { return PointMassDistribution{}; }

Signal scaled(double c, const Signal &f) {
  return CompositeSignal{{WeightedSignal{c, std::make_shared<const Signal>(f)}}};
}

Signal sum(const std::vector<WeightedSignal> &parts) { return CompositeSignal{parts}; }

bool is_zero_signal(const Signal &f) {
  return std::visit(overloaded{
                        [](const PointMassDistribution &d) {
                          return std::all_of(d.atoms.begin(), d.atoms.end(),
                                             [](const Atom &a) { return a.weight == 0; });
                        },
                        [](const GaussianMixture &g) {
                          return std::all_of(g.terms.begin(), g.terms.end(),
                                             [](const GaussianTerm &t) { return t.weight == 0; });
                        },
                        [](const SampledSignal &s) { return s.values.isZero(0.0); },
                        [](const PiecewiseLinear &g) {
                          return std::all_of(g.y.begin(), g.y.end(), [](double v) { return v == 0; });
                        },
                        [](const AlgebraicTailDensity &) { return false; },
                        [](const CompositeSignal &c) {
                          return std::all_of(c.parts.begin(), c.parts.end(), [](const WeightedSignal &w) {
                            return w.weight == 0 || is_zero_signal(*w.signal);
                          });
                        },
                    },
                    f.value);
}

MomentVector MomentVector::normalized() const {
  if (n0 < 0)
    throw Error("domain", "cannot normalize a vanishing moment vector");
  MomentVector out = *this;
  const double ref = mu.at(static_cast<std::size_t>(n0));
  if (ref == 0)
    throw Error("domain", "normalizing moment is zero");
  for (auto &m : out.mu)
    m /= ref;
  out.mu[static_cast<std::size_t>(n0)] = 1.0;
  out.normalization = Normalization::normalized;
  return out;
}

int first_nonzero(const std::vector<double> &mu, double relative_tol) {
  double scale = 0;
  for (double m : mu)
    scale = std::max(scale, std::abs(m));
  if (scale == 0)
    return -1;
  for (std::size_t n = 0; n < mu.size(); ++n)
    if (std::abs(mu[n]) > relative_tol * scale)
      return static_cast<int>(n);
  return -1;
}

double tail_interval_moment(double p, double amplitude, int m, double lo, double hi) {
  if (!(hi > lo))
    return 0;
  double v = 0;
  if (hi > 0)
    v += positive_tail_moment(p, m, std::max(lo, 0.0), hi);
  if (lo < 0)
    v += ((m % 2 == 0) ? 1.0 : -1.0) * positive_tail_moment(p, m, std::max(-hi, 0.0), -lo);
  return amplitude * v;
}

std::optional<int> moment_budget(const Signal &f) {
  return std::visit(overloaded{
                        [](const AlgebraicTailDensity &h) -> std::optional<int> {
                          if (!h.support.empty())
                            return std::nullopt;
                          // finite iff n < p - 1
                          return static_cast<int>(std::ceil(h.p - 1)) - 1;
                        },
                        [](const CompositeSignal &c) -> std::optional<int> {
                          std::optional<int> best;
                          for (const auto &w : c.parts) {
                            if (w.weight == 0)
                              continue;
                            const auto b = moment_budget(*w.signal);
                            if (b && (!best || *b < *best))
                              best = b;
                          }
                          return best;
                        },
                        [](const auto &) -> std::optional<int> { return std::nullopt; },
                    },
                    f.value);
}

MomentVector moments(const Signal &f, int n_max) {
  if (n_max < 0)
    throw Error("domain", "moments: n_max must be nonnegative");
  if (const auto budget = moment_budget(f); budget && n_max > *budget)
    throw Error("divergent_moment", "moment of order " + std::to_string(*budget + 1) +
                                        " diverges (finite moments end at order " + std::to_string(*budget) + ")");
  MomentVector out;
  out.mu.assign(static_cast<std::size_t>(n_max + 1), 0.0);
  std::visit(overloaded{
                 [&](const PointMassDistribution &d) {
                   for (const auto &a : d.atoms)
                     for (int n = 0; n <= n_max; ++n)
                       out.mu[n] += atom_moment(a, n);
                 },
                 [&](const GaussianMixture &g) {
                   for (const auto &t : g.terms) {
                     const auto m = shifted_normal_moments(t.center, t.sigma, n_max);
                     for (int n = t.order; n <= n_max; ++n) {
                       double falling = 1;
                       for (int i = 0; i < t.order; ++i)
                         falling *= (n - i);
                       const double sign = (t.order % 2 == 0) ? 1.0 : -1.0;
                       out.mu[n] += t.weight * sign * falling * m[n - t.order];
                     }
                   }
                 },
                 [&](const SampledSignal &s) {
                   const double h = s.grid.spacing;
                   for (std::size_t j = 0; j < s.grid.count; ++j) {
                     const double w = (j == 0 || j + 1 == s.grid.count) ? 0.5 * h : h;
                     const double x = s.grid.at(j);
                     double xn = 1;
                     for (int n = 0; n <= n_max; ++n, xn *= x)
                       out.mu[n] += w * s.values[static_cast<Eigen::Index>(j)] * xn;
                   }
                 },
                 [&](const PiecewiseLinear &g) {
                   // <g, x^n> = <g'', x^{n+2} / ((n+1)(n+2))>
                   for (const auto &a : g.second_derivative().atoms)
                     for (int n = 0; n <= n_max; ++n)
                       out.mu[n] += a.weight * std::pow(a.x, n + 2) / ((n + 1.0) * (n + 2.0));
                 },
                 [&](const AlgebraicTailDensity &h) {
                   check_tail(h);
                   if (h.support.empty()) {
                     for (int n = 0; n <= n_max; n += 2)
                       out.mu[n] = 2 * h.amplitude * factorial(n) *
                                   std::exp(std::lgamma(h.p - n - 1) - std::lgamma(h.p));
                   } else {
                     for (const auto &iv : h.support)
                       for (int n = 0; n <= n_max; ++n)
                         out.mu[n] += tail_interval_moment(h.p, h.amplitude, n, iv.lo, iv.hi);
                   }
                 },
                 [&](const CompositeSignal &c) {
                   for (const auto &w : c.parts) {
                     const auto m = moments(*w.signal, n_max);
                     for (int n = 0; n <= n_max; ++n)
                       out.mu[n] += w.weight * m.mu[n];
                   }
                 },
             },
             f.value);
  out.n0 = first_nonzero(out.mu);
  return out;
}

PointMassDistribution j_distribution(double alpha, double beta) {
  if (!(0 < std::abs(beta) && std::abs(beta) < alpha && alpha < 1))
    throw Error("domain", "j_distribution requires 0 < |beta| < alpha < 1");
  // Positive atoms at +-(1 + beta + alpha), negative at +-(1 + beta - alpha).
  PointMassDistribution d;
  d.atoms = {Atom{-(1 + beta + alpha), 0, 1.0}, Atom{-(1 + beta - alpha), 0, -1.0},
             Atom{1 + beta - alpha, 0, -1.0}, Atom{1 + beta + alpha, 0, 1.0}};
  return d;
}

PiecewiseLinear second_antiderivative(const PointMassDistribution &d) {
  PiecewiseLinear g;
  if (d.atoms.empty())
    return g;
  std::vector<Atom> atoms = d.atoms;
  double mu0 = 0, mu1 = 0, scale = 0;
  for (const auto &a : atoms) {
    if (a.order != 0)
      throw Error("domain", "second_antiderivative requires order-0 atoms");
    mu0 += a.weight;
    mu1 += a.weight * a.x;
    scale = std::max(scale, std::abs(a.weight) * std::max(1.0, std::abs(a.x)));
  }
  if (std::abs(mu0) > 1e-12 * std::max(1.0, scale) || std::abs(mu1) > 1e-12 * std::max(1.0, scale))
    throw Error("domain", "second_antiderivative: nonvanishing mu_0 or mu_1 admits no compactly supported antiderivative");
  std::sort(atoms.begin(), atoms.end(), [](const Atom &a, const Atom &b) { return a.x < b.x; });
  std::vector<std::pair<double, double>> merged;
  for (const auto &a : atoms) {
    if (!merged.empty() && merged.back().first == a.x)
      merged.back().second += a.weight;
    else
      merged.emplace_back(a.x, a.weight);
  }
  double slope = 0, value = 0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (i > 0)
      value += slope * (merged[i].first - merged[i - 1].first);
    g.x.push_back(merged[i].first);
    g.y.push_back(value);
    slope += merged[i].second;
  }
  g.y.front() = 0;
  g.y.back() = 0;
  return g;
}

double evaluate(const Signal &f, double x) {
  return std::visit(overloaded{
                        [&](const PointMassDistribution &d) -> double {
                          if (d.atoms.empty())
                            return 0;
                          throw Error("domain", "point masses have no pointwise values");
                        },
                        [&](const GaussianMixture &g) {
                          double v = 0;
                          for (const auto &t : g.terms)
                            v += t.weight * gaussian_derivative(t.order, x - t.center, t.sigma);
                          return v;
                        },
                        [&](const SampledSignal &s) {
                          if (x < s.grid.origin || x > s.grid.back())
                            return 0.0;
                          return s.interpolate(x);
                        },
                        [&](const PiecewiseLinear &g) { return g(x); },
                        [&](const AlgebraicTailDensity &h) { return h(x); },
                        [&](const CompositeSignal &c) {
                          double v = 0;
                          for (const auto &w : c.parts)
                            v += w.weight * evaluate(*w.signal, x);
                          return v;
                        },
                    },
                    f.value);
}

std::optional<Interval> effective_support(const Signal &f) {
  return std::visit(
      overloaded{
          [](const PointMassDistribution &d) -> std::optional<Interval> {
            if (d.atoms.empty())
              return Interval{0, 0};
            Interval r{d.atoms[0].x, d.atoms[0].x};
            for (const auto &a : d.atoms)
              r = {std::min(r.lo, a.x), std::max(r.hi, a.x)};
            return r;
          },
          [](const GaussianMixture &g) -> std::optional<Interval> {
            if (g.terms.empty())
              return Interval{0, 0};
            Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
            for (const auto &t : g.terms)
              r = {std::min(r.lo, t.center - 12 * t.sigma), std::max(r.hi, t.center + 12 * t.sigma)};
            return r;
          },
          [](const SampledSignal &s) -> std::optional<Interval> { return Interval{s.grid.origin, s.grid.back()}; },
          [](const PiecewiseLinear &g) -> std::optional<Interval> {
            if (g.x.empty())
              return Interval{0, 0};
            return Interval{g.x.front(), g.x.back()};
          },
          [](const AlgebraicTailDensity &h) -> std::optional<Interval> {
            if (h.support.empty())
              return std::nullopt;
            Interval r{h.support[0].lo, h.support[0].hi};
            for (const auto &i : h.support)
              r = {std::min(r.lo, i.lo), std::max(r.hi, i.hi)};
            return r;
          },
          [](const CompositeSignal &c) -> std::optional<Interval> {
            std::optional<Interval> r;
            for (const auto &w : c.parts) {
              const auto s = effective_support(*w.signal);
              if (!s)
                return std::nullopt;
              if (s->lo == s->hi && s->lo == 0 && is_zero_signal(*w.signal))
                continue;
              r = r ? Interval{std::min(r->lo, s->lo), std::max(r->hi, s->hi)} : *s;
            }
            return r ? r : std::optional<Interval>(Interval{0, 0});
          },
      },
      f.value);
}

double normal_cdf_difference(double u, double v) {
  if (u < v)
    return -normal_cdf_difference(v, u);
  if (v >= 0)
    return upper_tail(v) - upper_tail(u);
  if (u <= 0)
    return upper_tail(-u) - upper_tail(-v);
  return 1 - upper_tail(u) - upper_tail(-v);
}

std::optional<PointEvaluator> convolution_evaluator(const Signal &f, const ScaledKernel &k, int n,
                                                    ConvolutionOptions options) {
  if (k.base.dimension != 1)
    throw Error("unsupported_dimension", "1-D convolution requires a 1-D kernel");
  const Expansion e = gaussian_expansion(k, n);
  return std::visit(overloaded{
                        [&](const PointMassDistribution &d) -> std::optional<PointEvaluator> {
                          return point_mass_evaluator(d, e);
                        },
                        [&](const GaussianMixture &g) -> std::optional<PointEvaluator> {
                          return mixture_evaluator(g, e);
                        },
                        [&](const SampledSignal &) -> std::optional<PointEvaluator> { return std::nullopt; },
                        [&](const PiecewiseLinear &g) -> std::optional<PointEvaluator> {
                          return piecewise_linear_evaluator(g, e);
                        },
                        [&](const AlgebraicTailDensity &h) -> std::optional<PointEvaluator> {
                          return tail_evaluator(h, e, options.quadrature_tol);
                        },
                        [&](const CompositeSignal &c) -> std::optional<PointEvaluator> {
                          std::vector<std::pair<double, PointEvaluator>> parts;
                          for (const auto &w : c.parts) {
                            auto sub = convolution_evaluator(*w.signal, k, n, options);
                            if (!sub)
                              return std::nullopt;
                            parts.emplace_back(w.weight, std::move(*sub));
                          }
                          return PointEvaluator([parts](double x) {
                            double v = 0;
                            for (const auto &[w, fn] : parts)
                              v += w * fn(x);
                            return v;
                          });
                        },
                    },
                    f.value);
}

SampledSignal convolve_with_kernel(const Signal &f, const ScaledKernel &k, const UniformGrid &grid,
                                   ConvolutionOptions options) {
  if (grid.count < 2)
    throw Error("domain", "convolution output grid needs at least 2 points");
  if (auto ev = convolution_evaluator(f, k, 0, options)) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.count));
    for (std::size_t i = 0; i < grid.count; ++i)
      v[static_cast<Eigen::Index>(i)] = (*ev)(grid.at(i));
    return SampledSignal(grid, v);
  }
  if (const auto *s = std::get_if<SampledSignal>(&f.value)) {
    if (s->grid.spacing > k.sigma / 4) {
      const std::string msg = "sampled convolution: spacing " + std::to_string(s->grid.spacing) +
                              " exceeds sigma/4 = " + std::to_string(k.sigma / 4);
      if (options.strict)
        throw Error("aliasing", msg);
      log_warning(msg);
    }
    const Expansion e = gaussian_expansion(k, 0);
    return fft_convolve(*s, [&](double u) { return expansion_gaussian_part(e, u); }, grid, e.p0, e.p1);
  }
  const auto &c = std::get<CompositeSignal>(f.value);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.count));
  for (const auto &w : c.parts)
    v += w.weight * convolve_with_kernel(*w.signal, k, grid, options).values;
  return SampledSignal(grid, v);
}

SampledSignal convolve_sampled_gaussian(const SampledSignal &f, double s, int derivative) {
  if (!(s > 0))
    throw Error("domain", "Gaussian width must be positive");
  return fft_convolve(f, [&](double u) { return gaussian_derivative(derivative, u, s); }, f.grid, 0, 0);
}

} // namespace marr
