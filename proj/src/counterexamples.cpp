#include "marr/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "marr/errors.hpp"
#include "marr/log.hpp"
#include "marr/polynomials.hpp"

namespace marr {

namespace {

// Sign of the stage-k entry of the small-scale table.
int stage_sign(int k) { return k % 2 == 1 ? 1 : -1; }

void append(PointMassDistribution &acc, const PointMassDistribution &d, double c) {
  for (auto a : d.atoms) {
    a.weight *= c;
    acc.atoms.push_back(a);
  }
}

// Value at -x_k and +x_k, x_k = sqrt(sigma_k^2 + 1).
std::array<double, 2> table_row(const PointMassDistribution &lap, double sigma) {
  const double x = std::sqrt(sigma * sigma + 1);
  return {smoothed_point_masses(lap, sigma, -x), smoothed_point_masses(lap, sigma, x)};
}

bool row_holds(const std::array<double, 2> &row, int k, double strict) {
  const int s = stage_sign(k);
  return s * row[0] > strict && s * row[1] > strict;
}

// Signs at sigma_1..sigma_n hold for the stages k = 1..n.
bool prior_holds(const PointMassDistribution &lap, const std::vector<double> &sigmas, double strict) {
  for (std::size_t k = 0; k < sigmas.size(); ++k)
    if (!row_holds(table_row(lap, sigmas[k]), static_cast<int>(k) + 1, strict))
      return false;
  return true;
}

// Exact L1 norm of a piecewise-linear function.
double l1_norm(const PiecewiseLinear &g) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
    const double dx = g.x[i + 1] - g.x[i], a = g.y[i], b = g.y[i + 1];
    if (a * b >= 0)
      s += dx * std::abs(a + b) / 2;
    else
      s += dx * (a * a + b * b) / (2 * (std::abs(a) + std::abs(b)));
  }
  return s;
}

// Edge of G + h near v = sqrt(sigma^2 + 1): the root of G''_v + Delta h * G_sigma bracketed around v.
double edge_displacement(const PointMassDistribution &lap, double sigma) {
  const double v = std::sqrt(sigma * sigma + 1);
  const PointEvaluator F = [&](double x) {
    return gaussian_derivative(2, x, v) + smoothed_point_masses(lap, sigma, x);
  };
  const double s = F(v);
  if (s == 0)
    return 0;
  const double slope = 2 * gaussian_derivative(0, v, v) / (v * v * v);
  const double linear = -s / slope;
  if (std::abs(linear) < 1e-13)
    return linear;
  // The root lies on the side opposite to sign(s) since the positive edge has positive slope.
  const double dir = s > 0 ? -1 : 1;
  double eps = 2 * std::abs(linear);
  while (eps < 0.25 && F(v + dir * eps) * s > 0)
    eps *= 2;
  if (F(v + dir * eps) * s > 0)
    return std::numeric_limits<double>::quiet_NaN();
  const double a = std::min(v, v + dir * eps), b = std::max(v, v + dir * eps);
  return bisect_sign_change(F, a, b, 1e-15) - v;
}

} // namespace

double smoothed_point_masses(const PointMassDistribution &d, double sigma, double x) {
  double v = 0;
  for (const auto &a : d.atoms)
    v += a.weight * gaussian_derivative(a.order, x - a.x, sigma);
  return v;
}

SmallScaleResult build_small_scale_counterexample(int K, SmallScaleOptions options) {
  if (K < 1)
    throw Error("domain", "build_small_scale_counterexample needs K >= 1");
  if (!(0 < -options.beta1 && -options.beta1 < options.alpha1 && options.alpha1 < 1))
    throw Error("domain", "base stage needs 0 < -beta_1 < alpha_1 < 1");
  if (!(options.shrink > 0 && options.shrink < 1))
    throw Error("config", "shrink factor must lie in (0, 1)");

  SmallScaleResult out;
  PointMassDistribution lap;

  auto record = [&](double c, double alpha, double beta, double sigma, int steps) {
    const auto J = j_distribution(alpha, beta);
    append(lap, J, c);
    out.sigmas.push_back(sigma);
    SmallScaleStage st;
    st.n = static_cast<int>(out.sigmas.size());
    st.c = c;
    st.alpha = alpha;
    st.beta = beta;
    st.sigma = sigma;
    st.h = second_antiderivative(lap);
    for (double s : out.sigmas)
      st.sign_values.push_back(table_row(lap, s)[1]);
    st.l1_increment = c * l1_norm(second_antiderivative(J));
    st.l1_expected = 4 * c * alpha * (1 + beta);
    st.shrink_steps = steps;
    out.stages.push_back(std::move(st));
  };

  // Base stage: c_1 = 1, shrink sigma_1 until the stage-1 sign holds.
  {
    const auto J = j_distribution(options.alpha1, options.beta1);
    double sigma = options.sigma_start;
    int t = 0;
    for (; t < options.budget; ++t, sigma *= options.shrink)
      if (row_holds(table_row(J, sigma), 1, options.strict))
        break;
    if (t == options.budget) {
      out.message = "stage 1: search budget exhausted";
      return out;
    }
    record(1.0, options.alpha1, options.beta1, sigma, t);
  }

  for (int k = 2; k <= K; ++k) {
    const auto &prev = out.stages.back();
    // Stage k: beta_k has sign (-1)^k, so the nearer atom to +-1 carries sign (-1)^{k+1}.
    const double beta_sign = (k % 2 == 0) ? 1.0 : -1.0;
    bool found = false;
    for (int t = 1; t <= options.budget && !found; ++t) {
      const double r = std::pow(options.shrink, t);
      const double alpha = prev.alpha * r, beta = beta_sign * alpha / 2, sigma = prev.sigma * r;
      const auto J = j_distribution(alpha, beta);
      // c_k < c_{k-1} / 2, halved until the earlier scales keep their signs.
      double c = 0.49 * prev.c;
      PointMassDistribution cand;
      bool prior = false;
      for (int j = 0; j < 60; ++j, c /= 2) {
        cand = lap;
        append(cand, J, c);
        if (prior_holds(cand, out.sigmas, options.strict)) {
          prior = true;
          break;
        }
      }
      if (prior && row_holds(table_row(cand, sigma), k, options.strict)) {
        record(c, alpha, beta, sigma, t);
        found = true;
      }
    }
    if (!found) {
      out.message = "stage " + std::to_string(k) + ": search budget exhausted";
      break;
    }
  }

  out.complete = static_cast<int>(out.stages.size()) == K;
  out.laplacian = lap;
  out.h = second_antiderivative(lap);
  out.l1_norm = l1_norm(out.h);
  out.strict = true;
  for (std::size_t k = 0; k < out.sigmas.size(); ++k) {
    out.table.push_back(table_row(lap, out.sigmas[k]));
    out.strict = out.strict && row_holds(out.table.back(), static_cast<int>(k) + 1, options.strict);
  }

  // Descending ladder through every sigma_k; the edge of G + h_K against that of G.
  const double top = 2 * out.sigmas.front(), bottom = 0.5 * out.sigmas.back();
  const std::size_t count = std::max<std::size_t>(8, options.ladder_per_stage * out.sigmas.size());
  std::vector<double> ladder;
  for (std::size_t i = 0; i < count; ++i)
    ladder.push_back(top * std::pow(bottom / top, static_cast<double>(i) / static_cast<double>(count - 1)));
  ladder.insert(ladder.end(), out.sigmas.begin(), out.sigmas.end());
  std::sort(ladder.begin(), ladder.end(), std::greater<>());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

  std::vector<LevelZeros> levels;
  for (double s : ladder) {
    const double d = edge_displacement(lap, s);
    if (!std::isfinite(d))
      continue;
    out.ladder.push_back(s);
    out.displacement.push_back(d);
    LevelZeros l;
    l.sigma = s;
    l.spacing = 0.1;
    l.zeros.push_back({std::sqrt(s * s + 1) + d, s, ZeroKind::regular});
    levels.push_back(std::move(l));
  }
  for (std::size_t i = 0; i + 1 < out.displacement.size(); ++i)
    if (out.displacement[i] * out.displacement[i + 1] < 0)
      out.crossing_sigmas.push_back(std::sqrt(out.ladder[i] * out.ladder[i + 1]));
  std::reverse(levels.begin(), levels.end());
  if (!levels.empty())
    out.traced_contours = trace_contours(levels).size();
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double tail_density(const TruncatedTailSide &s, double y) {
  return s.amplitude * std::pow(1 + std::abs(y), -(s.N + 1));
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// Quadrature of f over [a, b] split at doubling points so long tails stay resolved.
template <typename F> double integrate_doubling(F f, double a, double b, double tol = 1e-13) {
  using boost::math::quadrature::gauss_kronrod;
  double s = 0, lo = a;
  while (lo < b) {
    const double hi = std::min(b, 2 * lo + 1);
    s += gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, tol);
    lo = hi;
  }
  return s;
}

} // namespace

double TruncatedTailSide::outer() const {
  double r = 0;
  for (const auto &i : half)
    r = std::max(r, i.hi);
  return r;
}

std::vector<double> TruncatedTailSide::corrections() const {
  std::vector<double> a(static_cast<std::size_t>(N - 1), 0.0);
  for (int m = 0; m <= N - 2; m += 2) {
    double v = 0;
    for (const auto &i : half)
      v += integrate_doubling([&](double y) { return std::pow(y, m) * tail_density(*this, y); }, i.lo, i.hi);
    a[static_cast<std::size_t>(m)] = 2 * v / factorial(m);
  }
  return a;
}

std::vector<double> TruncatedTailSide::laplacian_moments() const {
  const auto a = corrections();
  std::vector<double> mu(static_cast<std::size_t>(N + 1), 0.0);
  for (int m = 0; m <= N; ++m) {
    double v = m == 2 ? 2.0 : 0.0;
    for (const auto &i : half)
      v += tail_interval_moment(N + 1, amplitude, m, i.lo, i.hi) + tail_interval_moment(N + 1, amplitude, m, -i.hi, -i.lo);
    if (m % 2 == 0 && m <= N - 2)
      v -= factorial(m) * a[static_cast<std::size_t>(m)];
    mu[static_cast<std::size_t>(m)] = v;
  }
  return mu;
}

double TruncatedTailSide::smoothed_laplacian(double sigma, double w) const {
  using boost::math::quadrature::gauss_kronrod;
  // sigma G_sigma^{(m)}(sigma w) (-sigma)^m / m! = He_m(w) G(w) / m!; even m only enter.
  constexpr int kSeries = 32;
  std::vector<double> he(static_cast<std::size_t>(N + kSeries + 1));
  for (std::size_t m = 0; m < he.size(); ++m)
    he[m] = hermite_value(static_cast<int>(m), w) / factorial(static_cast<int>(m));
  const double g = gaussian(w);
  // Pair integrand over y > 0 in u = y / sigma, scaled by sigma.
  auto pair = [&](double u) {
    if (u < 0.1) {
      double s = 0, p = std::pow(u, N);
      for (int m = N; m <= N + kSeries; m += 2, p *= u * u)
        s += p * he[static_cast<std::size_t>(m)];
      return 2 * s * g;
    }
    double s = 0, p = 1;
    for (int m = 0; m <= N - 2; m += 2, p *= u * u)
      s += p * he[static_cast<std::size_t>(m)];
    return gaussian(w - u) + gaussian(w + u) - 2 * s * g;
  };
  double R = 0;
  for (const auto &iv : half) {
    std::vector<double> cuts{iv.lo / sigma, iv.hi / sigma};
    for (double c : {0.1, w - 8, w, w + 8})
      if (c > cuts[0] && c < cuts[1])
        cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double lo = cuts[i];
      while (lo < cuts[i + 1]) {
        const double hi = std::min(cuts[i + 1], std::max(2 * lo, lo + 0.05));
        R += gauss_kronrod<double, 31>::integrate(
            [&](double u) { return tail_density(*this, sigma * u) * pair(u); }, lo, hi, 8, 1e-12);
        lo = hi;
      }
    }
  }
  // R carries the factor sigma (dy = sigma du) over sigma (G_sigma = G / sigma).
  const double lead = (w - 1) * (w + 1) * g / (sigma * sigma * sigma);
  return lead + R;
}

namespace {

struct HalfStepContext {
  int N;
  int orientation;
  const AlgebraicDecayOptions &opt;
};

// Odd i: the last raised side is g; s F_f < 0 < s F_g. Even i: reversed.
bool split_holds(const AlgebraicWitness &wt, int orientation, double strict, int N) {
  const double scale = std::pow(wt.sigma, -(N + 1)) * gaussian(wt.w);
  const double f = orientation * wt.f_value / scale, g = orientation * wt.g_value / scale;
  if (wt.i % 2 == 1)
    return f < -strict && g > strict;
  return f > strict && g < -strict;
}

AlgebraicWitness evaluate_witness(int i, double w, double sigma, const TruncatedTailSide &f,
                                  const TruncatedTailSide &g, int orientation, double strict) {
  AlgebraicWitness wt;
  wt.i = i;
  wt.w = w;
  wt.sigma = sigma;
  wt.f_value = f.smoothed_laplacian(sigma, w);
  wt.g_value = g.smoothed_laplacian(sigma, w);
  wt.strict = split_holds(wt, orientation, strict, f.N);
  return wt;
}

// Scans sigma upward for a w between the two edges near 1 with the required split.
std::optional<AlgebraicWitness> find_witness(int i, double sigma_from, const TruncatedTailSide &f,
                                             const TruncatedTailSide &g, const HalfStepContext &ctx) {
  const double muf = f.laplacian_moments().back(), mug = g.laplacian_moments().back();
  const double he1 = hermite_value(ctx.N, 1.0) / factorial(ctx.N);
  for (double sigma = sigma_from; sigma <= ctx.opt.sigma_max; sigma *= ctx.opt.sigma_ratio) {
    // Edges near 1: w^2 - 1 = -mu_N He_N(1) / N! sigma^{2-N} to leading order.
    const double tf = -muf * he1 * std::pow(sigma, 2 - ctx.N), tg = -mug * he1 * std::pow(sigma, 2 - ctx.N);
    const double w = std::sqrt(1 + (tf + tg) / 2);
    auto wt = evaluate_witness(i, w, sigma, f, g, ctx.orientation, ctx.opt.strict);
    if (wt.strict)
      return wt;
  }
  return std::nullopt;
}

double tail_correction_bound(const TruncatedTailSide &s, double inner) {
  double worst = 0;
  for (int m = 0; m <= s.N - 2; m += 2)
    worst = std::max(worst, 2 * tail_interval_moment(s.N + 1, s.amplitude, m, inner, 1e15) / factorial(m));
  return worst;
}

} // namespace

AlgebraicDecayResult build_algebraic_decay_pair(int N, int K, AlgebraicDecayOptions options) {
  if (N < 4 || N % 4 != 0)
    throw Error("domain", "build_algebraic_decay_pair needs N >= 4 with N % 4 == 0");
  if (K < 1)
    throw Error("domain", "build_algebraic_decay_pair needs K >= 1");
  if (!(options.second_moment > 0 && options.second_moment < 2))
    throw Error("domain", "condition (iii) needs 0 < mu_2(h) < 2");
  if (!(0 < options.c1 && options.c1 < options.d1))
    throw Error("domain", "base intervals need 0 < c_1 < d_1");

  AlgebraicDecayResult out;
  out.N = N;
  // mu_2 of A (1 + |x|)^{-N-1} is 2 A B(3, N - 2).
  const double beta3 = std::exp(std::lgamma(3.0) + std::lgamma(N - 2.0) - std::lgamma(N + 1.0));
  out.amplitude = options.second_moment / (2 * beta3);
  out.orientation = hermite_value(N, 1.0) > 0 ? 1 : -1;
  if (out.orientation < 0)
    log_info("He_N(1) < 0: witness sign splits are reported in the orientation of sign(He_N(1))");
  const HalfStepContext ctx{N, out.orientation, options};

  TruncatedTailSide f{N, out.amplitude, {{0, options.c1}}};
  TruncatedTailSide g{N, out.amplitude, {{0, options.d1}}};

  auto moment_error = [&](const TruncatedTailSide &s) {
    const auto mu = s.laplacian_moments();
    double e = 0;
    for (int m = 0; m < N; ++m)
      e = std::max(e, std::abs(mu[static_cast<std::size_t>(m)] - (m == 2 ? 2.0 : 0.0)));
    return e;
  };
  auto snapshot = [&](int k) {
    AlgebraicDecayStage st;
    st.k = k;
    st.f = f;
    st.g = g;
    st.a = f.corrections();
    st.b = g.corrections();
    st.mu_f = f.laplacian_moments();
    st.mu_g = g.laplacian_moments();
    for (const auto &w : out.witnesses)
      st.witnesses.push_back(evaluate_witness(w.i, w.w, w.sigma, f, g, out.orientation, options.strict));
    out.max_moment_error = std::max({out.max_moment_error, moment_error(f), moment_error(g)});
    out.stages.push_back(std::move(st));
  };

  auto w1 = find_witness(1, 2.0, f, g, ctx);
  if (!w1) {
    out.message = "stage 1: no sign split for sigma <= sigma_max";
    snapshot(1);
    return out;
  }
  out.witnesses.push_back(*w1);
  snapshot(1);

  // Raises `raised` above `other` in mu_N by > 1 without disturbing earlier witnesses.
  auto half_step = [&](TruncatedTailSide &raised, const TruncatedTailSide &other, bool raised_is_f) -> bool {
    const int i = static_cast<int>(out.witnesses.size()) + 1;
    const double mu_other = other.laplacian_moments().back();
    double inner = 2 * std::max(raised.outer(), other.outer());
    for (int j = 0; j < options.doubling_budget; ++j, inner *= 2) {
      if (tail_correction_bound(raised, inner) >= options.coefficient_bound)
        continue;
      TruncatedTailSide cand = raised;
      double outer = 2 * inner;
      cand.half.push_back({inner, outer});
      int grow = 0;
      while (cand.laplacian_moments().back() - mu_other <= 1 && grow++ < options.doubling_budget) {
        outer *= 2;
        cand.half.back().hi = outer;
      }
      if (cand.laplacian_moments().back() - mu_other <= 1)
        continue;
      bool kept = true;
      for (const auto &w : out.witnesses) {
        const auto &nf = raised_is_f ? cand : other;
        const auto &ng = raised_is_f ? other : cand;
        if (!evaluate_witness(w.i, w.w, w.sigma, nf, ng, out.orientation, options.strict).strict) {
          kept = false;
          break;
        }
      }
      if (!kept)
        continue;
      const auto &nf = raised_is_f ? cand : other;
      const auto &ng = raised_is_f ? other : cand;
      auto wt = find_witness(i, out.witnesses.back().sigma + 1, nf, ng, ctx);
      if (!wt)
        continue;
      out.mu_gap.push_back(cand.laplacian_moments().back() - mu_other);
      raised = cand;
      out.witnesses.push_back(*wt);
      return true;
    }
    std::ostringstream os;
    os << "witness " << i << ": interval search failed";
    if (!out.mu_gap.empty())
      os << "; last mu_N gap " << out.mu_gap.back();
    out.message = os.str();
    return false;
  };

  for (int k = 1; k < K; ++k) {
    if (!half_step(f, g, true) || !half_step(g, f, false)) {
      snapshot(k + 1);
      return out;
    }
    snapshot(k + 1);
  }
  out.complete = true;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Discontinuities of a function-valued signal that quadrature must not straddle.
std::vector<double> signal_breaks(const Signal &f) {
  std::vector<double> b;
  if (const auto *h = std::get_if<AlgebraicTailDensity>(&f.value))
    for (const auto &i : h->support)
      b.insert(b.end(), {i.lo, i.hi});
  if (const auto *g = std::get_if<PiecewiseLinear>(&f.value))
    b = g->x;
  if (const auto *c = std::get_if<CompositeSignal>(&f.value))
    for (const auto &w : c->parts) {
      const auto inner = signal_breaks(*w.signal);
      b.insert(b.end(), inner.begin(), inner.end());
    }
  return b;
}

} // namespace

QReport q_two_zero_check(const Signal &h_tilde, const std::vector<double> &sigmas, std::size_t points) {
  using boost::math::quadrature::gauss_kronrod;
  QReport out;
  out.a0 = moments(h_tilde, 0).mu[0];
  if (!(out.a0 > 0))
    throw Error("domain", "q_two_zero_check needs a_0 = mu_0(h~) > 0");
  if (points < 16)
    throw Error("config", "q_two_zero_check needs at least 16 grid points");
  const auto support = effective_support(h_tilde);
  const double extent = support ? std::max(std::abs(support->lo), std::abs(support->hi)) : 10.0;
  const auto breaks = signal_breaks(h_tilde);
  out.pass = !sigmas.empty();
  for (double sigma : sigmas) {
    if (!(sigma > 0))
      throw Error("domain", "q_two_zero_check needs sigma > 0");
    const auto conv = convolution_evaluator(h_tilde, scale(Wavelet::gaussian(), sigma), 0);
    if (!conv)
      throw Error("domain", "q_two_zero_check: no convolution evaluator for this signal");
    const PointEvaluator Q = [&](double x) { return -out.a0 * gaussian_derivative(0, x, sigma) + (*conv)(x); };
    // sign Q = sign(ratio - 1), ratio = (h~ * G_sigma) / (a_0 G_sigma), free of far-field underflow.
    const PointEvaluator S = [&](double x) {
      const double lo0 = x - 40 * sigma, hi0 = x + 40 * sigma;
      const double lo = support ? std::max(lo0, support->lo) : lo0, hi = support ? std::min(hi0, support->hi) : hi0;
      if (!(lo < hi))
        return -1.0;
      std::vector<double> cuts{lo, hi};
      for (double c : breaks)
        if (c > lo && c < hi)
          cuts.push_back(c);
      for (double c : {0.0, x, x - 4 * sigma, x + 4 * sigma})
        if (c > lo && c < hi)
          cuts.push_back(c);
      std::sort(cuts.begin(), cuts.end());
      auto integrand = [&](double y) {
        const double v = evaluate(h_tilde, y);
        return v == 0 ? 0.0 : v * std::exp((2 * x * y - y * y) / (2 * sigma * sigma));
      };
      double r = 0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        r += gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 8, 1e-12);
      return r / out.a0 - 1;
    };
    QProfile p;
    p.sigma = sigma;
    p.q0 = Q(0);
    double L = 2 * extent + 6 * sigma;
    for (int j = 0; j < 6 && !(S(L) > 0 && S(-L) > 0); ++j)
      L *= 2;
    const auto grid = UniformGrid::span(-L, L, points);
    Eigen::VectorXd v(static_cast<Eigen::Index>(points));
    std::vector<double> sign(points);
    for (std::size_t i = 0; i < points; ++i) {
      v[static_cast<Eigen::Index>(i)] = Q(grid.at(i));
      sign[i] = S(grid.at(i));
    }
    for (std::size_t i = 0; i + 1 < points; ++i) {
      const double a = sign[i], b = sign[i + 1];
      if (a == 0 || a * b < 0)
        p.zeros.push_back(a == 0 ? grid.at(i) : bisect_sign_change(S, grid.at(i), grid.at(i + 1), 1e-13));
    }
    p.exactly_two = p.zeros.size() == 2;
    p.positive_outside = p.exactly_two;
    if (p.exactly_two)
      for (std::size_t i = 0; i < points; ++i) {
        const double x = grid.at(i);
        if ((x < p.zeros[0] || x > p.zeros[1]) && !(sign[i] > 0))
          p.positive_outside = false;
      }
    p.profile = SampledSignal(grid, v);
    out.pass = out.pass && p.exactly_two && p.positive_outside && p.q0 < 0;
    out.levels.push_back(std::move(p));
  }
  return out;
}

} // namespace marr
