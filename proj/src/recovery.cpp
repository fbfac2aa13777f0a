#include "marr/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "marr/errors.hpp"
#include "marr/log.hpp"
#include "marr/parallel.hpp"

namespace marr {

namespace {

double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i)
    r *= i;
  return r;
}

double alternating(int n) { return n % 2 == 0 ? 1.0 : -1.0; }

struct PolyFit {
  Eigen::VectorXd coef; // ascending powers of u
  double max_deviation = 0;
};

PolyFit fit_polynomial(const std::vector<double> &u, const std::vector<double> &y, int degree) {
  const auto n = static_cast<Eigen::Index>(u.size());
  degree = std::min<int>(degree, static_cast<int>(n) - 1);
  Eigen::MatrixXd V(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1;
    for (int d = 0; d <= degree; ++d, p *= u[static_cast<std::size_t>(i)])
      V(i, d) = p;
    b[i] = y[static_cast<std::size_t>(i)];
  }
  PolyFit fit;
  fit.coef = V.colPivHouseholderQr().solve(b);
  fit.max_deviation = (V * fit.coef - b).cwiseAbs().maxCoeff();
  return fit;
}

// Regular zeros of a level, in w = x / sigma.
std::vector<double> level_w(const LevelZeros &l) {
  std::vector<double> w;
  for (const auto &z : l.zeros)
    if (z.kind == ZeroKind::regular)
      w.push_back(z.x / l.sigma);
  return w;
}

std::size_t nearest(const std::vector<double> &values, double target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (std::abs(values[i] - target) < std::abs(values[best] - target))
      best = i;
  return best;
}

void check_scales(const std::vector<LevelZeros> &zero_sets) {
  for (std::size_t j = 1; j < zero_sets.size(); ++j)
    if (!(zero_sets[j].sigma > zero_sets[j - 1].sigma))
      throw Error("domain", "zero sets must be ordered by strictly increasing scale");
}

} // namespace

double log_log_slope(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("domain", "log_log_slope needs two or more matched points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_polynomial(lx, ly, 1).coef[1];
}

AsymptoticZeroSet asymptotic_zero_set(const std::vector<EdgeContour> &contours, AsymptoticFitOptions options) {
  struct Entry {
    double w, residual;
    int id;
  };
  std::vector<Entry> entries;
  const std::size_t top = std::max<std::size_t>(3, options.top_scales);
  for (const auto &c : contours) {
    if (!c.persistent || c.vertices.size() < 3)
      continue;
    const std::size_t take = std::min(top, c.vertices.size());
    std::vector<double> u, y;
    for (std::size_t k = c.vertices.size() - take; k < c.vertices.size(); ++k) {
      u.push_back(1 / c.vertices[k].sigma);
      y.push_back(c.vertices[k].x / c.vertices[k].sigma);
    }
    const auto fit = fit_polynomial(u, y, 2);
    entries.push_back({fit.coef[0], fit.max_deviation, c.id});
  }
  if (entries.empty())
    throw Error("no_persistent_contour", "no persistent contour with at least 3 vertices");
  std::sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) { return a.w < b.w; });
  AsymptoticZeroSet az;
  for (const auto &e : entries) {
    az.w.push_back(e.w);
    az.residual.push_back(e.residual);
    az.contour_ids.push_back(e.id);
  }
  return az;
}

N0Match detect_n0(const AsymptoticZeroSet &az, const Wavelet &w, int n_search, double tolerance) {
  if (az.w.empty())
    throw Error("domain", "detect_n0 needs a nonempty asymptotic zero set");
  N0Match m;
  const double reach = std::max(std::abs(az.w.front()), std::abs(az.w.back())) + 4;
  for (int n = 0; n <= n_search; ++n) {
    const auto roots = regular_zeros_of_derivative(w, n, -reach, reach);
    if (roots.empty()) {
      m.near_miss.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    double worst = 0;
    std::vector<std::size_t> matched;
    for (double r : roots) {
      const std::size_t i = nearest(az.w, r);
      worst = std::max(worst, std::abs(az.w[i] - r));
      matched.push_back(i);
    }
    m.near_miss.push_back(worst);
    if (worst <= tolerance) {
      m.n0 = n;
      m.roots = roots;
      m.matched = std::move(matched);
      return m;
    }
  }
  std::ostringstream os;
  os << "no derivative order <= " << n_search << " matches the asymptotic zero set; near misses:";
  for (std::size_t n = 0; n < m.near_miss.size(); ++n)
    os << " n=" << n << ":" << m.near_miss[n];
  throw Error("ambiguous_n0", os.str());
}

RecoveryReport recover_moments_report(const std::vector<LevelZeros> &zero_sets, const Wavelet &w, int n0,
                                      const std::vector<double> &w_prime, RecoveryOptions options) {
  if (n0 < 0)
    throw Error("domain", "recover_moments needs n0 >= 0");
  if (w_prime.empty())
    throw Error("genericity_deficit", "no regular asymptotic zeros: fewer equations than unknowns");
  if (zero_sets.size() < static_cast<std::size_t>(options.depth) + 3)
    throw Error("domain", "recover_moments needs at least K + 3 scales");
  check_scales(zero_sets);

  const std::size_t fit_n = std::min(options.fit_scales, zero_sets.size());
  const std::size_t first = zero_sets.size() - fit_n;
  std::vector<std::vector<double>> E;
  for (std::size_t j = first; j < zero_sets.size(); ++j) {
    E.push_back(level_w(zero_sets[j]));
    if (E.back().empty())
      throw Error("domain", "empty zero set at sigma = " + std::to_string(zero_sets[j].sigma));
  }

  RecoveryReport rep;
  std::vector<double> mu(static_cast<std::size_t>(n0 + 1), 0.0);
  mu[static_cast<std::size_t>(n0)] = 1;
  std::ostringstream sel;
  sel << "nearest-neighbour selection of w_j for w' in {";
  for (double wp : w_prime)
    sel << " " << wp;
  sel << " }";
  rep.messages.push_back(sel.str());
  log(LogLevel::debug, sel.str());

  for (int k = 1; k <= options.depth; ++k) {
    const int order = n0 + k;
    RecursionSystem sys;
    sys.order = order;
    double max_s = 0, floor = 0;
    for (double wp : w_prime) {
      std::vector<double> u, S;
      for (std::size_t jj = 0; jj < fit_n; ++jj) {
        const double sigma = zero_sets[first + jj].sigma;
        const double wj = E[jj][nearest(E[jj], wp)];
        double s = 0, noise = 0;
        const double dw = std::max(1e-12, 4 * std::numeric_limits<double>::epsilon() * std::abs(wj * sigma)) / sigma;
        for (int n = n0; n < order; ++n) {
          const double c = mu[static_cast<std::size_t>(n)] / factorial(n) * std::pow(sigma, order - n);
          s += alternating(n) * c * eval_derivative(w, n, wj);
          noise += std::abs(c * eval_derivative(w, n + 1, wj)) * dw;
        }
        u.push_back(1 / sigma);
        S.push_back(s);
        max_s = std::max(max_s, std::abs(s));
        floor = std::max(floor, noise);
      }
      const auto fit = fit_polynomial(u, S, options.fit_degree);
      sys.w_prime.push_back(wp);
      sys.limit.push_back(fit.coef[0]);
      sys.fit_residual.push_back(fit.max_deviation);
      sys.design.push_back(alternating(order) / factorial(order) * eval_derivative(w, order, wp));
    }
    sys.threshold = options.relative_residual * max_s + options.noise_factor * floor;
    double ata = 0, atb = 0;
    for (std::size_t i = 0; i < sys.design.size(); ++i) {
      ata += sys.design[i] * sys.design[i];
      atb -= sys.design[i] * sys.limit[i];
    }
    double max_design = 0;
    for (double a : sys.design)
      max_design = std::max(max_design, std::abs(a));
    if (!(max_design > 1e-300))
      throw Error("genericity_deficit", "order " + std::to_string(order) +
                                            " derivative vanishes on every regular asymptotic zero");
    const double worst = *std::max_element(sys.fit_residual.begin(), sys.fit_residual.end());
    if (worst > sys.threshold) {
      rep.truncated_at = order;
      std::ostringstream os;
      os << "unreliable order " << order << ": extrapolation residual " << worst << " exceeds " << sys.threshold
         << "; output truncated at order " << order - 1;
      rep.messages.push_back(os.str());
      log_warning(os.str());
      rep.systems.push_back(std::move(sys));
      break;
    }
    sys.mu = atb / ata;
    mu.push_back(sys.mu);
    rep.systems.push_back(std::move(sys));
  }
  rep.moments.n0 = n0;
  rep.moments.mu = std::move(mu);
  rep.moments.normalization = Normalization::normalized;
  return rep;
}

MomentVector recover_moments(const std::vector<LevelZeros> &zero_sets, const Wavelet &w, int n0,
                             const std::vector<double> &w_prime, RecoveryOptions options) {
  return recover_moments_report(zero_sets, w, n0, w_prime, options).moments;
}

std::vector<LevelZeros> ladder_zero_sets(const Signal &f, const Wavelet &w, const ScaleLadder &ladder,
                                         double half_width_w, double margin, std::size_t points,
                                         unsigned workers) {
  TransformOptions to;
  to.workers = workers;
  const auto slices = wavelet_transform_scaled(f, w, ladder, half_width_w, margin, points, to);
  ZeroOptions zo;
  // Regular zeros come from sign changes only, so any c != 0 times f yields identical sets.
  zo.detect_non_regular = false;
  return level_zeros(slices, zo, workers);
}

PipelineReport recover_from_signal(const Signal &f, const Wavelet &w, PipelineOptions options) {
  PipelineReport rep;
  rep.zero_sets = ladder_zero_sets(f, w, options.ladder, options.half_width_w, options.margin, options.points,
                                   options.workers);
  rep.contours = trace_contours(rep.zero_sets);
  rep.az = asymptotic_zero_set(rep.contours);
  rep.n0 = detect_n0(rep.az, w, options.n_search, options.match_tolerance);
  rep.recovery = recover_moments_report(rep.zero_sets, w, rep.n0.n0, rep.n0.roots, options.recovery);
  return rep;
}

Reconstruction reconstruct_from_moments(const MomentVector &m, double omega_max, int terms, const UniformGrid &grid,
                                        std::size_t omega_points) {
  if (terms < 1 || terms > static_cast<int>(m.mu.size()))
    throw Error("domain", "reconstruct_from_moments: terms must lie in [1, available moments]");
  if (!(omega_max > 0) || omega_points < 2)
    throw Error("domain", "reconstruct_from_moments needs omega_max > 0 and at least 2 frequencies");
  double largest = 0;
  for (int n = 0; n < terms; ++n)
    largest = std::max(largest, std::abs(m[n]));
  // Moments at roundoff level relative to the largest do not count as the series tail.
  int last = -1, prev = -1;
  for (int n = 0; n < terms; ++n)
    if (std::abs(m[n]) > 1e-12 * largest) {
      prev = last;
      last = n;
    }
  if (last < 0)
    throw Error("domain", "reconstruct_from_moments: all moments vanish");

  Reconstruction r;
  const auto wg = UniformGrid::span(-omega_max, omega_max, omega_points);
  const auto term = [&](int n, double om) {
    return m[n] * std::pow(std::complex<double>(0, -om), n) / factorial(n);
  };
  bool prefix = true;
  r.truncation_radius = prev < 0 ? omega_max : 0;
  for (std::size_t i = 0; i < wg.count; ++i) {
    const double om = wg.at(i);
    std::complex<double> s = 0;
    for (int n = 0; n < terms; ++n)
      s += term(n, om);
    r.omega.push_back(om);
    r.spectrum.push_back(s);
    if (prev >= 0 && om >= 0 && prefix) {
      if (std::abs(term(last, om)) < 1e-3 * std::abs(s))
        r.truncation_radius = om;
      else
        prefix = false;
    }
  }
  // Symmetric signals alternate near-zero moments, so the ratio uses the larger of the two preceding terms.
  if (prev >= 0 && std::abs(term(last, omega_max)) >
                       std::max(std::abs(term(last - 1, omega_max)), last >= 2 ? std::abs(term(last - 2, omega_max)) : 0.0))
    throw Error("truncation_radius", "moment series diverges inside omega_max = " + std::to_string(omega_max));

  // f(x) = (1 / 2 pi) int f^(omega) e^{i omega x} d omega, trapezoid rule on the omega grid.
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.count));
  for (std::size_t k = 0; k < grid.count; ++k) {
    const double x = grid.at(k);
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < wg.count; ++i) {
      const double weight = (i == 0 || i + 1 == wg.count) ? 0.5 : 1.0;
      acc += weight * r.spectrum[i] * std::exp(std::complex<double>(0, r.omega[i] * x));
    }
    v[static_cast<Eigen::Index>(k)] = acc.real() * wg.spacing / (2 * std::numbers::pi);
  }
  r.spatial = SampledSignal(grid, v);
  return r;
}

ExpansionErrorReport moment_expansion_error(const Signal &f, const Wavelet &w, int N,
                                            const std::vector<double> &sigmas, ExpansionErrorOptions options) {
  if (N < 0)
    throw Error("domain", "moment_expansion_error needs N >= 0");
  if (sigmas.size() < 2)
    throw Error("domain", "moment_expansion_error needs at least two scales");
  if (const auto budget = moment_budget(f); budget && N > *budget)
    throw Error("moment_cap", "expansion order " + std::to_string(N) + " exceeds the signal's moment budget " +
                                  std::to_string(*budget));
  const auto m = moments(f, N);
  ConvolutionOptions co;
  co.quadrature_tol = options.quadrature_tol;
  ExpansionErrorReport rep;
  rep.order = N;
  rep.sigmas = sigmas;
  const auto wg = UniformGrid::span(-options.w_half_width, options.w_half_width, options.w_points);
  for (double sigma : sigmas) {
    const auto ev = convolution_evaluator(f, scale(w, sigma), 0, co);
    if (!ev)
      throw Error("domain", "moment_expansion_error needs a closed-form or quadrature evaluator");
    double worst = 0;
    for (std::size_t i = 0; i < wg.count; ++i) {
      const double wv = wg.at(i);
      const double exact = (*ev)(sigma * wv);
      const double series = moment_expansion_sum(m, w, 0, N, sigma, -1, wv);
      worst = std::max(worst, std::pow(sigma, N + 1) * std::abs(exact - series));
    }
    rep.residual.push_back(worst);
  }
  rep.slope = log_log_slope(rep.sigmas, rep.residual);
  return rep;
}

HeatRecoveryReport recover_initial_condition_from_heat_nodes(const std::vector<HeatNodeLevel> &levels,
                                                             bool exponential_order_attested,
                                                             RecoveryOptions options) {
  HeatRecoveryReport rep;
  if (!levels.empty() && std::all_of(levels.begin(), levels.end(), [](const auto &l) { return l.identically_zero; })) {
    rep.second_integral.mu.assign(static_cast<std::size_t>(options.depth + 1), 0.0);
    rep.initial.mu.assign(static_cast<std::size_t>(options.depth + 3), 0.0);
    return rep;
  }
  if (!exponential_order_attested)
    throw Error("unattested", "heat-node recovery requires the second integral to have exponential order; "
                              "odd data positive for x > 0 all share the zero line x = 0");
  std::vector<LevelZeros> zs;
  for (const auto &l : levels) {
    if (!(l.t > 0))
      throw Error("domain", "heat levels need t > 0");
    LevelZeros z;
    z.sigma = std::sqrt(l.t);
    for (double x : l.zeros)
      z.zeros.push_back({x, z.sigma, ZeroKind::regular, 0});
    std::sort(z.zeros.begin(), z.zeros.end(), [](const auto &a, const auto &b) { return a.x < b.x; });
    zs.push_back(std::move(z));
  }
  const auto w = Wavelet::ricker();
  const auto az = asymptotic_zero_set(trace_contours(zs));
  const auto n0 = detect_n0(az, w);
  rep.n0 = n0.n0;
  rep.recovery = recover_moments_report(zs, w, n0.n0, n0.roots, options);
  rep.second_integral = rep.recovery.moments;
  const auto &a = rep.second_integral;
  rep.initial.mu.assign(a.mu.size() + 2, 0.0);
  for (std::size_t n = 2; n < rep.initial.mu.size(); ++n)
    rep.initial.mu[n] = static_cast<double>(n * (n - 1)) * a.mu[n - 2];
  rep.initial.n0 = a.n0 + 2;
  return rep;
}

BoundedLadderReport bounded_ladder_recovery(const Signal &f, const ScaleLadder &bounded, PipelineOptions options) {
  if (bounded.size() == 0)
    throw Error("config", "bounded ladder is empty");
  // Bridge from the limit scale to the top of the large-scale ladder at a fine constant ratio.
  std::vector<double> s = bounded.scales;
  const double top = std::max(options.ladder.scales.back(), 8 * s.back());
  const auto bridge_n = static_cast<std::size_t>(std::ceil(std::log(top / s.back()) / std::log(1.05))) + 1;
  const auto bridge = ScaleLadder::geometric(s.back(), top, bridge_n);
  s.insert(s.end(), bridge.scales.begin() + 1, bridge.scales.end());
  const auto ladder = ScaleLadder::explicit_scales(std::move(s));
  const auto zs = ladder_zero_sets(f, Wavelet::ricker(), ladder, options.half_width_w, options.margin,
                                   options.points, options.workers);
  BoundedLadderReport rep;
  rep.contours = trace_contours(zs);
  for (const auto &c : rep.contours)
    if (c.persistent)
      ++rep.persistent;
  rep.n0 = static_cast<int>(rep.persistent) - 2;
  return rep;
}

ConsistencyReport recursion_consistency(const std::vector<LevelZeros> &zero_sets, const Wavelet &w,
                                        const MomentVector &m, const std::vector<double> &w_prime, int depth) {
  if (m.n0 < 0 || m.n_max() < m.n0 + depth)
    throw Error("domain", "recursion_consistency needs moments through n0 + depth");
  check_scales(zero_sets);
  ConsistencyReport rep;
  for (const auto &l : zero_sets)
    rep.sigmas.push_back(l.sigma);
  for (int k = 1; k <= depth; ++k) {
    std::vector<double> row;
    for (const auto &l : zero_sets) {
      const auto E = level_w(l);
      if (E.empty())
        throw Error("domain", "empty zero set at sigma = " + std::to_string(l.sigma));
      double worst = 0;
      for (double wp : w_prime) {
        const double wj = E[nearest(E, wp)];
        worst = std::max(worst,
                         std::abs(moment_expansion_sum(m, w, m.n0, m.n0 + k, l.sigma, m.n0 + k, wj)));
      }
      row.push_back(worst);
    }
    rep.slope.push_back(log_log_slope(rep.sigmas, row));
    rep.residual.push_back(std::move(row));
  }
  return rep;
}

} // namespace marr
