#include "marr/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "marr/errors.hpp"
#include "marr/parallel.hpp"

namespace marr {

namespace {

void check_increasing(const std::vector<double> &s) {
  if (s.empty())
    throw Error("config", "scale ladder is empty");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0) || !std::isfinite(s[i]))
      throw Error("config", "scale ladder entries must be positive and finite");
    if (i > 0 && !(s[i] > s[i - 1]))
      throw Error("config", "scale ladder must be strictly increasing");
  }
}

double parse_number(const std::string &s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size())
      return v;
  } catch (const std::exception &) {
  }
  throw Error("config", "cannot parse ladder field '" + s + "'");
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, sep))
    out.push_back(item);
  return out;
}

double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i)
    r *= i;
  return r;
}

} // namespace

ScaleLadder ScaleLadder::geometric(double lo, double hi, std::size_t count) {
  if (count == 0)
    throw Error("config", "scale ladder is empty");
  if (!(lo > 0) || (count > 1 && !(hi > lo)))
    throw Error("config", "geometric ladder needs 0 < lo < hi");
  ScaleLadder l;
  l.kind = LadderKind::geometric;
  for (std::size_t j = 0; j < count; ++j)
    l.scales.push_back(count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(j) / (count - 1)));
  if (count > 1)
    l.scales.back() = hi;
  check_increasing(l.scales);
  return l;
}

ScaleLadder ScaleLadder::dyadic(double sigma0, std::size_t count, int per_octave) {
  if (count == 0 || per_octave < 1 || !(sigma0 > 0))
    throw Error("config", "dyadic ladder needs sigma0 > 0, count >= 1, per_octave >= 1");
  ScaleLadder l;
  l.kind = LadderKind::dyadic;
  for (std::size_t j = 0; j < count; ++j)
    l.scales.push_back(sigma0 * std::exp2(static_cast<double>(j) / per_octave));
  check_increasing(l.scales);
  return l;
}

ScaleLadder ScaleLadder::explicit_scales(std::vector<double> scales) {
  check_increasing(scales);
  return ScaleLadder{std::move(scales), LadderKind::explicit_list};
}

ScaleLadder ScaleLadder::recovery_default() {
  ScaleLadder l = dyadic(4.0, 16, 2);
  l.kind = LadderKind::geometric;
  return l;
}

ScaleLadder parse_ladder(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.empty())
    throw Error("config", "empty ladder spec");
  const std::string &kind = parts[0];
  if (kind == "geometric") {
    if (parts.size() != 4)
      throw Error("config", "ladder 'geometric:lo:hi:count' needs three fields");
    return ScaleLadder::geometric(parse_number(parts[1]), parse_number(parts[2]),
                                  static_cast<std::size_t>(parse_number(parts[3])));
  }
  if (kind == "dyadic") {
    if (parts.size() != 3 && parts.size() != 4)
      throw Error("config", "ladder 'dyadic:sigma0:count[:per_octave]' needs two or three fields");
    const int per = parts.size() == 4 ? static_cast<int>(parse_number(parts[3])) : 1;
    return ScaleLadder::dyadic(parse_number(parts[1]), static_cast<std::size_t>(parse_number(parts[2])), per);
  }
  if (kind == "list") {
    if (parts.size() != 2)
      throw Error("config", "ladder 'list:s1,s2,...' needs one field");
    std::vector<double> s;
    for (const auto &item : split(parts[1], ','))
      s.push_back(parse_number(item));
    return ScaleLadder::explicit_scales(std::move(s));
  }
  throw Error("config", "unknown ladder kind '" + kind + "'");
}

std::vector<TransformSlice> wavelet_transform(const Signal &f, const Wavelet &w, const ScaleLadder &ladder,
                                              const UniformGrid &grid, TransformOptions options) {
  check_increasing(ladder.scales);
  if (options.require_resolution && grid.spacing > ladder[0] / 8)
    throw Error("resolution", "grid spacing " + std::to_string(grid.spacing) + " does not resolve sigma_1 / 8 = " +
                                  std::to_string(ladder[0] / 8));
  std::vector<TransformSlice> out(ladder.size());
  parallel_for(
      ladder.size(),
      [&](std::size_t j) {
        const auto k = scale(w, ladder[j]);
        out[j].sigma = ladder[j];
        out[j].exact = convolution_evaluator(f, k, 0, options.convolution);
        out[j].samples = convolve_with_kernel(f, k, grid, options.convolution);
      },
      options.workers);
  return out;
}

std::vector<TransformSlice> wavelet_transform_scaled(const Signal &f, const Wavelet &w, const ScaleLadder &ladder,
                                                     double half_width_w, double margin, std::size_t count,
                                                     TransformOptions options) {
  check_increasing(ladder.scales);
  std::vector<TransformSlice> out(ladder.size());
  parallel_for(
      ladder.size(),
      [&](std::size_t j) {
        const double s = ladder[j];
        const double half = half_width_w * s + margin;
        const auto grid = UniformGrid::span(-half, half, count);
        const auto k = scale(w, s);
        out[j].sigma = s;
        out[j].exact = convolution_evaluator(f, k, 0, options.convolution);
        out[j].samples = convolve_with_kernel(f, k, grid, options.convolution);
      },
      options.workers);
  return out;
}

namespace {

// Kernel and factor with f * G_{sqrt t}^{(n)} = factor * (f * kernel).
std::pair<ScaledKernel, double> heat_kernel(double t, int derivative) {
  if (!(t > 0) || !std::isfinite(t))
    throw Error("domain", "heat time t must be positive");
  if (derivative < 0)
    throw Error("domain", "derivative order must be nonnegative");
  const double s = std::sqrt(t);
  // (G^{(m)})_s = s^m G_s^{(m)}; M_s = s^2 G_s''.
  if (derivative == 2)
    return {scale(Wavelet::ricker(), s), 1 / t};
  return {scale(Wavelet::gaussian(derivative), s), std::pow(s, -derivative)};
}

} // namespace

SampledSignal heat_solution(const Signal &f, double t, const UniformGrid &grid, int derivative,
                            ConvolutionOptions options) {
  const auto [k, factor] = heat_kernel(t, derivative);
  if (const auto *s = std::get_if<SampledSignal>(&f.value); s && s->grid == grid)
    return convolve_sampled_gaussian(*s, std::sqrt(t), derivative);
  SampledSignal out = convolve_with_kernel(f, k, grid, options);
  out.values *= factor;
  return out;
}

std::optional<PointEvaluator> heat_evaluator(const Signal &f, double t, int derivative, ConvolutionOptions options) {
  const auto [k, factor] = heat_kernel(t, derivative);
  auto ev = convolution_evaluator(f, k, 0, options);
  if (!ev)
    return std::nullopt;
  if (factor == 1)
    return ev;
  return PointEvaluator([inner = std::move(*ev), factor = factor](double x) { return factor * inner(x); });
}

UniformGrid default_w_grid(int max_hermite_degree, double spacing) {
  double largest = 0;
  if (max_hermite_degree > 0) {
    const auto r = real_roots(hermite(max_hermite_degree), -4.0 * std::sqrt(max_hermite_degree + 1.0) - 1,
                              4.0 * std::sqrt(max_hermite_degree + 1.0) + 1);
    if (r.size() > 0)
      largest = r.roots.back();
  }
  const double W = largest + 2;
  const auto count = static_cast<std::size_t>(std::llround(2 * W / spacing)) + 1;
  return UniformGrid::span(-W, W, count);
}

SampledSignal normalized_slice(const TransformSlice &slice, int n0, const UniformGrid &w_grid) {
  if (n0 < 0)
    throw Error("domain", "normalized_slice needs n0 >= 0");
  const double s = slice.sigma;
  const double lo = s * w_grid.origin, hi = s * w_grid.back();
  const double tol = 1e-9 * slice.samples.grid.spacing;
  if (lo < slice.samples.grid.origin - tol || hi > slice.samples.grid.back() + tol)
    throw Error("extrapolation", "w-grid maps outside the computed x-range at sigma = " + std::to_string(s));
  const double factor = std::pow(s, n0 + 1);
  Eigen::VectorXd z(static_cast<Eigen::Index>(w_grid.count));
  for (std::size_t i = 0; i < w_grid.count; ++i) {
    const double x = s * w_grid.at(i);
    const double v = slice.exact ? (*slice.exact)(x)
                                 : slice.samples.interpolate(std::clamp(x, slice.samples.grid.origin,
                                                                        slice.samples.grid.back()));
    z[static_cast<Eigen::Index>(i)] = factor * v;
  }
  return SampledSignal(w_grid, z);
}

double moment_expansion_sum(const MomentVector &m, const Wavelet &w, int n_lo, int n_hi, double sigma, int shift,
                            double wv) {
  double v = 0;
  for (int n = std::max(n_lo, 0); n <= n_hi; ++n) {
    const double mu = m[n];
    if (mu == 0)
      continue;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    v += sign / factorial(n) * mu * std::pow(sigma, shift - n) * eval_derivative(w, n, wv);
  }
  return v;
}

double limit_profile(const MomentVector &m, const Wavelet &w, double wv) {
  if (m.n0 < 0)
    return 0;
  return moment_expansion_sum(m, w, m.n0, m.n0, 1.0, m.n0, wv);
}

} // namespace marr
