#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "marr/kernels.hpp"
#include "marr/signals.hpp"

namespace marr {

enum class LadderKind { geometric, dyadic, explicit_list };

// Strictly increasing positive scales.
struct ScaleLadder {
  std::vector<double> scales;
  LadderKind kind = LadderKind::explicit_list;

  std::size_t size() const { return scales.size(); }
  double operator[](std::size_t i) const { return scales[i]; }

  // count scales from lo to hi with constant ratio; endpoints exact.
  static ScaleLadder geometric(double lo, double hi, std::size_t count);
  // sigma0 * 2^{j / per_octave}, j = 0..count-1.
  static ScaleLadder dyadic(double sigma0, std::size_t count, int per_octave = 1);
  static ScaleLadder explicit_scales(std::vector<double> scales);
  // Default large-scale ladder: 4 * 2^{j/2}, 16 scales.
  static ScaleLadder recovery_default();
};

// "geometric:lo:hi:count", "dyadic:sigma0:count[:per_octave]", "list:s1,s2,...".
ScaleLadder parse_ladder(std::string_view text);

struct TransformSlice {
  double sigma = 1;
  SampledSignal samples; // (f * psi_sigma)(x)
  // Exact pointwise evaluator when the signal has a closed form.
  std::optional<PointEvaluator> exact;
  // Z(sigma, w) on a w-grid, filled by normalized_slice on request.
  std::optional<SampledSignal> normalized;
};

struct TransformOptions {
  ConvolutionOptions convolution;
  unsigned workers = 0;
  // Enforce grid spacing <= sigma_1 / 8.
  bool require_resolution = true;
};

// One slice per ladder scale, in ladder order.
std::vector<TransformSlice> wavelet_transform(const Signal &f, const Wavelet &w, const ScaleLadder &ladder,
                                              const UniformGrid &grid, TransformOptions options = {});

// Per-scale grid [-(W sigma + margin), W sigma + margin] so that x = sigma w stays covered.
std::vector<TransformSlice> wavelet_transform_scaled(const Signal &f, const Wavelet &w, const ScaleLadder &ladder,
                                                     double half_width_w, double margin, std::size_t count,
                                                     TransformOptions options = {});

// d^n/dx^n F(x, t), F = f * G_{sqrt t}; n = 2 goes through the Ricker factorization.
SampledSignal heat_solution(const Signal &f, double t, const UniformGrid &grid, int derivative = 0,
                            ConvolutionOptions options = {});
std::optional<PointEvaluator> heat_evaluator(const Signal &f, double t, int derivative = 0,
                                             ConvolutionOptions options = {});

// Uniform grid on [-W, W] with W = largest root of H_degree + 2.
UniformGrid default_w_grid(int max_hermite_degree, double spacing = 1e-3);

// Z(sigma, w) = sigma^{n0+1} (f * psi_sigma)(sigma w); exact re-evaluation when available.
SampledSignal normalized_slice(const TransformSlice &slice, int n0, const UniformGrid &w_grid);

// sum_{n=n_lo}^{n_hi} (-1)^n / n! mu_n sigma^{shift - n} psi^{(n)}(w).
double moment_expansion_sum(const MomentVector &m, const Wavelet &w, int n_lo, int n_hi, double sigma, int shift,
                            double wv);

// Limit profile z(w) = (-1)^{n0} mu_{n0} / n0! psi^{(n0)}(w).
double limit_profile(const MomentVector &m, const Wavelet &w, double wv);

} // namespace marr
