#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "marr/kernels.hpp"

namespace marr {

struct Interval {
  double lo = 0, hi = 0;
  double width() const { return hi - lo; }
  bool operator==(const Interval &) const = default;
};

// weight * delta^{(order)}(x - location)
struct Atom {
  double x = 0;
  int order = 0;
  double weight = 1;
  bool operator==(const Atom &) const = default;
};

struct PointMassDistribution {
  std::vector<Atom> atoms;
  bool operator==(const PointMassDistribution &) const = default;
};

// weight * G_sigma^{(order)}(x - center)
struct GaussianTerm {
  double center = 0;
  double sigma = 1;
  int order = 0;
  double weight = 1;
  bool operator==(const GaussianTerm &) const = default;
};

struct GaussianMixture {
  std::vector<GaussianTerm> terms;
  bool operator==(const GaussianMixture &) const = default;
};

struct UniformGrid {
  double origin = 0;
  double spacing = 1;
  std::size_t count = 0;

  double at(std::size_t i) const { return origin + spacing * static_cast<double>(i); }
  double back() const { return at(count - 1); }
  Eigen::VectorXd points() const;
  static UniformGrid span(double lo, double hi, std::size_t count);
  bool operator==(const UniformGrid &) const = default;
};

struct SampledSignal {
  UniformGrid grid;
  Eigen::VectorXd values;

  SampledSignal() = default;
  SampledSignal(UniformGrid g, Eigen::VectorXd v);
  // Catmull-Rom cubic interpolation; throws outside the grid.
  double interpolate(double x) const;
  bool operator==(const SampledSignal &o) const { return grid == o.grid && values == o.values; }
};

// Continuous, compactly supported: y.front() == y.back() == 0.
struct PiecewiseLinear {
  std::vector<double> x, y;

  double operator()(double t) const;
  // Slope jumps: g'' = sum c_i delta(x - x_i).
  PointMassDistribution second_derivative() const;
  bool operator==(const PiecewiseLinear &) const = default;
};

// amplitude * (1 + |x|)^{-p}, restricted to the union of `support` when nonempty.
struct AlgebraicTailDensity {
  double p = 2;
  double amplitude = 1;
  std::vector<Interval> support;

  double operator()(double t) const;
  bool operator==(const AlgebraicTailDensity &) const = default;
};

class Signal;

struct WeightedSignal {
  double weight = 1;
  std::shared_ptr<const Signal> signal;
};

struct CompositeSignal {
  std::vector<WeightedSignal> parts;
};

class Signal {
public:
  using Variant = std::variant<PointMassDistribution, GaussianMixture, SampledSignal, PiecewiseLinear,
                               AlgebraicTailDensity, CompositeSignal>;

  Signal() : value(PointMassDistribution{}) {}
  template <typename T, typename = std::enable_if_t<std::is_constructible_v<Variant, T>>>
  Signal(T v) : value(std::move(v)) {}

  Variant value;
};

// Builders for common signals.
Signal gaussian_signal(double center = 0, double sigma = 1, double weight = 1);
Signal delta_signal(double x = 0, int order = 0, double weight = 1);
Signal zero_signal();
Signal scaled(double c, const Signal &f);
Signal sum(const std::vector<WeightedSignal> &parts);

bool is_zero_signal(const Signal &f);

enum class Normalization { raw, normalized };

struct MomentVector {
  int n0 = -1; // first nonzero moment; -1 when all vanish
  std::vector<double> mu; // mu[n], n = 0..n_max
  Normalization normalization = Normalization::raw;

  int n_max() const { return static_cast<int>(mu.size()) - 1; }
  double operator[](int n) const { return mu.at(static_cast<std::size_t>(n)); }
  // Divides by mu_{n0}; requires n0 >= 0.
  MomentVector normalized() const;
};

// First index whose moment exceeds `relative_tol` times the largest magnitude.
int first_nonzero(const std::vector<double> &mu, double relative_tol = 1e-12);

// mu_n = <f, x^n>; throws Error("divergent_moment") naming the first divergent order.
MomentVector moments(const Signal &f, int n_max);

// Moment of x^m restricted to [lo, hi] for the unrestricted tail density, in closed form.
double tail_interval_moment(double p, double amplitude, int m, double lo, double hi);

// Largest order n with a finite moment, or -1; nullopt when all are finite.
std::optional<int> moment_budget(const Signal &f);

PointMassDistribution j_distribution(double alpha, double beta);

PiecewiseLinear second_antiderivative(const PointMassDistribution &d);

// Pointwise value for function-valued signals; throws for point masses.
double evaluate(const Signal &f, double x);

// Interval outside which the signal vanishes (or is negligible); nullopt if unbounded.
std::optional<Interval> effective_support(const Signal &f);

struct ConvolutionOptions {
  bool strict = false;          // aliasing warning escalates to an error
  double quadrature_tol = 1e-9; // relative, per output point
};

using PointEvaluator = std::function<double(double)>;

// Pointwise (f * psi_sigma^{(n)})(x) for every kind except sampled signals.
std::optional<PointEvaluator> convolution_evaluator(const Signal &f, const ScaledKernel &k, int n = 0,
                                                    ConvolutionOptions options = {});

SampledSignal convolve_with_kernel(const Signal &f, const ScaledKernel &k, const UniformGrid &grid,
                                   ConvolutionOptions options = {});

// f * G_s on a sampled grid; used by the heat semigroup.
SampledSignal convolve_sampled_gaussian(const SampledSignal &f, double s, int derivative = 0);

// Standard normal CDF differences computed without cancellation in the tails.
double normal_cdf_difference(double u, double v); // Phi(u) - Phi(v)

} // namespace marr
