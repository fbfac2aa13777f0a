#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "marr/polynomials.hpp"

namespace marr {

// Gaussian-factor kernels vanish identically beyond this many scale units.
inline constexpr double kGaussianWindow = 40.0;

template <typename Scalar> Scalar gaussian(Scalar x) {
  using std::exp;
  using std::sqrt;
  return exp(-x * x / Scalar(2)) / sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
}

// G_sigma^{(n)}(x) = sigma^{-n-1} (-1)^n H_n(x/sigma) G(x/sigma).
template <typename Scalar> Scalar gaussian_derivative(int n, Scalar x, Scalar sigma = Scalar(1)) {
  using std::abs;
  using std::pow;
  const Scalar u = x / sigma;
  if (abs(u) > Scalar(kGaussianWindow))
    return Scalar(0);
  const Scalar sign = (n % 2 == 0) ? Scalar(1) : Scalar(-1);
  return sign * hermite_value(n, u) * gaussian(u) / pow(sigma, Scalar(n + 1));
}

enum class WaveletKind { gaussian_derivative, ricker, custom_affine_gaussian };

struct Wavelet {
  WaveletKind kind = WaveletKind::ricker;
  int order = 0;      // gaussian_derivative order
  double a = 0, b = 0; // custom affine part
  int dimension = 1;

  static Wavelet gaussian(int n = 0, int dimension = 1);
  static Wavelet ricker(int dimension = 1);
  static Wavelet custom(double a, double b);

  std::string descriptor() const;
  bool operator==(const Wavelet &) const = default;
};

// Parses "ricker", "gauss:n", "custom:a=...,b=..." with an optional "@2d" suffix.
Wavelet parse_wavelet(std::string_view text);

// Custom kernel psi(x) = -x e^{-x^2/2} + a x + b.
Wavelet custom_wavelet(double a, double b);

// psi^{(n)}(x) by Hermite factorization (1-D).
double eval_derivative(const Wavelet &w, int n, double x);
inline double eval(const Wavelet &w, double x) { return eval_derivative(w, 0, x); }

// partial^alpha psi(x1, x2) in 2-D: G^{(alpha)} or Delta G^{(alpha)} = (-1)^{|alpha|} L_alpha G.
double eval_partial(const Wavelet &w, std::array<int, 2> alpha, double x1, double x2);

// Real zeros of psi^{(n)} that change sign, on [lo, hi].
std::vector<double> regular_zeros_of_derivative(const Wavelet &w, int n, double lo = -12, double hi = 12);

// psi_sigma(x) = sigma^{-d} psi(x / sigma).
struct ScaledKernel {
  Wavelet base;
  double sigma = 1;

  double operator()(double x) const { return derivative(0, x); }
  // d^n/dx^n psi_sigma(x) = sigma^{-d-n} psi^{(n)}(x / sigma).
  double derivative(int n, double x) const;
};

ScaledKernel scale(const Wavelet &w, double sigma);

// psi_sigma^{(n)} written as sum_k c_k G_sigma^{(k)} + (p0 + p1 x); exact for every kind.
struct GaussianExpansion {
  std::vector<std::pair<int, double>> terms; // (order k, coefficient c_k)
  double p0 = 0, p1 = 0;
  double sigma = 1;
};

GaussianExpansion gaussian_expansion(const ScaledKernel &k, int n = 0);

} // namespace marr
