#pragma once

#include <array>
#include <string>
#include <vector>

#include "marr/edges.hpp"
#include "marr/signals.hpp"

namespace marr {

// One stage of the small-scale construction: Delta h_n = Delta h_{n-1} + c_n J_{alpha_n, beta_n}.
struct SmallScaleStage {
  int n = 0;
  double c = 0, alpha = 0, beta = 0, sigma = 0;
  PiecewiseLinear h;               // cumulative h_n
  std::vector<double> sign_values; // Delta(h_n * G_{sigma_k})(sqrt(sigma_k^2 + 1)), k <= n
  double l1_increment = 0;         // int |h_n - h_{n-1}|, exact for piecewise-linear data
  double l1_expected = 0;          // 4 c_n alpha_n (1 + beta_n)
  int shrink_steps = 0;
};

struct SmallScaleOptions {
  double alpha1 = 0.5, beta1 = -0.25, sigma_start = 0.5;
  double shrink = 0.7;
  int budget = 1000;          // shrink steps per stage
  double strict = 1e-12;      // magnitude bound for strict signs
  std::size_t ladder_per_stage = 40;
};

struct SmallScaleResult {
  std::vector<SmallScaleStage> stages;
  PiecewiseLinear h;                       // h_K
  PointMassDistribution laplacian;         // Delta h_K
  std::vector<double> sigmas;              // sigma_1 > ... > sigma_K
  std::vector<std::array<double, 2>> table; // final h_K at -x_k and +x_k
  bool strict = false;                     // every table entry has sign (-1)^{k+1}, magnitude > strict
  bool complete = false;                   // all K stages found within budget
  double l1_norm = 0;
  // Edge of G + h_K near sqrt(sigma^2 + 1) on a descending ladder.
  std::vector<double> ladder;
  std::vector<double> displacement;        // x_{G+h}(sigma) - sqrt(sigma^2 + 1)
  std::vector<double> crossing_sigmas;     // midpoints of ladder intervals with a sign change
  std::size_t traced_contours = 0;         // contours traced through the tracked edge, 1 when unbroken
  std::string message;
};

// Runs the induction for K stages; on budget exhaustion returns the completed stages.
SmallScaleResult build_small_scale_counterexample(int K, SmallScaleOptions options = {});

// Delta(h * G_sigma)(x) for a point-mass Laplacian: sum_i w_i G_sigma(x - x_i).
double smoothed_point_masses(const PointMassDistribution &d, double sigma, double x);

// Delta f = delta'' + chi_C h - sum_{m even <= N-2} a_m delta^{(m)}, h = amplitude (1 + |x|)^{-N-1},
// with C the symmetric union of `half` (intervals in x >= 0).
struct TruncatedTailSide {
  int N = 4;
  double amplitude = 1;
  std::vector<Interval> half;

  double outer() const;
  // a_m = int_C x^m / m! h, by quadrature.
  std::vector<double> corrections() const;
  // mu_m(Delta f), m = 0..N, from closed-form moments of chi_C h and the quadrature a_m.
  std::vector<double> laplacian_moments() const;
  // Delta(f * G_sigma)(sigma w), with the Taylor part of G_sigma subtracted inside the integral.
  double smoothed_laplacian(double sigma, double w) const;
};

struct AlgebraicWitness {
  int i = 0;
  double w = 0, sigma = 0;
  double f_value = 0, g_value = 0; // Delta(f * G_sigma)(sigma w), Delta(g * G_sigma)(sigma w)
  bool strict = false;
};

struct AlgebraicDecayStage {
  int k = 0;
  TruncatedTailSide f, g;
  std::vector<double> a, b;         // corrections a_{k,m}, b_{k,m}; odd entries are zero
  std::vector<double> mu_f, mu_g;   // laplacian moments 0..N
  std::vector<AlgebraicWitness> witnesses; // pairs i = 1 .. 2k - 1, re-evaluated on f_k, g_k
};

struct AlgebraicDecayOptions {
  double second_moment = 1;   // mu_2(h); condition (iii) needs < 2
  double c1 = 1, d1 = 2;
  double coefficient_bound = 1e-3;
  double strict = 1e-9;       // |value| > strict sigma^{-3} G(w)
  double sigma_ratio = 1.25;
  double sigma_max = 1e7;
  int doubling_budget = 60;
};

struct AlgebraicDecayResult {
  int N = 4;
  double amplitude = 0;
  int orientation = 1;        // sign of He_N(1); witness splits are read in this orientation
  std::vector<AlgebraicDecayStage> stages;
  std::vector<AlgebraicWitness> witnesses;
  std::vector<double> mu_gap; // per half-step: mu_N(raised side) - mu_N(other side)
  double max_moment_error = 0; // max |mu_m - mu_m(delta'')|, m < N, over all stages
  bool complete = false;
  std::string message;
};

// Throws Error("domain") unless N >= 4 and N % 4 == 0.
AlgebraicDecayResult build_algebraic_decay_pair(int N = 4, int K = 2, AlgebraicDecayOptions options = {});

struct QProfile {
  double sigma = 0;
  double q0 = 0;                 // Q(0, sigma)
  std::vector<double> zeros;
  bool exactly_two = false;
  bool positive_outside = false;
  SampledSignal profile;
};

struct QReport {
  double a0 = 0;
  std::vector<QProfile> levels;
  bool pass = false;
};

// Q(x, sigma) = -a_0 G_sigma(x) + (h~ * G_sigma)(x). Throws Error("domain") unless a_0 > 0.
QReport q_two_zero_check(const Signal &h_tilde, const std::vector<double> &sigmas, std::size_t points = 4001);

} // namespace marr
