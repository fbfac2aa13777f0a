#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "marr/edges.hpp"
#include "marr/kernels.hpp"
#include "marr/signals.hpp"
#include "marr/transform.hpp"

namespace marr {

// Limits w' of x_j / sigma_j along persistent contours.
struct AsymptoticZeroSet {
  std::vector<double> w;
  std::vector<double> residual; // rms of the fit x/sigma = w' + c1/sigma + c2/sigma^2
  std::vector<int> contour_ids;
  std::size_t size() const { return w.size(); }
};

struct AsymptoticFitOptions {
  std::size_t top_scales = 5; // fit over the last vertices of each contour, at least 3
};

// Throws Error("no_persistent_contour") when no contour reaches the top scale.
AsymptoticZeroSet asymptotic_zero_set(const std::vector<EdgeContour> &contours, AsymptoticFitOptions options = {});

struct N0Match {
  int n0 = -1;
  std::vector<double> roots;         // regular zeros of psi^{(n0)}
  std::vector<std::size_t> matched;  // roots[i] <-> az.w[matched[i]]
  std::vector<double> near_miss;     // per order n: worst root-to-az distance
};

// Smallest n <= n_search whose regular zeros all lie within `tolerance` of az.
// Throws Error("ambiguous_n0") listing near misses when no order matches.
N0Match detect_n0(const AsymptoticZeroSet &az, const Wavelet &w, int n_search = 20, double tolerance = 1e-2);

struct RecoveryOptions {
  int depth = 4;                 // K: orders n0 + 1 .. n0 + K
  std::size_t fit_scales = 5;    // top ladder scales used for the sigma -> infinity limit
  int fit_degree = 2;            // polynomial degree in 1/sigma
  double relative_residual = 1e-3;
  double noise_factor = 10;
};

// Linear system solved at one order: A_i mu = -L_i over the regular zeros w'_i.
struct RecursionSystem {
  int order = 0;                  // n0 + k
  std::vector<double> w_prime;
  std::vector<double> design;     // A_i = (-1)^{n}/n! psi^{(n)}(w'_i)
  std::vector<double> limit;      // L_i, extrapolated lower-order sums
  std::vector<double> fit_residual;
  double threshold = 0;           // unreliable-order bound on fit_residual
  double mu = 0;
};

struct RecoveryReport {
  MomentVector moments;           // normalized, mu_{n0} = 1
  std::vector<RecursionSystem> systems;
  std::optional<int> truncated_at; // first unreliable order, when the output stops early
  std::vector<std::string> messages;
};

// Moments from per-scale zero sets alone. `w_prime` are the regular asymptotic zeros;
// each order uses the nearest zero w_j in E_j to w'.
RecoveryReport recover_moments_report(const std::vector<LevelZeros> &zero_sets, const Wavelet &w, int n0,
                                      const std::vector<double> &w_prime, RecoveryOptions options = {});
MomentVector recover_moments(const std::vector<LevelZeros> &zero_sets, const Wavelet &w, int n0,
                             const std::vector<double> &w_prime, RecoveryOptions options = {});

struct PipelineOptions {
  ScaleLadder ladder = ScaleLadder::recovery_default();
  double half_width_w = 6;  // slice window in units of sigma
  double margin = 2;
  std::size_t points = 4001;
  int n_search = 20;
  double match_tolerance = 1e-2;
  RecoveryOptions recovery;
  unsigned workers = 0;
};

struct PipelineReport {
  std::vector<LevelZeros> zero_sets;
  std::vector<EdgeContour> contours;
  AsymptoticZeroSet az;
  N0Match n0;
  RecoveryReport recovery;
};

// Signal -> transform -> regular zeros -> contours -> asymptotic zeros -> n0 -> moments.
PipelineReport recover_from_signal(const Signal &f, const Wavelet &w, PipelineOptions options = {});

// Zero sets of f at each ladder scale (regular zeros only).
std::vector<LevelZeros> ladder_zero_sets(const Signal &f, const Wavelet &w, const ScaleLadder &ladder,
                                         double half_width_w, double margin, std::size_t points,
                                         unsigned workers = 0);

struct Reconstruction {
  std::vector<double> omega;
  std::vector<std::complex<double>> spectrum; // truncated sum mu_n (-i omega)^n / n!
  SampledSignal spatial;                      // inverse transform of the truncated spectrum
  double truncation_radius = 0;               // largest omega with |last term| < 1e-3 |partial sum|
};

// Throws Error("truncation_radius") when the last-term ratio exceeds 1 inside omega_max.
Reconstruction reconstruct_from_moments(const MomentVector &m, double omega_max, int terms, const UniformGrid &grid,
                                        std::size_t omega_points = 601);

struct ExpansionErrorReport {
  int order = 0;
  std::vector<double> sigmas;
  std::vector<double> residual; // sup_w sigma^{N+1} |f * psi_sigma(sigma w) - expansion|
  double slope = 0;             // log-log fit of residual against sigma
};

struct ExpansionErrorOptions {
  double w_half_width = 3;
  std::size_t w_points = 121;
  double quadrature_tol = 1e-13;
};

// Throws Error("moment_cap") when N exceeds the signal's finite-moment budget.
ExpansionErrorReport moment_expansion_error(const Signal &f, const Wavelet &w, int N,
                                            const std::vector<double> &sigmas, ExpansionErrorOptions options = {});

// Zeros of F(., t) or of F_xx(., t), observed on a t-ladder.
struct HeatNodeLevel {
  double t = 0;
  std::vector<double> zeros;
  bool identically_zero = false;
};

struct HeatRecoveryReport {
  MomentVector second_integral; // moments of a with a'' = f, normalized
  MomentVector initial;         // mu_n(f) = n (n - 1) mu_{n-2}(a)
  RecoveryReport recovery;
  int n0 = -1;
};

// The zeros of F = f * G_sqrt(t) are those of a * M_sqrt(t). Refuses with Error("unattested")
// unless the caller asserts that a has exponential order.
HeatRecoveryReport recover_initial_condition_from_heat_nodes(const std::vector<HeatNodeLevel> &levels,
                                                             bool exponential_order_attested,
                                                             RecoveryOptions options = {});

// Bounded ladder: trace through the limit scale and continue with the large-scale ladder.
struct BoundedLadderReport {
  std::size_t persistent = 0;
  int n0 = -1; // persistent - 2 for the Ricker wavelet
  std::vector<EdgeContour> contours;
};
BoundedLadderReport bounded_ladder_recovery(const Signal &f, const ScaleLadder &bounded, PipelineOptions options = {});

// Left side of the truncated recursion with known moments, at every ladder scale and order.
struct ConsistencyReport {
  std::vector<double> sigmas;
  std::vector<std::vector<double>> residual; // [k - 1][j]: max over zeros
  std::vector<double> slope;                 // per order
};
ConsistencyReport recursion_consistency(const std::vector<LevelZeros> &zero_sets, const Wavelet &w,
                                        const MomentVector &m, const std::vector<double> &w_prime, int depth);

// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double> &x, const std::vector<double> &y);

} // namespace marr
