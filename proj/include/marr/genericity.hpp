#pragma once

#include <array>
#include <string>
#include <vector>

#include "marr/kernels.hpp"
#include "marr/polynomials.hpp"

namespace marr {

enum class Containment { not_contained, contained, inconclusive };
std::string to_string(Containment c);

// Is the zero set of the first derivative contained in that of the second?
struct ContainmentReport {
  std::array<int, 2> first{0, 0};  // n (1-D) or alpha
  std::array<int, 2> second{0, 0}; // m (1-D) or beta
  int dimension = 1;
  Containment verdict = Containment::inconclusive;
  std::array<double, 2> witness{0, 0}; // zero of the first, not a zero of the second
  double first_value = 0;              // relative |first(witness)|
  double second_value = 0;             // relative |second(witness)|
  double min_abs_value = 0;            // min relative |second| over the sampled zero set
  std::size_t points = 0;              // refined zero points examined
  bool gcd_trivial = true;             // 1-D: gcd(H_{n+2}, H_{m+2}) in {1, x}
  bool simple_roots = true;            // 1-D: gcd(H_{n+2}, H_{n+2}') = 1
  std::string detail;
};

// Exact 1-D sweep: gcd(H_{n+2}, H_{m+2}) in {1, x} and simple roots give not_contained.
// Both orderings of every pair n != m are reported.
std::vector<ContainmentReport> check_1d_ricker_genericity(int n_max);

struct MarchingOptions {
  double box_half_width = 8;
  std::size_t samples = 400;       // cells per half width; cell size R / samples
  double refine_tolerance = 1e-13; // bisection width on cell edges
  double zero_residual = 1e-10;
  double separation = 1e-4;
};

// Zero curve of L_alpha by marching squares on [-R, R]^2, L_beta evaluated at every refined point.
// Residuals are relative: |L(p)| / sum_e |c_e| |p^e|.
ContainmentReport check_2d_laplace_hermite(std::array<int, 2> alpha, std::array<int, 2> beta,
                                           MarchingOptions options = {});

// alpha against every beta != alpha with |beta| <= max_order, in both directions.
std::vector<ContainmentReport> sweep_2d_laplace_hermite(std::array<int, 2> alpha, int max_order,
                                                        MarchingOptions options = {}, unsigned workers = 0);

struct CounterexampleSolution {
  double a = 0, b = 0, x_star = 0;
  double residual = 0; // infinity norm of the three equations
  int iterations = 0;
  bool fallback_used = false;
};

// Newton on the tangency system from (0.4, 0.3, 0.7), multi-start fallback on failure.
CounterexampleSolution solve_counterexample_system();

// Residuals of the three equations at (a, b, x).
std::array<double, 3> counterexample_residuals(double a, double b, double x);

struct WeakGenericityReport {
  double c = 0, sigma = 0;
  std::vector<double> regular_psi;       // regular zeros of psi on [-6, 6]
  std::vector<double> all_psi;           // including non-regular
  std::vector<double> regular_perturbed; // of psi + c sigma^{-2} psi''
  std::vector<double> all_perturbed;
  bool indistinguishable = false;        // regular zero sets agree and equal {-sqrt 3}
  double c_max = 0;                      // threshold found by bisection on c at this sigma
  std::vector<double> psi2_zeros;        // zeros of psi'', all regular
  CounterexampleSolution solution;
};

WeakGenericityReport verify_weak_genericity_failure(double c, double sigma);

} // namespace marr
