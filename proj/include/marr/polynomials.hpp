#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace marr {

using BigInt = boost::multiprecision::cpp_int;

// Exact integer polynomial in one or two variables. Terms with zero
// coefficient are never stored, so the zero polynomial has an empty map.
class IntegerPolynomial {
public:
  using Exponents = std::array<int, 2>;

  explicit IntegerPolynomial(int vars = 1);

  static IntegerPolynomial constant(const BigInt &c, int vars = 1);
  static IntegerPolynomial monomial(const BigInt &c, Exponents e, int vars);
  // Univariate from ascending coefficients.
  static IntegerPolynomial from_coefficients(const std::vector<BigInt> &ascending);

  int vars() const { return vars_; }
  bool is_zero() const { return terms_.empty(); }
  // Total degree; -1 for the zero polynomial.
  int degree() const;

  BigInt coeff(int i) const { return coeff(Exponents{i, 0}); }
  BigInt coeff(Exponents e) const;
  void set_coeff(Exponents e, const BigInt &c);

  const std::map<Exponents, BigInt> &terms() const { return terms_; }

  // Univariate only.
  std::vector<BigInt> ascending() const;
  BigInt leading_coefficient() const;

  BigInt content() const;
  IntegerPolynomial primitive_part() const;
  BigInt max_abs_coefficient() const;

  IntegerPolynomial operator+(const IntegerPolynomial &o) const;
  IntegerPolynomial operator-(const IntegerPolynomial &o) const;
  IntegerPolynomial operator*(const IntegerPolynomial &o) const;
  IntegerPolynomial operator*(const BigInt &c) const;
  IntegerPolynomial operator-() const;
  bool operator==(const IntegerPolynomial &o) const { return vars_ == o.vars_ && terms_ == o.terms_; }
  bool operator!=(const IntegerPolynomial &o) const { return !(*this == o); }

  template <typename Scalar> Scalar eval(Scalar x) const;
  template <typename Scalar> Scalar eval(Scalar x1, Scalar x2) const;

  std::string to_string() const;

private:
  int vars_;
  std::map<Exponents, BigInt> terms_;
};

// H_n = sum_k (-1)^k n! / (k! (n-2k)! 2^k) x^(n-2k).
IntegerPolynomial hermite(int n);

// Formal derivative in variable `var` (0-based).
IntegerPolynomial derivative(const IntegerPolynomial &p, int var = 0);

// Primitive gcd over Q with positive leading coefficient (primitive PRS).
IntegerPolynomial rational_gcd(const IntegerPolynomial &p, const IntegerPolynomial &q);

// Exact quotient over Q, returned as a primitive integer polynomial.
// Requires that q divide p over Q.
IntegerPolynomial exact_primitive_quotient(const IntegerPolynomial &p, const IntegerPolynomial &q);

// Sign of p at the dyadic rational x, computed in exact integer arithmetic.
int exact_sign(const IntegerPolynomial &p, double x);

struct RootSet {
  std::vector<double> roots;
  std::vector<int> multiplicities;
  std::vector<bool> regular; // odd multiplicity
  std::size_t size() const { return roots.size(); }
};

struct RootOptions {
  double width = 1e-13;      // bisection bracket width before the Newton polish
  double endpoint_nudge = 1e-9;
};

// All real roots in [lo, hi]. Isolation by Sturm sequences on the exact
// square-free factors, then sign bisection and one Newton polish.
RootSet real_roots(const IntegerPolynomial &p, double lo, double hi, RootOptions options = {});

// L_alpha(x) = sum_i H_{alpha_i+2}(x_i) prod_{j != i} H_{alpha_j}(x_j), d in {1, 2}.
IntegerPolynomial laplace_hermite(const std::vector<int> &alpha, int d);

// Floating-point H_n(x) by the three-term recurrence He_{n+1} = x He_n - n He_{n-1}.
template <typename Scalar> Scalar hermite_value(int n, Scalar x) {
  if (n == 0)
    return Scalar(1);
  Scalar prev(1), cur = x;
  for (int k = 1; k < n; ++k) {
    const Scalar next = x * cur - Scalar(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// p(x) / max|coefficient|: scale-free residual used for zero certification.
template <typename Scalar> Scalar normalized_value(const IntegerPolynomial &p, Scalar x) {
  const Scalar scale = static_cast<Scalar>(p.max_abs_coefficient());
  return p.eval<Scalar>(x) / scale;
}

template <typename Scalar> Scalar normalized_value(const IntegerPolynomial &p, Scalar x1, Scalar x2) {
  const Scalar scale = static_cast<Scalar>(p.max_abs_coefficient());
  return p.eval<Scalar>(x1, x2) / scale;
}

template <typename Scalar> Scalar IntegerPolynomial::eval(Scalar x) const {
  Scalar acc(0);
  int last = degree();
  // Horner over the sparse map in descending order.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const int e = it->first[0];
    for (int k = e; k < last; ++k)
      acc *= x;
    acc += static_cast<Scalar>(it->second);
    last = e;
  }
  for (int k = 0; k < last; ++k)
    acc *= x;
  return acc;
}

template <typename Scalar> Scalar IntegerPolynomial::eval(Scalar x1, Scalar x2) const {
  Scalar acc(0);
  for (const auto &[e, c] : terms_) {
    Scalar m = static_cast<Scalar>(c);
    for (int k = 0; k < e[0]; ++k)
      m *= x1;
    for (int k = 0; k < e[1]; ++k)
      m *= x2;
    acc += m;
  }
  return acc;
}

} // namespace marr
