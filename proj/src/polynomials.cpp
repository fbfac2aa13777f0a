#include "marr/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "marr/errors.hpp"
#include "marr/log.hpp"

namespace marr {

namespace {

using Dense = std::vector<BigInt>;

void trim(Dense &p) {
  while (!p.empty() && p.back() == 0)
    p.pop_back();
}

int deg(const Dense &p) { return static_cast<int>(p.size()) - 1; }

BigInt dense_content(const Dense &p) {
  BigInt g = 0;
  for (const auto &c : p)
    if (c != 0)
      g = boost::multiprecision::gcd(g, abs(c));
  return g;
}

Dense dense_primitive(Dense p) {
  trim(p);
  if (p.empty())
    return p;
  BigInt g = dense_content(p);
  if (p.back() < 0)
    g = -g;
  for (auto &c : p)
    c /= g;
  return p;
}

Dense dense_derivative(const Dense &p) {
  Dense d;
  for (std::size_t i = 1; i < p.size(); ++i)
    d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

// Pseudo-division: lc(b)^(deg a - deg b + 1) a = q b + r.
void pseudo_divide(const Dense &a, const Dense &b, Dense &q, Dense &r) {
  r = a;
  trim(r);
  const int db = deg(b);
  const int delta = deg(r) - db;
  q.assign(delta >= 0 ? delta + 1 : 0, BigInt(0));
  if (delta < 0)
    return;
  const BigInt &lb = b.back();
  int steps = delta + 1;
  while (!r.empty() && deg(r) >= db) {
    const int shift = deg(r) - db;
    const BigInt lr = r.back();
    for (auto &c : q)
      c *= lb;
    q[shift] += lr;
    for (auto &c : r)
      c *= lb;
    for (int i = 0; i <= db; ++i)
      r[i + shift] -= lr * b[i];
    trim(r);
    --steps;
  }
  // Remaining multiplications keep the lc(b)^(delta+1) normalization exact.
  for (; steps > 0; --steps) {
    for (auto &c : q)
      c *= lb;
    for (auto &c : r)
      c *= lb;
  }
}

Dense pseudo_remainder(const Dense &a, const Dense &b) {
  Dense q, r;
  pseudo_divide(a, b, q, r);
  return r;
}

Dense dense_gcd(Dense a, Dense b) {
  a = dense_primitive(std::move(a));
  b = dense_primitive(std::move(b));
  if (a.empty())
    return b;
  if (b.empty())
    return a;
  if (deg(a) < deg(b))
    std::swap(a, b);
  while (!b.empty()) {
    Dense r = pseudo_remainder(a, b);
    a = std::move(b);
    b = dense_primitive(std::move(r));
  }
  if (deg(a) == 0)
    return Dense{BigInt(1)};
  return dense_primitive(std::move(a));
}

Dense dense_quotient(const Dense &a, const Dense &b) {
  Dense q, r;
  pseudo_divide(a, b, q, r);
  if (!r.empty())
    throw Error("domain", "exact_primitive_quotient: divisor does not divide dividend");
  return dense_primitive(std::move(q));
}

Dense to_dense(const IntegerPolynomial &p) {
  if (p.vars() != 1)
    throw Error("domain", "univariate operation applied to a bivariate polynomial");
  return p.ascending();
}

int dense_exact_sign(const Dense &p, double x) {
  if (p.empty())
    return 0;
  if (x == 0.0)
    return p[0] > 0 ? 1 : (p[0] < 0 ? -1 : 0);
  int e = 0;
  const double m = std::frexp(x, &e);
  const long long mant = static_cast<long long>(std::ldexp(m, 53));
  const int scale = e - 53; // x = mant * 2^scale
  const int n = deg(p);
  BigInt M = mant;
  BigInt acc = p[n];
  if (scale >= 0) {
    BigInt X = M * (BigInt(1) << static_cast<unsigned>(scale));
    for (int i = n - 1; i >= 0; --i)
      acc = acc * X + p[i];
  } else {
    // p(x) * 2^(-scale*n) = sum_i p_i M^i 2^(-scale (n-i)).
    const unsigned s = static_cast<unsigned>(-scale);
    for (int i = n - 1; i >= 0; --i)
      acc = acc * M + p[i] * (BigInt(1) << (s * static_cast<unsigned>(n - i)));
  }
  return acc > 0 ? 1 : (acc < 0 ? -1 : 0);
}

std::vector<Dense> sturm_chain(const Dense &p) {
  std::vector<Dense> chain{p, dense_derivative(p)};
  while (!chain.back().empty() && deg(chain.back()) > 0) {
    const Dense &a = chain[chain.size() - 2];
    const Dense &b = chain.back();
    Dense r = pseudo_remainder(a, b);
    if (r.empty())
      break;
    // prem carries lc(b)^(delta+1); flip so the chain holds -rem up to a positive factor.
    const int delta = deg(a) - deg(b);
    const bool negative_factor = b.back() < 0 && (delta + 1) % 2 == 1;
    BigInt g = dense_content(r);
    for (auto &c : r)
      c /= g;
    if (!negative_factor)
      for (auto &c : r)
        c = -c;
    chain.push_back(std::move(r));
  }
  return chain;
}

int sign_variations(const std::vector<Dense> &chain, double x) {
  int count = 0, last = 0;
  for (const auto &q : chain) {
    const int s = dense_exact_sign(q, x);
    if (s == 0)
      continue;
    if (last != 0 && s != last)
      ++count;
    last = s;
  }
  return count;
}

long double dense_eval(const Dense &p, long double x) {
  long double acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it)
    acc = acc * x + static_cast<long double>(*it);
  return acc;
}

// Roots of a square-free polynomial in [lo, hi]; endpoints are non-roots.
void isolate_and_refine(const Dense &p, double lo, double hi, const RootOptions &opt,
                        std::vector<double> &out) {
  const auto chain = sturm_chain(p);
  const Dense dp = dense_derivative(p);

  std::function<void(double, double, int, int)> recurse = [&](double a, double b, int va, int vb) {
    const int count = va - vb;
    if (count <= 0)
      return;
    if (count == 1) {
      int sa = dense_exact_sign(p, a);
      double lo_ = a, hi_ = b;
      while (hi_ - lo_ > opt.width) {
        const double mid = 0.5 * (lo_ + hi_);
        if (mid <= lo_ || mid >= hi_)
          break;
        const int sm = dense_exact_sign(p, mid);
        if (sm == 0) {
          lo_ = hi_ = mid;
          break;
        }
        if (sm == sa)
          lo_ = mid;
        else
          hi_ = mid;
      }
      double x = 0.5 * (lo_ + hi_);
      if (lo_ != hi_) {
        const long double fx = dense_eval(p, x), dfx = dense_eval(dp, x);
        if (dfx != 0) {
          const double polished = static_cast<double>(x - fx / dfx);
          if (polished >= lo_ && polished <= hi_)
            x = polished;
        }
      }
      out.push_back(x);
      return;
    }
    double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b)) {
      for (int k = 0; k < count; ++k)
        out.push_back(mid);
      return;
    }
    if (dense_exact_sign(p, mid) == 0) {
      out.push_back(mid);
      const double eps = std::max(std::abs(mid) * 1e-15, 1e-300) * 16;
      const double left = mid - eps, right = mid + eps;
      recurse(a, left, va, sign_variations(chain, left));
      recurse(right, b, sign_variations(chain, right), vb);
      return;
    }
    const int vm = sign_variations(chain, mid);
    recurse(a, mid, va, vm);
    recurse(mid, b, vm, vb);
  };

  if (dense_exact_sign(p, lo) == 0 || dense_exact_sign(p, hi) == 0) {
    log_warning("real_roots: interval endpoint is a root; widening by tolerance");
    while (dense_exact_sign(p, lo) == 0)
      lo -= opt.endpoint_nudge * std::max(1.0, std::abs(lo));
    while (dense_exact_sign(p, hi) == 0)
      hi += opt.endpoint_nudge * std::max(1.0, std::abs(hi));
  }
  recurse(lo, hi, sign_variations(chain, lo), sign_variations(chain, hi));
}

} // namespace

IntegerPolynomial::IntegerPolynomial(int vars) : vars_(vars) {
  if (vars != 1 && vars != 2)
    throw Error("unsupported_dimension", "IntegerPolynomial supports 1 or 2 variables");
}

IntegerPolynomial IntegerPolynomial::constant(const BigInt &c, int vars) {
  IntegerPolynomial p(vars);
  p.set_coeff({0, 0}, c);
  return p;
}

IntegerPolynomial IntegerPolynomial::monomial(const BigInt &c, Exponents e, int vars) {
  IntegerPolynomial p(vars);
  p.set_coeff(e, c);
  return p;
}

IntegerPolynomial IntegerPolynomial::from_coefficients(const std::vector<BigInt> &ascending) {
  IntegerPolynomial p(1);
  for (std::size_t i = 0; i < ascending.size(); ++i)
    p.set_coeff({static_cast<int>(i), 0}, ascending[i]);
  return p;
}

int IntegerPolynomial::degree() const {
  int d = -1;
  for (const auto &[e, c] : terms_)
    d = std::max(d, e[0] + e[1]);
  return d;
}

BigInt IntegerPolynomial::coeff(Exponents e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? BigInt(0) : it->second;
}

void IntegerPolynomial::set_coeff(Exponents e, const BigInt &c) {
  if (e[0] < 0 || e[1] < 0 || (vars_ == 1 && e[1] != 0))
    throw Error("domain", "invalid exponent for polynomial");
  if (c == 0)
    terms_.erase(e);
  else
    terms_[e] = c;
}

std::vector<BigInt> IntegerPolynomial::ascending() const {
  if (vars_ != 1)
    throw Error("domain", "ascending() requires a univariate polynomial");
  std::vector<BigInt> out(static_cast<std::size_t>(degree() + 1), BigInt(0));
  for (const auto &[e, c] : terms_)
    out[static_cast<std::size_t>(e[0])] = c;
  return out;
}

BigInt IntegerPolynomial::leading_coefficient() const {
  if (terms_.empty())
    return 0;
  if (vars_ != 1)
    throw Error("domain", "leading_coefficient() requires a univariate polynomial");
  return terms_.rbegin()->second;
}

BigInt IntegerPolynomial::content() const {
  BigInt g = 0;
  for (const auto &[e, c] : terms_)
    g = boost::multiprecision::gcd(g, abs(c));
  return g;
}

IntegerPolynomial IntegerPolynomial::primitive_part() const {
  IntegerPolynomial out(vars_);
  const BigInt g = content();
  if (g == 0)
    return out;
  for (const auto &[e, c] : terms_)
    out.terms_[e] = c / g;
  return out;
}

BigInt IntegerPolynomial::max_abs_coefficient() const {
  BigInt m = 0;
  for (const auto &[e, c] : terms_)
    m = std::max(m, BigInt(abs(c)));
  return m;
}

IntegerPolynomial IntegerPolynomial::operator+(const IntegerPolynomial &o) const {
  IntegerPolynomial out = *this;
  out.vars_ = std::max(vars_, o.vars_);
  for (const auto &[e, c] : o.terms_)
    out.set_coeff(e, out.coeff(e) + c);
  return out;
}

IntegerPolynomial IntegerPolynomial::operator-() const {
  IntegerPolynomial out = *this;
  for (auto &[e, c] : out.terms_)
    c = -c;
  return out;
}

IntegerPolynomial IntegerPolynomial::operator-(const IntegerPolynomial &o) const { return *this + (-o); }

IntegerPolynomial IntegerPolynomial::operator*(const IntegerPolynomial &o) const {
  IntegerPolynomial out(std::max(vars_, o.vars_));
  for (const auto &[e1, c1] : terms_)
    for (const auto &[e2, c2] : o.terms_) {
      const Exponents e{e1[0] + e2[0], e1[1] + e2[1]};
      out.set_coeff(e, out.coeff(e) + c1 * c2);
    }
  return out;
}

IntegerPolynomial IntegerPolynomial::operator*(const BigInt &k) const {
  IntegerPolynomial out(vars_);
  if (k == 0)
    return out;
  for (const auto &[e, c] : terms_)
    out.terms_[e] = c * k;
  return out;
}

std::string IntegerPolynomial::to_string() const {
  if (terms_.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto &[e, c] = *it;
    BigInt mag = abs(c);
    os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    const bool unit = mag == 1 && (e[0] + e[1]) > 0;
    if (!unit)
      os << mag;
    auto var = [&](const char *name, int k) {
      if (k == 0)
        return;
      os << name;
      if (k > 1)
        os << '^' << k;
    };
    var(vars_ == 1 ? "x" : "x1", e[0]);
    var("x2", e[1]);
    first = false;
  }
  return os.str();
}

IntegerPolynomial hermite(int n) {
  if (n < 0)
    throw Error("domain", "hermite: order must be nonnegative");
  BigInt nfact = 1;
  for (int i = 2; i <= n; ++i)
    nfact *= i;
  IntegerPolynomial p(1);
  for (int k = 0; 2 * k <= n; ++k) {
    BigInt denom = 1;
    for (int i = 2; i <= k; ++i)
      denom *= i;
    for (int i = 2; i <= n - 2 * k; ++i)
      denom *= i;
    denom <<= static_cast<unsigned>(k);
    BigInt c = nfact / denom;
    if (k % 2 == 1)
      c = -c;
    p.set_coeff({n - 2 * k, 0}, c);
  }
  return p;
}

IntegerPolynomial derivative(const IntegerPolynomial &p, int var) {
  if (var < 0 || var >= p.vars())
    throw Error("domain", "derivative: variable index out of range");
  IntegerPolynomial out(p.vars());
  for (const auto &[e, c] : p.terms()) {
    if (e[var] == 0)
      continue;
    auto f = e;
    f[var] -= 1;
    out.set_coeff(f, c * e[var]);
  }
  return out;
}

IntegerPolynomial rational_gcd(const IntegerPolynomial &p, const IntegerPolynomial &q) {
  if (p.is_zero() && q.is_zero())
    throw Error("domain", "rational_gcd: both inputs are zero");
  return IntegerPolynomial::from_coefficients(dense_gcd(to_dense(p), to_dense(q)));
}

IntegerPolynomial exact_primitive_quotient(const IntegerPolynomial &p, const IntegerPolynomial &q) {
  if (q.is_zero())
    throw Error("domain", "exact_primitive_quotient: zero divisor");
  return IntegerPolynomial::from_coefficients(dense_quotient(to_dense(p), to_dense(q)));
}

int exact_sign(const IntegerPolynomial &p, double x) { return dense_exact_sign(to_dense(p), x); }

RootSet real_roots(const IntegerPolynomial &p, double lo, double hi, RootOptions options) {
  Dense d = to_dense(p);
  if (d.empty())
    throw Error("domain", "real_roots: zero polynomial has no isolated roots");
  if (!(lo < hi))
    throw Error("domain", "real_roots: empty interval");
  RootSet out;
  if (deg(d) == 0)
    return out;

  // g_0 = p, g_{i+1} = gcd(g_i, g_i'); s_i = g_i / g_{i+1} holds the roots of
  // multiplicity > i, and t_i = s_i / s_{i+1} those of multiplicity exactly i+1.
  std::vector<Dense> g{dense_primitive(d)};
  while (deg(g.back()) > 0)
    g.push_back(dense_gcd(g.back(), dense_derivative(g.back())));
  std::vector<Dense> s;
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    s.push_back(dense_quotient(g[i], g[i + 1]));
  s.push_back(Dense{BigInt(1)});

  std::vector<std::pair<double, int>> found;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const Dense t = dense_quotient(s[i], s[i + 1]);
    if (deg(t) < 1)
      continue;
    std::vector<double> r;
    isolate_and_refine(t, lo, hi, options, r);
    for (double x : r)
      found.emplace_back(x, static_cast<int>(i + 1));
  }
  std::sort(found.begin(), found.end());
  for (const auto &[x, m] : found) {
    out.roots.push_back(x);
    out.multiplicities.push_back(m);
    out.regular.push_back(m % 2 == 1);
  }
  return out;
}

IntegerPolynomial laplace_hermite(const std::vector<int> &alpha, int d) {
  if (d > 2 || d < 1)
    throw Error("unsupported_dimension", "laplace_hermite supports d in {1, 2}");
  if (static_cast<int>(alpha.size()) != d)
    throw Error("domain", "laplace_hermite: multiindex length must equal the dimension");
  for (int a : alpha)
    if (a < 0)
      throw Error("domain", "laplace_hermite: negative multiindex component");
  if (d == 1)
    return hermite(alpha[0] + 2);
  auto lift = [](const IntegerPolynomial &h, int var) {
    IntegerPolynomial out(2);
    for (const auto &[e, c] : h.terms()) {
      IntegerPolynomial::Exponents f{0, 0};
      f[var] = e[0];
      out.set_coeff(f, c);
    }
    return out;
  };
  const auto a1 = lift(hermite(alpha[0] + 2), 0) * lift(hermite(alpha[1]), 1);
  const auto a2 = lift(hermite(alpha[0]), 0) * lift(hermite(alpha[1] + 2), 1);
  return a1 + a2;
}

} // namespace marr
