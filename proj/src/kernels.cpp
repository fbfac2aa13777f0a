#include "marr/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "marr/errors.hpp"

namespace marr {

namespace {

double parse_double(std::string_view s, std::string_view context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size())
      throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception &) {
    throw Error("config", "cannot parse number '" + std::string(s) + "' in " + std::string(context));
  }
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return std::string(s);
}

} // namespace

Wavelet Wavelet::gaussian(int n, int dimension) {
  if (n < 0)
    throw Error("domain", "gaussian derivative order must be nonnegative");
  if (dimension != 1 && dimension != 2)
    throw Error("unsupported_dimension", "wavelets are defined for d in {1, 2}");
  if (dimension == 2 && n != 0)
    throw Error("unsupported_dimension", "2-D Gaussian family supports order 0; use partial derivatives");
  Wavelet w;
  w.kind = WaveletKind::gaussian_derivative;
  w.order = n;
  w.dimension = dimension;
  return w;
}

Wavelet Wavelet::ricker(int dimension) {
  if (dimension != 1 && dimension != 2)
    throw Error("unsupported_dimension", "wavelets are defined for d in {1, 2}");
  Wavelet w;
  w.kind = WaveletKind::ricker;
  w.dimension = dimension;
  return w;
}

Wavelet Wavelet::custom(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw Error("domain", "custom wavelet parameters must be finite");
  Wavelet w;
  w.kind = WaveletKind::custom_affine_gaussian;
  w.a = a;
  w.b = b;
  return w;
}

Wavelet custom_wavelet(double a, double b) { return Wavelet::custom(a, b); }

std::string Wavelet::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
  case WaveletKind::ricker:
    os << "ricker";
    break;
  case WaveletKind::gaussian_derivative:
    os << "gauss:" << order;
    break;
  case WaveletKind::custom_affine_gaussian:
    os << "custom:a=" << a << ",b=" << b;
    break;
  }
  if (dimension == 2)
    os << "@2d";
  return os.str();
}

Wavelet parse_wavelet(std::string_view text) {
  std::string s = trim(text);
  int dimension = 1;
  if (s.size() > 3 && s.substr(s.size() - 3) == "@2d") {
    dimension = 2;
    s.resize(s.size() - 3);
  }
  if (s == "ricker")
    return Wavelet::ricker(dimension);
  if (s == "gauss" || s == "gaussian")
    return Wavelet::gaussian(0, dimension);
  if (s.rfind("gauss:", 0) == 0) {
    const std::string arg = s.substr(6);
    int n = 0;
    auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
    if (ec != std::errc() || p != arg.data() + arg.size())
      throw Error("config", "wavelet 'gauss:n' needs an integer order, got '" + arg + "'");
    return Wavelet::gaussian(n, dimension);
  }
  if (s.rfind("custom:", 0) == 0) {
    if (dimension != 1)
      throw Error("unsupported_dimension", "custom wavelet is 1-D only");
    double a = 0, b = 0;
    bool have_a = false, have_b = false;
    std::string rest = s.substr(7);
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw Error("config", "custom wavelet field '" + item + "' is not key=value");
      const std::string key = trim(item.substr(0, eq));
      const std::string value = trim(item.substr(eq + 1));
      if (key == "a") {
        a = parse_double(value, "custom wavelet");
        have_a = true;
      } else if (key == "b") {
        b = parse_double(value, "custom wavelet");
        have_b = true;
      } else {
        throw Error("config", "unknown custom wavelet field '" + key + "'");
      }
    }
    if (!have_a || !have_b)
      throw Error("config", "custom wavelet requires both a= and b=");
    return Wavelet::custom(a, b);
  }
  throw Error("config", "unknown wavelet descriptor '" + std::string(text) + "'");
}

double eval_derivative(const Wavelet &w, int n, double x) {
  if (n < 0)
    throw Error("domain", "derivative order must be nonnegative");
  if (w.dimension != 1)
    throw Error("unsupported_dimension", "eval_derivative is 1-D; use eval_partial in 2-D");
  switch (w.kind) {
  case WaveletKind::gaussian_derivative:
    return gaussian_derivative(w.order + n, x);
  case WaveletKind::ricker:
    return gaussian_derivative(2 + n, x);
  case WaveletKind::custom_affine_gaussian: {
    // -x e^{-x^2/2} = sqrt(2 pi) G'(x).
    double v = 0;
    if (std::abs(x) <= kGaussianWindow) {
      const double sign = (n % 2 == 0) ? -1.0 : 1.0;
      v = sign * hermite_value(n + 1, x) * std::exp(-0.5 * x * x);
    }
    if (n == 0)
      v += w.a * x + w.b;
    else if (n == 1)
      v += w.a;
    return v;
  }
  }
  return 0;
}

double eval_partial(const Wavelet &w, std::array<int, 2> alpha, double x1, double x2) {
  if (w.dimension != 2)
    throw Error("unsupported_dimension", "eval_partial requires a 2-D wavelet");
  if (alpha[0] < 0 || alpha[1] < 0)
    throw Error("domain", "negative multiindex");
  if (std::hypot(x1, x2) > kGaussianWindow)
    return 0;
  const double g = gaussian(x1) * gaussian(x2);
  const double sign = ((alpha[0] + alpha[1]) % 2 == 0) ? 1.0 : -1.0;
  if (w.kind == WaveletKind::gaussian_derivative)
    return sign * hermite_value(alpha[0], x1) * hermite_value(alpha[1], x2) * g;
  if (w.kind == WaveletKind::ricker) {
    const double l = hermite_value(alpha[0] + 2, x1) * hermite_value(alpha[1], x2) +
                     hermite_value(alpha[0], x1) * hermite_value(alpha[1] + 2, x2);
    return sign * l * g;
  }
  throw Error("unsupported_dimension", "custom wavelet is 1-D only");
}

std::vector<double> regular_zeros_of_derivative(const Wavelet &w, int n, double lo, double hi) {
  if (w.dimension != 1)
    throw Error("unsupported_dimension", "regular zeros are computed in 1-D");
  const bool pure_hermite = w.kind != WaveletKind::custom_affine_gaussian || n >= 2;
  if (pure_hermite) {
    int degree = 0;
    if (w.kind == WaveletKind::gaussian_derivative)
      degree = w.order + n;
    else if (w.kind == WaveletKind::ricker)
      degree = n + 2;
    else
      degree = n + 1;
    std::vector<double> out;
    if (degree == 0)
      return out;
    const RootSet r = real_roots(hermite(degree), lo, hi);
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r.regular[i])
        out.push_back(r.roots[i]);
    return out;
  }
  // Affine part present: sign scan plus bisection on the closed form.
  std::vector<double> out;
  const int count = 24000;
  const double h = (hi - lo) / count;
  double xa = lo, fa = eval_derivative(w, n, xa);
  for (int i = 1; i <= count; ++i) {
    const double xb = lo + i * h;
    const double fb = eval_derivative(w, n, xb);
    if (fa == 0.0) {
      // counted as a crossing only if neighbours differ in sign
    } else if (fb != 0.0 && (fa < 0) != (fb < 0)) {
      double a = xa, b = xb, sa = fa;
      for (int it = 0; it < 200 && b - a > 0; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b)
          break;
        const double fm = eval_derivative(w, n, m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm < 0) == (sa < 0))
          a = m;
        else
          b = m;
      }
      out.push_back(0.5 * (a + b));
    } else if (fb == 0.0 && i < count) {
      const double fc = eval_derivative(w, n, xb + h);
      if ((fa < 0) != (fc < 0))
        out.push_back(xb);
    }
    xa = xb;
    fa = fb;
  }
  return out;
}

ScaledKernel scale(const Wavelet &w, double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma))
    throw Error("domain", "scale: sigma must be positive");
  return ScaledKernel{w, sigma};
}

double ScaledKernel::derivative(int n, double x) const {
  if (base.dimension != 1)
    throw Error("unsupported_dimension", "ScaledKernel evaluation is 1-D");
  return eval_derivative(base, n, x / sigma) / std::pow(sigma, 1 + n);
}

GaussianExpansion gaussian_expansion(const ScaledKernel &k, int n) {
  // (G^{(m)})_sigma = sigma^m G_sigma^{(m)}.
  GaussianExpansion e;
  e.sigma = k.sigma;
  const double s = k.sigma;
  switch (k.base.kind) {
  case WaveletKind::gaussian_derivative:
    e.terms.emplace_back(k.base.order + n, std::pow(s, k.base.order));
    break;
  case WaveletKind::ricker:
    e.terms.emplace_back(2 + n, s * s);
    break;
  case WaveletKind::custom_affine_gaussian:
    // psi = sqrt(2 pi) G' + a x + b, so psi_sigma = sqrt(2 pi) sigma G_sigma' + a x / sigma^2 + b / sigma.
    e.terms.emplace_back(1 + n, std::sqrt(2 * std::numbers::pi) * s);
    if (n == 0) {
      e.p0 = k.base.b / s;
      e.p1 = k.base.a / (s * s);
    } else if (n == 1) {
      e.p0 = k.base.a / (s * s);
    }
    break;
  }
  return e;
}

} // namespace marr
