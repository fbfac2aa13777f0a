#include "marr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "marr/errors.hpp"

namespace marr {

namespace {

std::ofstream open_output(const std::filesystem::path &path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("io", "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_input(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("io", "cannot open " + path.string());
  return in;
}

// Field access with the JSON path in the diagnostic.
const Json &field(const Json &j, const char *key, const std::string &where) {
  if (!j.is_object() || !j.contains(key))
    throw Error("config", where + ": missing field '" + key + "'");
  return j.at(key);
}

template <typename T> T get(const Json &j, const char *key, const std::string &where) {
  const Json &v = field(j, key, where);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception &) {
    throw Error("config", where + "." + key + ": wrong type (" + v.type_name() + ")");
  }
}

std::string kind_name(ZeroKind k) { return k == ZeroKind::regular ? "regular" : "non_regular"; }

ZeroKind parse_kind(const std::string &s, const std::string &where) {
  if (s == "regular")
    return ZeroKind::regular;
  if (s == "non_regular")
    return ZeroKind::non_regular;
  throw Error("config", where + ": unknown zero kind '" + s + "'");
}

Json intervals(const std::vector<Interval> &v) {
  Json a = Json::array();
  for (const auto &i : v)
    a.push_back({i.lo, i.hi});
  return a;
}

Json piecewise(const PiecewiseLinear &h) { return {{"x", h.x}, {"y", h.y}}; }

Json index_pair(std::array<int, 2> a, int dimension) {
  return dimension == 1 ? Json(a[0]) : Json::array({a[0], a[1]});
}

std::string index_cell(std::array<int, 2> a, int dimension) {
  return dimension == 1 ? std::to_string(a[0]) : "\"" + std::to_string(a[0]) + "," + std::to_string(a[1]) + "\"";
}

Json witness_json(const AlgebraicWitness &w) {
  return {{"i", w.i}, {"w", w.w}, {"sigma", w.sigma}, {"f_value", w.f_value}, {"g_value", w.g_value},
          {"strict", w.strict}};
}

Json tail_side(const TruncatedTailSide &s) {
  return {{"N", s.N}, {"amplitude", s.amplitude}, {"half", intervals(s.half)}};
}

Json optional_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

} // namespace

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Json to_json(const IntegerPolynomial &p) {
  Json terms = Json::array();
  for (const auto &[e, c] : p.terms()) {
    Json ex = p.vars() == 1 ? Json::array({e[0]}) : Json::array({e[0], e[1]});
    terms.push_back({ex, c.str()});
  }
  return {{"vars", p.vars()}, {"terms", terms}};
}

IntegerPolynomial polynomial_from_json(const Json &j) {
  const int vars = get<int>(j, "vars", "polynomial");
  if (vars != 1 && vars != 2)
    throw Error("config", "polynomial.vars: must be 1 or 2");
  IntegerPolynomial p(vars);
  const Json &terms = field(j, "terms", "polynomial");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string where = "polynomial.terms[" + std::to_string(i) + "]";
    const Json &t = terms[i];
    if (!t.is_array() || t.size() != 2 || !t[0].is_array() || t[0].size() != static_cast<std::size_t>(vars) ||
        !t[1].is_string())
      throw Error("config", where + ": expected [[exponents], \"coefficient\"]");
    IntegerPolynomial::Exponents e{t[0][0].get<int>(), vars == 2 ? t[0][1].get<int>() : 0};
    try {
      p.set_coeff(e, BigInt(t[1].get<std::string>()));
    } catch (const std::exception &) {
      throw Error("config", where + ": coefficient is not a decimal integer");
    }
  }
  return p;
}

Json to_json(const Signal &f) {
  return std::visit(
      [](const auto &s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointMassDistribution>) {
          Json atoms = Json::array();
          for (const auto &a : s.atoms)
            atoms.push_back({{"x", a.x}, {"order", a.order}, {"weight", a.weight}});
          return {{"kind", "point_masses"}, {"atoms", atoms}};
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          Json terms = Json::array();
          for (const auto &t : s.terms)
            terms.push_back({{"center", t.center}, {"sigma", t.sigma}, {"order", t.order}, {"weight", t.weight}});
          return {{"kind", "gaussian_mixture"}, {"terms", terms}};
        } else if constexpr (std::is_same_v<T, SampledSignal>) {
          std::vector<double> v(s.values.data(), s.values.data() + s.values.size());
          return {{"kind", "sampled"}, {"origin", s.grid.origin}, {"spacing", s.grid.spacing}, {"values", v}};
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          Json j = piecewise(s);
          j["kind"] = "piecewise_linear";
          return j;
        } else if constexpr (std::is_same_v<T, AlgebraicTailDensity>) {
          return {{"kind", "algebraic_tail"}, {"p", s.p}, {"amplitude", s.amplitude}, {"support", intervals(s.support)}};
        } else {
          Json parts = Json::array();
          for (const auto &p : s.parts)
            parts.push_back({{"weight", p.weight}, {"signal", to_json(*p.signal)}});
          return {{"kind", "composite"}, {"parts", parts}};
        }
      },
      f.value);
}

namespace {

Signal signal_from_json_at(const Json &j, const std::string &where) {
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "point_masses") {
    PointMassDistribution d;
    for (const auto &a : field(j, "atoms", where))
      d.atoms.push_back({get<double>(a, "x", where + ".atoms"), get<int>(a, "order", where + ".atoms"),
                         get<double>(a, "weight", where + ".atoms")});
    return d;
  }
  if (kind == "gaussian_mixture") {
    GaussianMixture m;
    for (const auto &t : field(j, "terms", where))
      m.terms.push_back({get<double>(t, "center", where + ".terms"), get<double>(t, "sigma", where + ".terms"),
                         get<int>(t, "order", where + ".terms"), get<double>(t, "weight", where + ".terms")});
    return m;
  }
  if (kind == "sampled") {
    const auto v = get<std::vector<double>>(j, "values", where);
    Eigen::VectorXd values = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    return SampledSignal(UniformGrid{get<double>(j, "origin", where), get<double>(j, "spacing", where), v.size()},
                         values);
  }
  if (kind == "piecewise_linear")
    return PiecewiseLinear{get<std::vector<double>>(j, "x", where), get<std::vector<double>>(j, "y", where)};
  if (kind == "algebraic_tail") {
    AlgebraicTailDensity h{get<double>(j, "p", where), get<double>(j, "amplitude", where), {}};
    if (j.contains("support"))
      for (const auto &i : j.at("support"))
        h.support.push_back({i.at(0).get<double>(), i.at(1).get<double>()});
    return h;
  }
  if (kind == "composite") {
    CompositeSignal c;
    const Json &parts = field(j, "parts", where);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::string at = where + ".parts[" + std::to_string(i) + "]";
      c.parts.push_back({get<double>(parts[i], "weight", at),
                         std::make_shared<const Signal>(signal_from_json_at(field(parts[i], "signal", at), at))});
    }
    return c;
  }
  throw Error("config", where + ".kind: unknown signal kind '" + kind + "'");
}

} // namespace

Signal signal_from_json(const Json &j) { return signal_from_json_at(j, "signal"); }

Signal load_signal(const std::filesystem::path &path) {
  auto in = open_input(path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error("config", path.string() + ": " + e.what());
  }
  return signal_from_json(j);
}

void write_sampled_csv(const std::filesystem::path &path, const SampledSignal &s) {
  auto out = open_output(path);
  out << "x,value\n";
  for (std::size_t i = 0; i < s.grid.count; ++i)
    out << format_double(s.grid.at(i)) << ',' << format_double(s.values[static_cast<Eigen::Index>(i)]) << '\n';
}

SampledSignal read_sampled_csv(const std::filesystem::path &path) {
  auto in = open_input(path);
  std::string line;
  std::vector<double> xs, vs;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || (number == 1 && line.rfind("x,", 0) == 0))
      continue;
    const auto comma = line.find(',');
    char *end = nullptr;
    const double x = std::strtod(line.c_str(), &end);
    if (comma == std::string::npos || end != line.c_str() + comma)
      throw Error("config", path.string() + ":" + std::to_string(number) + ": expected 'x,value'");
    xs.push_back(x);
    vs.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  if (xs.size() < 2)
    throw Error("config", path.string() + ": need at least 2 samples");
  const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs.front() - h * static_cast<double>(i)) > 1e-9 * std::max(1.0, std::abs(h) * xs.size()))
      throw Error("config", path.string() + ":" + std::to_string(i + 2) + ": samples are not uniformly spaced");
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
  return SampledSignal(UniformGrid{xs.front(), h, xs.size()}, v);
}

void write_slice_csv(const std::filesystem::path &path, const TransformSlice &slice) {
  auto out = open_output(path);
  out << "sigma,x,value\n";
  const auto &s = slice.samples;
  const std::string sigma = format_double(slice.sigma);
  for (std::size_t i = 0; i < s.grid.count; ++i)
    out << sigma << ',' << format_double(s.grid.at(i)) << ',' << format_double(s.values[static_cast<Eigen::Index>(i)])
        << '\n';
}

void write_normalized_csv(const std::filesystem::path &path, double sigma, const SampledSignal &z) {
  auto out = open_output(path);
  out << "sigma,w,Z\n";
  const std::string s = format_double(sigma);
  for (std::size_t i = 0; i < z.grid.count; ++i)
    out << s << ',' << format_double(z.grid.at(i)) << ',' << format_double(z.values[static_cast<Eigen::Index>(i)])
        << '\n';
}

void write_zeros_csv(const std::filesystem::path &path, const std::vector<ZeroPoint> &zeros) {
  auto out = open_output(path);
  out << "sigma,x,kind,residual\n";
  for (const auto &z : zeros)
    out << format_double(z.sigma) << ',' << format_double(z.x) << ',' << kind_name(z.kind) << ','
        << format_double(z.residual) << '\n';
}

Json to_json(const std::vector<LevelZeros> &levels) {
  Json a = Json::array();
  for (const auto &l : levels) {
    Json zs = Json::array();
    for (const auto &z : l.zeros)
      zs.push_back({{"x", z.x}, {"kind", kind_name(z.kind)}, {"residual", z.residual}});
    a.push_back({{"sigma", l.sigma}, {"spacing", l.spacing}, {"lo", l.lo}, {"hi", l.hi}, {"zeros", zs}});
  }
  return {{"levels", a}};
}

std::vector<LevelZeros> level_zeros_from_json(const Json &j) {
  std::vector<LevelZeros> out;
  const Json &levels = field(j, "levels", "zero_sets");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string where = "zero_sets.levels[" + std::to_string(i) + "]";
    const Json &l = levels[i];
    LevelZeros z;
    z.sigma = get<double>(l, "sigma", where);
    z.spacing = get<double>(l, "spacing", where);
    z.lo = get<double>(l, "lo", where);
    z.hi = get<double>(l, "hi", where);
    for (const auto &p : field(l, "zeros", where))
      z.zeros.push_back({get<double>(p, "x", where), z.sigma, parse_kind(get<std::string>(p, "kind", where), where),
                         get<double>(p, "residual", where)});
    if (!out.empty() && !(z.sigma > out.back().sigma))
      throw Error("config", where + ".sigma: levels must be strictly increasing in sigma");
    out.push_back(std::move(z));
  }
  return out;
}

Json to_json(const std::vector<EdgeContour> &contours) {
  Json a = Json::array();
  for (const auto &c : contours) {
    Json v = Json::array();
    for (const auto &p : c.vertices)
      v.push_back({p.x, p.sigma});
    a.push_back({{"id", c.id},
                 {"persistent", c.persistent},
                 {"terminal", c.terminal == Terminal::reaches_top ? "reaches_top" : "closes_arc"},
                 {"starts_at_bottom", c.starts_at_bottom},
                 {"touches_window", c.touches_window},
                 {"vertices", v}});
  }
  return a;
}

std::string contours_svg(const std::vector<EdgeContour> &contours, SvgOptions o) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double s_lo = x_lo, s_hi = -x_lo;
  for (const auto &c : contours)
    for (const auto &v : c.vertices) {
      x_lo = std::min(x_lo, v.x), x_hi = std::max(x_hi, v.x);
      s_lo = std::min(s_lo, v.sigma), s_hi = std::max(s_hi, v.sigma);
    }
  if (!(x_hi > x_lo))
    x_lo = std::isfinite(x_lo) ? x_lo - 1 : -1, x_hi = std::isfinite(x_hi) ? x_hi + 1 : 1;
  const bool log_axis = o.log_sigma && s_lo > 0;
  if (!(s_hi > s_lo))
    s_lo = std::isfinite(s_lo) ? s_lo * 0.5 : 0.5, s_hi = std::isfinite(s_hi) ? s_hi * 2 : 2;
  const auto sy = [&](double s) { return log_axis ? std::log(s) : s; };
  const double plot_w = o.width - 2 * o.margin, plot_h = o.height - 2 * o.margin;
  const auto px = [&](double x) { return o.margin + plot_w * (x - x_lo) / (x_hi - x_lo); };
  const auto py = [&](double s) { return o.height - o.margin - plot_h * (sy(s) - sy(s_lo)) / (sy(s_hi) - sy(s_lo)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(o.width) << "\" height=\""
      << format_double(o.height) << "\">\n";
  const double left = o.margin, right = o.width - o.margin, top = o.margin, bottom = o.height - o.margin;
  svg << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
      << "\" y2=\"" << bottom << "\"/><line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << left << "\" y2=\""
      << top << "\"/></g>\n";
  svg << "<g font-size=\"12\" font-family=\"sans-serif\">";
  svg << "<text x=\"" << left << "\" y=\"" << bottom + 16 << "\">" << format_double(x_lo) << "</text>";
  svg << "<text x=\"" << right << "\" y=\"" << bottom + 16 << "\" text-anchor=\"end\">" << format_double(x_hi)
      << "</text>";
  svg << "<text x=\"" << (left + right) / 2 << "\" y=\"" << bottom + 32 << "\" text-anchor=\"middle\">x</text>";
  svg << "<text x=\"" << left - 4 << "\" y=\"" << bottom << "\" text-anchor=\"end\">" << format_double(s_lo)
      << "</text>";
  svg << "<text x=\"" << left - 4 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << format_double(s_hi)
      << "</text>";
  svg << "<text x=\"" << left - 4 << "\" y=\"" << (top + bottom) / 2 << "\" text-anchor=\"end\">"
      << (log_axis ? "sigma (log)" : "sigma") << "</text></g>\n";
  for (const auto &c : contours) {
    svg << "<polyline fill=\"none\" stroke=\"" << (c.persistent ? "#1f4e9c" : "#b33") << "\" stroke-width=\"1.5\""
        << (c.persistent ? "" : " stroke-dasharray=\"4 2\"") << " points=\"";
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(c.vertices[i].x), py(c.vertices[i].sigma));
      svg << buf;
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

Json to_json(const MomentVector &m) {
  Json mu = Json::array();
  for (double v : m.mu)
    mu.push_back(optional_number(v));
  return {{"n0", m.n0}, {"normalization", m.normalization == Normalization::raw ? "raw" : "normalized"}, {"mu", mu}};
}

Json recovery_json(const RecoveryReport &r, const std::vector<double> &ladder) {
  Json residuals = Json::array(), systems = Json::array();
  for (const auto &s : r.systems) {
    const double worst = s.fit_residual.empty() ? 0 : *std::max_element(s.fit_residual.begin(), s.fit_residual.end());
    residuals.push_back(worst);
    systems.push_back({{"order", s.order},
                       {"mu", s.mu},
                       {"w_prime", s.w_prime},
                       {"design", s.design},
                       {"limit", s.limit},
                       {"fit_residual", s.fit_residual},
                       {"threshold", s.threshold}});
  }
  Json j{{"n0", r.moments.n0}, {"moments", to_json(r.moments).at("mu")}, {"residuals", residuals},
         {"ladder", ladder},   {"systems", systems}};
  j["truncated_at"] = r.truncated_at ? Json(*r.truncated_at) : Json(nullptr);
  j["messages"] = r.messages;
  return j;
}

void write_spectrum_csv(const std::filesystem::path &path, const Reconstruction &r) {
  auto out = open_output(path);
  out << "omega,re,im\n";
  for (std::size_t i = 0; i < r.omega.size(); ++i)
    out << format_double(r.omega[i]) << ',' << format_double(r.spectrum[i].real()) << ','
        << format_double(r.spectrum[i].imag()) << '\n';
}

void write_sweep_csv(const std::filesystem::path &path, const std::vector<ContainmentReport> &reports) {
  auto out = open_output(path);
  out << "alpha,beta,verdict,witness_x1,witness_x2,min_abs_val\n";
  for (const auto &r : reports)
    out << index_cell(r.first, r.dimension) << ',' << index_cell(r.second, r.dimension) << ',' << to_string(r.verdict)
        << ',' << format_double(r.witness[0]) << ',' << format_double(r.witness[1]) << ','
        << format_double(r.min_abs_value) << '\n';
}

Json sweep_summary(const std::vector<ContainmentReport> &reports) {
  std::size_t counts[3] = {0, 0, 0};
  double worst_first = 0, least_second = std::numeric_limits<double>::infinity();
  for (const auto &r : reports) {
    ++counts[static_cast<int>(r.verdict)];
    worst_first = std::max(worst_first, r.first_value);
    least_second = std::min(least_second, r.second_value);
  }
  Json j{{"reports", reports.size()},
         {"not_contained", counts[0]},
         {"contained", counts[1]},
         {"inconclusive", counts[2]},
         {"max_first_value", worst_first},
         {"min_second_value", optional_number(least_second)}};
  Json failures = Json::array();
  for (const auto &r : reports)
    if (r.verdict != Containment::not_contained)
      failures.push_back({{"alpha", index_pair(r.first, r.dimension)},
                          {"beta", index_pair(r.second, r.dimension)},
                          {"verdict", to_string(r.verdict)},
                          {"detail", r.detail}});
  j["failures"] = failures;
  return j;
}

Json to_json(const CounterexampleSolution &s) {
  return {{"a", s.a},           {"b", s.b}, {"x_star", s.x_star}, {"residual", s.residual}, {"iterations", s.iterations},
          {"fallback_used", s.fallback_used}};
}

Json to_json(const WeakGenericityReport &r) {
  return {{"c", r.c},
          {"sigma", r.sigma},
          {"regular_psi", r.regular_psi},
          {"all_psi", r.all_psi},
          {"regular_perturbed", r.regular_perturbed},
          {"all_perturbed", r.all_perturbed},
          {"indistinguishable", r.indistinguishable},
          {"c_max", r.c_max},
          {"psi2_zeros", r.psi2_zeros},
          {"solution", to_json(r.solution)}};
}

Json to_json(const SmallScaleResult &r) {
  Json stages = Json::array();
  for (const auto &s : r.stages)
    stages.push_back({{"n", s.n},
                      {"c", s.c},
                      {"alpha", s.alpha},
                      {"beta", s.beta},
                      {"sigma", s.sigma},
                      {"sign_values", s.sign_values},
                      {"l1_increment", s.l1_increment},
                      {"l1_expected", s.l1_expected},
                      {"shrink_steps", s.shrink_steps},
                      {"h", piecewise(s.h)}});
  Json table = Json::array();
  for (std::size_t k = 0; k < r.table.size(); ++k)
    table.push_back({{"k", k + 1},
                     {"sigma", r.sigmas[k]},
                     {"x", std::sqrt(r.sigmas[k] * r.sigmas[k] + 1)},
                     {"minus", r.table[k][0]},
                     {"plus", r.table[k][1]},
                     {"expected_sign", k % 2 == 0 ? 1 : -1}});
  return {{"stages", stages},
          {"h", piecewise(r.h)},
          {"laplacian", to_json(Signal(r.laplacian))},
          {"sigmas", r.sigmas},
          {"table", table},
          {"strict", r.strict},
          {"complete", r.complete},
          {"l1_norm", r.l1_norm},
          {"ladder", r.ladder},
          {"displacement", r.displacement},
          {"crossing_sigmas", r.crossing_sigmas},
          {"traced_contours", r.traced_contours},
          {"message", r.message}};
}

Json to_json(const AlgebraicDecayResult &r) {
  Json stages = Json::array();
  for (const auto &s : r.stages) {
    Json ws = Json::array();
    for (const auto &w : s.witnesses)
      ws.push_back(witness_json(w));
    stages.push_back({{"k", s.k},
                      {"f", tail_side(s.f)},
                      {"g", tail_side(s.g)},
                      {"a", s.a},
                      {"b", s.b},
                      {"mu_f", s.mu_f},
                      {"mu_g", s.mu_g},
                      {"witnesses", ws}});
  }
  Json ws = Json::array();
  for (const auto &w : r.witnesses)
    ws.push_back(witness_json(w));
  return {{"N", r.N},
          {"amplitude", r.amplitude},
          {"orientation", r.orientation},
          {"stages", stages},
          {"witnesses", ws},
          {"mu_gap", r.mu_gap},
          {"max_moment_error", r.max_moment_error},
          {"complete", r.complete},
          {"message", r.message}};
}

Json to_json(const QReport &r) {
  Json levels = Json::array();
  for (const auto &l : r.levels)
    levels.push_back({{"sigma", l.sigma},
                      {"q0", l.q0},
                      {"zeros", l.zeros},
                      {"exactly_two", l.exactly_two},
                      {"positive_outside", l.positive_outside}});
  return {{"a0", r.a0}, {"levels", levels}, {"pass", r.pass}};
}

Json to_json(const SubsetReport &r) {
  return {{"t1", r.t1},
          {"t2", r.t2},
          {"crossings_t1", r.crossings_t1},
          {"crossings_t2", r.crossings_t2},
          {"matched_ids", r.matched_ids},
          {"unmatched_ids", r.unmatched_ids},
          {"subset", to_string(r.subset)},
          {"local_minima", r.local_minima},
          {"multiple_crossings", r.multiple_crossings},
          {"midline_gaps", r.midline_gaps},
          {"window_exit", r.window_exit},
          {"suggestion", r.suggestion},
          {"t_levels", r.t_levels},
          {"contours", to_json(r.contours)}};
}

void write_json(const std::filesystem::path &path, const Json &j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  auto out = open_output(path);
  out << text;
}

} // namespace marr
