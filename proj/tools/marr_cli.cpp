#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marr/counterexamples.hpp"
#include "marr/edges.hpp"
#include "marr/errors.hpp"
#include "marr/genericity.hpp"
#include "marr/io.hpp"
#include "marr/log.hpp"
#include "marr/parallel.hpp"
#include "marr/recovery.hpp"
#include "marr/transform.hpp"

namespace fs = std::filesystem;
using namespace marr;

namespace {

// JSON config files: one object per subcommand, scalar values only. Also the manifest format.
class ConfigJSON : public CLI::Config {
public:
  std::string to_config(const CLI::App *app, bool default_also, bool, std::string) const override {
    return section(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
    Json j;
    try {
      j = Json::parse(input);
    } catch (const nlohmann::json::parse_error &e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!j.is_object())
      throw CLI::ConversionError("config: top level must be an object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

private:
  static Json section(const CLI::App *app, bool default_also) {
    Json j = Json::object();
    for (const CLI::Option *opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable())
        continue;
      const std::string &name = opt->get_lnames()[0];
      if (name == "config" || name == "help")
        continue;
      if (opt->get_expected_max() != 0) {
        if (opt->count() >= 1)
          j[name] = opt->results().back();
        else if (default_also && !opt->get_default_str().empty())
          j[name] = opt->get_default_str();
      } else {
        j[name] = opt->count() > 0;
      }
    }
    for (const CLI::App *sub : app->get_subcommands())
      j[sub->get_name()] = section(sub, default_also);
    return j;
  }

  static void collect(const Json &j, std::vector<std::string> parents, std::vector<CLI::ConfigItem> &items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto p = parents;
        p.push_back(it.key());
        collect(*it, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_boolean())
        item.inputs = {it->get<bool>() ? "true" : "false"};
      else if (it->is_string())
        item.inputs = {it->get<std::string>()};
      else if (it->is_number())
        item.inputs = {it->dump()};
      else
        throw CLI::ConversionError("config: field '" + it.key() + "' must be a scalar");
      items.push_back(std::move(item));
    }
  }
};

struct Global {
  std::string out = "marr_out";
  unsigned workers = 0;
  std::uint64_t seed = 1;
  std::string log_level = "warning";
};

struct SignalOptions {
  std::string signal = "gaussian";
  std::string wavelet = "ricker";
  std::string ladder;
  double half_width = 8, margin = 4;
  std::size_t points = 4001;
};

unsigned resolve_workers(const Global &g) { return g.workers > 0 ? g.workers : default_workers(); }

std::map<std::string, double> parse_params(const std::string &text, const std::string &where) {
  std::map<std::string, double> params;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw Error("config", where + ": expected key=value, got '" + item + "'");
    char *end = nullptr;
    const std::string value = item.substr(eq + 1);
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0')
      throw Error("config", where + ": '" + item.substr(0, eq) + "' is not a number");
    params[item.substr(0, eq)] = v;
  }
  return params;
}

double param(const std::map<std::string, double> &p, const std::string &key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

// Builtin names with optional ":k=v,..." parameters, else a JSON signal file or a two-column CSV.
Signal make_signal(const std::string &spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const auto p = colon == std::string::npos ? std::map<std::string, double>{} : parse_params(spec.substr(colon + 1), "--signal " + name);
  if (name == "gaussian")
    return gaussian_signal(param(p, "c", 0), param(p, "s", 1), param(p, "w", 1));
  if (name == "zero")
    return zero_signal();
  if (name == "delta")
    return delta_signal(param(p, "a", 0), static_cast<int>(param(p, "n", 0)), param(p, "w", 1));
  if (name == "xgauss")
    return GaussianMixture{{{0, 1, 1, -1.0}}};
  if (name == "mixture3")
    return GaussianMixture{{{-6, 0.6, 0, 1.0}, {0, 0.8, 0, 0.7}, {5, 0.5, 0, 1.2}}};
  if (name == "gprime2")
    return GaussianMixture{{{0, 1, 2, 1.0}}};
  if (name == "algebraic")
    return AlgebraicTailDensity{param(p, "p", 6), param(p, "A", 1), {}};
  if (name == "box") {
    const double w = param(p, "w", 1);
    return AlgebraicTailDensity{0, param(p, "A", 1), {{-w, w}}};
  }
  const fs::path path(spec);
  if (!fs::exists(path))
    throw Error("config", "--signal: '" + spec + "' is neither a builtin nor an existing file");
  if (path.extension() == ".csv")
    return read_sampled_csv(path);
  return load_signal(path);
}

std::vector<double> parse_list(const std::string &text, const std::string &where) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char *end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0')
      throw Error("config", where + ": '" + item + "' is not a number");
    v.push_back(x);
  }
  if (v.empty())
    throw Error("config", where + ": empty list");
  return v;
}

std::array<int, 2> parse_index(const std::string &text, const std::string &where) {
  const auto v = parse_list(text, where);
  if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
    throw Error("config", where + ": expected two integers 'a,b'");
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

std::string indexed(const char *stem, std::size_t i, const char *ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.%s", stem, i, ext);
  return buf;
}

std::vector<TransformSlice> run_transform(const SignalOptions &o, unsigned workers) {
  const Signal f = make_signal(o.signal);
  TransformOptions t;
  t.workers = workers;
  return wavelet_transform_scaled(f, parse_wavelet(o.wavelet), parse_ladder(o.ladder), o.half_width, o.margin,
                                  o.points, t);
}

void add_signal_options(CLI::App *cmd, SignalOptions &o, const char *ladder) {
  o.ladder = ladder;
  cmd->add_option("--signal", o.signal, "builtin[:k=v,...] | signal.json | samples.csv");
  cmd->add_option("--wavelet", o.wavelet, "ricker | gauss:n | custom:a=..,b=..");
  cmd->add_option("--ladder", o.ladder, "geometric:lo:hi:n | dyadic:s0:n[:per_octave] | list:s1,s2,..");
  cmd->add_option("--half-width", o.half_width, "slice window in units of sigma");
  cmd->add_option("--margin", o.margin, "extra window beyond half-width * sigma");
  cmd->add_option("--points", o.points, "samples per slice");
}

struct TransformCmd {
  SignalOptions s;
  int normalized = -1;
  bool svg = false;
};

std::string cmd_transform(const TransformCmd &c, const Global &g, const fs::path &out) {
  const auto slices = run_transform(c.s, resolve_workers(g));
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    write_slice_csv(out / indexed("slice", i, "csv"), slices[i]);
    const auto z = find_zeros(slices[i]);
    zeros += z.size();
    write_zeros_csv(out / indexed("zeros", i, "csv"), z);
    if (c.normalized >= 0) {
      const double sigma = slices[i].sigma;
      const auto &grid = slices[i].samples.grid;
      const auto wg = UniformGrid::span(grid.origin / sigma, grid.back() / sigma, grid.count);
      write_normalized_csv(out / indexed("normalized", i, "csv"), sigma, normalized_slice(slices[i], c.normalized, wg));
    }
  }
  std::ostringstream s;
  s << "transform: " << slices.size() << " slices, " << zeros << " zeros\n";
  if (c.svg) {
    const auto contours = trace_contours(slices);
    write_json(out / "contours.json", to_json(contours));
    write_text(out / "contours.svg", contours_svg(contours));
    s << "contours: " << contours.size() << "\n";
  }
  return s.str();
}

struct EdgesCmd {
  SignalOptions s;
  bool regular_only = false;
  std::size_t spot_check = 0;
};

std::string cmd_edges(const EdgesCmd &c, const Global &g, const fs::path &out) {
  const unsigned workers = resolve_workers(g);
  const auto slices = run_transform(c.s, workers);
  ZeroOptions zo;
  zo.detect_non_regular = !c.regular_only;
  const auto levels = level_zeros(slices, zo, workers);
  const auto contours = trace_contours(levels);
  std::vector<ZeroPoint> all;
  for (const auto &l : levels)
    all.insert(all.end(), l.zeros.begin(), l.zeros.end());
  write_zeros_csv(out / "zeros.csv", all);
  write_json(out / "zero_sets.json", to_json(levels));
  write_json(out / "contours.json", to_json(contours));
  write_text(out / "contours.svg", contours_svg(contours));
  std::size_t persistent = 0;
  for (const auto &ct : contours)
    persistent += ct.persistent;
  std::ostringstream s;
  s << "edges: " << levels.size() << " levels, " << all.size() << " zeros, " << contours.size() << " contours, "
    << persistent << " persistent\n";
  if (c.spot_check > 0) {
    const auto rep = spot_check_no_creation(levels, c.spot_check, g.seed);
    write_json(out / "no_creation.json", {{"checked", rep.checked}, {"violations", rep.violations}});
    s << "no-creation spot check: " << rep.checked << " checked, " << rep.violations << " violations\n";
  }
  return s.str();
}

struct RecoverCmd {
  SignalOptions s;
  std::string zeros;
  int depth = 4;
  bool truth = false;
  double omega_max = 0;
  int terms = 11;
};

std::string cmd_recover(const RecoverCmd &c, const Global &g, const fs::path &out) {
  const Wavelet w = parse_wavelet(c.s.wavelet);
  const ScaleLadder ladder = parse_ladder(c.s.ladder);
  RecoveryOptions ro;
  ro.depth = c.depth;
  RecoveryReport rec;
  N0Match n0;
  std::vector<double> scales;
  if (!c.zeros.empty()) {
    std::ifstream in(c.zeros);
    if (!in)
      throw Error("config", "--zeros: cannot open " + c.zeros);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
      throw Error("config", c.zeros + ": " + e.what());
    }
    auto levels = level_zeros_from_json(j);
    for (auto &l : levels) {
      std::erase_if(l.zeros, [](const ZeroPoint &z) { return z.kind != ZeroKind::regular; });
      scales.push_back(l.sigma);
    }
    const auto az = asymptotic_zero_set(trace_contours(levels));
    n0 = detect_n0(az, w);
    rec = recover_moments_report(levels, w, n0.n0, n0.roots, ro);
  } else {
    PipelineOptions po;
    po.ladder = ladder;
    po.half_width_w = c.s.half_width;
    po.margin = c.s.margin;
    po.points = c.s.points;
    po.recovery = ro;
    po.workers = resolve_workers(g);
    const auto rep = recover_from_signal(make_signal(c.s.signal), w, po);
    rec = rep.recovery;
    n0 = rep.n0;
    scales = ladder.scales;
  }
  Json j = recovery_json(rec, scales);
  j["asymptotic_zeros"] = n0.roots;
  std::ostringstream s;
  s << "recover: n0 = " << rec.moments.n0 << ", moments";
  for (double m : rec.moments.mu)
    s << ' ' << format_double(m);
  s << "\n";
  std::optional<MomentVector> truth;
  if (c.truth && c.zeros.empty()) {
    truth = moments(make_signal(c.s.signal), rec.moments.n_max()).normalized();
    Json err = Json::array();
    double worst = 0;
    for (int n = 0; n <= rec.moments.n_max(); ++n) {
      const double e = std::abs(rec.moments[n] - (*truth)[n]);
      err.push_back(e);
      worst = std::max(worst, e);
    }
    j["ground_truth"] = to_json(*truth).at("mu");
    j["moment_error"] = err;
    s << "max moment error vs ground truth: " << format_double(worst) << "\n";
  }
  if (c.omega_max > 0) {
    const int terms = std::min(c.terms, rec.moments.n_max() + 1);
    const auto grid = UniformGrid::span(-8, 8, 321);
    const auto r = reconstruct_from_moments(rec.moments, c.omega_max, terms, grid);
    write_spectrum_csv(out / "spectrum.csv", r);
    write_sampled_csv(out / "spatial.csv", r.spatial);
    j["reconstruction"] = {{"terms", terms}, {"omega_max", c.omega_max}, {"truncation_radius", r.truncation_radius}};
    if (truth) {
      const auto t = reconstruct_from_moments(*truth, c.omega_max, terms, grid);
      double worst = 0;
      for (std::size_t i = 0; i < r.spectrum.size(); ++i)
        worst = std::max(worst, std::abs(r.spectrum[i] - t.spectrum[i]));
      j["reconstruction"]["spectrum_error_vs_truth_moments"] = worst;
      s << "spectrum error vs ground-truth moments: " << format_double(worst) << "\n";
    }
  }
  write_json(out / "recovery.json", j);
  return s.str();
}

struct GenericityCmd {
  std::string mode = "1d";
  std::string alpha = "0,0";
  int max = 15;
  double box = 8;
  std::size_t samples = 400;
  double c = 0.01, sigma = 10;
};

std::string cmd_genericity(const GenericityCmd &c, const Global &g, const fs::path &out) {
  std::ostringstream s;
  if (c.mode == "1d" || c.mode == "2d") {
    std::vector<ContainmentReport> reports;
    if (c.mode == "1d") {
      reports = check_1d_ricker_genericity(c.max);
    } else {
      MarchingOptions mo;
      mo.box_half_width = c.box;
      mo.samples = c.samples;
      reports = sweep_2d_laplace_hermite(parse_index(c.alpha, "--alpha"), c.max, mo, resolve_workers(g));
    }
    write_sweep_csv(out / "sweep.csv", reports);
    const Json summary = sweep_summary(reports);
    write_json(out / "summary.json", summary);
    s << "genericity " << c.mode << ": " << reports.size() << " reports, " << summary["not_contained"].get<std::size_t>()
      << " not_contained, " << summary["contained"].get<std::size_t>() << " contained, "
      << summary["inconclusive"].get<std::size_t>() << " inconclusive\n";
  } else if (c.mode == "system") {
    const auto sol = solve_counterexample_system();
    write_json(out / "solution.json", to_json(sol));
    s << "counterexample system: a = " << format_double(sol.a) << ", b = " << format_double(sol.b)
      << ", x* = " << format_double(sol.x_star) << ", residual " << format_double(sol.residual) << "\n";
  } else if (c.mode == "weak") {
    const auto r = verify_weak_genericity_failure(c.c, c.sigma);
    write_json(out / "weak.json", to_json(r));
    s << "weak genericity at c = " << format_double(c.c) << ": indistinguishable = " << std::boolalpha
      << r.indistinguishable << ", c_max = " << format_double(r.c_max) << "\n";
  } else {
    throw Error("config", "--mode: expected 1d | 2d | system | weak, got '" + c.mode + "'");
  }
  return s.str();
}

struct CounterexampleCmd {
  std::string kind = "small-scale";
  int stages = 4;
  int N = 4;
  std::string sigmas = "0.5,1,2";
  std::string signal = "box";
};

std::string cmd_counterexample(const CounterexampleCmd &c, const Global &, const fs::path &out) {
  std::ostringstream s;
  if (c.kind == "small-scale") {
    const auto r = build_small_scale_counterexample(c.stages);
    write_json(out / "construction.json", to_json(r));
    std::ofstream table = [&] {
      fs::create_directories(out);
      return std::ofstream(out / "table.csv", std::ios::binary);
    }();
    table << "k,sigma,x,minus,plus,expected_sign,verdict\n";
    s << "small-scale: " << r.stages.size() << " stages, complete = " << std::boolalpha << r.complete
      << ", strict = " << r.strict << ", crossings = " << r.crossing_sigmas.size() << "\n";
    for (std::size_t k = 0; k < r.table.size(); ++k) {
      const int expected = k % 2 == 0 ? 1 : -1;
      const bool ok = expected * r.table[k][0] > 0 && expected * r.table[k][1] > 0;
      const double sigma = r.sigmas[k];
      table << k + 1 << ',' << format_double(sigma) << ',' << format_double(std::sqrt(sigma * sigma + 1)) << ','
            << format_double(r.table[k][0]) << ',' << format_double(r.table[k][1]) << ',' << expected << ','
            << (ok ? "pass" : "fail") << '\n';
      s << "  k = " << k + 1 << "  sigma = " << format_double(sigma) << "  sign " << (expected > 0 ? '+' : '-')
        << "  " << (ok ? "pass" : "fail") << "\n";
    }
    if (!r.message.empty())
      s << r.message << "\n";
  } else if (c.kind == "algebraic") {
    const auto r = build_algebraic_decay_pair(c.N, c.stages);
    write_json(out / "construction.json", to_json(r));
    s << "algebraic decay pair: N = " << r.N << ", complete = " << std::boolalpha << r.complete << ", witnesses "
      << r.witnesses.size() << ", max moment error " << format_double(r.max_moment_error) << "\n";
    for (const auto &w : r.witnesses)
      s << "  i = " << w.i << "  sigma = " << format_double(w.sigma) << "  w = " << format_double(w.w)
        << "  strict = " << w.strict << "\n";
  } else if (c.kind == "q") {
    const auto r = q_two_zero_check(make_signal(c.signal), parse_list(c.sigmas, "--sigmas"));
    write_json(out / "q.json", to_json(r));
    for (std::size_t i = 0; i < r.levels.size(); ++i)
      write_sampled_csv(out / indexed("q_profile", i, "csv"), r.levels[i].profile);
    s << "Q two-zero check: pass = " << std::boolalpha << r.pass << "\n";
    for (const auto &l : r.levels)
      s << "  sigma = " << format_double(l.sigma) << "  zeros " << l.zeros.size() << "  Q(0) = " << format_double(l.q0)
        << "\n";
  } else {
    throw Error("config", "--kind: expected small-scale | algebraic | q, got '" + c.kind + "'");
  }
  return s.str();
}

struct HeatCmd {
  std::string signal = "mixture3";
  bool subset_check = false;
  double t1 = 1, t2 = 4;
  std::size_t levels = 48, points = 4001;
  bool nodes = false;
  std::string ladder = "dyadic:4:16:2";
  bool exponential_order = false;
  int depth = 4;
};

std::string cmd_heat(const HeatCmd &c, const Global &g, const fs::path &out) {
  if (c.subset_check == c.nodes)
    throw Error("config", "heat: pass exactly one of --subset-check or --nodes");
  const Signal f = make_signal(c.signal);
  std::ostringstream s;
  if (c.subset_check) {
    SubsetOptions so;
    so.levels = c.levels;
    so.points = c.points;
    so.workers = resolve_workers(g);
    const auto r = check_subset_property(f, c.t1, c.t2, so);
    write_json(out / "heat.json", to_json(r));
    write_text(out / "contours.svg", contours_svg(r.contours));
    s << "heat subset check t1 = " << format_double(c.t1) << ", t2 = " << format_double(c.t2) << ": "
      << to_string(r.subset) << " (" << r.crossings_t2 << " crossings at t2, " << r.crossings_t1 << " at t1), "
      << r.local_minima << " local minima, " << r.multiple_crossings << " multiple crossings"
      << (r.window_exit ? ", window exit" : "") << "\n";
    return s.str();
  }
  // Zeros of F(., t) on a t-ladder, then the second-integral recursion.
  std::vector<HeatNodeLevel> levels;
  const auto spread = effective_support(f);
  const double reach = spread ? std::max(std::abs(spread->lo), std::abs(spread->hi)) : 0;
  for (double sigma : parse_ladder(c.ladder).scales) {
    const double t = sigma * sigma;
    const double half = 8 * std::sqrt(t) + reach + 4;
    const auto grid = UniformGrid::span(-half, half, c.points);
    const auto F = heat_solution(f, t, grid, 0);
    HeatNodeLevel level{t, {}, F.values.cwiseAbs().maxCoeff() == 0};
    if (!level.identically_zero) {
      ZeroOptions zo;
      zo.detect_non_regular = false;
      for (const auto &z : find_zeros(F, heat_evaluator(f, t, 0), sigma, zo))
        level.zeros.push_back(z.x);
    }
    levels.push_back(std::move(level));
  }
  RecoveryOptions ro;
  ro.depth = c.depth;
  const auto r = recover_initial_condition_from_heat_nodes(levels, c.exponential_order, ro);
  Json lv = Json::array();
  for (const auto &l : levels)
    lv.push_back({{"t", l.t}, {"zeros", l.zeros}, {"identically_zero", l.identically_zero}});
  write_json(out / "heat_nodes.json", {{"n0", r.n0},
                                       {"second_integral", to_json(r.second_integral)},
                                       {"initial", to_json(r.initial)},
                                       {"levels", lv}});
  s << "heat nodes: n0 = " << r.n0 << ", initial moments";
  for (double m : r.initial.mu)
    s << ' ' << format_double(m);
  s << "\n";
  return s.str();
}

// Fast closed-form oracles; each line is PASS or FAIL.
std::string cmd_selftest(const Global &g, const fs::path &out, bool &ok) {
  std::ostringstream s;
  Json results = Json::array();
  const auto report = [&](const std::string &name, bool pass) {
    s << (pass ? "PASS " : "FAIL ") << name << "\n";
    results.push_back({{"check", name}, {"pass", pass}});
    ok = ok && pass;
  };
  {
    const auto slices = wavelet_transform_scaled(gaussian_signal(), Wavelet::ricker(),
                                                 ScaleLadder::explicit_scales({0.5, 2}), 8, 4, 4001);
    bool pass = true;
    for (const auto &sl : slices) {
      const auto z = find_zeros(sl);
      const double x = std::sqrt(sl.sigma * sl.sigma + 1);
      pass = pass && z.size() == 2 && std::abs(z[0].x + x) < 1e-8 && std::abs(z[1].x - x) < 1e-8;
    }
    report("Gaussian edges at +-sqrt(sigma^2 + 1)", pass);
  }
  {
    const auto sol = solve_counterexample_system();
    report("counterexample system residual", sol.residual < 1e-12);
  }
  {
    bool pass = true;
    for (const auto &r : check_1d_ricker_genericity(4))
      pass = pass && r.verdict == Containment::not_contained;
    report("1-D genericity through order 6", pass);
  }
  {
    SubsetOptions so;
    so.levels = 16;
    so.points = 2001;
    so.workers = resolve_workers(g);
    report("heat subset property for G", check_subset_property(gaussian_signal(), 1, 4, so).subset == Verdict::pass);
  }
  {
    const auto p = hermite(4);
    report("polynomial JSON round trip", polynomial_from_json(to_json(p)) == p);
  }
  write_json(out / "selftest.json", results);
  return s.str();
}

Json error_json(const std::string &command, const std::string &code, const std::string &message) {
  return {{"error", {{"command", command}, {"code", code}, {"message", message}}}};
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multiscale edge sets, moment recovery and counterexample checks"};
  app.option_defaults()->always_capture_default();
  app.config_formatter(std::make_shared<ConfigJSON>());
  app.set_config("--config", "", "JSON config; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.require_subcommand(1);

  Global g;
  app.add_option("--out", g.out, "output directory");
  app.add_option("--workers", g.workers, "worker threads; 0 uses MARR_WORKERS, else hardware concurrency");
  app.add_option("--seed", g.seed, "seed for randomized checks");
  app.add_option("--log-level", g.log_level, "debug | info | warning | silent");

  TransformCmd transform;
  auto *t = app.add_subcommand("transform", "wavelet transform slices and zeros")->fallthrough();
  add_signal_options(t, transform.s, "geometric:1:64:12");
  t->add_option("--normalized", transform.normalized, "also write Z(sigma, w) for this n0 (-1 off)");
  t->add_flag("--svg", transform.svg, "trace contours and write contours.svg");

  EdgesCmd edges;
  auto *e = app.add_subcommand("edges", "zero sets and traced edge contours")->fallthrough();
  add_signal_options(e, edges.s, "geometric:0.5:16:32");
  e->add_flag("--regular-only", edges.regular_only, "skip non-regular zero detection");
  e->add_option("--spot-check", edges.spot_check, "sampled no-creation checks (0 off)");

  RecoverCmd recover;
  auto *r = app.add_subcommand("recover", "moments from zero sets, then reconstruction")->fallthrough();
  add_signal_options(r, recover.s, "dyadic:4:16:2");
  recover.s.half_width = 6;
  recover.s.margin = 2;
  r->get_option("--half-width")->default_val(6);
  r->get_option("--margin")->default_val(2);
  r->add_option("--zeros", recover.zeros, "zero_sets.json written by the edges command");
  r->add_option("--depth", recover.depth, "recursion orders beyond n0");
  r->add_flag("--truth", recover.truth, "compare against the signal's exact moments");
  r->add_option("--omega-max", recover.omega_max, "reconstruct on |omega| <= omega-max (0 off)");
  r->add_option("--terms", recover.terms, "Taylor terms in the reconstruction");

  GenericityCmd gen;
  auto *gc = app.add_subcommand("genericity", "zero-set containment checks")->fallthrough();
  gc->add_option("--mode", gen.mode, "1d | 2d | system | weak");
  gc->add_option("--alpha", gen.alpha, "2-D base multi-index 'a1,a2'");
  gc->add_option("--max", gen.max, "largest order (1d: n_max, 2d: |beta|)");
  gc->add_option("--box", gen.box, "2-D marching half width");
  gc->add_option("--samples", gen.samples, "2-D cells per half width");
  gc->add_option("--c", gen.c, "weak mode perturbation size");
  gc->add_option("--sigma", gen.sigma, "weak mode scale");

  CounterexampleCmd cx;
  auto *cc = app.add_subcommand("counterexample", "explicit counterexample constructions")->fallthrough();
  cc->add_option("--kind", cx.kind, "small-scale | algebraic | q");
  cc->add_option("--stages", cx.stages, "K");
  cc->add_option("--N", cx.N, "algebraic decay order, a multiple of 4");
  cc->add_option("--sigmas", cx.sigmas, "q scales 's1,s2,..'");
  cc->add_option("--signal", cx.signal, "q: symmetric nonnegative compact h~");

  HeatCmd heat;
  auto *h = app.add_subcommand("heat", "heat-flow subset check or heat-node recovery")->fallthrough();
  h->add_option("--signal", heat.signal, "initial condition");
  h->add_flag("--subset-check", heat.subset_check, "check the crossing subset property between t1 and t2");
  h->add_option("--t1", heat.t1);
  h->add_option("--t2", heat.t2);
  h->add_option("--levels", heat.levels, "t-ladder size");
  h->add_option("--points", heat.points, "samples per level");
  h->add_flag("--nodes", heat.nodes, "recover the initial moments from zeros of F");
  h->add_option("--ladder", heat.ladder, "sigma = sqrt(t) ladder for --nodes");
  h->add_flag("--exponential-order", heat.exponential_order, "assert that f has exponential order");
  h->add_option("--depth", heat.depth, "recursion orders beyond n0");

  auto *st = app.add_subcommand("selftest", "quick closed-form oracle checks")->fallthrough();

  std::string command = "marr";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp &ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError &ex) {
    std::cout << error_json(command, "config", ex.what()).dump(2) << std::endl;
    return 2;
  }
  command = app.get_subcommands().front()->get_name();
  const fs::path out = fs::path(g.out);

  try {
    if (g.log_level == "debug")
      set_log_level(LogLevel::debug);
    else if (g.log_level == "info")
      set_log_level(LogLevel::info);
    else if (g.log_level == "silent")
      set_log_level(LogLevel::silent);
    else if (g.log_level != "warning")
      throw Error("config", "--log-level: unknown level '" + g.log_level + "'");

    fs::create_directories(out);
    Json manifest = Json::parse(app.config_to_str(true, false));
    manifest["command"] = command;
    write_json(out / "manifest.json", manifest);
    fs::remove(out / "error.json");

    std::string summary;
    bool ok = true;
    if (command == "transform")
      summary = cmd_transform(transform, g, out);
    else if (command == "edges")
      summary = cmd_edges(edges, g, out);
    else if (command == "recover")
      summary = cmd_recover(recover, g, out);
    else if (command == "genericity")
      summary = cmd_genericity(gen, g, out);
    else if (command == "counterexample")
      summary = cmd_counterexample(cx, g, out);
    else if (command == "heat")
      summary = cmd_heat(heat, g, out);
    else if (st->parsed())
      summary = cmd_selftest(g, out, ok);
    write_text(out / "summary.txt", summary);
    std::cout << summary;
    if (!ok)
      throw Error("selftest", "one or more self-test checks failed");
    return 0;
  } catch (const Error &ex) {
    const Json j = error_json(command, ex.code(), ex.what());
    std::cout << j.dump(2) << std::endl;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!ec)
      std::ofstream(out / "error.json") << j.dump(2) << '\n';
    return ex.code() == "config" ? 2 : 1;
  } catch (const std::exception &ex) {
    std::cout << error_json(command, "internal", ex.what()).dump(2) << std::endl;
    return 1;
  }
}
