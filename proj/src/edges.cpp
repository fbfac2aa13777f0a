#include "marr/edges.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "marr/errors.hpp"
#include "marr/log.hpp"
#include "marr/parallel.hpp"

namespace marr {

namespace {

int sign_of(double v) { return (v > 0) - (v < 0); }

// Critical point of f in [a, b] by bisection on the sign of a central difference.
double critical_point(const PointEvaluator &f, double a, double b, double delta, double tolerance) {
  const auto slope = [&](double x) { return sign_of(f(x + delta) - f(x - delta)); };
  int sa = slope(a);
  for (int it = 0; it < 200 && b - a > tolerance; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b)
      break;
    const int sm = slope(m);
    if (sm == 0)
      return m;
    if (sm == sa)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

double link_distance(double x, double sigma, double x_next, double sigma_next) {
  // Stationary and w-constant predictions of the next position.
  return std::min(std::abs(x_next - x), std::abs(x_next - x * sigma_next / sigma));
}

} // namespace

double bisect_sign_change(const PointEvaluator &f, double a, double b, double tolerance) {
  double fa = f(a);
  const double fb = f(b);
  if (fa == 0)
    return a;
  if (fb == 0)
    return b;
  if (sign_of(fa) == sign_of(fb))
    throw Error("domain", "bisect_sign_change: no sign change on the bracket");
  const int sa = sign_of(fa);
  for (int it = 0; it < 400 && b - a > tolerance; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b)
      break;
    const int sm = sign_of(f(m));
    if (sm == 0)
      return m;
    if (sm == sa)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

std::vector<ZeroPoint> find_zeros(const SampledSignal &s, const std::optional<PointEvaluator> &exact, double sigma,
                                  ZeroOptions options) {
  std::vector<ZeroPoint> out;
  const std::size_t n = s.grid.count;
  const auto &v = s.values;
  if (n < 2)
    return out;
  const PointEvaluator f = exact ? *exact : PointEvaluator([&s](double x) {
    return s.interpolate(std::clamp(x, s.grid.origin, s.grid.back()));
  });
  const double sup = v.cwiseAbs().maxCoeff();
  if (!(sup > 0) || !std::isfinite(sup))
    return out;
  const double h = s.grid.spacing;
  const auto add = [&](double x, ZeroKind kind) { out.push_back({x, sigma, kind, std::abs(f(x))}); };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int si = sign_of(v[i]), sj = sign_of(v[i + 1]);
    if (si != 0 && sj != 0 && si != sj) {
      add(bisect_sign_change(f, s.grid.at(i), s.grid.at(i + 1), options.x_tolerance), ZeroKind::regular);
      continue;
    }
    if (si != 0 || i == 0)
      continue;
    // Isolated exact zero sample: classify by its nonzero neighbours; zero runs are plateaus.
    if (sign_of(v[i - 1]) == 0 || sj == 0)
      continue;
    add(s.grid.at(i), sign_of(v[i - 1]) != sj ? ZeroKind::regular : ZeroKind::non_regular);
  }

  if (options.detect_non_regular) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double a = std::abs(v[i - 1]), b = std::abs(v[i]), c = std::abs(v[i + 1]);
      const int sg = sign_of(v[i]);
      if (sg == 0 || sign_of(v[i - 1]) != sg || sign_of(v[i + 1]) != sg || !(b < a && b < c))
        continue;
      // The dip must be resolved: neighbours above the threshold rule out underflowing tails.
      if (std::min(a, c) <= options.tangency_threshold * sup)
        continue;
      const double xl = s.grid.at(i - 1), xr = s.grid.at(i + 1);
      const double xc = critical_point(f, xl, xr, 1e-6 * h, options.x_tolerance);
      const double fc = f(xc);
      if (sign_of(fc) == -sg) {
        // Two transverse zeros inside one cell pair.
        add(bisect_sign_change(f, xl, xc, options.x_tolerance), ZeroKind::regular);
        add(bisect_sign_change(f, xc, xr, options.x_tolerance), ZeroKind::regular);
      } else if (std::abs(fc) <= options.tangency_threshold * sup) {
        add(xc, ZeroKind::non_regular);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ZeroPoint &p, const ZeroPoint &q) { return p.x < q.x; });
  return out;
}

std::vector<ZeroPoint> find_zeros(const TransformSlice &slice, ZeroOptions options) {
  return find_zeros(slice.samples, slice.exact, slice.sigma, options);
}

double link_radius(double spacing, double sigma, const TraceOptions &options) {
  return std::max(options.radius_grid_factor * spacing, options.radius_sigma_factor * sigma);
}

std::vector<LevelZeros> level_zeros(const std::vector<TransformSlice> &slices, ZeroOptions options,
                                    unsigned workers) {
  std::vector<LevelZeros> out(slices.size());
  parallel_for(
      slices.size(),
      [&](std::size_t j) {
        const auto &g = slices[j].samples.grid;
        out[j] = {slices[j].sigma, find_zeros(slices[j], options), g.spacing, g.origin, g.back()};
      },
      workers);
  return out;
}

std::vector<EdgeContour> trace_contours(const std::vector<LevelZeros> &levels, TraceOptions options,
                                        TraceDiagnostics *diagnostics) {
  if (levels.size() < 2)
    throw Error("domain", "trace_contours needs at least 2 levels");
  for (std::size_t j = 1; j < levels.size(); ++j)
    if (!(levels[j].sigma > levels[j - 1].sigma))
      throw Error("domain", "trace_contours: levels must have strictly increasing scale");

  std::vector<EdgeContour> contours;
  std::vector<std::size_t> active; // contour indices ending at the previous level
  const auto filtered = [&](const LevelZeros &l) {
    std::vector<ZeroPoint> z;
    for (const auto &p : l.zeros)
      if (!options.regular_only || p.kind == ZeroKind::regular)
        z.push_back(p);
    return z;
  };
  const auto open = [&](const ZeroPoint &p, std::size_t level) {
    EdgeContour c;
    c.id = static_cast<int>(contours.size());
    c.vertices.push_back({p.x, levels[level].sigma, p.kind, level});
    c.starts_at_bottom = level == 0;
    contours.push_back(std::move(c));
    return contours.size() - 1;
  };

  for (const auto &p : filtered(levels[0]))
    active.push_back(open(p, 0));

  for (std::size_t j = 1; j < levels.size(); ++j) {
    const auto next = filtered(levels[j]);
    const double sigma = levels[j - 1].sigma, sigma_next = levels[j].sigma;
    const double r = link_radius(levels[j].spacing, sigma_next, options);

    struct Pair {
      std::size_t a, b; // active slot, next zero index
      double d, key;
    };
    std::vector<Pair> pairs;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto &c = contours[active[a]];
      const auto &last = c.vertices.back();
      double predicted = last.x;
      const bool has_history = c.vertices.size() >= 2;
      if (has_history) {
        const auto &prev = c.vertices[c.vertices.size() - 2];
        predicted = last.x + (last.x - prev.x) / (last.sigma - prev.sigma) * (sigma_next - last.sigma);
      }
      for (std::size_t b = 0; b < next.size(); ++b) {
        double d = link_distance(last.x, sigma, next[b].x, sigma_next);
        if (has_history)
          d = std::min(d, std::abs(next[b].x - predicted));
        if (d <= r)
          pairs.push_back({a, b, d, std::abs(next[b].x - predicted)});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair &p, const Pair &q) {
      if (p.d != q.d)
        return p.d < q.d;
      if (p.a != q.a)
        return p.a < q.a;
      return p.b < q.b;
    });
    std::vector<bool> used_a(active.size(), false), used_b(next.size(), false);
    std::vector<std::ptrdiff_t> link(active.size(), -1);
    for (const auto &p : pairs) {
      if (used_a[p.a] || used_b[p.b])
        continue;
      // Competing free candidates within the ambiguity ratio: prefer direction continuity.
      const Pair *best = &p;
      bool ambiguous = false;
      for (const auto &q : pairs) {
        if (&q == &p || used_a[q.a] || used_b[q.b] || (q.a != p.a && q.b != p.b))
          continue;
        if (q.d <= options.ambiguity_ratio * p.d + 1e-15) {
          ambiguous = true;
          if (q.key < best->key)
            best = &q;
        }
      }
      if (ambiguous && diagnostics) {
        ++diagnostics->ambiguous_links;
        std::ostringstream os;
        os << "ambiguous link at sigma=" << sigma_next << " near x=" << next[best->b].x;
        diagnostics->messages.push_back(os.str());
        log(LogLevel::debug, os.str());
      }
      used_a[best->a] = used_b[best->b] = true;
      link[best->a] = static_cast<std::ptrdiff_t>(best->b);
    }
    std::vector<std::size_t> still;
    for (std::size_t a = 0; a < active.size(); ++a) {
      if (link[a] < 0)
        continue;
      const auto &z = next[static_cast<std::size_t>(link[a])];
      contours[active[a]].vertices.push_back({z.x, sigma_next, z.kind, j});
      still.push_back(active[a]);
    }
    for (std::size_t b = 0; b < next.size(); ++b)
      if (!used_b[b])
        still.push_back(open(next[b], j));
    active = std::move(still);
  }

  const std::size_t top = levels.size() - 1;
  for (auto &c : contours) {
    c.persistent = c.vertices.back().level == top;
    c.terminal = c.persistent ? Terminal::reaches_top : Terminal::closes_arc;
    for (const auto &v : c.vertices) {
      const auto &l = levels[v.level];
      const double r = link_radius(l.spacing, l.sigma, options);
      if (l.hi > l.lo && (v.x - l.lo < r || l.hi - v.x < r))
        c.touches_window = true;
    }
  }
  return contours;
}

std::vector<EdgeContour> trace_contours(const std::vector<TransformSlice> &slices, TraceOptions options,
                                        TraceDiagnostics *diagnostics, ZeroOptions zero_options) {
  return trace_contours(level_zeros(slices, zero_options), options, diagnostics);
}

bool has_local_minimum(const EdgeContour &c, std::size_t bottom_level) {
  return !c.vertices.empty() && c.vertices.front().level > bottom_level;
}

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::pass:
    return "pass";
  case Verdict::fail:
    return "fail";
  case Verdict::inconclusive:
    return "inconclusive";
  }
  return "unknown";
}

namespace {

Interval heat_window(const Signal &f, double t, double pad) {
  if (const auto *g = std::get_if<GaussianMixture>(&f.value); g && !g->terms.empty()) {
    // Beyond every center by more than sqrt(s^2 + t), each H_2 factor is positive.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, spread = 0;
    for (const auto &term : g->terms) {
      lo = std::min(lo, term.center);
      hi = std::max(hi, term.center);
      spread = std::max(spread, std::sqrt(term.sigma * term.sigma + t));
    }
    return {lo - pad * spread, hi + pad * spread};
  }
  const auto s = effective_support(f);
  if (!s)
    throw Error("domain", "subset check needs a signal with bounded effective support");
  return {s->lo - pad * std::sqrt(t), s->hi + pad * std::sqrt(t)};
}

LevelZeros heat_level(const Signal &f, double t, const UniformGrid &grid) {
  const auto ev = heat_evaluator(f, t, 2);
  if (!ev)
    throw Error("domain", "subset check needs a closed-form heat evaluator");
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.count));
  for (std::size_t i = 0; i < grid.count; ++i)
    v[static_cast<Eigen::Index>(i)] = (*ev)(grid.at(i));
  const SampledSignal s(grid, v);
  ZeroOptions zo;
  zo.detect_non_regular = false;
  return {std::sqrt(t), find_zeros(s, ev, std::sqrt(t), zo), grid.spacing, grid.origin, grid.back()};
}

} // namespace

SubsetReport check_subset_property(const Signal &f, double t1, double t2, SubsetOptions options) {
  if (!(t1 > 0) || !(t2 > t1))
    throw Error("domain", "subset check needs 0 < t1 < t2");
  if (options.levels < 2)
    throw Error("config", "subset check needs at least 2 levels");
  SubsetReport rep;
  rep.t1 = t1;
  rep.t2 = t2;
  const Interval win = heat_window(f, t2, options.window_pad);
  const auto grid = UniformGrid::span(win.lo, win.hi, options.points);
  auto ladder = ScaleLadder::geometric(std::sqrt(t1), std::sqrt(t2), options.levels);
  std::vector<LevelZeros> levels(ladder.size());
  parallel_for(
      ladder.size(), [&](std::size_t j) { levels[j] = heat_level(f, ladder[j] * ladder[j], grid); }, options.workers);
  rep.contours = trace_contours(levels);

  // Closing arcs move like sqrt(t* - t), so the last step before an apex can exceed the link radius.
  // Refine below every interior contour start until the tracer links it or the budget runs out.
  for (std::size_t round = 0; round < options.refine_rounds; ++round) {
    std::vector<std::size_t> starts;
    for (const auto &c : rep.contours)
      if (!c.touches_window && c.vertices.front().level > 0)
        starts.push_back(c.vertices.front().level);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    if (starts.empty() || levels.size() + starts.size() > options.levels * options.max_refinement)
      break;
    std::vector<LevelZeros> extra(starts.size());
    parallel_for(
        starts.size(),
        [&](std::size_t i) {
          const double sm = std::sqrt(levels[starts[i] - 1].sigma * levels[starts[i]].sigma);
          extra[i] = heat_level(f, sm * sm, grid);
        },
        options.workers);
    levels.insert(levels.end(), extra.begin(), extra.end());
    std::sort(levels.begin(), levels.end(), [](const auto &a, const auto &b) { return a.sigma < b.sigma; });
    rep.contours = trace_contours(levels);
  }
  std::vector<double> scales;
  for (const auto &l : levels) {
    scales.push_back(l.sigma);
    rep.t_levels.push_back(l.sigma * l.sigma);
  }
  ladder = ScaleLadder::explicit_scales(scales);
  rep.crossings_t1 = levels.front().zeros.size();
  rep.crossings_t2 = levels.back().zeros.size();

  bool inconclusive = false;
  for (const auto &c : rep.contours) {
    if (has_local_minimum(c)) {
      if (c.touches_window)
        inconclusive = true;
      else
        ++rep.local_minima;
    }
    if (!c.persistent)
      continue;
    if (c.starts_at_bottom)
      rep.matched_ids.push_back(c.id);
    else if (c.touches_window)
      inconclusive = true;
    else
      rep.unmatched_ids.push_back(c.id);
  }

  if (options.check_midlines) {
    TraceOptions to;
    for (std::size_t j = 0; j + 1 < ladder.size(); ++j) {
      const double sm = 0.5 * (ladder[j] + ladder[j + 1]);
      const auto mid = heat_level(f, sm * sm, grid);
      struct Segment {
        double x;
        bool persistent;
        int hits = 0;
      };
      std::vector<Segment> segs;
      for (const auto &c : rep.contours)
        for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k)
          if (c.vertices[k].level == j) {
            const auto &a = c.vertices[k], &b = c.vertices[k + 1];
            const double x = a.x + (b.x - a.x) * (sm - a.sigma) / (b.sigma - a.sigma);
            segs.push_back({x, c.persistent});
          }
      const double r = link_radius(grid.spacing, sm, to);
      for (const auto &z : mid.zeros) {
        Segment *best = nullptr;
        for (auto &sg : segs)
          if (std::abs(sg.x - z.x) <= r && (!best || std::abs(sg.x - z.x) < std::abs(best->x - z.x)))
            best = &sg;
        if (best)
          ++best->hits;
      }
      for (const auto &sg : segs) {
        if (sg.hits == 0)
          ++rep.midline_gaps;
        if (sg.persistent && sg.hits > 1)
          ++rep.multiple_crossings;
      }
    }
  }

  const bool violated = rep.crossings_t2 > rep.crossings_t1 || !rep.unmatched_ids.empty() || rep.local_minima > 0 ||
                        rep.multiple_crossings > 0;
  rep.window_exit = inconclusive;
  if (violated)
    rep.subset = Verdict::fail;
  else if (inconclusive) {
    rep.subset = Verdict::inconclusive;
    rep.suggestion = "a contour meets the window edge; retry with a larger window_pad";
  }
  return rep;
}

NoCreationReport spot_check_no_creation(const std::vector<LevelZeros> &levels, std::size_t samples,
                                        std::uint64_t seed, TraceOptions options) {
  NoCreationReport rep;
  std::vector<std::pair<std::size_t, std::size_t>> pool;
  for (std::size_t j = 1; j < levels.size(); ++j)
    for (std::size_t i = 0; i < levels[j].zeros.size(); ++i)
      if (!options.regular_only || levels[j].zeros[i].kind == ZeroKind::regular)
        pool.emplace_back(j, i);
  if (pool.empty())
    return rep;
  // A zero is created going down exactly when its traced contour begins at its own level.
  const auto contours = trace_contours(levels, options);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto [j, i] = pool[pick(rng)];
    const double x = levels[j].zeros[i].x;
    bool created = false;
    for (const auto &c : contours)
      for (const auto &v : c.vertices)
        if (v.level == j && v.x == x)
          created = c.vertices.front().level == j && !c.touches_window;
    ++rep.checked;
    if (created)
      ++rep.violations;
  }
  return rep;
}

} // namespace marr
