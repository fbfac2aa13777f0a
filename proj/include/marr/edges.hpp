#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "marr/signals.hpp"
#include "marr/transform.hpp"

namespace marr {

enum class ZeroKind { regular, non_regular };

struct ZeroPoint {
  double x = 0;
  double sigma = 0;
  ZeroKind kind = ZeroKind::regular;
  double residual = 0; // |s(x)| at the refined location
};

struct ZeroOptions {
  // Non-regular threshold, relative to max |s| over the slice.
  double tangency_threshold = 1e-9;
  double x_tolerance = 1e-12;
  bool detect_non_regular = true;
};

// Sign-scan plus bisection; refinement uses `exact` when given, else the Catmull-Rom interpolant.
std::vector<ZeroPoint> find_zeros(const SampledSignal &s, const std::optional<PointEvaluator> &exact = std::nullopt,
                                  double sigma = 0, ZeroOptions options = {});

std::vector<ZeroPoint> find_zeros(const TransformSlice &slice, ZeroOptions options = {});

// Sign-only bisection of a bracketed sign change; scale-free by construction.
double bisect_sign_change(const PointEvaluator &f, double a, double b, double tolerance = 1e-12);

enum class Terminal { reaches_top, closes_arc };

struct ContourVertex {
  double x = 0;
  double sigma = 0;
  ZeroKind kind = ZeroKind::regular;
  std::size_t level = 0; // ladder index
};

struct EdgeContour {
  int id = 0;
  std::vector<ContourVertex> vertices; // sigma strictly increasing
  bool persistent = false;
  Terminal terminal = Terminal::closes_arc;
  bool starts_at_bottom = true;
  bool touches_window = false; // some vertex within one link radius of the grid edge
};

struct TraceOptions {
  double radius_grid_factor = 3.0;
  double radius_sigma_factor = 0.05;
  double ambiguity_ratio = 1.10;
  bool regular_only = false;
};

struct TraceDiagnostics {
  int ambiguous_links = 0;
  std::vector<std::string> messages;
};

// Zero sets per level, as produced by find_zeros.
struct LevelZeros {
  double sigma = 0;
  std::vector<ZeroPoint> zeros;
  double spacing = 0;
  double lo = 0, hi = 0; // window
};

double link_radius(double spacing, double sigma, const TraceOptions &options = {});

std::vector<EdgeContour> trace_contours(const std::vector<LevelZeros> &levels, TraceOptions options = {},
                                        TraceDiagnostics *diagnostics = nullptr);
std::vector<EdgeContour> trace_contours(const std::vector<TransformSlice> &slices, TraceOptions options = {},
                                        TraceDiagnostics *diagnostics = nullptr, ZeroOptions zero_options = {});

std::vector<LevelZeros> level_zeros(const std::vector<TransformSlice> &slices, ZeroOptions options = {},
                                    unsigned workers = 0);

// A vertex at level > 0 where a contour begins is a local sigma-minimum of the curve.
bool has_local_minimum(const EdgeContour &c, std::size_t bottom_level = 0);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct SubsetReport {
  double t1 = 0, t2 = 0;
  std::size_t crossings_t1 = 0, crossings_t2 = 0;
  std::vector<int> matched_ids;   // contours crossing t2 that trace down to t1
  std::vector<int> unmatched_ids; // contours crossing t2 that do not
  Verdict subset = Verdict::pass; // Theorem: t2-crossers are a subset of t1-crossers
  std::size_t local_minima = 0;
  std::size_t multiple_crossings = 0; // persistent contours meeting a midline level more than once
  std::size_t midline_gaps = 0;       // spanning segments without a midline zero
  bool window_exit = false;
  std::string suggestion;
  std::vector<EdgeContour> contours;
  std::vector<double> t_levels; // final ladder, including refinement levels
};

struct SubsetOptions {
  std::size_t levels = 48;    // t-ladder size between t1 and t2, geometric in sqrt(t)
  std::size_t points = 4001;  // samples per level
  double window_pad = 8.0;    // in units of sqrt(t2 + spread)
  bool check_midlines = true;
  unsigned workers = 0;
  // Midpoint insertion below interior contour starts; total levels stay <= levels * max_refinement.
  std::size_t refine_rounds = 10;
  std::size_t max_refinement = 4;
};

// Heat-flow subset check on F_xx = f * G''_{sqrt t}.
SubsetReport check_subset_property(const Signal &f, double t1, double t2, SubsetOptions options = {});

// Spot-check that each sampled zero at level j > 0 continues to level j - 1 along its traced contour.
struct NoCreationReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
};
NoCreationReport spot_check_no_creation(const std::vector<LevelZeros> &levels, std::size_t samples,
                                        std::uint64_t seed, TraceOptions options = {});

} // namespace marr
