#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "marr/counterexamples.hpp"
#include "marr/edges.hpp"
#include "marr/genericity.hpp"
#include "marr/polynomials.hpp"
#include "marr/recovery.hpp"
#include "marr/signals.hpp"
#include "marr/transform.hpp"

namespace marr {

using Json = nlohmann::ordered_json;

// Shortest representation that round-trips through strtod.
std::string format_double(double v);

// {"vars": k, "terms": [[[e1, e2], "coeff"], ...]}; univariate terms carry one exponent.
Json to_json(const IntegerPolynomial &p);
IntegerPolynomial polynomial_from_json(const Json &j);

// Typed union: {"kind": "...", ...}. Composite parts nest the same schema.
Json to_json(const Signal &f);
Signal signal_from_json(const Json &j);
Signal load_signal(const std::filesystem::path &path);

// Two-column CSV (x, value).
void write_sampled_csv(const std::filesystem::path &path, const SampledSignal &s);
SampledSignal read_sampled_csv(const std::filesystem::path &path);

// Columns (sigma, x, value) and (sigma, w, Z).
void write_slice_csv(const std::filesystem::path &path, const TransformSlice &slice);
void write_normalized_csv(const std::filesystem::path &path, double sigma, const SampledSignal &z);

// Columns (sigma, x, kind, residual); a header alone when there are no zeros.
void write_zeros_csv(const std::filesystem::path &path, const std::vector<ZeroPoint> &zeros);

// Round-trips every field of LevelZeros, so recovery can run from saved zero sets.
Json to_json(const std::vector<LevelZeros> &levels);
std::vector<LevelZeros> level_zeros_from_json(const Json &j);

// [{id, persistent, vertices: [[x, sigma], ...]}]
Json to_json(const std::vector<EdgeContour> &contours);

struct SvgOptions {
  double width = 640, height = 480, margin = 48;
  bool log_sigma = true;
};
// Polylines with x horizontal and sigma vertical, plus axes; persistent contours drawn solid.
std::string contours_svg(const std::vector<EdgeContour> &contours, SvgOptions options = {});

Json to_json(const MomentVector &m);
// {n0, moments, residuals, ladder, systems, truncated_at, messages}
Json recovery_json(const RecoveryReport &r, const std::vector<double> &ladder);
void write_spectrum_csv(const std::filesystem::path &path, const Reconstruction &r);

// Columns (alpha, beta, verdict, witness_x1, witness_x2, min_abs_val).
void write_sweep_csv(const std::filesystem::path &path, const std::vector<ContainmentReport> &reports);
Json sweep_summary(const std::vector<ContainmentReport> &reports);

Json to_json(const CounterexampleSolution &s);
Json to_json(const WeakGenericityReport &r);
Json to_json(const SmallScaleResult &r);
Json to_json(const AlgebraicDecayResult &r);
Json to_json(const QReport &r);
Json to_json(const SubsetReport &r);

// Writes dump(2) plus a trailing newline.
void write_json(const std::filesystem::path &path, const Json &j);
void write_text(const std::filesystem::path &path, const std::string &text);

} // namespace marr
