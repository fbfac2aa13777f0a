#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "marr/errors.hpp"
#include "marr/io.hpp"

using namespace marr;

namespace {

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const char *name) {
  const auto dir = std::filesystem::path("io_scratch");
  std::filesystem::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_CASE("doubles round-trip through their text form") {
  for (double v : {0.1, -2.2360679774996233, 1e-300, 6.02214076e23, 1.0 / 3})
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  CHECK(format_double(2) == "2");
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("polynomial JSON") {
  const auto h4 = hermite(4); // x^4 - 6 x^2 + 3
  const Json j = to_json(h4);
  CHECK(j["vars"] == 1);
  CHECK(j["terms"].size() == 3);
  CHECK(j["terms"][0] == Json::parse(R"([[0], "3"])"));
  CHECK(polynomial_from_json(j) == h4);

  const auto l = laplace_hermite({1, 2}, 2);
  CHECK(polynomial_from_json(to_json(l)) == l);

  // coefficients beyond 64 bits survive as decimal strings
  const auto big = hermite(40);
  CHECK(polynomial_from_json(Json::parse(to_json(big).dump())) == big);

  CHECK_THROWS_AS(polynomial_from_json(Json::parse(R"({"vars": 1, "terms": [[[0], 3]]})")), Error);
  CHECK_THROWS_AS(polynomial_from_json(Json::parse(R"({"vars": 3, "terms": []})")), Error);
}

TEST_CASE("signal JSON covers every kind") {
  const Signal pm = PointMassDistribution{{{0.3, 2, -1.5}, {1, 0, 2}}};
  const Signal gm = GaussianMixture{{{-1, 0.5, 1, 2.0}}};
  const Signal pl = PiecewiseLinear{{-1, 0, 2}, {0, 1, 0}};
  const Signal at = AlgebraicTailDensity{6, 2, {{-3, -1}, {1, 3}}};
  Eigen::VectorXd v(3);
  v << 1, -2, 0.5;
  const Signal ss = SampledSignal(UniformGrid{-1, 0.25, 3}, v);
  for (const auto &f : {pm, gm, pl, at, ss}) {
    const Signal back = signal_from_json(Json::parse(to_json(f).dump()));
    CHECK(back.value.index() == f.value.index());
    CHECK(to_json(back) == to_json(f));
  }
  CHECK(std::get<SampledSignal>(signal_from_json(to_json(ss)).value) == std::get<SampledSignal>(ss.value));

  const Signal comp = sum({{2, std::make_shared<const Signal>(gm)}, {-1, std::make_shared<const Signal>(pm)}});
  const Json cj = to_json(comp);
  CHECK(cj["kind"] == "composite");
  CHECK(to_json(signal_from_json(cj)) == cj);

  try {
    signal_from_json(Json::parse(R"({"kind": "gaussian_mixture", "terms": [{"center": 0}]})"));
    FAIL("expected a field diagnostic");
  } catch (const Error &e) {
    CHECK(e.code() == "config");
    CHECK(std::string(e.what()).find("sigma") != std::string::npos);
  }
  CHECK_THROWS_AS(signal_from_json(Json::parse(R"({"kind": "wavelet"})")), Error);
}

TEST_CASE("sampled CSV round trip") {
  Eigen::VectorXd v(5);
  v << 0, 1.0 / 3, -2, 1e-17, 4;
  const SampledSignal s(UniformGrid{-1, 0.5, 5}, v);
  const auto p = scratch("sampled.csv");
  write_sampled_csv(p, s);
  const auto back = read_sampled_csv(p);
  CHECK(back.values == s.values);
  CHECK(back.grid.count == 5);
  CHECK(back.grid.origin == -1);
  CHECK(back.grid.spacing == doctest::Approx(0.5).epsilon(1e-15));

  std::ofstream(scratch("ragged.csv")) << "x,value\n0,1\n1,2\n3,4\n";
  CHECK_THROWS_AS(read_sampled_csv(scratch("ragged.csv")), Error);
}

TEST_CASE("zero sets and contours") {
  std::vector<LevelZeros> levels;
  for (double s : {4.0, 4.1, 4.2}) {
    const double x = std::sqrt(s * s + 1);
    levels.push_back({s, {{-x, s, ZeroKind::regular, 1e-15}, {x, s, ZeroKind::non_regular, 2e-15}}, 0.01, -9, 9});
  }
  const auto back = level_zeros_from_json(Json::parse(to_json(levels).dump()));
  REQUIRE(back.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(back[j].sigma == levels[j].sigma);
    CHECK(back[j].spacing == levels[j].spacing);
    CHECK(back[j].hi == levels[j].hi);
    REQUIRE(back[j].zeros.size() == 2);
    CHECK(back[j].zeros[1].x == levels[j].zeros[1].x);
    CHECK(back[j].zeros[1].kind == ZeroKind::non_regular);
    CHECK(back[j].zeros[0].sigma == levels[j].sigma);
  }
  auto shuffled = to_json(levels);
  std::swap(shuffled["levels"][0], shuffled["levels"][1]);
  CHECK_THROWS_AS(level_zeros_from_json(shuffled), Error);

  const auto contours = trace_contours(levels);
  const Json cj = to_json(contours);
  REQUIRE(cj.size() == 2);
  CHECK(cj[0]["vertices"].size() == 3);
  CHECK(cj[0]["vertices"][2][1] == 4.2);
  const std::string svg = contours_svg(contours);
  std::size_t polylines = 0;
  for (auto at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1))
    ++polylines;
  CHECK(polylines == 2);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(contours_svg({}).find("</svg>") != std::string::npos);
}

TEST_CASE("zeros and sweep CSV layout") {
  const auto zp = scratch("zeros.csv");
  write_zeros_csv(zp, {});
  CHECK(slurp(zp) == "sigma,x,kind,residual\n");

  ContainmentReport a;
  a.first = {0, 0};
  a.second = {2, 1};
  a.dimension = 2;
  a.verdict = Containment::not_contained;
  a.witness = {1.5, -0.25};
  a.min_abs_value = 0.125;
  ContainmentReport b;
  b.first = {3, 0};
  b.second = {5, 0};
  b.verdict = Containment::contained;
  const auto sp = scratch("sweep.csv");
  write_sweep_csv(sp, {a, b});
  CHECK(slurp(sp) == "alpha,beta,verdict,witness_x1,witness_x2,min_abs_val\n"
                     "\"0,0\",\"2,1\",not_contained,1.5,-0.25,0.125\n"
                     "3,5,contained,0,0,0\n");
  const Json s = sweep_summary({a, b});
  CHECK(s["reports"] == 2);
  CHECK(s["contained"] == 1);
  CHECK(s["failures"].size() == 1);
  CHECK(s["failures"][0]["beta"] == 5);
}

TEST_CASE("reports serialize every field") {
  MomentVector m;
  m.n0 = 0;
  m.mu = {1, 0, 1};
  RecoveryReport r;
  r.moments = m;
  r.systems.push_back({1, {-1, 1}, {1, 2}, {0, 0}, {1e-6, 3e-6}, 1e-3, 0});
  const Json j = recovery_json(r, {4, 8});
  CHECK(j["n0"] == 0);
  CHECK(j["moments"] == Json::parse("[1.0, 0.0, 1.0]"));
  CHECK(j["residuals"][0] == 3e-6);
  CHECK(j["ladder"].size() == 2);
  CHECK(j["truncated_at"].is_null());

  QReport q;
  q.a0 = 2;
  q.levels.push_back({0.5, -0.1, {-1, 1}, true, true, {}});
  q.pass = true;
  CHECK(to_json(q)["levels"][0]["zeros"].size() == 2);
}
