#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>

#include "grwlab/errors.hpp"
#include "grwlab/io.hpp"
#include "json.hpp"

namespace grwlab {
namespace {

using nlohmann::json;

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("grwlab_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(1.0), "1");
  EXPECT_EQ(io::format_double(-2.5e-300), "-2.5e-300");
  std::mt19937_64 rng(3);
  for (int k = 0; k < 2000; ++k) {
    double x = std::bit_cast<double>(rng());
    if (!std::isfinite(x)) continue;
    EXPECT_EQ(std::stod(io::format_double(x)), x);
  }
}

TEST(Interval, RoundTripWithInfiniteEnds) {
  for (const IntervalDomain d : {IntervalDomain::real_line(), IntervalDomain::open(0, kInfinity),
                                 IntervalDomain{0, 10, true, false}, IntervalDomain::closed(-0.3, 0.7)}) {
    const std::string text = io::interval_to_json(d);
    EXPECT_EQ(io::interval_from_json(text), d) << text;
  }
  const auto j = json::parse(io::interval_to_json(IntervalDomain::real_line()));
  EXPECT_EQ(j["lo"], "-inf");
  EXPECT_EQ(j["hi"], "inf");
  EXPECT_THROW(io::interval_from_json("{\"lo\": 1}"), ParseError);
  EXPECT_THROW(io::interval_from_json("not json"), ParseError);
}

TEST(Spacetime, CatalogAndExpressionRoundTrip) {
  std::vector<SpacetimeSpec> specs;
  for (const auto& e : builtin_catalog()) specs.push_back(make_spacetime(e.name, 3));
  specs.push_back(make_spacetime("Example2", 2, {{"a", 2.0}}));
  specs.push_back(make_expression_spacetime("bump", 2, "2 + sin(t)", IntervalDomain::open(-1, 5)));
  for (const auto& spec : specs) {
    const auto back = io::spacetime_from_json(io::spacetime_to_json(spec));
    EXPECT_EQ(back.name, spec.name);
    EXPECT_EQ(back.n, spec.n);
    EXPECT_EQ(back.warp.domain(), spec.warp.domain());
    EXPECT_EQ(back.source.params, spec.source.params);
    const double t = spec.warp.domain().bounded() ? 0.5 * (spec.warp.domain().lower + spec.warp.domain().upper)
                                                  : (std::isfinite(spec.warp.domain().lower) ? 1.5 : 0.25);
    EXPECT_EQ(eval_warp(back.warp, t).d2f, eval_warp(spec.warp, t).d2f) << spec.name;
  }
}

TEST(Grid, RoundTrip) {
  const Grid g(3, {-1, 0, 2}, {1, 0.5, 3}, {9, 5, 7});
  EXPECT_EQ(io::grid_from_json(io::grid_to_json(g)), g);
  EXPECT_THROW(io::grid_from_json("{\"dim\": 2}"), ParseError);
}

TEST(Tolerances, RoundTripAndPartialOverride) {
  Tolerances t;
  t.c_laplacian = 7.25;
  t.scan_points = 123;
  const auto back = io::tolerances_from_json(io::tolerances_to_json(t));
  EXPECT_EQ(io::tolerances_to_json(back), io::tolerances_to_json(t));
  const auto partial = io::tolerances_from_json("{\"residual\": 1e-7}");
  EXPECT_EQ(partial.residual, 1e-7);
  EXPECT_EQ(partial.c_lemma1, Tolerances{}.c_lemma1);
}

TEST(Field, CsvRoundTripIsBitwise) {
  const Grid g = Grid::cube(2, 0, 1, 7);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist(0.0, 1e3);
  std::vector<double> v(g.size());
  for (double& x : v) x = dist(rng);
  const std::string csv = io::field_to_csv(g, v);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_EQ(io::field_from_csv(g, csv), v);
  EXPECT_THROW(io::field_from_csv(g, "1,2,3\n"), ParseError);
  EXPECT_THROW(io::field_from_csv(g, "1,x,3\n"), ParseError);
}

TEST(Surface, WriteReadRoundTrip) {
  const auto dir = scratch("surface");
  const Grid g = Grid::cube(2, -1, 1, 9);
  GraphHypersurface s{g, std::vector<double>(g.size()), make_spacetime("Example2", 2, {{"a", 2.0}})};
  for (std::size_t p = 0; p < g.size(); ++p) s.u[p] = 0.1 * g.coordinate(p, 0) * g.coordinate(p, 1) + 1.0 / 3.0;
  io::write_surface(dir / "surf", s);
  ASSERT_TRUE(std::filesystem::exists(dir / "surf.json"));
  ASSERT_TRUE(std::filesystem::exists(dir / "surf.csv"));
  const auto back = io::read_surface(dir / "surf.json");
  EXPECT_EQ(back.grid, s.grid);
  EXPECT_EQ(back.u, s.u);
  EXPECT_EQ(back.spec.source.params, s.spec.source.params);
  EXPECT_EQ(json::parse(io::read_text(dir / "surf.json"))["schema"], "grwlab/1");
}

TEST(Surface, RejectsWrongSchema) {
  const auto dir = scratch("schema");
  io::write_text(dir / "bad.json", "{\"schema\": \"other/9\"}");
  EXPECT_THROW(io::read_surface(dir / "bad.json"), ParseError);
}

TEST(Reports, ClassificationJson) {
  const auto r = classify(make_spacetime("Example1", 3), IntervalDomain::real_line());
  const auto j = json::parse(io::classification_to_json(r));
  EXPECT_EQ(j["schema"], "grwlab/1");
  EXPECT_EQ(j["verdict"]["kind"], "UNIQUE_SLICE");
  EXPECT_EQ(j["tau_window"]["lo"], "-inf");
  EXPECT_EQ(j["tolerances"]["c_laplacian"], Tolerances{}.c_laplacian);
  // Deterministic text.
  EXPECT_EQ(io::classification_to_json(r), io::classification_to_json(classify(make_spacetime("Example1", 3), IntervalDomain::real_line())));
}

TEST(Reports, CheckReportAndMargins) {
  const Grid g = Grid::cube(2, 0, 1, 17);
  const auto r = check_nishikawa_identity(g, std::vector<double>(g.size(), 1.0));
  const auto j = json::parse(io::check_report_to_json(r.identity));
  EXPECT_EQ(j["check"], "nishikawa");
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["worst_margin"], 0.0);
  const std::string csv = io::masked_field_to_csv(g, r.identity.margins, "margin");
  EXPECT_EQ(csv.rfind("x1,x2,margin\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 1 + r.identity.nodes_evaluated);
}

TEST(Reports, SolveOutcomeAndHistory) {
  const Grid g = Grid::cube(2, -1, 1, 9);
  const auto problem = make_dirichlet_problem(make_spacetime("Example1", 2), g,
                                              [](std::span<const double> x) { return 0.1 * x[0]; });
  const auto out = solve(problem);
  const auto j = json::parse(io::outcome_to_json(out, g));
  EXPECT_EQ(j["status"], "CONVERGED");
  const std::string hist = io::residual_history_csv(out);
  EXPECT_EQ(hist.rfind("iteration,residual_norm,damping\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(hist.begin(), hist.end(), '\n')), out.history.size() + 1);
  const auto pj = json::parse(io::problem_to_json(problem));
  EXPECT_EQ(pj["grid"]["nodes"][0], 9);
}

TEST(Fields, ExportOneCsvPerField) {
  const auto dir = scratch("fields");
  const Grid g = Grid::cube(2, -1, 1, 9);
  const auto fields = compute_fields({g, std::vector<double>(g.size(), 0.2), make_spacetime("Example1", 2)});
  io::write_fields(dir, fields);
  for (const char* name : {"u", "cosh_phi", "sinh2_phi", "mean_curvature", "g11", "g12", "g22"}) {
    const auto path = dir / (std::string("field_") + name + ".csv");
    ASSERT_TRUE(std::filesystem::exists(path)) << name;
    const std::string text = io::read_text(path);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 49);
  }
}

}  // namespace
}  // namespace grwlab
