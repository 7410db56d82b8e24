#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "grwlab/errors.hpp"
#include "grwlab/maxsolver.hpp"

namespace grwlab {
namespace {

double max_abs_interior(const Grid& g, const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t p : g.nodes_with_depth(1)) worst = std::max(worst, std::abs(v[p]));
  return worst;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) worst = std::max(worst, std::abs(a[p] - b[p]));
  return worst;
}

NodeFunction affine(double a0, double a1, double b = 0.0) {
  return [=](std::span<const double> x) { return a0 * x[0] + a1 * x[1] + b; };
}

void expect_converged_invariants(const DirichletProblem& problem, const SolveOutcome& out) {
  ASSERT_EQ(out.status, SolveStatus::kConverged) << out.message;
  const auto H = residual(problem.spec, problem.grid, out.u);
  EXPECT_LE(residual_norm(problem.grid, H), problem.config.residual_tolerance);
  const auto report = spacelike_check(GraphHypersurface{problem.grid, out.u, problem.spec});
  EXPECT_TRUE(report.spacelike);
  for (std::size_t p = 0; p < problem.grid.size(); ++p) {
    if (problem.grid.is_boundary(p)) EXPECT_EQ(out.u[p], problem.boundary[p]);
  }
}

void expect_monotone(const SolveOutcome& out) {
  for (std::size_t k = 1; k < out.history.size(); ++k) {
    EXPECT_LE(out.history[k].residual_norm, out.history[k - 1].residual_norm) << "step " << k;
    EXPECT_GT(out.history[k].damping, 0.0);
  }
}

TEST(Residual, CatalogExamples) {
  const Grid g = Grid::cube(2, -1, 1, 17);
  const auto ex1 = make_spacetime("Example1", 2);
  EXPECT_LE(max_abs_interior(g, residual(ex1, g, std::vector<double>(g.size(), 0.0))), 1e-10);

  const auto one = residual(ex1, g, std::vector<double>(g.size(), 1.0));
  for (std::size_t p : g.nodes_with_depth(1)) EXPECT_NEAR(one[p], -2.0, 1e-10);

  const auto mink = make_spacetime("Minkowski", 2);
  EXPECT_LE(max_abs_interior(g, residual(mink, g, sample_nodes(g, affine(0.4, -0.3)))), 1e-12);
}

TEST(Residual, RejectsMarginViolation) {
  const Grid g = Grid::cube(2, -1, 1, 17);
  EXPECT_THROW(residual(make_spacetime("Minkowski", 2), g, sample_nodes(g, affine(1.2, 0.0))),
               SpacelikeError);
}

TEST(HarmonicExtension, ReproducesAffineData) {
  const Grid g = Grid::cube(2, -1, 1, 17);
  const auto b = sample_nodes(g, affine(0.3, 0.7, 1.0));
  EXPECT_LE(max_diff(harmonic_extension(g, b), b), 1e-12);
}

TEST(Solve, Example1ZeroBoundaryFindsTheSlice) {
  const auto spec = make_spacetime("Example1", 2);
  const Grid g = Grid::cube(2, -1, 1, 33);
  const auto problem = make_dirichlet_problem(spec, g, [](std::span<const double>) { return 0.0; },
                                              [](std::span<const double> x) {
                                                return 0.3 * std::cos(M_PI * x[0] / 2) * std::cos(M_PI * x[1] / 2);
                                              });
  const auto out = solve(problem);
  expect_converged_invariants(problem, out);
  expect_monotone(out);
  double worst = 0.0;
  for (double v : out.u) worst = std::max(worst, std::abs(v));
  EXPECT_LE(worst, problem.config.residual_tolerance);
}

TEST(Solve, MinkowskiAffineBoundary) {
  const auto spec = make_spacetime("Minkowski", 2);
  const Grid g = Grid::cube(2, -1, 1, 33);
  const double a = 0.5 / std::sqrt(2.0);
  const auto problem = make_dirichlet_problem(spec, g, affine(a, a), [&](std::span<const double> x) {
    return a * (x[0] + x[1]) + 0.05 * std::sin(M_PI * (x[0] + 1) / 2) * std::sin(M_PI * (x[1] + 1) / 2);
  });
  const auto out = solve(problem);
  expect_converged_invariants(problem, out);
  expect_monotone(out);
  const double h = g.max_spacing();
  EXPECT_LE(max_diff(out.u, sample_nodes(g, affine(a, a))), 10 * h * h);
}

TEST(Solve, InfeasibleBoundaryIsAPreconditionError) {
  const auto spec = make_spacetime("Minkowski", 2);
  const Grid g = Grid::cube(2, -1, 1, 17);
  EXPECT_THROW(make_dirichlet_problem(spec, g, affine(1.3, 0.0)), PreconditionError);
  // Spacelike data corrupted at one boundary node.
  auto problem = make_dirichlet_problem(spec, g, affine(0.2, 0.0));
  problem.boundary[3] += 1.0;
  problem.initial_guess[3] += 1.0;
  EXPECT_THROW(solve(problem), PreconditionError);
  // Guess disagreeing with the boundary.
  auto mismatch = make_dirichlet_problem(spec, g, affine(0.2, 0.0));
  mismatch.initial_guess[0] += 1e-3;
  EXPECT_THROW(solve(mismatch), PreconditionError);
}

TEST(Solve, MaxIterIsReportedNotThrown) {
  const auto spec = make_spacetime("Example1", 2);
  const Grid g = Grid::cube(2, -1, 1, 17);
  auto problem = make_dirichlet_problem(spec, g, [](std::span<const double> x) { return 0.1 * x[0]; });
  problem.config.max_iterations = 1;
  problem.config.residual_tolerance = 1e-300;
  const auto out = solve(problem);
  EXPECT_EQ(out.status, SolveStatus::kMaxIter);
  EXPECT_EQ(out.iterations, 1);
  expect_monotone(out);
}

TEST(Continuation, ParameterAndIdentityContract) {
  const auto spec = make_spacetime("Example1", 2);
  const Grid g = Grid::cube(2, -1, 1, 17);
  const auto problem = make_dirichlet_problem(spec, g, [](std::span<const double> x) { return 0.2 * x[0] * x[1]; });
  EXPECT_THROW(continuation_solve(problem, 0), ParameterError);
  EXPECT_THROW(continuation_solve(problem, -3), ParameterError);
  const auto plain = solve(problem);
  const auto once = continuation_solve(problem, 1);
  EXPECT_EQ(plain.status, once.status);
  EXPECT_EQ(plain.iterations, once.iterations);
  EXPECT_EQ(plain.u, once.u);
  ASSERT_EQ(plain.history.size(), once.history.size());
  for (std::size_t k = 0; k < plain.history.size(); ++k) {
    EXPECT_EQ(plain.history[k].residual_norm, once.history[k].residual_norm);
  }
}

TEST(Continuation, SteepMinkowskiBoundary) {
  const auto spec = make_spacetime("Minkowski", 2);
  const Grid g = Grid::cube(2, -1, 1, 33);
  const double a = 0.95 / std::sqrt(2.0);
  const auto problem = make_dirichlet_problem(spec, g, affine(a, a), [&](std::span<const double> x) {
    return a * (x[0] + x[1]) + 0.01 * std::cos(M_PI * x[0] / 2) * std::cos(M_PI * x[1] / 2);
  });
  const auto out = continuation_solve(problem, 10);
  expect_converged_invariants(problem, out);
  const double h = g.max_spacing();
  EXPECT_LE(max_diff(out.u, sample_nodes(g, affine(a, a))), 10 * h * h);
}

TEST(Solve, FrameInvarianceIsBitwise) {
  const auto spec = make_spacetime("Example1", 2);
  const Grid g = Grid::cube(2, -1, 1, 17);
  auto data = [](double x, double y) { return 0.15 * std::sin(x) + 0.1 * x * y; };
  const auto base = make_dirichlet_problem(spec, g, [&](std::span<const double> x) { return data(x[0], x[1]); });
  const std::array<double, 3> shift{0.75, -2.5, 0.0};
  const Grid moved = g.translated(shift);
  // Same node values, expressed in the translated frame.
  const auto shifted = make_dirichlet_problem(spec, moved, [&](std::span<const double> x) {
    return data(x[0] - shift[0], x[1] - shift[1]);
  });
  const auto a = solve(base);
  const auto b = solve(shifted);
  ASSERT_EQ(a.status, SolveStatus::kConverged);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.iterations, b.iterations);
}

// Property: random affine Minkowski data with |a| <= 0.8 is recovered to 10 h^2.
TEST(Solve, RandomAffineRecovery) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  std::uniform_real_distribution<double> mag(0.0, 0.8);
  std::uniform_real_distribution<double> offset(-1.0, 1.0);
  const auto spec = make_spacetime("Minkowski", 2);
  const Grid g = Grid::cube(2, -1, 1, 17);
  const double h = g.max_spacing();
  for (int trial = 0; trial < 10; ++trial) {
    const double th = angle(rng), r = mag(rng), b = offset(rng);
    const auto bnd = affine(r * std::cos(th), r * std::sin(th), b);
    const auto problem = make_dirichlet_problem(spec, g, bnd, [&](std::span<const double> x) {
      return bnd(x) + 0.02 * std::cos(M_PI * x[0] / 2) * std::cos(M_PI * x[1] / 2);
    });
    const auto out = solve(problem);
    expect_converged_invariants(problem, out);
    expect_monotone(out);
    EXPECT_LE(max_diff(out.u, sample_nodes(g, bnd)), 10 * h * h);
  }
}

TEST(Solve, ParallelMatchesSerial) {
  const auto spec = make_spacetime("Example1", 2);
  const Grid g = Grid::cube(2, -1, 1, 65);
  auto problem = make_dirichlet_problem(spec, g, [](std::span<const double> x) { return 0.1 * x[0] * x[1]; });
  const auto serial = solve(problem);
  problem.config.exec = Execution::kParallel;
  const auto parallel = solve(problem);
  EXPECT_EQ(serial.u, parallel.u);
}

TEST(Solve, ThreeDimensionalSlice) {
  const auto spec = make_spacetime("Example1", 3);
  const Grid g = Grid::cube(3, -1, 1, 9);
  const auto problem = make_dirichlet_problem(spec, g, [](std::span<const double>) { return 0.0; },
                                              [](std::span<const double> x) {
                                                return 0.1 * std::cos(M_PI * x[0] / 2) * std::cos(M_PI * x[1] / 2) *
                                                       std::cos(M_PI * x[2] / 2);
                                              });
  const auto out = solve(problem);
  expect_converged_invariants(problem, out);
}

}  // namespace
}  // namespace grwlab
