#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "grwlab/graphgeom.hpp"
#include "grwlab/grid.hpp"
#include "grwlab/parallel.hpp"
#include "grwlab/tolerances.hpp"
#include "grwlab/warpkit.hpp"

namespace grwlab {

struct SolverConfig {
  int max_iterations = 50;
  double residual_tolerance = 1e-9;           ///< on max-node |H|
  double damping_floor = 1.0 / (1 << 20);     ///< 2^-20
  Execution exec = Execution::kSerial;

  static SolverConfig from(const Tolerances& tol, Execution exec = Execution::kSerial) {
    return {tol.max_iterations, tol.residual, tol.damping_floor, exec};
  }
};

/// H[u] = 0 on the interior, u = boundary on the boundary.
struct DirichletProblem {
  SpacetimeSpec spec;
  Grid grid;
  std::vector<double> boundary;       ///< full node field; only boundary entries are read
  std::vector<double> initial_guess;  ///< full node field, equal to boundary on the boundary
  SolverConfig config;
  Tolerances tolerances;              ///< spacelike margin and friends
};

using NodeFunction = std::function<double(std::span<const double>)>;

/// Evaluate a function of node coordinates on every node.
std::vector<double> sample_nodes(const Grid& grid, const NodeFunction& fn);

/// Discrete harmonic extension of the boundary entries of `boundary`.
std::vector<double> harmonic_extension(const Grid& grid, const std::vector<double>& boundary);

/// Build a problem from coordinate functions. Without a guess the harmonic
/// extension of the boundary data is used. Validates like validate_problem.
DirichletProblem make_dirichlet_problem(SpacetimeSpec spec, Grid grid, const NodeFunction& boundary,
                                        const NodeFunction& guess = {},
                                        const Tolerances& tol = {},
                                        Execution exec = Execution::kSerial);

/// Throws PreconditionError for infeasible data: boundary values that are
/// not spacelike between adjacent boundary nodes, a guess that disagrees
/// with the boundary, or a guess violating the spacelike margin.
void validate_problem(const DirichletProblem& problem);

enum class SolveStatus { kConverged, kMaxIter, kSpacelikeBreakdown };
std::string to_string(SolveStatus s);

struct ResidualRecord {
  int iteration = 0;
  double residual_norm = 0.0;  ///< max-node |H|
  double damping = 0.0;        ///< accepted step length (0 for the initial state)
};

struct SolveOutcome {
  std::vector<double> u;
  std::vector<ResidualRecord> history;
  int iterations = 0;
  SolveStatus status = SolveStatus::kMaxIter;
  std::string message;
};

/// Max-node mean curvature on the interior; this is the solver residual.
std::vector<double> residual(const SpacetimeSpec& spec, const Grid& grid,
                             const std::vector<double>& u, const Tolerances& tol = {},
                             Execution exec = Execution::kSerial);
double residual_norm(const Grid& grid, const std::vector<double>& H);

/// Damped Newton iteration with a colored finite-difference Jacobian.
SolveOutcome solve(const DirichletProblem& problem);

/// Solve the problems with boundary data scaled by k/steps, k = 1..steps,
/// warm-starting each from the previous solution. Throws ParameterError for
/// steps < 1.
SolveOutcome continuation_solve(const DirichletProblem& problem, int steps);

}  // namespace grwlab
