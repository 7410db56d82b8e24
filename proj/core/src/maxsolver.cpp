#include "grwlab/maxsolver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "grwlab/errors.hpp"

namespace grwlab {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Interior nodes get consecutive unknown numbers in storage order.
struct Unknowns {
  std::vector<std::size_t> nodes;
  std::vector<long> row_of;  // -1 on boundary nodes

  explicit Unknowns(const Grid& grid)
      : nodes(grid.nodes_with_depth(1)), row_of(grid.size(), -1) {
    for (std::size_t k = 0; k < nodes.size(); ++k) row_of[nodes[k]] = static_cast<long>(k);
  }
};

std::string format(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

std::vector<double> sample_nodes(const Grid& grid, const NodeFunction& fn) {
  std::vector<double> out(grid.size());
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int a = 0; a < grid.dim(); ++a) x[static_cast<std::size_t>(a)] = grid.coordinate(p, a);
    out[p] = fn(x);
  }
  return out;
}

std::vector<double> harmonic_extension(const Grid& grid, const std::vector<double>& boundary) {
  const Unknowns unknowns(grid);
  const auto m = static_cast<Eigen::Index>(unknowns.nodes.size());
  std::vector<Triplet> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < unknowns.nodes.size(); ++k) {
    const std::size_t p = unknowns.nodes[k];
    const auto row = static_cast<Eigen::Index>(k);
    double diag = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double w = 1.0 / (grid.spacing(a) * grid.spacing(a));
      diag += 2.0 * w;
      for (const std::size_t q : {p - grid.stride(a), p + grid.stride(a)}) {
        if (unknowns.row_of[q] >= 0) {
          triplets.emplace_back(row, unknowns.row_of[q], -w);
        } else {
          rhs[row] += w * boundary[q];
        }
      }
    }
    triplets.emplace_back(row, row, diag);
  }
  SparseMatrix A(m, m);
  A.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<SparseMatrix> solver(A);
  const Eigen::VectorXd x = solver.solve(rhs);

  std::vector<double> out = boundary;
  for (std::size_t k = 0; k < unknowns.nodes.size(); ++k) {
    out[unknowns.nodes[k]] = x[static_cast<Eigen::Index>(k)];
  }
  return out;
}

DirichletProblem make_dirichlet_problem(SpacetimeSpec spec, Grid grid, const NodeFunction& boundary,
                                        const NodeFunction& guess, const Tolerances& tol,
                                        Execution exec) {
  std::vector<double> b = sample_nodes(grid, boundary);
  std::vector<double> g;
  if (guess) {
    g = sample_nodes(grid, guess);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (grid.is_boundary(p)) g[p] = b[p];
    }
  } else {
    g = harmonic_extension(grid, b);
  }
  DirichletProblem problem{std::move(spec), std::move(grid), std::move(b), std::move(g),
                           SolverConfig::from(tol, exec), tol};
  validate_problem(problem);
  return problem;
}

void validate_problem(const DirichletProblem& problem) {
  const Grid& grid = problem.grid;
  const auto& spec = problem.spec;
  if (problem.boundary.size() != grid.size() || problem.initial_guess.size() != grid.size()) {
    throw PreconditionError("boundary data and initial guess must have one value per node");
  }
  const double eps2 = problem.tolerances.space_margin * problem.tolerances.space_margin;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!grid.is_boundary(p)) continue;
    if (!spec.warp.domain().contains(problem.boundary[p])) {
      throw PreconditionError("infeasible boundary data: value " + format(problem.boundary[p]) +
                              " at node " + std::to_string(p) + " is outside the warp domain");
    }
    if (problem.initial_guess[p] != problem.boundary[p]) {
      throw PreconditionError("initial guess differs from the boundary data at node " +
                              std::to_string(p));
    }
    for (int a = 0; a < grid.dim(); ++a) {
      const auto idx = grid.unravel(p);
      if (idx[static_cast<std::size_t>(a)] + 1 >= grid.nodes(a)) continue;
      const std::size_t q = p + grid.stride(a);
      if (!grid.is_boundary(q)) continue;
      const double slope = (problem.boundary[q] - problem.boundary[p]) / grid.spacing(a);
      const double mid = 0.5 * (problem.boundary[p] + problem.boundary[q]);
      if (!spec.warp.domain().contains(mid)) continue;
      const double f = spec.warp.evaluate(mid).f;
      if (!(slope * slope < f * f - eps2)) {
        throw PreconditionError("infeasible boundary data: slope " + format(slope) +
                                " between boundary nodes " + std::to_string(p) + " and " +
                                std::to_string(q) + " is not spacelike (f = " + format(f) + ")");
      }
    }
  }
  const GraphHypersurface guess{grid, problem.initial_guess, spec};
  SpacelikeReport report;
  try {
    report = spacelike_check(guess, problem.tolerances);
  } catch (const DomainError& e) {
    throw PreconditionError(std::string("initial guess: ") + e.what());
  }
  if (!report.spacelike) {
    throw PreconditionError("initial guess violates the spacelike margin (f^2 - |Du|^2 = " +
                            format(report.worst_margin) + " at node " +
                            std::to_string(report.worst_node) + ")");
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "CONVERGED";
    case SolveStatus::kMaxIter: return "MAX_ITER";
    case SolveStatus::kSpacelikeBreakdown: return "SPACELIKE_BREAKDOWN";
  }
  return "MAX_ITER";
}

std::vector<double> residual(const SpacetimeSpec& spec, const Grid& grid,
                             const std::vector<double>& u, const Tolerances& tol,
                             Execution exec) {
  return mean_curvature(grid, spec, u, tol, exec);
}

double residual_norm(const Grid& grid, const std::vector<double>& H) {
  double norm = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!grid.is_boundary(p)) norm = std::max(norm, std::abs(H[p]));
  }
  return norm;
}

namespace {

// Residual of a trial state, or nullopt if it leaves the spacelike region.
std::optional<std::vector<double>> try_residual(const DirichletProblem& problem,
                                                const std::vector<double>& u) {
  try {
    const GraphHypersurface s{problem.grid, u, problem.spec};
    if (!spacelike_check(s, problem.tolerances).spacelike) return std::nullopt;
    return residual(problem.spec, problem.grid, u, problem.tolerances, problem.config.exec);
  } catch (const SpacelikeError&) {
    return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const PositivityError&) {
    return std::nullopt;
  }
}

// Columns whose stencils (3^n blocks) cannot share a row get the same color.
int stencil_color(const Grid& grid, std::size_t p) {
  const auto idx = grid.unravel(p);
  int color = 0;
  int scale = 1;
  for (int a = 0; a < grid.dim(); ++a) {
    color += (idx[static_cast<std::size_t>(a)] % 3) * scale;
    scale *= 3;
  }
  return color;
}

// Forward-difference Jacobian dH/du restricted to interior unknowns.
SparseMatrix assemble_jacobian(const DirichletProblem& problem, const Unknowns& unknowns,
                               const std::vector<double>& u, const std::vector<double>& H) {
  const Grid& grid = problem.grid;
  const int dim = grid.dim();
  int colors = 1;
  for (int a = 0; a < dim; ++a) colors *= 3;
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());

  std::vector<int> color_of(grid.size(), -1);
  for (std::size_t p : unknowns.nodes) color_of[p] = stencil_color(grid, p);

  // Neighbourhood offsets (Chebyshev radius 1).
  std::vector<long> offsets;
  for (int c = 0; c < colors; ++c) {
    long off = 0;
    int rest = c;
    for (int a = 0; a < dim; ++a) {
      off += static_cast<long>((rest % 3) - 1) * static_cast<long>(grid.stride(a));
      rest /= 3;
    }
    offsets.push_back(off);
  }

  std::vector<Triplet> triplets;
  triplets.reserve(unknowns.nodes.size() * static_cast<std::size_t>(colors));
  std::vector<double> step(grid.size(), 0.0);
  for (int color = 0; color < colors; ++color) {
    std::vector<double> perturbed = u;
    for (std::size_t p : unknowns.nodes) {
      if (color_of[p] != color) continue;
      step[p] = root_eps * std::max(1.0, std::abs(u[p]));
      perturbed[p] = u[p] + step[p];
    }
    auto Hp = try_residual(problem, perturbed);
    double sign = 1.0;
    if (!Hp) {
      // Near the margin: difference backwards instead.
      for (std::size_t p : unknowns.nodes) {
        if (color_of[p] == color) perturbed[p] = u[p] - step[p];
      }
      Hp = try_residual(problem, perturbed);
      sign = -1.0;
      if (!Hp) throw SpacelikeError("Jacobian probe left the spacelike region");
    }
    for (std::size_t row = 0; row < unknowns.nodes.size(); ++row) {
      const std::size_t i = unknowns.nodes[row];
      for (const long off : offsets) {
        const auto j = static_cast<std::size_t>(static_cast<long>(i) + off);
        if (unknowns.row_of[j] < 0 || color_of[j] != color) continue;
        const double value = ((*Hp)[i] - H[i]) / (sign * step[j]);
        triplets.emplace_back(static_cast<Eigen::Index>(row), unknowns.row_of[j], value);
      }
    }
  }
  const auto m = static_cast<Eigen::Index>(unknowns.nodes.size());
  SparseMatrix J(m, m);
  J.setFromTriplets(triplets.begin(), triplets.end());
  J.makeCompressed();
  return J;
}

}  // namespace

SolveOutcome solve(const DirichletProblem& problem) {
  validate_problem(problem);
  const Grid& grid = problem.grid;
  const SolverConfig& cfg = problem.config;
  const Unknowns unknowns(grid);

  SolveOutcome out;
  out.u = problem.initial_guess;
  auto H0 = try_residual(problem, out.u);
  if (!H0) throw PreconditionError("initial guess is not spacelike at a cell face");
  std::vector<double> H = std::move(*H0);
  double norm = residual_norm(grid, H);
  out.history.push_back({0, norm, 0.0});

  for (int it = 1;; ++it) {
    if (norm <= cfg.residual_tolerance) {
      out.status = SolveStatus::kConverged;
      out.message = "max |H| = " + format(norm);
      return out;
    }
    if (it > cfg.max_iterations) {
      out.status = SolveStatus::kMaxIter;
      out.message = "no convergence after " + std::to_string(cfg.max_iterations) +
                    " iterations, max |H| = " + format(norm);
      return out;
    }

    SparseMatrix J;
    try {
      J = assemble_jacobian(problem, unknowns, out.u, H);
    } catch (const SpacelikeError& e) {
      out.status = SolveStatus::kSpacelikeBreakdown;
      out.message = e.what();
      return out;
    }
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      out.status = SolveStatus::kMaxIter;
      out.message = "singular Newton Jacobian at iteration " + std::to_string(it);
      return out;
    }
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(unknowns.nodes.size()));
    for (std::size_t k = 0; k < unknowns.nodes.size(); ++k) {
      rhs[static_cast<Eigen::Index>(k)] = -H[unknowns.nodes[k]];
    }
    const Eigen::VectorXd delta = lu.solve(rhs);

    bool margin_ever_held = false;
    bool accepted = false;
    for (double lambda = 1.0; lambda >= cfg.damping_floor; lambda *= 0.5) {
      std::vector<double> trial = out.u;
      for (std::size_t k = 0; k < unknowns.nodes.size(); ++k) {
        trial[unknowns.nodes[k]] += lambda * delta[static_cast<Eigen::Index>(k)];
      }
      auto Ht = try_residual(problem, trial);
      if (!Ht) continue;
      margin_ever_held = true;
      const double trial_norm = residual_norm(grid, *Ht);
      if (trial_norm < norm) {
        out.u = std::move(trial);
        H = std::move(*Ht);
        norm = trial_norm;
        out.iterations = it;
        out.history.push_back({it, norm, lambda});
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!margin_ever_held) {
        out.status = SolveStatus::kSpacelikeBreakdown;
        out.message = "no damping >= floor preserves the spacelike margin at iteration " +
                      std::to_string(it);
      } else {
        out.status = SolveStatus::kMaxIter;
        out.message = "residual stagnated at max |H| = " + format(norm) + " (iteration " +
                      std::to_string(it) + ")";
      }
      return out;
    }
  }
}

SolveOutcome continuation_solve(const DirichletProblem& problem, int steps) {
  if (steps < 1) {
    throw ParameterError("continuation needs steps >= 1, got " + std::to_string(steps));
  }
  const Grid& grid = problem.grid;
  validate_problem(problem);

  SolveOutcome total;
  std::vector<double> previous;
  std::vector<double> increment;
  for (int k = 1; k <= steps; ++k) {
    const double scale = static_cast<double>(k) / steps;
    DirichletProblem stage = problem;
    for (std::size_t p = 0; p < grid.size(); ++p) stage.boundary[p] = problem.boundary[p] * scale;

    if (k == 1) {
      for (std::size_t p = 0; p < grid.size(); ++p) {
        stage.initial_guess[p] =
            grid.is_boundary(p) ? stage.boundary[p] : problem.initial_guess[p] * scale;
      }
    } else {
      if (increment.empty()) {
        std::vector<double> db(grid.size(), 0.0);
        for (std::size_t p = 0; p < grid.size(); ++p) db[p] = problem.boundary[p] / steps;
        increment = harmonic_extension(grid, db);
      }
      for (std::size_t p = 0; p < grid.size(); ++p) {
        stage.initial_guess[p] =
            grid.is_boundary(p) ? stage.boundary[p] : previous[p] + increment[p];
      }
    }

    SolveOutcome step;
    try {
      step = solve(stage);
    } catch (const PreconditionError& e) {
      if (k == 1) throw;
      total.status = SolveStatus::kSpacelikeBreakdown;
      total.message = "continuation step " + std::to_string(k) + ": " + e.what();
      return total;
    }
    for (auto rec : step.history) {
      rec.iteration += total.iterations;
      total.history.push_back(rec);
    }
    total.iterations += step.iterations;
    total.u = step.u;
    total.status = step.status;
    total.message = "step " + std::to_string(k) + "/" + std::to_string(steps) + ": " + step.message;
    if (step.status != SolveStatus::kConverged) return total;
    previous = std::move(step.u);
  }
  return total;
}

}  // namespace grwlab
