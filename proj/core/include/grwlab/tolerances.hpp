#pragma once

#include <cmath>
#include <cstddef>

namespace grwlab {

/// Single record of every numerical threshold used by classification,
/// geometry, solving, and verification. Reports echo the record they used.
struct Tolerances {
  // Classification.
  double ncc = 1e-10;         ///< slack on (log f)'' <= 0
  double inf_phi = 1e-9;      ///< inf Phi must exceed this
  double root = 1e-10;        ///< critical-point tolerance on f'/f
  std::size_t scan_points = 4096;
  int refine_rounds = 3;
  double endpoint_offset = 1e-3;  ///< first near-endpoint probe offset

  // Geometry.
  double space_margin = 1e-6;  ///< eps_space: |Du|^2 < f^2 - eps^2

  // Solver.
  double residual = 1e-9;       ///< max-node |H| for convergence
  int max_iterations = 50;
  double damping_floor = std::ldexp(1.0, -20);

  // Verification: pass thresholds are C * h^2, h the largest grid spacing.
  double maximal_factor = 10.0;  ///< surfaces count as maximal if max|H| <= factor*h^2
  /// Surface checks skip this fraction of each axis extent next to every
  /// boundary face. Solved Dirichlet surfaces have corner singularities in
  /// their third derivatives; a fixed physical inset keeps refinement studies
  /// on one point set.
  double check_inset = 0.25;
  // Constants: twice the largest |margin|/h^2 seen in the three-grid study
  // (33, 65, 129 nodes) on five solved maximal surfaces, floored at 0.5.
  double c_lemma1 = 0.5;
  double c_laplacian = 6.0;
  double c_ricci = 0.5;
  double c_nishikawa = 2.0;
};

}  // namespace grwlab
