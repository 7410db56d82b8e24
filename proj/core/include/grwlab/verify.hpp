#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "grwlab/graphgeom.hpp"
#include "grwlab/grid.hpp"
#include "grwlab/tolerances.hpp"

namespace grwlab {

/// Outcome of one numerical check. Margins are signed: a node passes when
/// its margin is >= -tolerance. Identity checks use margin = -|lhs - rhs|.
struct CheckReport {
  std::string name;
  std::size_t nodes_evaluated = 0;
  double worst_margin = kInfinity;
  std::size_t worst_node = 0;
  std::array<double, 3> worst_location{0.0, 0.0, 0.0};
  double tolerance = 0.0;  ///< C * h^2
  double constant = 0.0;   ///< C
  double spacing = 0.0;    ///< h (largest grid spacing)
  double max_residual = 0.0;  ///< max |H| of the input surface, where relevant
  bool pass = false;
  std::string note;
  MaskedField margins;     ///< per-node margins on the evaluated domain
};

/// Phi(tau) at every interior node, from the stored warp values.
std::vector<double> phi_field(const GeometryFields& fields);

/// m = 1/2 Lap(sinh^2 phi) - Phi(tau) sinh^4 phi >= -C h^2.
/// Requires a maximal surface (max |H| <= maximal_factor * h^2) on whose
/// tau-range the NCC holds; PreconditionError otherwise.
CheckReport check_lemma1_inequality(const GraphHypersurface& surface, const Tolerances& tol = {},
                                    Execution exec = Execution::kSerial);

/// cosh phi Lap(cosh phi) against |Hess tau|^2 plus the closed-form warp and
/// angle terms; passes when the discrepancy is <= C h^2. n = 2, maximal.
CheckReport check_laplacian_identity(const GraphHypersurface& surface, const Tolerances& tol = {},
                                     Execution exec = Execution::kSerial);

/// Intrinsic curvature K >= -C h^2 and Ric(Y,Y) = K|Y|^2 against the
/// ambient sectional sum over 8 fixed unit directions. n = 2, maximal, NCC.
CheckReport check_ricci_bound(const GraphHypersurface& surface, const Tolerances& tol = {},
                              Execution exec = Execution::kSerial);

struct NishikawaReport {
  CheckReport identity;
  /// Present when a constant c was supplied: the bound
  /// c u^2/(1+u)^2 <= 6|grad F|^2 - 2 F Lap F under the hypothesis Lap u >= c u^2.
  std::optional<CheckReport> corollary;
};

/// Lap u = 6|grad F|^2/F^4 - 2 Lap F / F^3 for F = (1+u)^(-1/2), u > 0.
/// Background metric is Euclidean unless `metric` is given.
NishikawaReport check_nishikawa_identity(const Grid& grid, const std::vector<double>& u,
                                         const Tolerances& tol = {},
                                         std::optional<double> c = std::nullopt,
                                         const GeometryFields* metric = nullptr);

}  // namespace grwlab
