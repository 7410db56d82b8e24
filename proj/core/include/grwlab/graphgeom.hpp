#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "grwlab/grid.hpp"
#include "grwlab/parallel.hpp"
#include "grwlab/tolerances.hpp"
#include "grwlab/warpkit.hpp"

namespace grwlab {

/// Spacelike graph t = u(x) over a grid of the flat fiber.
struct GraphHypersurface {
  Grid grid;
  std::vector<double> u;  ///< one value per node, storage order of `grid`
  SpacetimeSpec spec;
};

/// Packed symmetric 3x3 storage: (00, 01, 02, 11, 12, 22).
using SymMatrix = std::array<double, 6>;
using Vec3 = std::array<double, 3>;

constexpr std::size_t sym_index(int i, int j) {
  if (i > j) return sym_index(j, i);
  constexpr std::size_t table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[i][j];
}

/// Per-node geometry of a spacelike graph. Every per-node vector has one
/// entry per grid node; entries on boundary nodes are NaN (depth 1 valid).
struct GeometryFields {
  Grid grid;
  int n = 2;
  std::vector<double> u{};

  std::vector<double> f{};    ///< f(u)
  std::vector<double> df{};   ///< f'(u)
  std::vector<double> d2f{};  ///< f''(u)
  std::vector<Vec3> du{};     ///< central-difference partials of u

  std::vector<SymMatrix> metric{};   ///< g_ij = f^2 delta_ij - u_i u_j
  std::vector<SymMatrix> inverse{};  ///< g^ij by cofactor inversion of g_ij
  std::vector<double> sqrt_det{};    ///< sqrt(det g)

  std::vector<double> cosh_phi{};
  std::vector<double> sinh2_phi{};       ///< closed form |Du|^2 / (f^2 - |Du|^2)
  std::vector<double> grad_tau_norm2{};  ///< g^ij u_i u_j from the inverse metric
  std::vector<Vec3> grad_tau{};          ///< contravariant gradient g^ij u_j
  std::vector<double> mean_curvature{};  ///< H, slice u = t0 gives f'(t0)/f(t0)

  static constexpr int kValidDepth = 1;
};

struct SpacelikeReport {
  bool spacelike = true;
  double worst_margin = kInfinity;  ///< min over interior nodes of f(u)^2 - |Du|^2
  std::size_t worst_node = 0;
};

/// Throws DomainError (with the node index) if some u leaves the warp domain.
SpacelikeReport spacelike_check(const GraphHypersurface& surface, const Tolerances& tol = {});

/// Throws SpacelikeError if the margin fails anywhere.
GeometryFields compute_fields(const GraphHypersurface& surface, const Tolerances& tol = {},
                              Execution exec = Execution::kSerial);

/// Mean curvature only (the maximal-surface residual). Interior entries are
/// H; boundary entries are NaN. Throws like compute_fields.
std::vector<double> mean_curvature(const Grid& grid, const SpacetimeSpec& spec,
                                   const std::vector<double>& u, const Tolerances& tol = {},
                                   Execution exec = Execution::kSerial);

/// Laplace-Beltrami operator of the induced metric,
/// (1/sqrt g) d_i (sqrt g g^ij d_j s), by nested central differences.
/// The output is valid two nodes deeper than the input.
MaskedField laplace_beltrami(const GeometryFields& fields, const MaskedField& s,
                             Execution exec = Execution::kSerial);
MaskedField laplace_beltrami(const GeometryFields& fields, const std::vector<double>& s,
                             Execution exec = Execution::kSerial);

/// |Hess tau|^2 in the induced metric, Christoffel symbols from central
/// differences of g_ij. n = 2 only (UnsupportedDimensionError otherwise).
MaskedField covariant_hessian_norm(const GeometryFields& fields, const std::vector<double>& tau);

/// Intrinsic Gauss curvature of the induced metric by the Brioschi formula.
/// n = 2 only.
MaskedField gauss_curvature(const GeometryFields& fields);

}  // namespace grwlab
