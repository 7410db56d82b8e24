#include "grwlab/graphgeom.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "grwlab/errors.hpp"

namespace grwlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double central(const std::vector<double>& v, const Grid& grid, std::size_t p, int axis) {
  const std::size_t s = grid.stride(axis);
  return (v[p + s] - v[p - s]) / (2.0 * grid.spacing(axis));
}

double second(const std::vector<double>& v, const Grid& grid, std::size_t p, int axis) {
  const std::size_t s = grid.stride(axis);
  const double h = grid.spacing(axis);
  return (v[p + s] - 2.0 * v[p] + v[p - s]) / (h * h);
}

double mixed(const std::vector<double>& v, const Grid& grid, std::size_t p, int a, int b) {
  const std::size_t sa = grid.stride(a);
  const std::size_t sb = grid.stride(b);
  return (v[p + sa + sb] - v[p + sa - sb] - v[p - sa + sb] + v[p - sa - sb]) /
         (4.0 * grid.spacing(a) * grid.spacing(b));
}

// Cofactor inverse of a symmetric dim x dim matrix; returns the determinant.
double invert(const SymMatrix& m, int dim, SymMatrix& inv) {
  auto at = [&](int i, int j) { return m[sym_index(i, j)]; };
  inv.fill(0.0);
  if (dim == 2) {
    const double det = at(0, 0) * at(1, 1) - at(0, 1) * at(0, 1);
    inv[sym_index(0, 0)] = at(1, 1) / det;
    inv[sym_index(1, 1)] = at(0, 0) / det;
    inv[sym_index(0, 1)] = -at(0, 1) / det;
    return det;
  }
  const double c00 = at(1, 1) * at(2, 2) - at(1, 2) * at(1, 2);
  const double c01 = at(1, 2) * at(0, 2) - at(0, 1) * at(2, 2);
  const double c02 = at(0, 1) * at(1, 2) - at(1, 1) * at(0, 2);
  const double c11 = at(0, 0) * at(2, 2) - at(0, 2) * at(0, 2);
  const double c12 = at(0, 1) * at(0, 2) - at(0, 0) * at(1, 2);
  const double c22 = at(0, 0) * at(1, 1) - at(0, 1) * at(0, 1);
  const double det = at(0, 0) * c00 + at(0, 1) * c01 + at(0, 2) * c02;
  inv[sym_index(0, 0)] = c00 / det;
  inv[sym_index(0, 1)] = c01 / det;
  inv[sym_index(0, 2)] = c02 / det;
  inv[sym_index(1, 1)] = c11 / det;
  inv[sym_index(1, 2)] = c12 / det;
  inv[sym_index(2, 2)] = c22 / det;
  return det;
}

std::string node_text(const Grid& grid, std::size_t p) {
  const auto idx = grid.unravel(p);
  std::string out = "node " + std::to_string(p) + " (";
  for (int a = 0; a < grid.dim(); ++a) {
    out += (a ? "," : "") + std::to_string(idx[static_cast<std::size_t>(a)]);
  }
  return out + ")";
}

void require_shape(const Grid& grid, const std::vector<double>& u) {
  if (u.size() != grid.size()) {
    throw ParameterError("field has " + std::to_string(u.size()) + " values for a grid of " +
                         std::to_string(grid.size()) + " nodes");
  }
}

void require_domain(const Grid& grid, const SpacetimeSpec& spec, const std::vector<double>& u) {
  require_shape(grid, u);
  for (std::size_t p = 0; p < u.size(); ++p) {
    if (!spec.warp.domain().contains(u[p])) {
      throw DomainError("u=" + std::to_string(u[p]) + " at " + node_text(grid, p) +
                        " lies outside the warp domain " + spec.warp.domain().to_string());
    }
  }
}

// Flux f^(n-1) d_a u / W across the face between lo and lo + e_axis.
double face_flux(const Grid& grid, const SpacetimeSpec& spec, const std::vector<double>& u,
                 std::size_t lo, int axis, const Tolerances& tol) {
  const int n = grid.dim();
  const std::size_t hi = lo + grid.stride(axis);
  const double uf = 0.5 * (u[lo] + u[hi]);
  double grad2 = 0.0;
  double normal = 0.0;
  for (int b = 0; b < n; ++b) {
    double d;
    if (b == axis) {
      d = (u[hi] - u[lo]) / grid.spacing(axis);
      normal = d;
    } else {
      d = 0.5 * (central(u, grid, lo, b) + central(u, grid, hi, b));
    }
    grad2 += d * d;
  }
  const double f = spec.warp.evaluate(uf).f;
  const double w2 = f * f - grad2;
  if (!(w2 > tol.space_margin * tol.space_margin)) {
    throw SpacelikeError("face between " + node_text(grid, lo) + " and " + node_text(grid, hi) +
                         " is not spacelike (f^2 - |Du|^2 = " + std::to_string(w2) + ")");
  }
  return std::pow(f, n - 1) * normal / std::sqrt(w2);
}

}  // namespace

SpacelikeReport spacelike_check(const GraphHypersurface& surface, const Tolerances& tol) {
  const Grid& grid = surface.grid;
  require_domain(grid, surface.spec, surface.u);
  SpacelikeReport report;
  const double eps2 = tol.space_margin * tol.space_margin;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (grid.is_boundary(p)) continue;
    double grad2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double d = central(surface.u, grid, p, a);
      grad2 += d * d;
    }
    const double f = surface.spec.warp.evaluate(surface.u[p]).f;
    const double margin = f * f - grad2;
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.worst_node = p;
    }
    if (!(margin > eps2)) report.spacelike = false;
  }
  return report;
}

std::vector<double> mean_curvature(const Grid& grid, const SpacetimeSpec& spec,
                                   const std::vector<double>& u, const Tolerances& tol,
                                   Execution exec) {
  require_domain(grid, spec, u);
  const int n = grid.dim();
  std::vector<double> H(grid.size(), kNaN);
  const auto interior = grid.nodes_with_depth(1);
  for_each_index(interior.size(), exec, [&](std::size_t k) {
    const std::size_t p = interior[k];
    double divergence = 0.0;
    double grad2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::size_t s = grid.stride(a);
      const double plus = face_flux(grid, spec, u, p, a, tol);
      const double minus = face_flux(grid, spec, u, p - s, a, tol);
      divergence += (plus - minus) / grid.spacing(a);
      const double d = central(u, grid, p, a);
      grad2 += d * d;
    }
    const WarpValues w = spec.warp.evaluate(u[p]);
    const double w2 = w.f * w.f - grad2;
    if (!(w2 > tol.space_margin * tol.space_margin)) {
      throw SpacelikeError(node_text(grid, p) + " violates the spacelike margin (f^2 - |Du|^2 = " +
                           std::to_string(w2) + ")");
    }
    const double W = std::sqrt(w2);
    const double source = std::pow(w.f, n - 2) * w.df * ((n - 1) * w2 + w.f * w.f) / W;
    H[p] = (divergence + source) / (n * std::pow(w.f, n));
  });
  return H;
}

GeometryFields compute_fields(const GraphHypersurface& surface, const Tolerances& tol,
                              Execution exec) {
  const Grid& grid = surface.grid;
  const SpacelikeReport check = spacelike_check(surface, tol);
  if (!check.spacelike) {
    throw SpacelikeError("surface is not spacelike with margin: f^2 - |Du|^2 = " +
                         std::to_string(check.worst_margin) + " at " +
                         node_text(grid, check.worst_node));
  }

  const int n = grid.dim();
  const std::size_t size = grid.size();
  GeometryFields out{.grid = grid, .n = n, .u = surface.u};
  const SymMatrix nan_sym{kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
  const Vec3 nan_vec{kNaN, kNaN, kNaN};
  out.f.assign(size, kNaN);
  out.df.assign(size, kNaN);
  out.d2f.assign(size, kNaN);
  out.du.assign(size, nan_vec);
  out.metric.assign(size, nan_sym);
  out.inverse.assign(size, nan_sym);
  out.sqrt_det.assign(size, kNaN);
  out.cosh_phi.assign(size, kNaN);
  out.sinh2_phi.assign(size, kNaN);
  out.grad_tau_norm2.assign(size, kNaN);
  out.grad_tau.assign(size, nan_vec);

  const auto interior = grid.nodes_with_depth(1);
  for_each_index(interior.size(), exec, [&](std::size_t k) {
    const std::size_t p = interior[k];
    const WarpValues w = surface.spec.warp.evaluate(surface.u[p]);
    out.f[p] = w.f;
    out.df[p] = w.df;
    out.d2f[p] = w.d2f;

    Vec3 du{0.0, 0.0, 0.0};
    double grad2 = 0.0;
    for (int a = 0; a < n; ++a) {
      du[static_cast<std::size_t>(a)] = central(surface.u, grid, p, a);
      grad2 += du[static_cast<std::size_t>(a)] * du[static_cast<std::size_t>(a)];
    }
    out.du[p] = du;

    SymMatrix g{};
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        g[sym_index(i, j)] = (i == j ? w.f * w.f : 0.0) -
                             du[static_cast<std::size_t>(i)] * du[static_cast<std::size_t>(j)];
      }
    }
    SymMatrix inv{};
    const double det = invert(g, n, inv);
    out.metric[p] = g;
    out.inverse[p] = inv;
    out.sqrt_det[p] = std::sqrt(det);

    const double w2 = w.f * w.f - grad2;
    out.sinh2_phi[p] = grad2 / w2;
    out.cosh_phi[p] = w.f / std::sqrt(w2);

    Vec3 grad{0.0, 0.0, 0.0};
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        grad[static_cast<std::size_t>(i)] += inv[sym_index(i, j)] * du[static_cast<std::size_t>(j)];
      }
      norm2 += grad[static_cast<std::size_t>(i)] * du[static_cast<std::size_t>(i)];
    }
    out.grad_tau[p] = grad;
    out.grad_tau_norm2[p] = norm2;
  });

  out.mean_curvature = mean_curvature(grid, surface.spec, surface.u, tol, exec);
  return out;
}

MaskedField laplace_beltrami(const GeometryFields& fields, const MaskedField& s,
                             Execution exec) {
  const Grid& grid = fields.grid;
  require_shape(grid, s.values);
  const int n = fields.n;
  const int flux_depth = std::max(GeometryFields::kValidDepth, s.min_depth + 1);
  const int out_depth = flux_depth + 1;
  if (grid.nodes_with_depth(out_depth).empty()) {
    throw ParameterError("grid too small for a Laplace-Beltrami stencil at depth " +
                         std::to_string(out_depth));
  }

  // q_a = sqrt(g) g^ab d_b s on the flux domain.
  std::vector<std::vector<double>> q(static_cast<std::size_t>(n),
                                     std::vector<double>(grid.size(), kNaN));
  const auto flux_nodes = grid.nodes_with_depth(flux_depth);
  for_each_index(flux_nodes.size(), exec, [&](std::size_t k) {
    const std::size_t p = flux_nodes[k];
    Vec3 ds{0.0, 0.0, 0.0};
    for (int b = 0; b < n; ++b) ds[static_cast<std::size_t>(b)] = central(s.values, grid, p, b);
    for (int a = 0; a < n; ++a) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b) acc += fields.inverse[p][sym_index(a, b)] * ds[static_cast<std::size_t>(b)];
      q[static_cast<std::size_t>(a)][p] = fields.sqrt_det[p] * acc;
    }
  });

  MaskedField out = MaskedField::nan(grid.size(), out_depth);
  const auto nodes = grid.nodes_with_depth(out_depth);
  for_each_index(nodes.size(), exec, [&](std::size_t k) {
    const std::size_t p = nodes[k];
    double div = 0.0;
    for (int a = 0; a < n; ++a) div += central(q[static_cast<std::size_t>(a)], grid, p, a);
    out.values[p] = div / fields.sqrt_det[p];
  });
  return out;
}

MaskedField laplace_beltrami(const GeometryFields& fields, const std::vector<double>& s,
                             Execution exec) {
  return laplace_beltrami(fields, MaskedField{s, 0}, exec);
}

namespace {

void require_surface_dim2(const GeometryFields& fields, const char* what) {
  if (fields.n != 2) {
    throw UnsupportedDimensionError(std::string(what) + " is only available for n = 2, got n = " +
                                    std::to_string(fields.n));
  }
}

// d_k g_ij at p by central differences of the metric field.
std::array<SymMatrix, 2> metric_gradient(const GeometryFields& fields, std::size_t p) {
  const Grid& grid = fields.grid;
  std::array<SymMatrix, 2> dg{};
  for (int k = 0; k < 2; ++k) {
    const std::size_t s = grid.stride(k);
    for (std::size_t c = 0; c < 6; ++c) {
      dg[static_cast<std::size_t>(k)][c] =
          (fields.metric[p + s][c] - fields.metric[p - s][c]) / (2.0 * grid.spacing(k));
    }
  }
  return dg;
}

}  // namespace

MaskedField covariant_hessian_norm(const GeometryFields& fields,
                                   const std::vector<double>& tau) {
  require_surface_dim2(fields, "covariant_hessian_norm");
  const Grid& grid = fields.grid;
  require_shape(grid, tau);
  MaskedField out = MaskedField::nan(grid.size(), 2);
  for (std::size_t p : grid.nodes_with_depth(2)) {
    const auto dg = metric_gradient(fields, p);
    const SymMatrix& ginv = fields.inverse[p];
    const double dtau[2] = {central(tau, grid, p, 0), central(tau, grid, p, 1)};

    double hess[2][2];
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double second_partial =
            i == j ? second(tau, grid, p, i) : mixed(tau, grid, p, 0, 1);
        double christoffel_term = 0.0;
        for (int k = 0; k < 2; ++k) {
          double gamma = 0.0;
          for (int l = 0; l < 2; ++l) {
            gamma += 0.5 * ginv[sym_index(k, l)] *
                     (dg[static_cast<std::size_t>(i)][sym_index(j, l)] +
                      dg[static_cast<std::size_t>(j)][sym_index(i, l)] -
                      dg[static_cast<std::size_t>(l)][sym_index(i, j)]);
          }
          christoffel_term += gamma * dtau[k];
        }
        hess[i][j] = second_partial - christoffel_term;
      }
    }

    double norm2 = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            norm2 += ginv[sym_index(i, k)] * ginv[sym_index(j, l)] * hess[i][j] * hess[k][l];
    out.values[p] = norm2;
  }
  return out;
}

MaskedField gauss_curvature(const GeometryFields& fields) {
  require_surface_dim2(fields, "gauss_curvature");
  const Grid& grid = fields.grid;
  std::vector<double> E(grid.size());
  std::vector<double> F(grid.size());
  std::vector<double> G(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    E[p] = fields.metric[p][sym_index(0, 0)];
    F[p] = fields.metric[p][sym_index(0, 1)];
    G[p] = fields.metric[p][sym_index(1, 1)];
  }

  MaskedField out = MaskedField::nan(grid.size(), 2);
  for (std::size_t p : grid.nodes_with_depth(2)) {
    const double e = E[p];
    const double f = F[p];
    const double g = G[p];
    const double Eu = central(E, grid, p, 0);
    const double Ev = central(E, grid, p, 1);
    const double Fu = central(F, grid, p, 0);
    const double Fv = central(F, grid, p, 1);
    const double Gu = central(G, grid, p, 0);
    const double Gv = central(G, grid, p, 1);
    const double Evv = second(E, grid, p, 1);
    const double Guu = second(G, grid, p, 0);
    const double Fuv = mixed(F, grid, p, 0, 1);

    // Brioschi: K = (det A - det B) / (EG - F^2)^2.
    const double a11 = -0.5 * Evv + Fuv - 0.5 * Guu;
    const double a12 = 0.5 * Eu;
    const double a13 = Fu - 0.5 * Ev;
    const double a21 = Fv - 0.5 * Gu;
    const double a31 = 0.5 * Gv;
    const double det_a = a11 * (e * g - f * f) - a12 * (a21 * g - f * a31) + a13 * (a21 * f - e * a31);
    const double b12 = 0.5 * Ev;
    const double b13 = 0.5 * Gu;
    const double det_b = -b12 * (b12 * g - f * b13) + b13 * (b12 * f - e * b13);
    const double w = e * g - f * f;
    out.values[p] = (det_a - det_b) / (w * w);
  }
  return out;
}

}  // namespace grwlab
