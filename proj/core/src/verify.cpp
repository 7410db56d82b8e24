#include "grwlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "grwlab/errors.hpp"
#include "grwlab/maxsolver.hpp"

namespace grwlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

CheckReport start_report(const std::string& name, const Grid& grid, double constant) {
  CheckReport r;
  r.name = name;
  r.constant = constant;
  r.spacing = grid.max_spacing();
  r.tolerance = constant * r.spacing * r.spacing;
  return r;
}

// Ordered min reduction over the masked margins; deterministic by construction.
void finish_report(CheckReport& r, const Grid& grid, MaskedField margins) {
  r.nodes_evaluated = 0;
  r.worst_margin = kInfinity;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!margins.valid(grid, p) || std::isnan(margins.values[p])) continue;
    ++r.nodes_evaluated;
    if (margins.values[p] < r.worst_margin) {
      r.worst_margin = margins.values[p];
      r.worst_node = p;
    }
  }
  for (int a = 0; a < grid.dim(); ++a) {
    r.worst_location[static_cast<std::size_t>(a)] = grid.coordinate(r.worst_node, a);
  }
  r.pass = r.nodes_evaluated > 0 && r.worst_margin >= -r.tolerance;
  r.margins = std::move(margins);
}

// Inside the sub-box that excludes `inset` of each axis extent per side.
bool inside_inset(const Grid& grid, std::size_t p, double inset) {
  for (int a = 0; a < grid.dim(); ++a) {
    const double lo = grid.lower(a), hi = grid.upper(a);
    const double pad = inset * (hi - lo);
    const double x = grid.coordinate(p, a);
    if (x < lo + pad - 1e-12 * (hi - lo) || x > hi - pad + 1e-12 * (hi - lo)) return false;
  }
  return true;
}

void restrict_to_inset(const Grid& grid, MaskedField& margins, double inset) {
  if (inset <= 0.0) return;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!inside_inset(grid, p, inset)) margins.values[p] = kNaN;
  }
}

std::string region_note(int depth, double inset) {
  std::string note = "evaluated at depth >= " + std::to_string(depth);
  if (inset > 0.0) note += ", inset " + format(inset) + " of each axis per side";
  return note;
}

double require_maximal(const GraphHypersurface& surface, const Tolerances& tol,
                       const std::string& check) {
  const double h = surface.grid.max_spacing();
  const double limit = tol.maximal_factor * h * h;
  const auto H = residual(surface.spec, surface.grid, surface.u, tol);
  const double norm = residual_norm(surface.grid, H);
  if (!(norm <= limit)) {
    throw PreconditionError(check + ": surface is not maximal, residual max |H| = " +
                            format(norm) + " exceeds " + format(limit));
  }
  return norm;
}

void require_ncc_on_range(const GraphHypersurface& surface, const Tolerances& tol,
                          const std::string& check) {
  const auto [lo, hi] = std::minmax_element(surface.u.begin(), surface.u.end());
  bool holds;
  if (*lo < *hi) {
    holds = ncc_check(surface.spec, IntervalDomain::closed(*lo, *hi), 256, tol).holds;
  } else {
    holds = surface.spec.warp.evaluate(*lo).log_curvature() <= tol.ncc;
  }
  if (!holds) {
    throw PreconditionError(check + ": NCC fails on the surface's tau-range [" + format(*lo) +
                            ", " + format(*hi) + "]");
  }
}

void require_dim2(const Grid& grid, const std::string& check) {
  if (grid.dim() != 2) {
    throw UnsupportedDimensionError(check + " is only available for n = 2");
  }
}

}  // namespace

std::vector<double> phi_field(const GeometryFields& fields) {
  std::vector<double> out(fields.grid.size(), kNaN);
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (std::isnan(fields.f[p])) continue;
    out[p] = phi(fields.n, WarpValues{fields.f[p], fields.df[p], fields.d2f[p]});
  }
  return out;
}

CheckReport check_lemma1_inequality(const GraphHypersurface& surface, const Tolerances& tol,
                                    Execution exec) {
  const std::string name = "lemma1";
  CheckReport r = start_report(name, surface.grid, tol.c_lemma1);
  r.max_residual = require_maximal(surface, tol, name);
  require_ncc_on_range(surface, tol, name);

  const GeometryFields fields = compute_fields(surface, tol, exec);
  const MaskedField lap = laplace_beltrami(fields, MaskedField{fields.sinh2_phi, 1}, exec);
  const auto coefficient = phi_field(fields);

  MaskedField margins = MaskedField::nan(surface.grid.size(), lap.min_depth);
  for (std::size_t p = 0; p < surface.grid.size(); ++p) {
    if (!lap.valid(surface.grid, p)) continue;
    const double s2 = fields.sinh2_phi[p];
    margins.values[p] = 0.5 * lap.values[p] - coefficient[p] * s2 * s2;
  }
  restrict_to_inset(surface.grid, margins, tol.check_inset);
  r.note = region_note(lap.min_depth, tol.check_inset);
  finish_report(r, surface.grid, std::move(margins));
  return r;
}

CheckReport check_laplacian_identity(const GraphHypersurface& surface, const Tolerances& tol,
                                     Execution exec) {
  const std::string name = "laplacian";
  require_dim2(surface.grid, name);
  CheckReport r = start_report(name, surface.grid, tol.c_laplacian);
  r.max_residual = require_maximal(surface, tol, name);

  const GeometryFields fields = compute_fields(surface, tol, exec);
  const MaskedField lap_cosh = laplace_beltrami(fields, MaskedField{fields.cosh_phi, 1}, exec);
  const MaskedField hess2 = covariant_hessian_norm(fields, surface.u);
  const int n = fields.n;
  const int depth = std::max(lap_cosh.min_depth, hess2.min_depth);

  MaskedField margins = MaskedField::nan(surface.grid.size(), depth);
  for (std::size_t p = 0; p < surface.grid.size(); ++p) {
    if (surface.grid.depth(p) < depth) continue;
    const WarpValues w{fields.f[p], fields.df[p], fields.d2f[p]};
    const double l1 = w.log_slope();
    const double l2 = w.d2f / w.f;
    const double lc = w.log_curvature();
    const double c2 = fields.cosh_phi[p] * fields.cosh_phi[p];
    const double s2 = fields.sinh2_phi[p];
    const double lhs = fields.cosh_phi[p] * lap_cosh.values[p];
    const double rhs = hess2.values[p] + n * l1 * l1 * c2 - l2 * c2 * s2 + 3.0 * l1 * l1 * c2 * s2 -
                       l1 * l1 * (n - 1 + c2 * c2) - (n - 1) * lc * c2 * s2;
    margins.values[p] = 0.0 - std::abs(lhs - rhs);  // never -0
  }
  restrict_to_inset(surface.grid, margins, tol.check_inset);
  r.note = region_note(depth, tol.check_inset);
  finish_report(r, surface.grid, std::move(margins));
  return r;
}

CheckReport check_ricci_bound(const GraphHypersurface& surface, const Tolerances& tol,
                              Execution exec) {
  const std::string name = "ricci";
  require_dim2(surface.grid, name);
  CheckReport r = start_report(name, surface.grid, tol.c_ricci);
  r.max_residual = require_maximal(surface, tol, name);
  require_ncc_on_range(surface, tol, name);

  const GeometryFields fields = compute_fields(surface, tol, exec);
  const MaskedField K = gauss_curvature(fields);
  const int n = fields.n;
  constexpr double kDirections[8][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1},
                                        {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

  MaskedField margins = MaskedField::nan(surface.grid.size(), K.min_depth);
  for (std::size_t p = 0; p < surface.grid.size(); ++p) {
    if (!K.valid(surface.grid, p)) continue;
    const WarpValues w{fields.f[p], fields.df[p], fields.d2f[p]};
    const double l1 = w.log_slope();
    const double lc = w.log_curvature();
    const SymMatrix& g = fields.metric[p];
    double worst = K.values[p];
    for (const auto& v : kDirections) {
      const double norm2 = g[sym_index(0, 0)] * v[0] * v[0] + 2.0 * g[sym_index(0, 1)] * v[0] * v[1] +
                           g[sym_index(1, 1)] * v[1] * v[1];
      const double scale = 1.0 / std::sqrt(norm2);
      // g(Y, grad tau) = dtau(Y) for unit Y.
      const double y_tau = scale * (v[0] * fields.du[p][0] + v[1] * fields.du[p][1]);
      const double ricci = K.values[p];  // Ric(Y,Y) = K |Y|^2 in two dimensions
      const double ambient = (n - 1) * l1 * l1 - (n - 2) * lc * y_tau * y_tau -
                             lc * fields.grad_tau_norm2[p];
      worst = std::min(worst, ricci - ambient);
    }
    margins.values[p] = worst;
  }
  restrict_to_inset(surface.grid, margins, tol.check_inset);
  r.note = region_note(K.min_depth, tol.check_inset) +
           "; margin = min(K, Ric(Y,Y) - ambient sum) over 8 directions";
  finish_report(r, surface.grid, std::move(margins));
  return r;
}

NishikawaReport check_nishikawa_identity(const Grid& grid, const std::vector<double>& u,
                                         const Tolerances& tol, std::optional<double> c,
                                         const GeometryFields* metric) {
  if (u.size() != grid.size()) throw ParameterError("nishikawa: field size does not match grid");
  for (std::size_t p = 0; p < u.size(); ++p) {
    if (!(u[p] > 0.0)) {
      throw PreconditionError("nishikawa: u must be positive, u=" + format(u[p]) + " at node " +
                              std::to_string(p));
    }
  }
  if (metric && !(metric->grid == grid)) {
    throw ParameterError("nishikawa: background metric lives on a different grid");
  }

  std::vector<double> F(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) F[p] = 1.0 / std::sqrt(1.0 + u[p]);

  const int dim = grid.dim();
  auto central = [&](const std::vector<double>& v, std::size_t p, int a) {
    const std::size_t s = grid.stride(a);
    return (v[p + s] - v[p - s]) / (2.0 * grid.spacing(a));
  };

  MaskedField lap_u;
  MaskedField lap_F;
  if (metric) {
    lap_u = laplace_beltrami(*metric, u);
    lap_F = laplace_beltrami(*metric, F);
  } else {
    auto euclidean = [&](const std::vector<double>& v) {
      MaskedField out = MaskedField::nan(grid.size(), 1);
      for (std::size_t p : grid.nodes_with_depth(1)) {
        double acc = 0.0;
        for (int a = 0; a < dim; ++a) {
          const std::size_t s = grid.stride(a);
          const double h = grid.spacing(a);
          acc += (v[p + s] - 2.0 * v[p] + v[p - s]) / (h * h);
        }
        out.values[p] = acc;
      }
      return out;
    };
    lap_u = euclidean(u);
    lap_F = euclidean(F);
  }

  const int depth = lap_u.min_depth;
  std::vector<double> grad_F2(grid.size(), kNaN);
  for (std::size_t p : grid.nodes_with_depth(depth)) {
    double dF[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) dF[a] = central(F, p, a);
    double norm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        const double gij = metric ? metric->inverse[p][sym_index(i, j)] : (i == j ? 1.0 : 0.0);
        norm2 += gij * dF[i] * dF[j];
      }
    }
    grad_F2[p] = norm2;
  }

  NishikawaReport out;
  out.identity = start_report("nishikawa", grid, tol.c_nishikawa);
  MaskedField margins = MaskedField::nan(grid.size(), depth);
  for (std::size_t p : grid.nodes_with_depth(depth)) {
    const double F2 = F[p] * F[p];
    const double rhs = 6.0 * grad_F2[p] / (F2 * F2) - 2.0 * lap_F.values[p] / (F2 * F[p]);
    margins.values[p] = 0.0 - std::abs(lap_u.values[p] - rhs);
  }
  out.identity.note = metric ? "induced background metric" : "euclidean background metric";
  finish_report(out.identity, grid, std::move(margins));

  if (c) {
    CheckReport cor = start_report("nishikawa_corollary", grid, tol.c_nishikawa);
    for (std::size_t p : grid.nodes_with_depth(depth)) {
      if (lap_u.values[p] < *c * u[p] * u[p] - cor.tolerance) {
        throw PreconditionError("nishikawa corollary: hypothesis Lap u >= c u^2 fails at node " +
                                std::to_string(p) + " (Lap u = " + format(lap_u.values[p]) +
                                ", c u^2 = " + format(*c * u[p] * u[p]) + ")");
      }
    }
    MaskedField bound = MaskedField::nan(grid.size(), depth);
    for (std::size_t p : grid.nodes_with_depth(depth)) {
      const double lower = *c * u[p] * u[p] / ((1.0 + u[p]) * (1.0 + u[p]));
      bound.values[p] = 6.0 * grad_F2[p] - 2.0 * F[p] * lap_F.values[p] - lower;
    }
    cor.note = "bound c u^2/(1+u)^2 derived from F = (1+u)^(-1/2)";
    finish_report(cor, grid, std::move(bound));
    out.corollary = std::move(cor);
  }
  return out;
}

}  // namespace grwlab
