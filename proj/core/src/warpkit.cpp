#include "grwlab/warpkit.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "grwlab/errors.hpp"
#include "grwlab/expression.hpp"

namespace grwlab {

namespace {

std::string format_bound(double x) {
  if (x == kInfinity) return "inf";
  if (x == -kInfinity) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// IntervalDomain

void IntervalDomain::validate() const {
  if (std::isnan(lower) || std::isnan(upper) || !(lower < upper)) {
    throw InvalidWindowError("empty interval " + to_string());
  }
}

bool IntervalDomain::contains(double t) const {
  if (!std::isfinite(t)) return false;
  const bool above = lower_open ? t > lower : t >= lower;
  const bool below = upper_open ? t < upper : t <= upper;
  return above && below;
}

bool IntervalDomain::subset_of(const IntervalDomain& outer) const {
  const bool low_ok = lower > outer.lower ||
                      (lower == outer.lower && (lower_open || !outer.lower_open));
  const bool high_ok = upper < outer.upper ||
                       (upper == outer.upper && (upper_open || !outer.upper_open));
  return low_ok && high_ok;
}

std::string IntervalDomain::to_string() const {
  const bool lo_open = lower_open || !std::isfinite(lower);
  const bool hi_open = upper_open || !std::isfinite(upper);
  return std::string(lo_open ? "(" : "[") + format_bound(lower) + "," + format_bound(upper) +
         (hi_open ? ")" : "]");
}

// ---------------------------------------------------------------------------
// WarpingModel

WarpingModel::WarpingModel(std::string name, std::string formula, IntervalDomain domain,
                           Rule rule)
    : name_(std::move(name)), formula_(std::move(formula)), domain_(domain),
      rule_(std::move(rule)) {
  domain_.lower_open = true;
  domain_.upper_open = true;
  domain_.validate();
}

std::optional<WarpValues> WarpingModel::probe(double t) const {
  if (!domain_.contains(t)) {
    throw DomainError("warp '" + name_ + "' evaluated at t=" + format_bound(t) +
                      " outside its domain " + domain_.to_string());
  }
  const Jet j = rule_(Jet::variable(t));
  if (j.v < 0.0) {
    throw PositivityError("warp '" + name_ + "' has f(" + format_bound(t) +
                          ")=" + format_bound(j.v) + " <= 0");
  }
  if (!std::isfinite(j.v) || !std::isfinite(j.d1) || !std::isfinite(j.d2) || j.v < DBL_MIN) {
    return std::nullopt;
  }
  return WarpValues{j.v, j.d1, j.d2};
}

WarpValues WarpingModel::evaluate(double t) const {
  auto w = probe(t);
  if (!w) {
    throw PositivityError("warp '" + name_ + "' is not a positive finite number at t=" +
                          format_bound(t));
  }
  return *w;
}

void SpacetimeSpec::validate() const {
  if (n < 2) throw ParameterError("fiber dimension n must be >= 2, got " + std::to_string(n));
}

WarpValues eval_warp(const WarpingModel& model, double t) { return model.evaluate(t); }

double phi(int n, const WarpValues& w) {
  const double slope = w.df / w.f;
  return (n + 1) * slope * slope - n * (w.d2f / w.f);
}

double phi(const SpacetimeSpec& spec, double t) { return phi(spec.n, spec.warp.evaluate(t)); }

// ---------------------------------------------------------------------------
// Scanning machinery shared by the criteria.

namespace {

void require_window(const WarpingModel& model, const IntervalDomain& window) {
  window.validate();
  if (!window.subset_of(model.domain())) {
    throw InvalidWindowError("window " + window.to_string() + " is not inside the domain " +
                             model.domain().to_string() + " of warp '" + model.name() + "'");
  }
}

// Bounded windows are sampled uniformly in t; unbounded ones uniformly in s
// with t = tan(s).
struct ScanMap {
  bool compact = false;
  double s_lo = 0.0;
  double s_hi = 1.0;
  IntervalDomain window;

  explicit ScanMap(const IntervalDomain& w) : window(w) {
    if (w.bounded()) {
      s_lo = w.lower;
      s_hi = w.upper;
    } else {
      compact = true;
      s_lo = std::atan(w.lower);
      s_hi = std::atan(w.upper);
    }
  }

  double to_t(double s) const {
    if (s <= s_lo) return window.lower;
    if (s >= s_hi) return window.upper;
    const double t = compact ? std::tan(s) : s;
    return std::clamp(t, window.lower, window.upper);
  }

  bool lower_included() const { return !window.lower_open && std::isfinite(window.lower); }
  bool upper_included() const { return !window.upper_open && std::isfinite(window.upper); }
};

struct Point {
  double s = 0.0;
  double t = 0.0;
  std::optional<WarpValues> w;
};

// Uniform s-grid with count+1 nodes; excluded ends are dropped.
std::vector<Point> base_grid(const WarpingModel& model, const ScanMap& map, std::size_t count) {
  std::vector<Point> pts;
  pts.reserve(count + 1);
  const double ds = (map.s_hi - map.s_lo) / static_cast<double>(count);
  for (std::size_t k = 0; k <= count; ++k) {
    if (k == 0 && !map.lower_included()) continue;
    if (k == count && !map.upper_included()) continue;
    const double s = k == count ? map.s_hi : map.s_lo + ds * static_cast<double>(k);
    const double t = map.to_t(s);
    if (!map.window.contains(t)) continue;
    pts.push_back({s, t, model.probe(t)});
  }
  return pts;
}

// Probes approaching an open end at geometrically shrinking offsets.
std::vector<Point> end_probes(const WarpingModel& model, const ScanMap& map, bool at_lower,
                              double eps) {
  std::vector<Point> pts;
  if (at_lower ? map.lower_included() : map.upper_included()) return pts;
  const double span = map.compact ? 1.0 : std::min(1.0, map.s_hi - map.s_lo);
  double offset = eps * span;
  for (int j = 0; j < 3; ++j, offset /= 10.0) {
    const double s = at_lower ? map.s_lo + offset : map.s_hi - offset;
    const double t = map.compact ? std::tan(s) : s;
    if (!map.window.contains(t)) continue;
    pts.push_back({s, t, model.probe(t)});
  }
  return pts;
}

struct Minimum {
  double value = kInfinity;
  double t = 0.0;
  bool endpoint_limit = false;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  std::vector<std::pair<double, double>> evaluated;  // (t, value), every valid sample
};

// Minimum of fn(WarpValues) over the window.
template <typename Fn>
Minimum scan_minimum(const WarpingModel& model, const IntervalDomain& window,
                     const Tolerances& tol, Fn fn) {
  const ScanMap map(window);
  Minimum out;

  auto consider = [&](const Point& p) -> bool {
    ++out.samples;
    if (!p.w) {
      ++out.skipped;
      return false;
    }
    const double v = fn(*p.w);
    out.evaluated.emplace_back(p.t, v);
    if (v < out.value) {
      out.value = v;
      out.t = p.t;
      out.endpoint_limit = false;
    }
    return true;
  };

  const auto grid = base_grid(model, map, std::max<std::size_t>(tol.scan_points, 2));
  double best_s = map.s_lo;
  double best_value = kInfinity;
  for (const auto& p : grid) {
    if (consider(p) && out.value < best_value) {
      best_value = out.value;
      best_s = p.s;
    }
  }

  // Refine around the running minimum.
  double half_width = (map.s_hi - map.s_lo) / static_cast<double>(std::max<std::size_t>(tol.scan_points, 2));
  constexpr int kRefinePoints = 64;
  for (int round = 0; round < tol.refine_rounds && best_value < kInfinity; ++round) {
    const double lo = std::max(map.s_lo, best_s - half_width);
    const double hi = std::min(map.s_hi, best_s + half_width);
    for (int k = 1; k < kRefinePoints; ++k) {
      const double s = lo + (hi - lo) * k / kRefinePoints;
      const double t = map.to_t(s);
      if (!window.contains(t)) continue;
      Point p{s, t, model.probe(t)};
      if (consider(p) && out.value < best_value) {
        best_value = out.value;
        best_s = s;
      }
    }
    half_width = (hi - lo) / kRefinePoints;
  }

  // Open ends: include finite limits through extrapolation.
  for (const bool at_lower : {true, false}) {
    const auto probes = end_probes(model, map, at_lower, tol.endpoint_offset);
    std::vector<double> values;
    for (const auto& p : probes) {
      if (consider(p)) values.push_back(fn(*p.w));
    }
    if (values.size() != 3) continue;
    const double d1 = values[1] - values[0];
    const double d2 = values[2] - values[1];
    if (!(std::abs(d2) < std::abs(d1)) && d2 != 0.0) continue;  // diverging
    const double denom = d2 - d1;
    const double limit = denom != 0.0 ? values[2] - d2 * d2 / denom : values[2];
    if (std::isfinite(limit) && limit < out.value) {
      out.value = limit;
      out.t = at_lower ? window.lower : window.upper;
      out.endpoint_limit = true;
    }
  }
  return out;
}

double log_slope_or_nan(const WarpingModel& model, double t) {
  const auto w = model.probe(t);
  return w ? w->log_slope() : std::numeric_limits<double>::quiet_NaN();
}

// Bisection on f'/f to full double resolution.
double bisect_root(const WarpingModel& model, double lo, double hi, double g_lo) {
  double g_hi = log_slope_or_nan(model, hi);
  for (int it = 0; it < 4096; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double g = log_slope_or_nan(model, mid);
    if (g == 0.0 || std::isnan(g)) return mid;
    if ((g < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
      g_hi = g;
    }
  }
  return std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
}

// Golden-section minimization of |f'/f| on [lo, hi].
std::pair<double, double> minimize_abs_slope(const WarpingModel& model, double lo, double hi) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  auto g = [&](double t) {
    const double v = log_slope_or_nan(model, t);
    return std::isnan(v) ? kInfinity : std::abs(v);
  };
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int it = 0; it < 200 && c < d; ++it) {
    if (gc <= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - ratio * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + ratio * (b - a);
      gd = g(d);
    }
  }
  return gc <= gd ? std::pair{c, gc} : std::pair{d, gd};
}

}  // namespace

// ---------------------------------------------------------------------------
// Criteria

NccResult ncc_check(const SpacetimeSpec& spec, const IntervalDomain& window,
                    std::size_t samples, const Tolerances& tol) {
  spec.validate();
  require_window(spec.warp, window);
  if (samples < 2) throw InvalidWindowError("ncc_check needs at least 2 samples");

  Tolerances local = tol;
  local.scan_points = samples;
  // Maximum of (log f)'' is the minimum of its negative.
  const Minimum m = scan_minimum(spec.warp, window, local,
                                 [](const WarpValues& w) { return -w.log_curvature(); });
  NccResult out;
  out.samples = m.samples;
  out.skipped = m.skipped;
  out.max_log_curvature = -m.value;
  for (const auto& [t, neg] : m.evaluated) {
    if (-neg > tol.ncc && (!out.witness || t < *out.witness)) out.witness = t;
  }
  out.holds = !out.witness.has_value();
  return out;
}

InfimumResult inf_phi(const SpacetimeSpec& spec, const IntervalDomain& window,
                      const Tolerances& tol) {
  spec.validate();
  require_window(spec.warp, window);
  const int n = spec.n;
  const Minimum m =
      scan_minimum(spec.warp, window, tol, [n](const WarpValues& w) { return phi(n, w); });
  InfimumResult out;
  out.value = m.value;
  out.argmin = m.t;
  out.endpoint_limit = m.endpoint_limit;
  out.samples = m.samples;
  out.skipped = m.skipped;
  return out;
}

std::vector<CriticalPoint> critical_points(const WarpingModel& model,
                                           const IntervalDomain& window,
                                           const Tolerances& tol) {
  require_window(model, window);
  const ScanMap map(window);
  const auto grid = base_grid(model, map, std::max<std::size_t>(tol.scan_points, 2));

  const std::size_t count = grid.size();
  std::vector<double> g(count, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < count; ++k) {
    if (grid[k].w) g[k] = grid[k].w->log_slope();
  }
  auto valid = [&](std::size_t k) { return k < count && !std::isnan(g[k]); };

  std::vector<CriticalPoint> roots;
  std::vector<bool> claimed(count, false);

  // Simple roots: strict sign changes, or an exact zero between opposite signs.
  for (std::size_t k = 0; k + 1 < count; ++k) {
    if (!valid(k) || !valid(k + 1)) continue;
    if (g[k] * g[k + 1] < 0.0) {
      roots.push_back({bisect_root(model, grid[k].t, grid[k + 1].t, g[k]), false});
      claimed[k] = claimed[k + 1] = true;
    } else if (g[k + 1] == 0.0 && valid(k + 2) && g[k] * g[k + 2] < 0.0) {
      roots.push_back({grid[k + 1].t, false});
      claimed[k] = claimed[k + 1] = claimed[k + 2] = true;
    }
  }

  // Tangential zeros: runs of near-zero samples, then local minima of |f'/f|
  // that dip below the tolerance between grid nodes.
  for (std::size_t k = 0; k < count;) {
    if (!valid(k) || claimed[k] || std::abs(g[k]) >= tol.root) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end + 1 < count && valid(end + 1) && !claimed[end + 1] &&
           std::abs(g[end + 1]) < tol.root) {
      ++end;
    }
    const double t = end == k ? grid[k].t : map.to_t(0.5 * (grid[k].s + grid[end].s));
    roots.push_back({t, true});
    for (std::size_t j = k; j <= end; ++j) claimed[j] = true;
    k = end + 1;
  }
  for (std::size_t k = 1; k + 1 < count; ++k) {
    if (!valid(k - 1) || !valid(k) || !valid(k + 1)) continue;
    if (claimed[k - 1] || claimed[k] || claimed[k + 1]) continue;
    const double a = std::abs(g[k]);
    if (!(a <= std::abs(g[k - 1]) && a <= std::abs(g[k + 1]))) continue;
    if (g[k - 1] * g[k] <= 0.0 || g[k] * g[k + 1] <= 0.0) continue;
    const auto [t, value] = minimize_abs_slope(model, grid[k - 1].t, grid[k + 1].t);
    if (value < tol.root) {
      roots.push_back({t, true});
      claimed[k] = true;
    }
  }

  std::sort(roots.begin(), roots.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.t < b.t; });
  return roots;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kUniqueSlice: return "UNIQUE_SLICE";
    case Verdict::kNonExistence: return "NON_EXISTENCE";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

ClassificationReport classify(const SpacetimeSpec& spec, const IntervalDomain& tau_window,
                              const Tolerances& tol) {
  spec.validate();
  require_window(spec.warp, tau_window);

  ClassificationReport report;
  report.spacetime = spec.name;
  report.n = spec.n;
  report.tau_window = tau_window;
  report.tolerances = tol;
  report.ncc = ncc_check(spec, tau_window, tol.scan_points, tol);
  report.inf = inf_phi(spec, tau_window, tol);
  report.critical = critical_points(spec.warp, tau_window, tol);

  std::ostringstream why;
  why.precision(10);
  if (!report.ncc.holds) {
    report.verdict = Verdict::kInconclusive;
    why << "NCC fails: (log f)'' > " << tol.ncc << " at t=" << *report.ncc.witness;
  } else if (!(report.inf.value > tol.inf_phi)) {
    report.verdict = Verdict::kInconclusive;
    why << "infimum condition fails: inf Phi = " << report.inf.value << " <= " << tol.inf_phi;
  } else if (!report.critical.empty()) {
    report.verdict = Verdict::kUniqueSlice;
    for (const auto& c : report.critical) report.slices.push_back(c.t);
    why << "NCC holds and inf Phi = " << report.inf.value
        << " > 0; the only complete maximal hypersurfaces are slices at critical points of f";
  } else {
    report.verdict = Verdict::kNonExistence;
    why << "NCC holds, inf Phi = " << report.inf.value
        << " > 0 and f' has no zero on the window";
  }
  report.reason = why.str();
  return report;
}

// ---------------------------------------------------------------------------
// Catalog

std::vector<CatalogEntry> builtin_catalog() {
  return {
      {"Minkowski", "minkowski", "1", "(-inf,inf)", {}},
      {"Example1", "example1", "exp(-t^2)", "(-inf,inf)", {}},
      {"Example2", "example2", "sqrt(a^2-t^2)", "(-a,a)", {{"a", 1.0}}},
      {"SteadyState", "steady_state", "exp(t)", "(-inf,inf)", {}},
      {"EinsteinDeSitter", "einstein_de_sitter", "t^(2/3)", "(0,inf)", {}},
      {"Radiation", "radiation", "(2*a*t)^(1/2)", "(0,inf)", {{"a", 1.0}}},
  };
}

namespace {

double require_positive(const std::map<std::string, double>& params, const std::string& key,
                        const std::string& model) {
  const double a = params.at(key);
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ParameterError(model + " requires " + key + " > 0, got " + format_bound(a));
  }
  return a;
}

}  // namespace

SpacetimeSpec make_spacetime(const std::string& name, int n,
                             const std::map<std::string, double>& params) {
  const auto catalog = builtin_catalog();
  const auto it = std::find_if(catalog.begin(), catalog.end(), [&](const CatalogEntry& e) {
    return e.name == name || e.key == name;
  });
  if (it == catalog.end()) throw ParameterError("unknown catalog spacetime '" + name + "'");

  std::map<std::string, double> merged = it->defaults;
  for (const auto& [k, v] : params) {
    if (!merged.contains(k)) {
      throw ParameterError("spacetime " + it->name + " has no parameter '" + k + "'");
    }
    merged[k] = v;
  }

  WarpSource source{it->key, merged, {}};
  const std::string& key = it->key;
  auto build = [&](IntervalDomain domain, WarpingModel::Rule rule) {
    SpacetimeSpec spec{it->name, n, WarpingModel(it->name, it->formula, domain, std::move(rule)),
                       source};
    spec.validate();
    return spec;
  };

  if (key == "minkowski") {
    return build(IntervalDomain::real_line(), [](const Jet&) { return Jet(1.0); });
  }
  if (key == "example1") {
    return build(IntervalDomain::real_line(), [](const Jet& t) { return exp(-(t * t)); });
  }
  if (key == "example2") {
    const double a = require_positive(merged, "a", it->name);
    return build(IntervalDomain::open(-a, a),
                 [a](const Jet& t) { return sqrt(Jet(a * a) - t * t); });
  }
  if (key == "steady_state") {
    return build(IntervalDomain::real_line(), [](const Jet& t) { return exp(t); });
  }
  if (key == "einstein_de_sitter") {
    return build(IntervalDomain::open(0.0, kInfinity),
                 [](const Jet& t) { return pow(t, 2.0 / 3.0); });
  }
  // radiation
  const double a = require_positive(merged, "a", it->name);
  return build(IntervalDomain::open(0.0, kInfinity),
               [a](const Jet& t) { return sqrt(Jet(2.0 * a) * t); });
}

SpacetimeSpec make_expression_spacetime(const std::string& name, int n,
                                        const std::string& expression,
                                        const IntervalDomain& domain) {
  auto expr = std::make_shared<const Expression>(Expression::parse(expression, {"t"}));
  SpacetimeSpec spec{name, n,
                     WarpingModel(name, expression, domain,
                                  [expr](const Jet& t) { return expr->evaluate(t); }),
                     WarpSource{"expr", {}, expression}};
  spec.validate();
  return spec;
}

}  // namespace grwlab
