#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grwlab/jet.hpp"
#include "grwlab/tolerances.hpp"

namespace grwlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Interval of cosmic time, possibly unbounded, with per-end open flags.
/// Infinite ends are always open.
struct IntervalDomain {
  double lower = -kInfinity;
  double upper = kInfinity;
  bool lower_open = true;
  bool upper_open = true;

  static IntervalDomain open(double lo, double hi) { return {lo, hi, true, true}; }
  static IntervalDomain closed(double lo, double hi) { return {lo, hi, false, false}; }
  static IntervalDomain real_line() { return {}; }

  /// Throws InvalidWindowError unless lower < upper (and no NaNs).
  void validate() const;
  bool contains(double t) const;
  bool bounded() const { return std::isfinite(lower) && std::isfinite(upper); }
  /// True when every point of *this lies in `outer`.
  bool subset_of(const IntervalDomain& outer) const;
  std::string to_string() const;

  friend bool operator==(const IntervalDomain&, const IntervalDomain&) = default;
};

/// f, f', f'' at one instant.
struct WarpValues {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;

  double log_slope() const { return df / f; }              ///< f'/f
  double log_curvature() const { return d2f / f - log_slope() * log_slope(); }  ///< (log f)''
};

/// Positive warping function on an open interval, evaluated jointly with its
/// first two derivatives through the Jet type.
class WarpingModel {
 public:
  using Rule = std::function<Jet(const Jet&)>;

  WarpingModel(std::string name, std::string formula, IntervalDomain domain, Rule rule);

  const std::string& name() const noexcept { return name_; }
  const std::string& formula() const noexcept { return formula_; }
  const IntervalDomain& domain() const noexcept { return domain_; }

  /// Throws DomainError outside the open domain and PositivityError if f <= 0.
  WarpValues evaluate(double t) const;

  /// Scan-time evaluation: domain and sign are still enforced, but a value
  /// that underflows the normal double range (f in [0, DBL_MIN) or
  /// non-finite) yields nullopt rather than an error.
  std::optional<WarpValues> probe(double t) const;

 private:
  std::string name_;
  std::string formula_;
  IntervalDomain domain_;
  Rule rule_;
};

/// Serializable description of where a warp came from.
struct WarpSource {
  std::string kind;                       ///< catalog key or "expr"
  std::map<std::string, double> params;   ///< numeric parameters
  std::string expression;                 ///< for kind == "expr"
};

/// The ambient spacetime I x_f R^n with flat fiber.
struct SpacetimeSpec {
  std::string name;
  int n = 2;  ///< fiber dimension
  WarpingModel warp;
  WarpSource source;

  static constexpr bool kFlatFiber = true;

  /// Throws ParameterError if n < 2.
  void validate() const;
};

WarpValues eval_warp(const WarpingModel& model, double t);

/// Phi(t) = (n+1)(f'/f)^2 - n f''/f.
double phi(const SpacetimeSpec& spec, double t);
double phi(int n, const WarpValues& w);

struct NccResult {
  bool holds = true;
  std::optional<double> witness;  ///< first violating t
  double max_log_curvature = -kInfinity;
  std::size_t samples = 0;
  std::size_t skipped = 0;        ///< samples lost to floating-point underflow
};

NccResult ncc_check(const SpacetimeSpec& spec, const IntervalDomain& window,
                    std::size_t samples, const Tolerances& tol = {});

struct InfimumResult {
  double value = kInfinity;
  double argmin = 0.0;       ///< location; +-inf when attained as an end limit
  bool endpoint_limit = false;
  std::size_t samples = 0;
  std::size_t skipped = 0;
};

/// Infimum of Phi over the window: adaptive scan, refinement around the
/// running minimum, and extrapolated probing of open ends.
InfimumResult inf_phi(const SpacetimeSpec& spec, const IntervalDomain& window,
                      const Tolerances& tol = {});

struct CriticalPoint {
  double t = 0.0;
  bool degenerate = false;  ///< f' has a tangential zero (f' = f'' = 0)
  friend bool operator==(const CriticalPoint&, const CriticalPoint&) = default;
};

/// Zeros of f' in the window, located through f'/f (same zero set, scale-free).
std::vector<CriticalPoint> critical_points(const WarpingModel& model,
                                           const IntervalDomain& window,
                                           const Tolerances& tol = {});

enum class Verdict { kUniqueSlice, kNonExistence, kInconclusive };
std::string to_string(Verdict v);

struct ClassificationReport {
  std::string spacetime;
  int n = 0;
  NccResult ncc;
  InfimumResult inf;
  std::vector<CriticalPoint> critical;
  Verdict verdict = Verdict::kInconclusive;
  std::vector<double> slices;  ///< t0 values for kUniqueSlice
  std::string reason;
  IntervalDomain tau_window;
  Tolerances tolerances;
};

ClassificationReport classify(const SpacetimeSpec& spec, const IntervalDomain& tau_window,
                              const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Built-in catalog.

struct CatalogEntry {
  std::string name;
  std::string key;          ///< serialization kind
  std::string formula;      ///< display form, e.g. "t^(2/3)"
  std::string domain_text;  ///< display form, e.g. "(0,inf)"
  std::map<std::string, double> defaults;
};

std::vector<CatalogEntry> builtin_catalog();

/// Instantiate a catalog spacetime by display name or key. Missing parameters
/// take catalog defaults. Throws ParameterError for unknown names or invalid
/// parameters (e.g. Example2 with a <= 0).
SpacetimeSpec make_spacetime(const std::string& name, int n,
                             const std::map<std::string, double>& params = {});

/// Spacetime from an inline expression in t on the given open domain.
SpacetimeSpec make_expression_spacetime(const std::string& name, int n,
                                        const std::string& expression,
                                        const IntervalDomain& domain);

}  // namespace grwlab
