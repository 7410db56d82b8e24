#pragma once

#include <cmath>

namespace grwlab {

/// Second-order forward-mode dual number: value with first and second
/// derivatives along a single seed direction.
///
/// Seed the independent variable with Jet::variable(t); every arithmetic
/// operation then propagates (v, v', v'') exactly by the chain rule.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT: implicit constants
  constexpr Jet(double value, double first, double second)
      : v(value), d1(first), d2(second) {}

  static constexpr Jet variable(double t) { return {t, 1.0, 0.0}; }
};

namespace detail {
// Compose a scalar function g with a jet given g, g', g'' at x.v.
constexpr Jet chain(const Jet& x, double g, double dg, double d2g) {
  return {g, dg * x.d1, d2g * x.d1 * x.d1 + dg * x.d2};
}
}  // namespace detail

constexpr Jet operator+(const Jet& a, const Jet& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
}
constexpr Jet operator-(const Jet& a, const Jet& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
}
constexpr Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }
constexpr Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1,
          a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Jet reciprocal(const Jet& x) {
  const double r = 1.0 / x.v;
  return detail::chain(x, r, -r * r, 2.0 * r * r * r);
}

inline Jet operator/(const Jet& a, const Jet& b) {
  // Quotient rule written out to avoid an extra rounding through 1/b.
  const double q = a.v / b.v;
  const double q1 = (a.d1 - q * b.d1) / b.v;
  const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}

inline Jet exp(const Jet& x) {
  const double e = std::exp(x.v);
  return detail::chain(x, e, e, e);
}

inline Jet log(const Jet& x) {
  const double r = 1.0 / x.v;
  return detail::chain(x, std::log(x.v), r, -r * r);
}

inline Jet sqrt(const Jet& x) {
  const double s = std::sqrt(x.v);
  return detail::chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}

inline Jet sin(const Jet& x) {
  const double s = std::sin(x.v);
  const double c = std::cos(x.v);
  return detail::chain(x, s, c, -s);
}

inline Jet cos(const Jet& x) {
  const double s = std::sin(x.v);
  const double c = std::cos(x.v);
  return detail::chain(x, c, -s, -c);
}

/// x^p for a constant exponent.
inline Jet pow(const Jet& x, double p) {
  if (p == 0.0) return Jet(1.0);
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  const double g = std::pow(x.v, p);
  const double dg = p * std::pow(x.v, p - 1.0);
  const double d2g = p * (p - 1.0) * std::pow(x.v, p - 2.0);
  return detail::chain(x, g, dg, d2g);
}

/// General power; constant exponents take the cheaper path.
inline Jet pow(const Jet& base, const Jet& exponent) {
  if (exponent.d1 == 0.0 && exponent.d2 == 0.0) return pow(base, exponent.v);
  return exp(exponent * log(base));
}

}  // namespace grwlab
