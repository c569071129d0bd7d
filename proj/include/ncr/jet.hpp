#pragma once

#include <array>
#include <cmath>

namespace ncr {

/// Forward-mode value carrying d/dx, d/dy, d/dt and the pure second
/// derivatives d2/dx2, d2/dy2. Enough to evaluate Laplacians, gradients and
/// time derivatives of closed-form fields.
struct Jet {
  double v = 0.0;
  std::array<double, 3> d{};  // x, y, t
  double dxx = 0.0, dyy = 0.0;

  Jet() = default;
  Jet(double c) : v(c) {}  // NOLINT: constants promote implicitly
  static Jet variable(double value, int k) {
    Jet j(value);
    j.d[k] = 1.0;
    return j;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v + b.v;
  for (int k = 0; k < 3; ++k) r.d[k] = a.d[k] + b.d[k];
  r.dxx = a.dxx + b.dxx;
  r.dyy = a.dyy + b.dyy;
  return r;
}
inline Jet operator-(const Jet& a) {
  Jet r;
  r.v = -a.v;
  for (int k = 0; k < 3; ++k) r.d[k] = -a.d[k];
  r.dxx = -a.dxx;
  r.dyy = -a.dyy;
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  for (int k = 0; k < 3; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
  r.dxx = a.dxx * b.v + 2.0 * a.d[0] * b.d[0] + a.v * b.dxx;
  r.dyy = a.dyy * b.v + 2.0 * a.d[1] * b.d[1] + a.v * b.dyy;
  return r;
}

namespace detail {
// f(a) given f(a.v), f'(a.v), f''(a.v)
inline Jet chain(const Jet& a, double f0, double f1, double f2) {
  Jet r;
  r.v = f0;
  for (int k = 0; k < 3; ++k) r.d[k] = f1 * a.d[k];
  r.dxx = f2 * a.d[0] * a.d[0] + f1 * a.dxx;
  r.dyy = f2 * a.d[1] * a.d[1] + f1 * a.dyy;
  return r;
}
}  // namespace detail

inline Jet sin(const Jet& a) { return detail::chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return detail::chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return detail::chain(a, e, e, e);
}

}  // namespace ncr
