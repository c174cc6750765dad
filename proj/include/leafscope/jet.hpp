#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "leafscope/types.hpp"

namespace leafscope {

// First-order forward-mode jet: a value together with its gradient with
// respect to up to kMaxDim coordinates. Used wherever exact first
// derivatives of closed-form expressions are needed (metrics, boundaries).
struct Jet {
  double v = 0.0;
  std::array<double, kMaxDim> d{};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: implicit on purpose, constants promote

  static Jet variable(double value, int index) {
    Jet j(value);
    j.d[static_cast<std::size_t>(index)] = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < kMaxDim; ++i) d[i] += o.d[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < kMaxDim; ++i) d[i] -= o.d[i];
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    for (int i = 0; i < kMaxDim; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    const double inv = 1.0 / o.v;
    for (int i = 0; i < kMaxDim; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator-(Jet a) {
  a.v = -a.v;
  for (auto& x : a.d) x = -x;
  return a;
}

// Applies a scalar function with known derivative to a jet.
inline Jet chain(const Jet& a, double value, double deriv) {
  Jet r(value);
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = deriv * a.d[i];
  return r;
}

inline Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v)); }
inline Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v)); }
inline Jet tan(const Jet& a) {
  const double t = std::tan(a.v);
  return chain(a, t, 1.0 + t * t);
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e);
}
inline Jet log(const Jet& a) { return chain(a, std::log(a.v), 1.0 / a.v); }
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, s > 0.0 ? 0.5 / s : 0.0);
}
inline Jet abs(const Jet& a) { return chain(a, std::abs(a.v), a.v >= 0.0 ? 1.0 : -1.0); }
inline Jet sinh(const Jet& a) { return chain(a, std::sinh(a.v), std::cosh(a.v)); }
inline Jet cosh(const Jet& a) { return chain(a, std::cosh(a.v), std::sinh(a.v)); }
inline Jet tanh(const Jet& a) {
  const double t = std::tanh(a.v);
  return chain(a, t, 1.0 - t * t);
}
inline Jet atan(const Jet& a) { return chain(a, std::atan(a.v), 1.0 / (1.0 + a.v * a.v)); }
inline Jet acos(const Jet& a) {
  const double c = std::clamp(a.v, -1.0, 1.0);
  const double s = std::sqrt(std::max(1.0 - c * c, 1e-300));
  return chain(a, std::acos(c), -1.0 / s);
}
inline Jet pow(const Jet& a, double p) {
  const double base = std::pow(a.v, p);
  const double deriv = a.v == 0.0 ? (p == 1.0 ? 1.0 : 0.0) : p * base / a.v;
  return chain(a, base, deriv);
}
inline Jet pow(const Jet& a, const Jet& b) {
  // a^b = exp(b log a); constant exponents take the cheaper path
  bool const_exp = true;
  for (double x : b.d) const_exp = const_exp && x == 0.0;
  if (const_exp) return pow(a, b.v);
  return exp(b * log(a));
}
inline Jet atan2(const Jet& y, const Jet& x) {
  const double r2 = x.v * x.v + y.v * y.v;
  Jet r(std::atan2(y.v, x.v));
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) / r2;
  return r;
}

}  // namespace leafscope
