#pragma once

#include <array>
#include <cmath>

namespace pcap {

// Truncated Taylor series in one variable around a point, c[k] = f^(k)/k!.
// Each derivative() drops the top coefficient, so after m derivatives only
// c[0..kOrder-m] are meaningful. Radial reductions need at most four.
struct Jet {
  static constexpr int kOrder = 6;
  std::array<double, kOrder + 1> c{};

  static Jet constant(double v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  static Jet variable(double x) {
    Jet j;
    j.c[0] = x;
    j.c[1] = 1.0;
    return j;
  }
  double value() const { return c[0]; }

  Jet derivative() const {
    Jet d;
    for (int k = 0; k < kOrder; ++k) d.c[k] = (k + 1) * c[k + 1];
    return d;
  }

  friend Jet operator+(Jet a, const Jet& b) {
    for (int k = 0; k <= kOrder; ++k) a.c[k] += b.c[k];
    return a;
  }
  friend Jet operator-(Jet a, const Jet& b) {
    for (int k = 0; k <= kOrder; ++k) a.c[k] -= b.c[k];
    return a;
  }
  friend Jet operator-(Jet a) {
    for (auto& v : a.c) v = -v;
    return a;
  }
  friend Jet operator*(Jet a, double s) {
    for (auto& v : a.c) v *= s;
    return a;
  }
  friend Jet operator*(double s, Jet a) { return a * s; }
  friend Jet operator+(Jet a, double s) {
    a.c[0] += s;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= kOrder; ++k)
      for (int i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= kOrder; ++k) {
      double s = a.c[k];
      for (int i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
      r.c[k] = s / b.c[0];
    }
    return r;
  }
};

inline Jet exp(const Jet& a) {
  Jet r;
  r.c[0] = std::exp(a.c[0]);
  for (int k = 1; k <= Jet::kOrder; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a.c[j] * r.c[k - j];
    r.c[k] = s / k;
  }
  return r;
}

inline Jet log(const Jet& a) {
  Jet r;
  r.c[0] = std::log(a.c[0]);
  for (int k = 1; k <= Jet::kOrder; ++k) {
    double s = 0.0;
    for (int j = 1; j < k; ++j) s += j * r.c[j] * a.c[k - j];
    r.c[k] = (a.c[k] - s / k) / a.c[0];
  }
  return r;
}

// Requires a positive value.
inline Jet pow(const Jet& a, double e) { return exp(e * log(a)); }

inline Jet abs(const Jet& a) { return a.c[0] < 0.0 ? -a : a; }

}  // namespace pcap
