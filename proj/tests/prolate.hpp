#pragma once
#include <array>
#include <cmath>
// Exact Newtonian potential of the prolate spheroid a=1, c=2 (spheroidal coordinates).
struct ProlatePotential {
  double f = std::sqrt(3.0), xi0 = 2.0 / std::sqrt(3.0);
  static double acoth(double x) { return 0.5 * std::log((x + 1) / (x - 1)); }
  double xi(double r, double z) const { return (std::hypot(r, z - f) + std::hypot(r, z + f)) / (2 * f); }
  double u(double r, double z) const { return acoth(xi(r, z)) / acoth(xi0); }
  std::array<double,2> grad(double r, double z) const {
    double d1 = std::hypot(r, z - f), d2 = std::hypot(r, z + f);
    double x = (d1 + d2) / (2 * f);
    double du = -1.0 / (x * x - 1) / acoth(xi0);
    return {du * (r / d1 + r / d2) / (2 * f), du * ((z - f) / d1 + (z + f) / d2) / (2 * f)};
  }
  // geometric level-set mean curvature via FD Hessian
  double H(double r, double z) const {
    double e = 1e-5;
    auto g = grad(r, z);
    auto gp = grad(r + e, z), gm = grad(r - e, z), gzp = grad(r, z + e), gzm = grad(r, z - e);
    double urr = (gp[0] - gm[0]) / (2 * e), urz = (gzp[0] - gzm[0]) / (2 * e), uzz = (gzp[1] - gzm[1]) / (2 * e);
    double hoop = g[0] / r;
    double gn = std::hypot(g[0], g[1]);
    double lap = urr + uzz + hoop;
    double quad = g[0]*g[0]*urr + 2*g[0]*g[1]*urz + g[1]*g[1]*uzz;
    return -lap / gn + quad / (gn*gn*gn);
  }
};
