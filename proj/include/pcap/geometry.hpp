#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace pcap {

enum class BodyKind { Ball, Spheroid, Superellipsoid };

/// Point of the meridian profile, parametrized by the polar angle phi in
/// [0, pi] measured from the +z axis.
struct ProfilePoint {
  double phi = 0.0;
  double rho = 0.0;            // distance from the origin
  double r = 0.0;              // cylindrical radius (>= 0)
  double z = 0.0;
  std::array<double, 2> normal{};  // outward unit normal (n_r, n_z)
  double speed = 0.0;          // ds/dphi
  double kappa_meridian = 0.0;
  double kappa_hoop = 0.0;
  double H = 0.0;              // kappa_meridian + kappa_hoop
};

/// Quadrature node on the boundary surface of revolution.
struct BoundarySample {
  double phi = 0.0;
  std::array<double, 2> position{};  // (r, z)
  std::array<double, 2> normal{};
  double H = 0.0;
  double weight = 0.0;  // 2 pi r ds times the quadrature weight
};

/// Axisymmetric convex body in R^3 bounded by a superellipsoid of
/// revolution |r/a|^m + |z/c|^m = 1. Ball and spheroid are the m = 2 cases.
class Body {
 public:
  static Body ball(double radius);
  static Body spheroid(double a, double c);
  static Body superellipsoid(double a, double c, double m);
  /// Grammar: ball:R | spheroid:a,c | superell:a,c,m. Throws ConfigError.
  static Body parse(const std::string& spec);

  BodyKind kind() const { return kind_; }
  double a() const { return a_; }
  double c() const { return c_; }
  double m() const { return m_; }
  std::string spec() const;

  double circumradius() const;
  Body scaled(double lambda) const;

  /// rho(phi), rho'(phi), rho''(phi).
  std::array<double, 3> polar_radius(double phi) const;
  double rho(double phi) const { return polar_radius(phi)[0]; }
  ProfilePoint at(double phi) const;

  /// Meridian arclength from the north pole to the south pole.
  double half_length() const { return s_table_.back(); }
  /// Arclength from the north pole to the point at angle phi.
  double arclength_at(double phi) const;
  /// Inverse of arclength_at.
  double phi_at_arclength(double s) const;

  /// Panel breakpoints in phi, equidistributed in arclength.
  std::vector<double> arclength_breaks(int panels) const;

  /// Integral of f over the surface with dsigma = 2 pi r ds.
  double surface_integral(const std::function<double(const ProfilePoint&)>& f) const;
  double area() const { return area_; }

  friend bool operator==(const Body& x, const Body& y) {
    return x.kind_ == y.kind_ && x.a_ == y.a_ && x.c_ == y.c_ && x.m_ == y.m_;
  }

 private:
  Body(BodyKind kind, double a, double c, double m);

  BodyKind kind_;
  double a_, c_, m_;
  std::vector<double> s_table_;  // arclength at uniform phi nodes
  double area_ = 0.0;
};

/// Gauss samples of the boundary, 4 per panel on arclength-equidistributed
/// panels; count is rounded up to a multiple of 4. Requires count >= 16.
std::vector<BoundarySample> sample_boundary(const Body& body, int count);

/// Integral of (H/2)^2 over the boundary.
double willmore_functional(const Body& body);

/// Area average of H/2 over the boundary.
double minkowski_mean(const Body& body);

}  // namespace pcap
