#pragma once

#include <array>
#include <vector>

#include "pcap/params.hpp"
#include "pcap/solver.hpp"

namespace pcap {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Field data at a point, lifted to R^3 in the azimuthal plane y = 0
/// (x = r).
struct PointSample {
  std::array<double, 2> position{};  // (r, z)
  double u = 0.0;
  Vec3 grad{};
  Mat3 hess{};
  double grad_norm = 0.0;
  double H_level = 0.0;  // geometric mean curvature of the level set
};

/// Lifts meridian data (u, u_r, u_z, u_rr, u_rz, u_zz) at radius r to the
/// 3-D gradient and Hessian. On the axis the hoop term u_r / r is replaced
/// by its limit u_rr.
PointSample lift_sample(double r, double z, double u, const std::array<double, 2>& g,
                        const std::array<double, 3>& h);

/// Interpolates the recovered derivatives at a point. Requires the point
/// to lie at least two mesh layers away from both boundaries.
PointSample sample_at(const Field& field, double r, double z);

/// Same as sample_at without the boundary-distance check.
PointSample sample_at_unchecked(const Field& field, double r, double z);

/// Sample interpolated along the mesh edge (i, j) at fraction lambda from i.
PointSample sample_on_edge(const Field& field, int i, int j, double lambda);

/// -Delta u / |Du| + D^2u(Du, Du) / |Du|^3.
double mean_curvature_geometric(const PointSample& s);

/// (p - 1) D^2u(Du, Du) / |Du|^3, valid where u is p-harmonic.
double mean_curvature_pharmonic(const PointSample& s, const Params& params);

/// |Du| / u.
double dlog_norm(const PointSample& s);

/// Tangential decomposition of the Hessian with respect to the level set.
struct HessianSplit {
  double hess_sq = 0.0;        // |D^2u|^2
  double normal_normal = 0.0;  // D^2u(e_n, e_n) = <D|Du|, e_n>
  double tangential_grad_sq = 0.0;  // |D_T |Du||^2
  double laplace_T = 0.0;      // trace of the tangential block
  double traceless_T_sq = 0.0; // |D^2_T u - (Delta_T u/(n-1)) g_T|^2
  double tangential_sq = 0.0;  // |D^2_T u|^2
};
HessianSplit split_hessian(const std::vector<double>& grad, const std::vector<double>& hess, int n);
HessianSplit split_hessian(const PointSample& s);

/// Boundary values of |Du| and the level-set curvature on the body, by
/// quadratic extrapolation along the outward normal from offsets
/// {2, 3, 4} x the first-layer spacing.
struct BoundaryFieldSample {
  double phi = 0.0;
  std::array<double, 2> position{};
  std::array<double, 2> normal{};
  double weight = 0.0;
  double H = 0.0;          // analytic profile curvature
  double grad_norm = 0.0;  // extrapolated |Du|
  double H_field = 0.0;    // extrapolated geometric level-set curvature
  double grad_norm_alt = 0.0;  // extrapolation from offsets {2, 4, 6}
};
std::vector<BoundaryFieldSample> boundary_field_samples(const Field& field, int count);

/// Default number of boundary samples used by the field-level integrals.
int default_boundary_count(const Field& field);

}  // namespace pcap
