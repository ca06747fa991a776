#pragma once

#include <array>
#include <vector>

#include "pcap/mesh.hpp"

namespace pcap {

/// Nodal gradient and Hessian of an axisymmetric P1 field, in meridian
/// coordinates (r, z).
struct NodalDerivatives {
  std::vector<std::array<double, 2>> grad;  // (u_r, u_z)
  std::vector<std::array<double, 3>> hess;  // (u_rr, u_rz, u_zz)
};

/// Gradient from a least-squares quadratic fit of the nodal values on the
/// two-ring patch of each node; Hessian by the same recovery applied to the
/// recovered gradient components. Patches near the axis are mirrored with
/// the parity of the recovered quantity.
NodalDerivatives recover_derivatives(const MeridianMesh& mesh, const std::vector<double>& u);

}  // namespace pcap
