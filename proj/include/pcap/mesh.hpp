#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pcap/geometry.hpp"

namespace pcap {

/// Mesh options. A zero r_far or target_h selects the default.
struct MeshOptions {
  double r_far = 0.0;     // default 20 x circumradius
  double target_h = 0.0;  // default: 200 segments on the inner boundary
  double grading = 1.0;   // log-radial step relative to the tangential step

  friend bool operator==(const MeshOptions&, const MeshOptions&) = default;
};

enum NodeTag : std::uint8_t { kInner = 1, kOuter = 2, kAxis = 4 };

/// Location of a point inside the mesh.
struct MeshLocation {
  int element = -1;
  std::array<double, 3> bary{};
};

/// Structured log-polar triangulation of the meridian half-annulus between
/// the body profile and the circle of radius r_far. Rays leave the origin
/// at angles phi_j (arclength-graded on the body); layer k sits at
/// rho = rho_b * (r_far / rho_b)^{k/K}.
class MeridianMesh {
 public:
  MeridianMesh(const Body& body, const MeshOptions& opts);

  const Body& body() const { return body_; }
  const MeshOptions& options() const { return opts_; }
  double r_far() const { return opts_.r_far; }
  /// Tangential spacing on the body (half length / rays).
  double h() const { return h_; }

  int rays() const { return n_rays_; }      // N + 1
  int layers() const { return n_layers_; }  // K + 1
  int node_index(int layer, int ray) const { return layer * n_rays_ + ray; }
  int layer_of(int node) const { return node / n_rays_; }
  int ray_of(int node) const { return node % n_rays_; }

  std::size_t node_count() const { return r_.size(); }
  std::size_t element_count() const { return tri_.size(); }
  double r(int i) const { return r_[i]; }
  double z(int i) const { return z_[i]; }
  std::uint8_t tags(int i) const { return tags_[i]; }
  const std::array<int, 3>& triangle(int e) const { return tri_[e]; }
  double area(int e) const { return area_[e]; }
  /// Gradients of the three barycentric basis functions, (d/dr, d/dz).
  const std::array<std::array<double, 2>, 3>& basis_grad(int e) const { return bgrad_[e]; }
  std::array<double, 2> centroid(int e) const;
  /// 2 pi r_centroid times the area: exact volume of the revolved triangle.
  double volume_weight(int e) const;

  const std::vector<double>& ray_angles() const { return phi_; }
  /// Radial spacing of the first layer on ray j.
  double inner_spacing(int ray) const;
  /// Log-polar layer coordinate of (r, z); 0 on the body, K on the far circle.
  double layer_coordinate(double r, double z) const;

  /// Elements incident to each node (CSR).
  const std::vector<int>& node_elem_offsets() const { return ne_off_; }
  const std::vector<int>& node_elems() const { return ne_idx_; }

  std::optional<MeshLocation> locate(double r, double z) const;

  /// Plain-text node and triangle listing.
  std::string dump() const;

 private:
  Body body_;
  MeshOptions opts_;
  double h_ = 0.0;
  int n_rays_ = 0;
  int n_layers_ = 0;
  std::vector<double> phi_;
  std::vector<double> rho_b_;
  std::vector<double> log_ratio_;
  std::vector<double> r_, z_;
  std::vector<std::uint8_t> tags_;
  std::vector<std::array<int, 3>> tri_;
  std::vector<double> area_;
  std::vector<std::array<std::array<double, 2>, 3>> bgrad_;
  std::vector<int> ne_off_, ne_idx_;
};

/// Fills the defaults of `opts` for the given body (r_far = 20 x circumradius).
MeshOptions resolve_mesh_options(const Body& body, MeshOptions opts);

MeridianMesh build_mesh(const Body& body, const MeshOptions& opts);

void write_mesh_dump(const MeridianMesh& mesh, const std::filesystem::path& path);

}  // namespace pcap
