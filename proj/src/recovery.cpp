#include "pcap/recovery.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace pcap {
namespace {

enum class Parity { Even, Odd };

struct Adjacency {
  std::vector<int> off, idx;
};

Adjacency node_adjacency(const MeridianMesh& mesh) {
  const int nn = static_cast<int>(mesh.node_count());
  std::vector<std::vector<int>> nb(nn);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangle(static_cast<int>(e));
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a != b) nb[t[a]].push_back(t[b]);
      }
    }
  }
  Adjacency adj;
  adj.off.assign(nn + 1, 0);
  for (int i = 0; i < nn; ++i) {
    auto& v = nb[i];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    adj.off[i + 1] = adj.off[i] + static_cast<int>(v.size());
  }
  adj.idx.reserve(adj.off.back());
  for (auto& v : nb) adj.idx.insert(adj.idx.end(), v.begin(), v.end());
  return adj;
}

// Two-ring node patch including the node itself.
void two_ring(const Adjacency& adj, int node, std::vector<int>& patch) {
  patch.clear();
  patch.push_back(node);
  for (int k = adj.off[node]; k < adj.off[node + 1]; ++k) {
    const int v = adj.idx[k];
    patch.push_back(v);
    patch.insert(patch.end(), adj.idx.begin() + adj.off[v], adj.idx.begin() + adj.off[v + 1]);
  }
  std::sort(patch.begin(), patch.end());
  patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
}

// Gradient of a least-squares quadratic through the patch values, at the
// node. The patch is mirrored across the axis when its image overlaps it.
std::vector<std::array<double, 2>> recover_gradient(const MeridianMesh& mesh, const Adjacency& adj,
                                                    const std::vector<double>& values, Parity parity) {
  const int nn = static_cast<int>(mesh.node_count());
  const double mirror_sign = parity == Parity::Even ? 1.0 : -1.0;
  std::vector<std::array<double, 2>> out(nn);
  std::vector<int> patch;
  using Row = Eigen::Matrix<double, 6, 1>;
  for (int i = 0; i < nn; ++i) {
    two_ring(adj, i, patch);
    const double ri = mesh.r(i);
    const double zi = mesh.z(i);
    double scale = 0.0;
    for (int v : patch) scale = std::max(scale, std::hypot(mesh.r(v) - ri, mesh.z(v) - zi));
    const bool mirror = ri < scale;

    Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
    Row b = Row::Zero();
    auto add = [&](double r, double z, double f) {
      const double x = (r - ri) / scale;
      const double y = (z - zi) / scale;
      Row P;
      P << 1.0, x, y, x * x, x * y, y * y;
      M += P * P.transpose();
      b += P * f;
    };
    for (int v : patch) {
      add(mesh.r(v), mesh.z(v), values[v]);
      if (mirror && mesh.r(v) > 0.0) add(-mesh.r(v), mesh.z(v), mirror_sign * values[v]);
    }
    const Row c = M.ldlt().solve(b);
    out[i] = {c[1] / scale, c[2] / scale};
    if (mesh.tags(i) & kAxis) {
      if (parity == Parity::Even) out[i][0] = 0.0; else out[i][1] = 0.0;
    }
  }
  return out;
}

}  // namespace

NodalDerivatives recover_derivatives(const MeridianMesh& mesh, const std::vector<double>& u) {
  const Adjacency adj = node_adjacency(mesh);
  NodalDerivatives d;
  d.grad = recover_gradient(mesh, adj, u, Parity::Even);
  const std::size_t nn = mesh.node_count();
  std::vector<double> ur(nn), uz(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    ur[i] = d.grad[i][0];
    uz[i] = d.grad[i][1];
  }
  // u_r is odd and u_z even under r -> -r.
  const auto gur = recover_gradient(mesh, adj, ur, Parity::Odd);
  const auto guz = recover_gradient(mesh, adj, uz, Parity::Even);
  d.hess.resize(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    d.hess[i] = {gur[i][0], 0.5 * (gur[i][1] + guz[i][0]), guz[i][1]};
  }
  return d;
}

}  // namespace pcap
