#include "pcap/field_calculus.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "pcap/error.hpp"
#include "pcap/io.hpp"

namespace pcap {
namespace {

constexpr double kLayerMargin = 2.0;

PointSample interpolate(const Field& field, const MeshLocation& loc, double r, double z) {
  const auto& mesh = field.mesh();
  const auto& d = field.derivatives();
  const auto& u = field.values();
  const auto& t = mesh.triangle(loc.element);
  double uv = 0.0;
  std::array<double, 2> g{};
  std::array<double, 3> h{};
  for (int a = 0; a < 3; ++a) {
    const double w = loc.bary[a];
    uv += w * u[t[a]];
    for (int k = 0; k < 2; ++k) g[k] += w * d.grad[t[a]][k];
    for (int k = 0; k < 3; ++k) h[k] += w * d.hess[t[a]][k];
  }
  return lift_sample(r, z, uv, g, h);
}

}  // namespace

PointSample lift_sample(double r, double z, double u, const std::array<double, 2>& g,
                        const std::array<double, 3>& h) {
  PointSample s;
  s.position = {r, z};
  s.u = u;
  s.grad = {g[0], 0.0, g[1]};
  const double hoop = r > 1e-12 ? g[0] / r : h[0];
  s.hess = {{{h[0], 0.0, h[1]}, {0.0, hoop, 0.0}, {h[1], 0.0, h[2]}}};
  s.grad_norm = std::hypot(g[0], g[1]);
  s.H_level = mean_curvature_geometric(s);
  return s;
}

PointSample sample_at_unchecked(const Field& field, double r, double z) {
  const auto loc = field.mesh().locate(r, z);
  if (!loc) {
    throw DomainError("point (" + format_double(r) + ", " + format_double(z) + ") is outside the mesh");
  }
  return interpolate(field, *loc, r, z);
}

PointSample sample_at(const Field& field, double r, double z) {
  const auto& mesh = field.mesh();
  const double xi = mesh.layer_coordinate(r, z);
  const double K = mesh.layers() - 1;
  if (!(xi >= kLayerMargin && xi <= K - kLayerMargin)) {
    throw DomainError("point (" + format_double(r) + ", " + format_double(z) +
                      ") is outside the domain or within two mesh layers of a boundary");
  }
  return sample_at_unchecked(field, r, z);
}

PointSample sample_on_edge(const Field& field, int i, int j, double lambda) {
  const auto& mesh = field.mesh();
  const auto& d = field.derivatives();
  const auto& u = field.values();
  const double a = 1.0 - lambda;
  const double r = a * mesh.r(i) + lambda * mesh.r(j);
  const double z = a * mesh.z(i) + lambda * mesh.z(j);
  std::array<double, 2> g{};
  std::array<double, 3> h{};
  for (int k = 0; k < 2; ++k) g[k] = a * d.grad[i][k] + lambda * d.grad[j][k];
  for (int k = 0; k < 3; ++k) h[k] = a * d.hess[i][k] + lambda * d.hess[j][k];
  return lift_sample(r, z, a * u[i] + lambda * u[j], g, h);
}

double mean_curvature_geometric(const PointSample& s) {
  const double gn = s.grad_norm;
  if (!(gn > 0.0)) return 0.0;
  double lap = 0.0, quad = 0.0;
  for (int i = 0; i < 3; ++i) {
    lap += s.hess[i][i];
    for (int j = 0; j < 3; ++j) quad += s.grad[i] * s.hess[i][j] * s.grad[j];
  }
  return -lap / gn + quad / (gn * gn * gn);
}

double mean_curvature_pharmonic(const PointSample& s, const Params& params) {
  const double gn = s.grad_norm;
  if (!(gn > 0.0)) throw DomainError("mean curvature requested at a critical point");
  double quad = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) quad += s.grad[i] * s.hess[i][j] * s.grad[j];
  }
  return (params.p() - 1.0) * quad / (gn * gn * gn);
}

double dlog_norm(const PointSample& s) {
  if (!(s.u > 0.0)) throw DomainError("|D log u| requires u > 0");
  return s.grad_norm / s.u;
}

HessianSplit split_hessian(const std::vector<double>& grad, const std::vector<double>& hess, int n) {
  if (static_cast<int>(grad.size()) != n || static_cast<int>(hess.size()) != n * n) {
    throw DomainError("split_hessian: size mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> g(grad.data(), n);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> H(
      hess.data(), n, n);
  const double gn = g.norm();
  if (!(gn > 0.0)) throw DomainError("Hessian split requested at a critical point");
  const Eigen::VectorXd e = g / gn;
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - e * e.transpose();
  const Eigen::VectorXd He = H * e;
  const Eigen::MatrixXd HT = P * H * P;
  HessianSplit out;
  out.hess_sq = H.squaredNorm();
  out.normal_normal = e.dot(He);
  out.tangential_grad_sq = (P * He).squaredNorm();
  out.laplace_T = H.trace() - out.normal_normal;
  out.tangential_sq = HT.squaredNorm();
  out.traceless_T_sq = (HT - (out.laplace_T / (n - 1)) * P).squaredNorm();
  return out;
}

HessianSplit split_hessian(const PointSample& s) {
  std::vector<double> g(s.grad.begin(), s.grad.end());
  std::vector<double> h;
  for (const auto& row : s.hess) h.insert(h.end(), row.begin(), row.end());
  return split_hessian(g, h, 3);
}

int default_boundary_count(const Field& field) { return 2 * (field.mesh().rays() - 1); }

std::vector<BoundaryFieldSample> boundary_field_samples(const Field& field, int count) {
  const auto& mesh = field.mesh();
  const Body& body = field.body();
  const double K = mesh.layers() - 1;
  const auto samples = sample_boundary(body, count);
  std::vector<BoundaryFieldSample> out;
  out.reserve(samples.size());
  for (const auto& b : samples) {
    const double rho_b = body.rho(b.phi);
    const double h = rho_b * std::expm1(std::log(mesh.r_far() / rho_b) / K);
    auto probe = [&](double mult) {
      const double d = mult * h;
      double r = b.position[0] + d * b.normal[0];
      const double z = b.position[1] + d * b.normal[1];
      return sample_at_unchecked(field, std::max(r, 0.0), z);
    };
    const PointSample s2 = probe(2.0), s3 = probe(3.0), s4 = probe(4.0), s6 = probe(6.0);
    BoundaryFieldSample f;
    f.phi = b.phi;
    f.position = b.position;
    f.normal = b.normal;
    f.weight = b.weight;
    f.H = b.H;
    f.grad_norm = 6.0 * s2.grad_norm - 8.0 * s3.grad_norm + 3.0 * s4.grad_norm;
    f.grad_norm_alt = 3.0 * s2.grad_norm - 3.0 * s4.grad_norm + s6.grad_norm;
    f.H_field = 6.0 * s2.H_level - 8.0 * s3.H_level + 3.0 * s4.H_level;
    out.push_back(f);
  }
  return out;
}

}  // namespace pcap
