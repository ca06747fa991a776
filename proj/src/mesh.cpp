#include "pcap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pcap/error.hpp"
#include "pcap/io.hpp"

namespace pcap {
namespace {

constexpr double kDefaultFarFactor = 20.0;
constexpr double kMinFarFactor = 5.0;
constexpr int kDefaultSegments = 200;
constexpr std::size_t kMaxNodes = 2'000'000;

}  // namespace

MeshOptions resolve_mesh_options(const Body& body, MeshOptions opts) {
  if (opts.r_far == 0.0) opts.r_far = kDefaultFarFactor * body.circumradius();
  if (opts.target_h == 0.0) opts.target_h = body.half_length() / kDefaultSegments;
  return opts;
}

MeridianMesh build_mesh(const Body& body, const MeshOptions& opts) { return MeridianMesh(body, opts); }

MeridianMesh::MeridianMesh(const Body& body, const MeshOptions& opts_in)
    : body_(body), opts_(resolve_mesh_options(body, opts_in)) {
  const double R = body.circumradius();
  if (!(opts_.r_far >= kMinFarFactor * R) || !std::isfinite(opts_.r_far)) {
    throw ConfigError("r_far = " + format_double(opts_.r_far) + " must be at least " +
                      format_double(kMinFarFactor) + " x circumradius (" + format_double(R) + ")");
  }
  if (!(opts_.target_h > 0.0)) throw ConfigError("target_h must be positive");
  if (!(opts_.grading > 0.0)) throw ConfigError("grading must be positive");

  const double L = body.half_length();
  const int N = std::max(8, static_cast<int>(std::ceil(L / opts_.target_h - 1e-9)));
  h_ = L / N;
  const double log_step = opts_.grading * h_ / R;

  phi_.resize(N + 1);
  rho_b_.resize(N + 1);
  log_ratio_.resize(N + 1);
  double max_ratio = 0.0;
  for (int j = 0; j <= N; ++j) {
    phi_[j] = j == 0 ? 0.0 : j == N ? std::numbers::pi : body.phi_at_arclength(L * j / N);
    rho_b_[j] = body.rho(phi_[j]);
    log_ratio_[j] = std::log(opts_.r_far / rho_b_[j]);
    max_ratio = std::max(max_ratio, log_ratio_[j]);
  }
  const int K = static_cast<int>(std::ceil(max_ratio / log_step));
  n_rays_ = N + 1;
  n_layers_ = K + 1;
  const std::size_t count = static_cast<std::size_t>(n_rays_) * n_layers_;
  if (count > kMaxNodes) {
    throw ConfigError("mesh would have " + std::to_string(count) + " nodes; increase target_h");
  }

  r_.resize(count);
  z_.resize(count);
  tags_.assign(count, 0);
  for (int k = 0; k <= K; ++k) {
    for (int j = 0; j <= N; ++j) {
      const int i = node_index(k, j);
      const double rho = k == K ? opts_.r_far : rho_b_[j] * std::exp(log_ratio_[j] * k / K);
      r_[i] = (j == 0 || j == N) ? 0.0 : rho * std::sin(phi_[j]);
      z_[i] = rho * std::cos(phi_[j]);
      if (k == 0) tags_[i] |= kInner;
      if (k == K) tags_[i] |= kOuter;
      if (j == 0 || j == N) tags_[i] |= kAxis;
    }
  }

  tri_.reserve(2 * static_cast<std::size_t>(K) * N);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < N; ++j) {
      const int n00 = node_index(k, j);
      const int n01 = node_index(k, j + 1);
      const int n11 = node_index(k + 1, j + 1);
      const int n10 = node_index(k + 1, j);
      tri_.push_back({n00, n01, n11});
      tri_.push_back({n00, n11, n10});
    }
  }
  area_.resize(tri_.size());
  bgrad_.resize(tri_.size());
  for (std::size_t e = 0; e < tri_.size(); ++e) {
    auto& t = tri_[e];
    double twice = (r_[t[1]] - r_[t[0]]) * (z_[t[2]] - z_[t[0]]) -
                   (r_[t[2]] - r_[t[0]]) * (z_[t[1]] - z_[t[0]]);
    if (twice < 0.0) {
      std::swap(t[1], t[2]);
      twice = -twice;
    }
    if (!(twice > 0.0)) throw ConfigError("degenerate mesh element " + std::to_string(e));
    area_[e] = 0.5 * twice;
    const double r0 = r_[t[0]], r1 = r_[t[1]], r2 = r_[t[2]];
    const double z0 = z_[t[0]], z1 = z_[t[1]], z2 = z_[t[2]];
    bgrad_[e] = {{{(z1 - z2) / twice, (r2 - r1) / twice},
                  {(z2 - z0) / twice, (r0 - r2) / twice},
                  {(z0 - z1) / twice, (r1 - r0) / twice}}};
  }

  ne_off_.assign(count + 1, 0);
  for (const auto& t : tri_) {
    for (int v : t) ++ne_off_[v + 1];
  }
  for (std::size_t i = 0; i < count; ++i) ne_off_[i + 1] += ne_off_[i];
  ne_idx_.resize(ne_off_.back());
  std::vector<int> fill(ne_off_.begin(), ne_off_.end() - 1);
  for (std::size_t e = 0; e < tri_.size(); ++e) {
    for (int v : tri_[e]) ne_idx_[fill[v]++] = static_cast<int>(e);
  }
}

std::array<double, 2> MeridianMesh::centroid(int e) const {
  const auto& t = tri_[e];
  return {(r_[t[0]] + r_[t[1]] + r_[t[2]]) / 3.0, (z_[t[0]] + z_[t[1]] + z_[t[2]]) / 3.0};
}

double MeridianMesh::volume_weight(int e) const {
  return 2.0 * std::numbers::pi * centroid(e)[0] * area_[e];
}

double MeridianMesh::inner_spacing(int ray) const {
  const int K = n_layers_ - 1;
  return rho_b_[ray] * std::expm1(log_ratio_[ray] / K);
}

double MeridianMesh::layer_coordinate(double r, double z) const {
  const double phi = std::atan2(r, z);
  const double rho = std::hypot(r, z);
  const double rb = body_.rho(phi);
  const int K = n_layers_ - 1;
  return K * std::log(rho / rb) / std::log(opts_.r_far / rb);
}

std::optional<MeshLocation> MeridianMesh::locate(double r, double z) const {
  if (!(r >= 0.0) || !std::isfinite(z)) return std::nullopt;
  const int N = n_rays_ - 1;
  const int K = n_layers_ - 1;
  const double phi = std::atan2(r, z);
  int j = static_cast<int>(std::upper_bound(phi_.begin(), phi_.end(), phi) - phi_.begin()) - 1;
  j = std::clamp(j, 0, N - 1);
  const double xi = layer_coordinate(r, z);
  if (!std::isfinite(xi) || xi < -1.0 || xi > K + 1.0) return std::nullopt;
  const int k0 = static_cast<int>(std::floor(xi));

  MeshLocation best;
  double best_min = -1e300;
  for (int dj = -1; dj <= 1; ++dj) {
    const int jj = j + dj;
    if (jj < 0 || jj >= N) continue;
    for (int dk = -1; dk <= 1; ++dk) {
      const int kk = k0 + dk;
      if (kk < 0 || kk >= K) continue;
      for (int half = 0; half < 2; ++half) {
        const int e = 2 * (kk * N + jj) + half;
        const auto& t = tri_[e];
        const auto& g = bgrad_[e];
        std::array<double, 3> b{};
        for (int a = 0; a < 3; ++a) {
          // Barycentric coordinate a is affine with gradient g[a] and equals 1 at vertex a.
          b[a] = 1.0 + g[a][0] * (r - r_[t[a]]) + g[a][1] * (z - z_[t[a]]);
        }
        const double mn = std::min({b[0], b[1], b[2]});
        if (mn > best_min) {
          best_min = mn;
          best.element = e;
          best.bary = b;
        }
      }
    }
  }
  if (best.element < 0 || best_min < -1e-9) return std::nullopt;
  return best;
}

std::string MeridianMesh::dump() const {
  std::ostringstream out;
  out << "nodes " << r_.size() << "\n";
  for (std::size_t i = 0; i < r_.size(); ++i) {
    out << format_double(r_[i]) << ' ' << format_double(z_[i]) << ' ' << int(tags_[i]) << '\n';
  }
  out << "triangles " << tri_.size() << "\n";
  for (const auto& t : tri_) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  return out.str();
}

void write_mesh_dump(const MeridianMesh& mesh, const std::filesystem::path& path) {
  write_text_file(path, mesh.dump());
}

}  // namespace pcap
