#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "pcap/geometry.hpp"
#include "pcap/mesh.hpp"
#include "pcap/params.hpp"
#include "pcap/recovery.hpp"

namespace pcap {

struct SolverOptions {
  MeshOptions mesh;
  double eps_start = 0.0;  // 0: 1e-2 / diam(body)
  double eps_final = 1e-8;
  double eps_factor = 10.0;
  int max_newton = 80;
  /// Newton stops once the decrement falls below this fraction of the energy.
  double newton_tol = 1e-13;
  int max_closure = 20;
  double closure_tol = 1e-4;
  /// Inner radius of the far-field fit annulus, as a fraction of r_far.
  double fit_inner = 0.6;
  double fit_outer = 0.8;
};

struct SolverDiagnostics {
  int stages = 0;
  int newton_iterations = 0;
  int picard_iterations = 0;
  int closure_passes = 0;
  double eps = 0.0;
  double residual = 0.0;  // max free-node residual / mean boundary reaction
  double closure_change = 0.0;
  double fit_residual = 0.0;  // relative rms of u |x|^a over the fit annulus
  std::vector<double> energy_history;  // regularized energy after each iteration
};

/// Immutable discrete potential on a meridian mesh.
class Field {
 public:
  /// Unsolved placeholder; every consumer throws StateError on it.
  Field() = default;
  Field(std::shared_ptr<const MeridianMesh> mesh, std::vector<double> u, Params params,
        double far_amplitude, SolverDiagnostics diag);

  bool solved() const { return mesh_ != nullptr; }
  const MeridianMesh& mesh() const;
  std::shared_ptr<const MeridianMesh> mesh_ptr() const { return mesh_; }
  const Body& body() const { return mesh().body(); }
  const Params& params() const;
  const std::vector<double>& values() const { return u_; }
  double far_amplitude() const { return far_amplitude_; }
  const SolverDiagnostics& diagnostics() const { return diag_; }
  const NodalDerivatives& derivatives() const;

 private:
  std::shared_ptr<const MeridianMesh> mesh_;
  std::vector<double> u_;
  std::shared_ptr<const Params> params_;
  double far_amplitude_ = 0.0;
  SolverDiagnostics diag_;
  std::shared_ptr<const NodalDerivatives> deriv_;
};

/// Throws StateError unless the field is solved.
void require_solved(const Field& field);

/// r_far default for the solver: large enough that the far-circle value
/// of the ball potential is 1/20 of its boundary value.
double default_r_far(const Body& body, const Params& params);

/// Exterior p-capacitary potential for n = 3.
Field solve(const Body& body, const Params& params, const SolverOptions& opts = {});

/// Normalized p-energy with far-field tail correction (a capacity estimate).
double energy(const Field& field);

/// Mean of u |x|^a over the mesh nodes in the fit annulus.
struct FarFit {
  double amplitude = 0.0;
  double rel_rms = 0.0;
  int nodes = 0;
};
FarFit fit_far_amplitude(const MeridianMesh& mesh, const std::vector<double>& u, const Params& params,
                         double inner_frac, double outer_frac);

/// Field artifact: '#key=value' header lines followed by r,z,u rows.
void save_field(const Field& field, const std::filesystem::path& path);
Field load_field(const std::filesystem::path& path);

}  // namespace pcap
