#include "pcap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <numbers>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "pcap/error.hpp"
#include "pcap/io.hpp"

namespace pcap {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 40;
constexpr int kStallsBeforePicard = 2;

// Regularized p-energy on a fixed mesh with Dirichlet data on the inner
// and outer boundaries.
class EnergyProblem {
 public:
  EnergyProblem(const MeridianMesh& mesh, double p) : mesh_(mesh), p_(p) {
    const int nn = static_cast<int>(mesh.node_count());
    dof_.assign(nn, -1);
    for (int i = 0; i < nn; ++i) {
      if (!(mesh.tags(i) & (kInner | kOuter))) dof_[i] = nfree_++;
    }
    const int ne = static_cast<int>(mesh.element_count());
    weight_.resize(ne);
    for (int e = 0; e < ne; ++e) weight_[e] = mesh.volume_weight(e);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) {
      const auto& t = mesh.triangle(e);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          if (dof_[t[a]] >= 0 && dof_[t[b]] >= 0) trip.emplace_back(dof_[t[a]], dof_[t[b]], 0.0);
        }
      }
    }
    pattern_.resize(nfree_, nfree_);
    pattern_.setFromTriplets(trip.begin(), trip.end());
    pattern_.makeCompressed();
    slot_.assign(9 * static_cast<std::size_t>(ne), -1);
    for (int e = 0; e < ne; ++e) {
      const auto& t = mesh.triangle(e);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          if (dof_[t[a]] >= 0 && dof_[t[b]] >= 0) {
            slot_[9 * e + 3 * a + b] =
                static_cast<int>(&pattern_.coeffRef(dof_[t[a]], dof_[t[b]]) - pattern_.valuePtr());
          }
        }
      }
    }
  }

  int nfree() const { return nfree_; }
  const std::vector<int>& dof() const { return dof_; }
  void set_eps(double eps) { eps_ = eps; }

  double energy(const std::vector<double>& u) const {
    const double ep = std::pow(eps_, p_);
    double total = 0.0;
    const int ne = static_cast<int>(mesh_.element_count());
    for (int e = 0; e < ne; ++e) {
      const auto g = grad(u, e);
      const double s = eps_ * eps_ + g[0] * g[0] + g[1] * g[1];
      total += weight_[e] * (std::pow(s, 0.5 * p_) - ep);
    }
    return total;
  }

  // Full nodal gradient of the energy and the free-free Hessian (or the
  // frozen-coefficient matrix when `picard` is set).
  void assemble(const std::vector<double>& u, bool picard, std::vector<double>& full_grad, SpMat& H) const {
    H = pattern_;
    std::fill(H.valuePtr(), H.valuePtr() + H.nonZeros(), 0.0);
    full_grad.assign(mesh_.node_count(), 0.0);
    double* val = H.valuePtr();
    const int ne = static_cast<int>(mesh_.element_count());
    for (int e = 0; e < ne; ++e) {
      const auto& t = mesh_.triangle(e);
      const auto& B = mesh_.basis_grad(e);
      const auto g = grad(u, e);
      const double s = eps_ * eps_ + g[0] * g[0] + g[1] * g[1];
      const double w = weight_[e] * p_;
      const double c1 = w * std::pow(s, 0.5 * p_ - 1.0);
      const double c2 = picard ? 0.0 : w * (p_ - 2.0) * std::pow(s, 0.5 * p_ - 2.0);
      double gb[3];
      for (int a = 0; a < 3; ++a) {
        gb[a] = g[0] * B[a][0] + g[1] * B[a][1];
        full_grad[t[a]] += c1 * gb[a];
      }
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const int k = slot_[9 * e + 3 * a + b];
          if (k < 0) continue;
          val[k] += c1 * (B[a][0] * B[b][0] + B[a][1] * B[b][1]) + c2 * gb[a] * gb[b];
        }
      }
    }
  }

 private:
  std::array<double, 2> grad(const std::vector<double>& u, int e) const {
    const auto& t = mesh_.triangle(e);
    const auto& B = mesh_.basis_grad(e);
    return {u[t[0]] * B[0][0] + u[t[1]] * B[1][0] + u[t[2]] * B[2][0],
            u[t[0]] * B[0][1] + u[t[1]] * B[1][1] + u[t[2]] * B[2][1]};
  }

  const MeridianMesh& mesh_;
  double p_;
  double eps_ = 1.0;
  int nfree_ = 0;
  std::vector<int> dof_;
  std::vector<double> weight_;
  SpMat pattern_;
  std::vector<int> slot_;
};

struct StageResult {
  double residual = 0.0;
};

class NonlinearSolver {
 public:
  NonlinearSolver(const MeridianMesh& mesh, double p, const SolverOptions& opts, SolverDiagnostics& diag)
      : mesh_(mesh), problem_(mesh, p), opts_(opts), diag_(diag) {}

  // Minimizes the regularized energy at fixed eps, starting from u.
  StageResult run_stage(std::vector<double>& u, double eps) {
    problem_.set_eps(eps);
    const auto& dof = problem_.dof();
    int stalls = 0;
    bool picard = false;
    std::vector<double> grad;
    SpMat H;
    std::vector<double> trial(u.size());
    StageResult result;
    double E = problem_.energy(u);
    for (int it = 0; it < opts_.max_newton; ++it) {
      problem_.assemble(u, picard, grad, H);
      result.residual = relative_residual(grad);
      if (!analyzed_) {
        ldlt_.analyzePattern(H);
        analyzed_ = true;
      }
      ldlt_.factorize(H);
      if (ldlt_.info() != Eigen::Success) throw SolverError("sparse factorization failed");
      Vec g(problem_.nfree());
      for (std::size_t i = 0; i < dof.size(); ++i) {
        if (dof[i] >= 0) g[dof[i]] = grad[i];
      }
      const Vec d = -ldlt_.solve(g);
      const double decrement = -g.dot(d);
      if (!std::isfinite(decrement)) throw SolverError("non-finite Newton decrement");
      const bool tiny = decrement < opts_.newton_tol * std::abs(E);

      double alpha = 1.0;
      bool accepted = false;
      for (int k = 0; k < kMaxHalvings; ++k) {
        step(u, d, alpha, trial);
        const double Et = problem_.energy(trial);
        if (std::isfinite(Et) && Et <= E - kArmijo * alpha * decrement) {
          u.swap(trial);
          E = Et;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted && tiny) {
        // Round-off dominates the energy comparison; take the full step.
        step(u, d, 1.0, trial);
        u.swap(trial);
        E = problem_.energy(u);
        accepted = true;
      }
      if (picard) ++diag_.picard_iterations; else ++diag_.newton_iterations;
      diag_.energy_history.push_back(E);
      if (tiny) break;
      if (!accepted || alpha < 1e-3) {
        if (++stalls >= kStallsBeforePicard) picard = true;
        if (!accepted && picard && stalls > kStallsBeforePicard + 3) {
          throw SolverError("line search stalled at eps = " + format_double(eps) +
                            " (decrement " + format_double(decrement) + ")");
        }
      }
    }
    problem_.assemble(u, false, grad, H);
    result.residual = relative_residual(grad);
    return result;
  }

 private:
  void step(const std::vector<double>& u, const Vec& d, double alpha, std::vector<double>& out) const {
    const auto& dof = problem_.dof();
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = dof[i] >= 0 ? u[i] + alpha * d[dof[i]] : u[i];
  }

  double relative_residual(const std::vector<double>& grad) const {
    const auto& dof = problem_.dof();
    double free_max = 0.0, reaction = 0.0;
    int inner = 0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      if (dof[i] >= 0) {
        free_max = std::max(free_max, std::abs(grad[i]));
      } else if (mesh_.tags(static_cast<int>(i)) & kInner) {
        reaction += std::abs(grad[i]);
        ++inner;
      }
    }
    return inner > 0 && reaction > 0.0 ? free_max / (reaction / inner) : free_max;
  }

  const MeridianMesh& mesh_;
  EnergyProblem problem_;
  const SolverOptions& opts_;
  SolverDiagnostics& diag_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  bool analyzed_ = false;
};

void set_outer(const MeridianMesh& mesh, std::vector<double>& u, double c) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (mesh.tags(static_cast<int>(i)) & kOuter) u[i] = c;
  }
}

std::string header_value(const std::map<std::string, std::string>& h, const std::string& key) {
  auto it = h.find(key);
  if (it == h.end()) throw ArtifactError("field file is missing '" + key + "'");
  return it->second;
}

}  // namespace

Field::Field(std::shared_ptr<const MeridianMesh> mesh, std::vector<double> u, Params params,
             double far_amplitude, SolverDiagnostics diag)
    : mesh_(std::move(mesh)),
      u_(std::move(u)),
      params_(std::make_shared<const Params>(params)),
      far_amplitude_(far_amplitude),
      diag_(std::move(diag)) {
  if (!mesh_ || u_.size() != mesh_->node_count()) throw StateError("field size does not match mesh");
  deriv_ = std::make_shared<const NodalDerivatives>(recover_derivatives(*mesh_, u_));
}

const MeridianMesh& Field::mesh() const {
  require_solved(*this);
  return *mesh_;
}

const Params& Field::params() const {
  require_solved(*this);
  return *params_;
}

const NodalDerivatives& Field::derivatives() const {
  require_solved(*this);
  return *deriv_;
}

void require_solved(const Field& field) {
  if (!field.solved()) throw StateError("operation requires a solved field");
}

double default_r_far(const Body& body, const Params& params) {
  return body.circumradius() * std::max(20.0, std::pow(20.0, 1.0 / params.decay_exponent()));
}

FarFit fit_far_amplitude(const MeridianMesh& mesh, const std::vector<double>& u, const Params& params,
                         double inner_frac, double outer_frac) {
  const double a = params.decay_exponent();
  const double lo = inner_frac * mesh.r_far();
  const double hi = outer_frac * mesh.r_far();
  // Solid-angle weights sin(phi) dphi; a plain node average would pick up
  // the quadrupole part of the far field.
  const auto& phi = mesh.ray_angles();
  const int rays = static_cast<int>(phi.size());
  std::vector<double> ray_weight(rays);
  for (int j = 0; j < rays; ++j) {
    const double lo_phi = j == 0 ? phi[0] : 0.5 * (phi[j - 1] + phi[j]);
    const double hi_phi = j == rays - 1 ? phi[rays - 1] : 0.5 * (phi[j] + phi[j + 1]);
    ray_weight[j] = std::cos(lo_phi) - std::cos(hi_phi);
  }
  double sum = 0.0, sum2 = 0.0, wsum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const double rho = std::hypot(mesh.r(static_cast<int>(i)), mesh.z(static_cast<int>(i)));
    if (rho < lo || rho > hi) continue;
    const double v = u[i] * std::pow(rho, a);
    const double w = ray_weight[mesh.ray_of(static_cast<int>(i))];
    sum += w * v;
    sum2 += w * v * v;
    wsum += w;
    ++count;
  }
  if (count == 0 || !(wsum > 0.0)) throw SolverError("far-field fit annulus contains no nodes");
  FarFit fit;
  fit.amplitude = sum / wsum;
  fit.nodes = count;
  const double var = std::max(0.0, sum2 / wsum - fit.amplitude * fit.amplitude);
  fit.rel_rms = std::sqrt(var) / fit.amplitude;
  return fit;
}

Field solve(const Body& body, const Params& params, const SolverOptions& opts) {
  if (params.n() != 3) throw ParameterError("the solver is axisymmetric and requires n = 3");
  MeshOptions mopts = opts.mesh;
  if (mopts.r_far == 0.0) mopts.r_far = default_r_far(body, params);
  auto mesh = std::make_shared<const MeridianMesh>(body, mopts);

  const double p = params.p();
  const double a = params.decay_exponent();
  const std::size_t nn = mesh->node_count();
  std::vector<double> u(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    const int k = mesh->layer_of(static_cast<int>(i));
    const int j = mesh->ray_of(static_cast<int>(i));
    const double rho_b = body.rho(mesh->ray_angles()[j]);
    const double rho = std::hypot(mesh->r(static_cast<int>(i)), mesh->z(static_cast<int>(i)));
    u[i] = k == 0 ? 1.0 : std::pow(rho_b / rho, a);
  }
  double c = 0.0;
  int outer = 0;
  for (std::size_t i = 0; i < nn; ++i) {
    if (mesh->tags(static_cast<int>(i)) & kOuter) {
      c += u[i];
      ++outer;
    }
  }
  c /= outer;
  set_outer(*mesh, u, c);

  SolverDiagnostics diag;
  NonlinearSolver solver(*mesh, p, opts, diag);
  const double eps0 = opts.eps_start > 0.0 ? opts.eps_start : 1e-2 / (2.0 * body.circumradius());
  const double far_scale = std::pow(mesh->r_far(), -a);

  double c_prev = 0.0, f_prev = 0.0;
  bool have_prev = false;
  FarFit fit;
  StageResult last;
  for (int pass = 0; pass < opts.max_closure; ++pass) {
    if (pass == 0) {
      double eps = eps0;
      while (true) {
        eps = std::max(eps, opts.eps_final);
        last = solver.run_stage(u, eps);
        ++diag.stages;
        diag.eps = eps;
        if (eps <= opts.eps_final) break;
        eps /= opts.eps_factor;
      }
    } else {
      last = solver.run_stage(u, opts.eps_final);
      ++diag.stages;
    }
    ++diag.closure_passes;
    fit = fit_far_amplitude(*mesh, u, params, opts.fit_inner, opts.fit_outer);
    const double c_fit = fit.amplitude * far_scale;
    const double f = c_fit - c;
    diag.closure_change = std::abs(f) / c;
    if (diag.closure_change < opts.closure_tol) break;
    double c_next = c_fit;
    if (have_prev && f != f_prev) {
      const double secant = c - f * (c - c_prev) / (f - f_prev);
      if (secant > 0.0 && std::isfinite(secant)) c_next = secant;
    }
    c_prev = c;
    f_prev = f;
    have_prev = true;
    c = c_next;
    set_outer(*mesh, u, c);
  }
  if (diag.closure_change >= opts.closure_tol) {
    throw SolverError("far-field closure did not converge after " + std::to_string(opts.max_closure) +
                      " passes (relative change " + format_double(diag.closure_change) + ")");
  }
  diag.residual = last.residual;
  diag.fit_residual = fit.rel_rms;
  return Field(mesh, std::move(u), params, fit.amplitude, std::move(diag));
}

double energy(const Field& field) {
  require_solved(field);
  const auto& mesh = field.mesh();
  const auto& u = field.values();
  const Params& params = field.params();
  const double p = params.p();
  const double a = params.decay_exponent();
  double bulk = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangle(static_cast<int>(e));
    const auto& B = mesh.basis_grad(static_cast<int>(e));
    double gr = 0.0, gz = 0.0;
    for (int k = 0; k < 3; ++k) {
      gr += u[t[k]] * B[k][0];
      gz += u[t[k]] * B[k][1];
    }
    bulk += mesh.volume_weight(static_cast<int>(e)) * std::pow(gr * gr + gz * gz, 0.5 * p);
  }
  const double S = params.sphere_area();
  const double A = field.far_amplitude();
  const double decay = p * (a + 1.0) - 3.0;
  const double tail = std::pow(A * a, p) * S * std::pow(mesh.r_far(), -decay) / decay;
  return (bulk + tail) / (std::pow(a, p - 1.0) * S);
}

void save_field(const Field& field, const std::filesystem::path& path) {
  require_solved(field);
  const auto& mesh = field.mesh();
  const auto& d = field.diagnostics();
  std::string out;
  out += "#pcap-field=1\n";
  out += "#body=" + field.body().spec() + "\n";
  out += "#n=" + std::to_string(field.params().n()) + "\n";
  out += "#p=" + format_double(field.params().p()) + "\n";
  out += "#r_far=" + format_double(mesh.options().r_far) + "\n";
  out += "#target_h=" + format_double(mesh.options().target_h) + "\n";
  out += "#grading=" + format_double(mesh.options().grading) + "\n";
  out += "#far_amplitude=" + format_double(field.far_amplitude()) + "\n";
  out += "#eps=" + format_double(d.eps) + "\n";
  out += "#residual=" + format_double(d.residual) + "\n";
  out += "#closure_change=" + format_double(d.closure_change) + "\n";
  out += "#fit_residual=" + format_double(d.fit_residual) + "\n";
  out += "#newton_iterations=" + std::to_string(d.newton_iterations) + "\n";
  out += "#picard_iterations=" + std::to_string(d.picard_iterations) + "\n";
  out += "#closure_passes=" + std::to_string(d.closure_passes) + "\n";
  out += "#stages=" + std::to_string(d.stages) + "\n";
  out += "r,z,u\n";
  const auto& u = field.values();
  for (std::size_t i = 0; i < u.size(); ++i) {
    out += format_double(mesh.r(static_cast<int>(i)));
    out += ',';
    out += format_double(mesh.z(static_cast<int>(i)));
    out += ',';
    out += format_double(u[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

Field load_field(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::map<std::string, std::string> header;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] != '#') break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ArtifactError("malformed header line '" + line + "'");
    header[line.substr(1, eq - 1)] = line.substr(eq + 1);
  }
  if (header_value(header, "pcap-field") != "1") throw ArtifactError("unsupported field file version");
  if (line != "r,z,u") throw ArtifactError("field file is missing the r,z,u column header");

  auto num = [&](const std::string& key) { return parse_double(header_value(header, key), key); };
  std::shared_ptr<const MeridianMesh> mesh;
  std::optional<Params> params;
  try {
    const Body body = Body::parse(header_value(header, "body"));
    const double n = num("n");
    params.emplace(static_cast<int>(n), num("p"));
    MeshOptions mopts{num("r_far"), num("target_h"), num("grading")};
    mesh = std::make_shared<const MeridianMesh>(body, mopts);
  } catch (const ArtifactError&) {
    throw;
  } catch (const Error& e) {
    throw ArtifactError(std::string("field file header: ") + e.what());
  }

  std::vector<double> u;
  u.reserve(mesh->node_count());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ArtifactError("field row must have 3 columns: '" + line + "'");
    const std::size_t i = u.size();
    if (i >= mesh->node_count()) throw ArtifactError("field file has more rows than mesh nodes");
    const double r = parse_double(cells[0], "r");
    const double z = parse_double(cells[1], "z");
    const double v = parse_double(cells[2], "u");
    const double tol = 1e-9 * mesh->r_far();
    if (std::abs(r - mesh->r(static_cast<int>(i))) > tol || std::abs(z - mesh->z(static_cast<int>(i))) > tol) {
      throw ArtifactError("field node " + std::to_string(i) + " does not match the rebuilt mesh");
    }
    if (!std::isfinite(v) || v < 0.0 || v > 1.0 + 1e-12) {
      throw ArtifactError("field value out of range at node " + std::to_string(i));
    }
    u.push_back(v);
  }
  if (u.size() != mesh->node_count()) {
    throw ArtifactError("field file has " + std::to_string(u.size()) + " rows, mesh has " +
                        std::to_string(mesh->node_count()) + " nodes");
  }
  SolverDiagnostics d;
  d.eps = num("eps");
  d.residual = num("residual");
  d.closure_change = num("closure_change");
  d.fit_residual = num("fit_residual");
  d.newton_iterations = static_cast<int>(num("newton_iterations"));
  d.picard_iterations = static_cast<int>(num("picard_iterations"));
  d.closure_passes = static_cast<int>(num("closure_passes"));
  d.stages = static_cast<int>(num("stages"));
  return Field(mesh, std::move(u), *params, num("far_amplitude"), std::move(d));
}

}  // namespace pcap
