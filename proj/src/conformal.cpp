#include "pcap/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jet.hpp"
#include "pcap/error.hpp"
#include "pcap/io.hpp"
#include "pcap/level_quantities.hpp"

namespace pcap {
namespace {

double max_abs(std::initializer_list<double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

IdentitySample make_sample(std::string name, const Params& params, double r, double residual, double scale) {
  return IdentitySample{std::move(name), params.n(), params.p(), r, std::abs(residual), scale};
}

// Radial conformal geometry. psi and every derived quantity are jets in the
// Euclidean radius; g = exp(-2 psi/(n-2)) g_eucl is the warped product
// d rho^2 + eta^2 g_sphere with d rho = w dr and eta = w r.
struct RadialGeometry {
  int n;
  double p;
  Jet psi, w, eta;

  RadialGeometry(const RadialSolution& sol, double r, double eps) : n(sol.params().n()), p(sol.params().p()) {
    if (!(r > sol.radius())) throw DomainError("radius must exceed the ball radius");
    const Jet x = Jet::variable(r);
    const double a = sol.params().decay_exponent();
    const Jet u = pow(x * (1.0 / sol.radius()), -a);
    const double k = (n - 2.0) * (p - 1.0) / (n - p);
    const Jet lr = log(x);
    psi = -k * log(u) + eps * (lr * lr);
    w = exp(psi * (-1.0 / (n - 2.0)));
    eta = w * x;
  }
  // d/d rho
  Jet D(const Jet& f) const { return f.derivative() / w; }
  // eta_rho / eta: the tangential Hessian eigenvalue per unit of f_rho
  Jet shape() const { return D(eta) / eta; }
  // |grad f|^{p-2} grad f in the rho direction
  Jet p_flux(const Jet& f) const {
    const Jet fr = D(f);
    const Jet m = pow(abs(fr), p - 2.0);
    return m * fr;
  }
  Jet p_laplacian(const Jet& f) const { return D(p_flux(f)) + (n - 1.0) * shape() * p_flux(f); }
  // Delta_g, (p-2) grad^2(nu, nu) and drift parts of L f
  std::array<double, 3> L_terms(const Jet& f) const {
    const Jet fr = D(f), frr = D(fr);
    const double lap = frr.value() + (n - 1.0) * shape().value() * fr.value();
    return {lap, (p - 2.0) * frr.value(), -(n - p) / (n - 2.0) * fr.value() * D(psi).value()};
  }
  // natural magnitude |grad psi|^k
  double natural(double k) const { return std::pow(std::abs(D(psi).value()), k); }
};

std::vector<double> row_major(const Mat3& m) {
  std::vector<double> h;
  for (const auto& row : m) h.insert(h.end(), row.begin(), row.end());
  return h;
}

// Gradient and Hessian of a radial u at r d, d a fixed oblique unit vector.
void radial_point_data(const RadialSolution& sol, double r, std::vector<double>& grad, std::vector<double>& hess) {
  const int n = sol.params().n();
  std::vector<double> d(n);
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    d[i] = i + 1.0;
    norm += d[i] * d[i];
  }
  for (auto& v : d) v /= std::sqrt(norm);
  const double ur = -radial_grad_norm(sol, r);
  const double urr = radial_u_rr(sol, r);
  grad.assign(n, 0.0);
  hess.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    grad[i] = ur * d[i];
    for (int j = 0; j < n; ++j) hess[i * n + j] = urr * d[i] * d[j] + (ur / r) * ((i == j ? 1.0 : 0.0) - d[i] * d[j]);
  }
}

}  // namespace

ConformalPoint conformal_lift(const Params& params, double u, const std::vector<double>& grad,
                              const std::vector<double>& hess) {
  const int n = params.n();
  const double p = params.p();
  if (!(u > 0.0)) throw DomainError("conformal lift requires u > 0");
  if (static_cast<int>(grad.size()) != n || static_cast<int>(hess.size()) != n * n) {
    throw DomainError("conformal lift: size mismatch");
  }
  double gn2 = 0.0, lap = 0.0, quad = 0.0;
  for (int i = 0; i < n; ++i) {
    gn2 += grad[i] * grad[i];
    lap += hess[i * n + i];
    for (int j = 0; j < n; ++j) quad += grad[i] * hess[i * n + j] * grad[j];
  }
  const double gn = std::sqrt(gn2);
  if (!(gn > 0.0)) throw DomainError("conformal lift at a critical point");
  ConformalPoint c;
  c.u = u;
  const double k = (n - 2.0) * (p - 1.0) / (n - p);
  c.psi = -k * std::log(u);
  c.grad_psi_g = k * gn / std::pow(u, (n - 1.0) / (n - p));
  c.H = -lap / gn + quad / (gn * gn2);
  c.H_g = std::pow(u, -(p - 1.0) / (n - p)) * (c.H - (n - 1.0) * (p - 1.0) / (n - p) * gn / u);
  c.volume_factor = std::pow(u, (p - 1.0) * n / (n - p));
  c.area_factor = std::pow(u, (p - 1.0) * (n - 1.0) / (n - p));
  return c;
}

ConformalPoint conformal_lift(const Params& params, const PointSample& s) {
  if (params.n() != 3) throw ParameterError("field samples are three-dimensional");
  return conformal_lift(params, s.u, std::vector<double>(s.grad.begin(), s.grad.end()), row_major(s.hess));
}

IdentitySample psi_p_harmonicity_residual(const RadialSolution& sol, double r, double eps) {
  const RadialGeometry g(sol, r, eps);
  const Jet flux = g.p_flux(g.psi);
  const double t1 = g.D(flux).value();
  const double t2 = (g.n - 1.0) * g.shape().value() * flux.value();
  return make_sample("psi_p_harmonic", sol.params(), r, t1 + t2,
                     std::max(max_abs({t1, t2}), g.natural(g.p)));
}

IdentitySample conformal_u_equation_residual(const RadialSolution& sol, double r, double eps) {
  const RadialGeometry g(sol, r, eps);
  const double p = g.p;
  // u in terms of psi, so the perturbed check stays self-consistent
  const Jet u = exp(g.psi * (-(g.n - p) / ((g.n - 2.0) * (p - 1.0))));
  const double lhs = g.p_laplacian(u).value();
  const double rhs = (p - 1.0) * std::pow(std::abs(g.D(u).value()), p) / u.value();
  return make_sample("conformal_u_equation", sol.params(), r, lhs - rhs, max_abs({lhs, rhs}));
}

IdentitySample bochner_residual_radial(const RadialSolution& sol, double r, double eps) {
  const RadialGeometry g(sol, r, eps);
  const double p = g.p, n = g.n;
  const Jet pr = g.D(g.psi);
  const Jet F = pow(abs(pr), p);
  const auto L = g.L_terms(F);
  const double prv = pr.value(), prr = g.D(pr).value();
  const double hess_sq = prr * prr + (n - 1.0) * std::pow(g.shape().value() * prv, 2);
  const double radial = g.D(abs(pr)).value();
  const double front = p * std::pow(std::abs(prv), p - 2.0);
  const double r1 = front * hess_sq, r2 = front * p * (p - 2.0) * radial * radial;
  const double lhs = L[0] + L[1] + L[2];
  return make_sample("bochner", sol.params(), r, lhs - (r1 + r2),
                     std::max(max_abs({L[0], L[1], L[2], r1, r2}), g.natural(p + 2.0)));
}

IdentitySample barrier_identity_radial(const RadialSolution& sol, double r, double eps) {
  const RadialGeometry g(sol, r, eps);
  const double beta = (g.n - g.p) / ((g.n - 2.0) * (g.p - 1.0));
  const auto L = g.L_terms(exp(beta * g.psi));
  return make_sample("barrier", sol.params(), r, L[0] + L[1] + L[2], max_abs({L[0], L[1], L[2]}));
}

IdentitySample subsolution_radial(const RadialSolution& sol, double r, double eps) {
  const RadialGeometry g(sol, r, eps);
  const auto L = g.L_terms(pow(abs(g.D(g.psi)), g.p));
  IdentitySample s = make_sample("subsolution", sol.params(), r, 0.0,
                                 std::max(max_abs({L[0], L[1], L[2]}), g.natural(g.p + 2.0)));
  s.residual = L[0] + L[1] + L[2];  // signed
  return s;
}

IdentitySample kato_identity_residual(const Params& params, const std::vector<double>& grad,
                                      const std::vector<double>& hess) {
  const int n = params.n();
  const double c = (params.p() - 1.0) * (params.p() - 1.0) / (n - 1.0);
  const HessianSplit h = split_hessian(grad, hess, n);
  const double dgrad_sq = h.normal_normal * h.normal_normal + h.tangential_grad_sq;
  const double t1 = h.hess_sq, t2 = (1.0 + c) * dgrad_sq, t3 = h.traceless_T_sq, t4 = (1.0 - c) * h.tangential_grad_sq;
  return IdentitySample{"kato", n, params.p(), 0.0, std::abs(t1 - t2 - t3 - t4), max_abs({t1, t2, t3, t4})};
}

IdentitySample kato_identity_residual(const Params& params, const PointSample& s) {
  if (params.n() != 3) throw ParameterError("field samples are three-dimensional");
  IdentitySample out =
      kato_identity_residual(params, std::vector<double>(s.grad.begin(), s.grad.end()), row_major(s.hess));
  out.r = std::hypot(s.position[0], s.position[1]);
  return out;
}

IdentitySample kato_identity_residual_radial(const RadialSolution& sol, double r) {
  std::vector<double> grad, hess;
  radial_point_data(sol, r, grad, hess);
  IdentitySample s = kato_identity_residual(sol.params(), grad, hess);
  s.r = r;
  return s;
}

KatoInequality kato_inequality_check(const Params& params, const std::vector<double>& grad,
                                     const std::vector<double>& hess) {
  const int n = params.n();
  const double c = (params.p() - 1.0) * (params.p() - 1.0) / (n - 1.0);
  const HessianSplit h = split_hessian(grad, hess, n);
  KatoInequality k;
  k.hess_sq = h.hess_sq;
  k.grad_norm_sq = h.normal_normal * h.normal_normal + h.tangential_grad_sq;
  k.constant = c <= 1.0 ? 1.0 + c : 2.0;
  k.slack = k.hess_sq - k.constant * k.grad_norm_sq;
  return k;
}

KatoInequality kato_inequality_check(const Params& params, const PointSample& s) {
  if (params.n() != 3) throw ParameterError("field samples are three-dimensional");
  return kato_inequality_check(params, std::vector<double>(s.grad.begin(), s.grad.end()), row_major(s.hess));
}

namespace {
std::vector<Params> grid_params() {
  std::vector<Params> out;
  for (int n = 3; n <= 5; ++n)
    for (double p : {1.25, 1.5, 2.0, 2.5, n - 0.25}) out.emplace_back(n, p);
  return out;
}
}  // namespace

std::vector<IdentitySample> radial_identity_grid(double radius) {
  std::vector<IdentitySample> out;
  for (const Params& params : grid_params()) {
    const RadialSolution sol(params, radius);
    for (double f : {1.1, 2.0, 10.0}) {
      const double r = f * radius;
      out.push_back(psi_p_harmonicity_residual(sol, r));
      out.push_back(conformal_u_equation_residual(sol, r));
      out.push_back(bochner_residual_radial(sol, r));
      out.push_back(barrier_identity_radial(sol, r));
      out.push_back(kato_identity_residual_radial(sol, r));
    }
  }
  return out;
}

std::vector<IdentitySample> radial_perturbation_grid(double eps, double radius) {
  std::vector<IdentitySample> out;
  for (const Params& params : grid_params()) {
    const RadialSolution sol(params, radius);
    for (double f : {1.1, 2.0, 10.0}) {
      const double r = f * radius;
      for (auto s : {psi_p_harmonicity_residual(sol, r, eps), conformal_u_equation_residual(sol, r, eps),
                     bochner_residual_radial(sol, r, eps)}) {
        s.name += "_perturbed";
        out.push_back(s);
      }
    }
  }
  return out;
}

std::vector<std::array<double, 2>> interior_points(const Body& body, int rays) {
  std::vector<std::array<double, 2>> out;
  for (int j = 0; j < rays; ++j) {
    // open interval, away from the axis
    const double phi = std::numbers::pi * (j + 0.5) / rays;
    const double rho = body.rho(phi);
    for (double f : {1.3, 1.6, 2.0, 3.0}) out.push_back({f * rho * std::sin(phi), f * rho * std::cos(phi)});
  }
  return out;
}

double kato_relative_residual(const Field& field, const std::vector<std::array<double, 2>>& points) {
  require_solved(field);
  double res = 0.0, scale = 0.0;
  for (const auto& x : points) {
    const IdentitySample s = kato_identity_residual(field.params(), sample_at(field, x[0], x[1]));
    res += s.residual;
    scale += s.scale;
  }
  if (!(scale > 0.0)) throw DomainError("no usable interior samples");
  return res / scale;
}

MaxPrincipleResult max_principle_check(const Field& field, double t) {
  require_solved(field);
  const Params& params = field.params();
  const LevelSet level = extract_level(field, t);
  MaxPrincipleResult out;
  out.level_sup = V_inf(field, level).value;
  out.sample = IdentitySample{"max_principle", params.n(), params.p(), 0.0, 0.0, out.level_sup};
  if (level.boundary_layer) {
    out.skipped = true;
    return out;
  }
  const auto& mesh = field.mesh();
  const auto& u = field.values();
  const int K = mesh.layers() - 1;
  const double e = params.sup_weight_exponent();
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const int k = mesh.layer_of(static_cast<int>(i));
    if (u[i] > t || k < 2 || k > K - 2) continue;
    const PointSample s = sample_at_unchecked(field, mesh.r(i), mesh.z(i));
    out.interior_sup = std::max(out.interior_sup, s.grad_norm / std::pow(s.u, e));
    ++out.count;
  }
  out.sample.residual = std::max(0.0, out.interior_sup - out.level_sup);
  return out;
}

std::string identities_csv(const std::vector<IdentitySample>& samples) {
  CsvTable table({"name", "n", "p", "r", "residual", "scale", "relative"});
  for (const auto& s : samples) {
    table.add_row({csv_cell(s.name), csv_cell(s.n), csv_cell(s.p), csv_cell(s.r), csv_cell(s.residual),
                   csv_cell(s.scale), csv_cell(s.relative())});
  }
  return table.str();
}

}  // namespace pcap
