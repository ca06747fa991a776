#pragma once

#include <string>
#include <vector>

#include "pcap/field_calculus.hpp"
#include "pcap/params.hpp"
#include "pcap/radial.hpp"
#include "pcap/solver.hpp"

namespace pcap {

/// Conformal data g = u^{2(p-1)/(n-p)} g_eucl at a point with u > 0, Du != 0.
struct ConformalPoint {
  double u = 0.0;
  double psi = 0.0;         // -((n-2)(p-1)/(n-p)) log u
  double grad_psi_g = 0.0;  // |grad psi|_g
  double H = 0.0;           // Euclidean mean curvature of the level set
  double H_g = 0.0;         // its conformal counterpart
  double volume_factor = 0.0;  // d mu_g / d mu
  double area_factor = 0.0;    // d sigma_g / d sigma
};

/// grad has n entries, hess n*n row-major.
ConformalPoint conformal_lift(const Params& params, double u, const std::vector<double>& grad,
                              const std::vector<double>& hess);
ConformalPoint conformal_lift(const Params& params, const PointSample& s);

/// One evaluated identity lhs = rhs. scale is the largest term magnitude,
/// floored by the natural magnitude of the identity where every term
/// vanishes (the exact radial metric is a cylinder).
struct IdentitySample {
  std::string name;
  int n = 0;
  double p = 0.0;
  double r = 0.0;  // radius, or the distance from the origin for field samples
  double residual = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

/// Radial checks take an optional perturbation eps: psi -> psi + eps (log r)^2,
/// with the metric recomputed from the perturbed psi. Any eps != 0 breaks
/// p-harmonicity, so the residuals must then be visibly nonzero.
IdentitySample psi_p_harmonicity_residual(const RadialSolution& sol, double r, double eps = 0.0);
/// Delta_{p;g} u = (p-1) |grad u|_g^p / u.
IdentitySample conformal_u_equation_residual(const RadialSolution& sol, double r, double eps = 0.0);
IdentitySample bochner_residual_radial(const RadialSolution& sol, double r, double eps = 0.0);
/// L(exp(((n-p)/((n-2)(p-1))) psi)) = 0.
IdentitySample barrier_identity_radial(const RadialSolution& sol, double r, double eps = 0.0);
/// Signed value of L(|grad psi|_g^p) in residual; nonnegative for solutions.
IdentitySample subsolution_radial(const RadialSolution& sol, double r, double eps = 0.0);

/// Refined Kato identity for p-harmonic u, in Euclidean form.
IdentitySample kato_identity_residual(const Params& params, const std::vector<double>& grad,
                                      const std::vector<double>& hess);
IdentitySample kato_identity_residual(const Params& params, const PointSample& s);
/// Radial data at radius r along a fixed oblique direction of R^n.
IdentitySample kato_identity_residual_radial(const RadialSolution& sol, double r);

struct KatoInequality {
  double hess_sq = 0.0;       // |D^2u|^2
  double grad_norm_sq = 0.0;  // |D|Du||^2
  double constant = 0.0;      // 1 + (p-1)^2/(n-1), or 2 when (p-1)^2 > n-1
  double slack = 0.0;         // hess_sq - constant * grad_norm_sq
  bool holds(double tol) const { return slack >= -tol; }
};
KatoInequality kato_inequality_check(const Params& params, const std::vector<double>& grad,
                                     const std::vector<double>& hess);
KatoInequality kato_inequality_check(const Params& params, const PointSample& s);

/// All analytic identities on n in {3,4,5}, five p values per n, r/R in
/// {1.1, 2, 10}.
std::vector<IdentitySample> radial_identity_grid(double radius = 1.0);
/// The same identities with psi perturbed; every relative residual should be large.
std::vector<IdentitySample> radial_perturbation_grid(double eps = 1e-3, double radius = 1.0);

/// Fixed physical points between 1.3 and 3 times the boundary radius, so
/// the same points can be sampled on different meshes.
std::vector<std::array<double, 2>> interior_points(const Body& body, int rays = 16);

/// Mean Kato residual over the points, normalized by the mean |D^2u|^2.
double kato_relative_residual(const Field& field, const std::vector<std::array<double, 2>>& points);

struct MaxPrincipleResult {
  IdentitySample sample;  // residual = max(0, interior_sup - level_sup)
  double interior_sup = 0.0;
  double level_sup = 0.0;
  int count = 0;
  bool skipped = false;  // level inside the boundary layer
};
/// Compares sup |Du|/u^{(n-1)/(n-p)} over mesh nodes in {u <= t} with the
/// sup over {u = t}.
MaxPrincipleResult max_principle_check(const Field& field, double t);

/// Columns name,n,p,r,residual,scale,relative.
std::string identities_csv(const std::vector<IdentitySample>& samples);

}  // namespace pcap
