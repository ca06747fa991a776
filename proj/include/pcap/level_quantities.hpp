#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pcap/field_calculus.hpp"
#include "pcap/params.hpp"
#include "pcap/solver.hpp"

namespace pcap {

/// Quadrature node on a level set with the interpolated field data.
struct LevelPoint {
  PointSample sample;
  double weight = 0.0;  // 2 pi r ds share of this node
  /// Curvature used by the level integrands: (p-1) D^2u(Du,Du)/|Du|^3 in the
  /// interior (more accurate away from the boundary), analytic on t = 1.
  double H = 0.0;
  /// |geometric - p-harmonic| curvature: local recovery error indicator.
  double H_gap = 0.0;
};

/// {u = t} as an ordered polyline from the upper to the lower axis point.
/// For t = 1 the points are the boundary samples with Gauss weights.
struct LevelSet {
  double t = 0.0;
  std::vector<LevelPoint> points;
  bool on_boundary = false;   // t == 1
  bool boundary_layer = false;  // some crossing touched an inner node
  bool closed_to_axis = true;
  /// |I_h - I_2h| / 3 for the area, the every-other-node trapezoid rule.
  double area_error = 0.0;
};

/// Valid open range (t_min, t_max) for extract_level; t = 1 is also
/// accepted and uses the boundary samples.
struct LevelRange {
  double t_min = 0.0;  // 1.5 x largest far-circle value
  double t_max = 1.0;  // largest value on the first interior layer
};
LevelRange level_range(const Field& field);

LevelSet extract_level(const Field& field, double t);

double surface_integral(const LevelSet& level, const std::function<double(const LevelPoint&)>& f);
/// Integral with per-point integrand values (one per point, in order).
double surface_integral(const LevelSet& level, const std::vector<double>& values);
/// Estimate of the trapezoid error for the integrand, |I_h - I_2h| / 3.
double surface_integral_error(const LevelSet& level, const std::function<double(const LevelPoint&)>& f);

/// Prefactor (C_p / t^{p-1})^{(n-1)(q-1)/(n-p)}.
double v_prefactor(const Params& params, double t, double q, double C_p);

double V_qp(const Field& field, double t, double q, double C_p);
double V_qp(const Field& field, const LevelSet& level, double q, double C_p);

struct SupResult {
  double value = 0.0;
  std::array<double, 2> point{};
  PointSample sample;
  double bracket = 0.0;      // level bracket at the maximizer (level point curvature)
  double bracket_tol = 0.0;  // three times the curvature gap there
};
SupResult V_inf(const Field& field, double t);
SupResult V_inf(const Field& field, const LevelSet& level);

/// H - ((n-1)(p-1)/(n-p)) |D log u|, with H = s.H_level.
double level_bracket(const PointSample& s, const Params& params);
/// Same with the level point's H.
double level_bracket(const LevelPoint& pt, const Params& params);

/// Error bound for dV_boundary from the curvature gap.
double dV_boundary_floor(const Field& field, const LevelSet& level, double q, double C_p);

double dV_boundary(const Field& field, double t, double q, double C_p);
double dV_boundary(const Field& field, const LevelSet& level, double q, double C_p);

/// Psi_q^p at s = -((n-2)(p-1)/(n-p)) log t, transformed from V_q^p.
double psi_from_V(const Params& params, double V, double q, double C_p);
double psi_transform(const Field& field, double t, double q, double C_p);
double psi_parameter(const Params& params, double t);

/// 16 log-spaced levels in [2 t_min, 0.95], decreasing.
std::vector<double> default_tgrid(const Field& field, int count = 16);
/// Parses "auto", "auto:N", "log:a,b,N", or a comma list of levels.
std::vector<double> parse_tgrid(const Field& field, const std::string& spec);

struct ProfileRow {
  double t = 0.0;
  double s = 0.0;
  double V = 0.0;
  double Psi = 0.0;
  double V_inf = 0.0;
  double dV_boundary = 0.0;  // boundary-integral derivative on the field's mesh
  double dV_fd = 0.0;        // centered difference of V around t (NaN if no room)
  /// Values used for the derivative comparison: two-grid extrapolations when
  /// a coarse companion is given, otherwise dV_boundary and dV_fd.
  double dV_boundary_cmp = 0.0;
  double dV_fd_cmp = 0.0;
  double dV_floor = 0.0;     // uncertainty of dV_boundary_cmp - dV_fd_cmp
  double quad_error = 0.0;   // trapezoid error estimate of V
  bool boundary_layer = false;
  bool monotone_ok = true;  // step to the next larger t respects the direction
};

struct MonotoneProfile {
  Params params;
  QExponent q;
  double C_p = 0.0;
  bool lambda = false;
  std::vector<ProfileRow> rows;  // decreasing t
  double V_at_one = 0.0;         // V_q^p(1) from boundary samples (NaN for q = inf)
  double V_inf_at_one = 0.0;
  double tolerance = 0.0;        // monotonicity tolerance for V
  double tolerance_inf = 0.0;    // same for V_inf
  bool monotone_ok = true;       // all rows ok (only asserted when lambda)
  bool monotone_inf_ok = true;
  double max_increase = 0.0;     // largest V step towards larger t
  double max_increase_inf = 0.0;
};

/// Evaluates V, V_inf and both derivatives on a decreasing t-grid.
/// dV_fd is a fourth-order centered difference with step 5% of t. With a
/// companion solve on a mesh of twice the spacing, both derivatives are also
/// Richardson-extrapolated in h for the comparison, and the floor carries
/// their two-grid convergence indices.
/// Default relative monotonicity floor, as a fraction of V(1).
inline constexpr double kMonotoneRelative = 5e-3;
MonotoneProfile sweep(const Field& field, const QExponent& q, const std::vector<double>& tgrid, double C_p,
                      const Field* coarse = nullptr, double monotone_rel = kMonotoneRelative);

/// Rows where the finite difference clears the floor are compared; they
/// agree when |dV_boundary - dV_fd| <= rel_tol |dV_fd| (extrapolated values).
struct DerivativeAgreement {
  int compared = 0;
  int agreeing = 0;
  int below_floor = 0;
  double worst = 0.0;  // largest relative difference among compared rows
  bool ok() const { return agreeing == compared; }
};
DerivativeAgreement derivative_agreement(const MonotoneProfile& profile, double rel_tol = 0.05);

/// CSV with columns t,s,V,Psi,V_inf,dV_boundary,dV_fd,in_lambda,monotone_ok.
std::string profile_csv(const MonotoneProfile& profile);

/// The three terms of the volume-integrand brace of the derivative formula
/// at an interior point, using the p-harmonic level-set curvature.
struct BraceTerms {
  double traceless = 0.0;   // |D^2_T u - (Delta_T u/(n-1)) g_T|^2
  double tangential = 0.0;  // (q(p-1) - 1) |D_T |Du||^2
  double bracket = 0.0;     // [q - 1 - (n-p)/((p-1)(n-1))] |Du|^2 [H - ((n-1)(p-1)/(n-p)) |D log u|]^2
  bool nonnegative(double tol) const { return traceless >= -tol && tangential >= -tol && bracket >= -tol; }
};
BraceTerms brace_terms(const PointSample& s, const Params& params, double q);

/// Counts points where every brace term is >= -rel_tol |D^2u|^2.
struct BraceSummary {
  int count = 0;
  int nonnegative = 0;
  double worst = 0.0;  // most negative term, relative to |D^2u|^2
  double fraction() const { return count > 0 ? static_cast<double>(nonnegative) / count : 0.0; }
};
BraceSummary brace_summary(const Field& field, const std::vector<std::array<double, 2>>& points, double q,
                           double rel_tol = 1e-10);

}  // namespace pcap
