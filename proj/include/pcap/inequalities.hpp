#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcap/capacity.hpp"
#include "pcap/field_calculus.hpp"
#include "pcap/geometry.hpp"
#include "pcap/params.hpp"
#include "pcap/solver.hpp"

namespace pcap {

enum class CheckKind {
  Theorem,   // lhs <= rhs holds for every convex body
  Rigidity,  // holds (with equality) only for balls; reported for the record
};

/// One evaluated inequality lhs <= rhs with slack = rhs - lhs.
struct InequalityReport {
  std::string name;
  CheckKind kind = CheckKind::Theorem;
  std::string q;  // exponent label, empty when the check has none
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tol = 0.0;          // estimated error of the slack
  bool pass = false;         // slack >= -tol
  bool equality_expected = false;
  bool equality_ok = true;   // |slack| <= 3 tol when equality is expected
  bool indeterminate = false;  // |slack| <= tol on a non-ball
};

/// Equality tolerance factor over the slack error estimate.
inline constexpr double kEqualityFactor = 3.0;
/// Relative accuracy of the analytic surface quadrature.
inline constexpr double kGeometricQuadrature = 1e-10;

/// Boundary data shared by the field checks: extrapolated |Du| with a
/// per-sample error, analytic curvature, and the reference capacity.
struct BoundaryData {
  Params params;
  Body body;
  std::vector<BoundaryFieldSample> samples;
  std::vector<double> grad_error;  // absolute error of each samples[i].grad_norm
  double capacity = 0.0;           // flux estimator
  double capacity_error = 0.0;     // absolute
  bool ball = false;
};
/// With a coarse companion (same body and params, about twice the mesh
/// size) the errors include the two-grid differences, which dominate near
/// the axis where recovery converges only to first order.
BoundaryData boundary_data(const Field& field, const Field* coarse = nullptr);

InequalityReport check_overdetermined(const BoundaryData& data);
InequalityReport check_neumann_lq(const BoundaryData& data, const QExponent& q);
InequalityReport check_capacity_local(const BoundaryData& data, const QExponent& q);
/// The p-independent form with q = (n-1)/(p-1).
InequalityReport check_capacity_willmore(const BoundaryData& data);
InequalityReport check_capacity_global(const BoundaryData& data, const QExponent& q);
InequalityReport check_willmore(const Body& body);
InequalityReport check_minkowski(const Body& body);
/// Both links of the sup chain: capacity term <= |Du| term <= H term.
std::vector<InequalityReport> check_sup_chain(const BoundaryData& data);
/// Normal-derivative pinching and mean-curvature pinching; both hold only on balls.
std::vector<InequalityReport> check_pinching(const BoundaryData& data);

/// Every check; exponents outside the monotone range are skipped for the
/// q-dependent checks. Never throws on a failing check.
std::vector<InequalityReport> run_all(const Field& field, const std::vector<QExponent>& q_list,
                                     const Field* coarse = nullptr);
/// Geometry-only checks for a body without a field.
std::vector<InequalityReport> run_geometric(const Body& body);

nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const std::vector<InequalityReport>& reports);
/// Flat CSV with columns name,lhs,rhs,slack,tol,pass.
std::string reports_csv(const std::vector<InequalityReport>& reports);

}  // namespace pcap
