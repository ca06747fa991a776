#pragma once

#include "pcap/params.hpp"

namespace pcap {

/// Capacitary potential of the ball B_R: u(x) = (R/|x|)^{(n-p)/(p-1)}.
/// Ground truth for the numeric modules.
class RadialSolution {
 public:
  RadialSolution(const Params& params, double radius);

  const Params& params() const { return params_; }
  double radius() const { return radius_; }

 private:
  Params params_;
  double radius_;
};

/// u(r); throws DomainError for r < R.
double radial_u(const RadialSolution& sol, double r);

/// |Du|(r) = ((n-p)/(p-1)) R^{(n-p)/(p-1)} r^{-(n-1)/(p-1)}.
double radial_grad_norm(const RadialSolution& sol, double r);

/// Second radial derivative u''(r) (positive).
double radial_u_rr(const RadialSolution& sol, double r);

/// Mean curvature (n-1)/r of the level sphere through radius r.
double radial_level_mean_curvature(const RadialSolution& sol, double r);

/// C_p(B_R) = R^{n-p}.
double ball_capacity(const Params& params, double radius);

/// Constant value of V_q^p (finite q) or V_inf^p on the ball of radius R.
double ball_V_const(const Params& params, const QExponent& q, double radius);

}  // namespace pcap
