#include "pcap/radial.hpp"

#include <cmath>

#include "pcap/error.hpp"
#include "pcap/io.hpp"

namespace pcap {
namespace {

// Products of large powers are evaluated in log space.
constexpr double kLogSpaceThreshold = 30.0;

void require_outside(const RadialSolution& sol, double r) {
  if (!(r >= sol.radius())) {
    throw DomainError("radial solution evaluated at r = " + format_double(r) +
                      " inside the ball of radius " + format_double(sol.radius()));
  }
}

}  // namespace

RadialSolution::RadialSolution(const Params& params, double radius)
    : params_(params), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ParameterError("ball radius must be positive, got " + format_double(radius));
  }
}

double radial_u(const RadialSolution& sol, double r) {
  require_outside(sol, r);
  return std::pow(sol.radius() / r, sol.params().decay_exponent());
}

double radial_grad_norm(const RadialSolution& sol, double r) {
  require_outside(sol, r);
  const double a = sol.params().decay_exponent();
  return a * std::pow(sol.radius() / r, a) / r;
}

double radial_u_rr(const RadialSolution& sol, double r) {
  require_outside(sol, r);
  const double a = sol.params().decay_exponent();
  return a * (a + 1.0) * std::pow(sol.radius() / r, a) / (r * r);
}

double radial_level_mean_curvature(const RadialSolution& sol, double r) {
  require_outside(sol, r);
  return (sol.params().n() - 1.0) / r;
}

double ball_capacity(const Params& params, double radius) {
  if (!(radius > 0.0)) throw ParameterError("ball radius must be positive");
  return std::pow(radius, params.n() - params.p());
}

double ball_V_const(const Params& params, const QExponent& q, double radius) {
  if (!(radius > 0.0)) throw ParameterError("ball radius must be positive");
  const double n = params.n();
  const double p = params.p();
  const double a = params.decay_exponent();
  if (q.is_infinite()) {
    // a * C_p^{-1/(n-p)} with C_p = R^{n-p}.
    return a / radius;
  }
  // C_p^q a^{q(p-1)} |S^{n-1}|, C_p = R^{n-p}.
  const double qv = q.value();
  const double e_radius = qv * (n - p);
  const double e_a = qv * (p - 1.0);
  if (std::abs(e_radius) > kLogSpaceThreshold || std::abs(e_a) > kLogSpaceThreshold) {
    return std::exp(e_radius * std::log(radius) + e_a * std::log(a) +
                    std::log(params.sphere_area()));
  }
  return std::pow(radius, e_radius) * std::pow(a, e_a) * params.sphere_area();
}

}  // namespace pcap
