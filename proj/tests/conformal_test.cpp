#include <gtest/gtest.h>

#include <cmath>

#include "fields.hpp"
#include "pcap/conformal.hpp"
#include "pcap/error.hpp"

using namespace pcap;

namespace {
// Gradient and Hessian of the radial potential in R^n at r along e_1.
struct RadialData {
  std::vector<double> grad, hess;
  double u;
};
RadialData radial_data(int n, double p, double r) {
  const double a = (n - p) / (p - 1.0);
  RadialData d;
  d.u = std::pow(r, -a);
  d.grad.assign(n, 0.0);
  d.hess.assign(n * n, 0.0);
  d.grad[0] = -a * std::pow(r, -a - 1);
  d.hess[0] = a * (a + 1) * std::pow(r, -a - 2);
  for (int i = 1; i < n; ++i) d.hess[i * n + i] = -a * std::pow(r, -a - 2);
  return d;
}
}  // namespace

TEST(Conformal, LiftExamples) {
  const Params params(3, 2);
  const auto d = radial_data(3, 2, 2);
  const auto c = conformal_lift(params, d.u, d.grad, d.hess);
  EXPECT_NEAR(c.u, 0.5, 1e-15);
  EXPECT_NEAR(c.grad_psi_g, 1.0, 1e-14);
  EXPECT_NEAR(c.psi, std::log(2.0), 1e-14);
  EXPECT_NEAR(c.H, 1.0, 1e-14);
  EXPECT_NEAR(c.H_g, 0.0, 1e-14);
  EXPECT_NEAR(c.volume_factor, 0.125, 1e-15);
  EXPECT_NEAR(c.area_factor, 0.25, 1e-15);

  const auto b = radial_data(3, 2, 1);
  EXPECT_EQ(conformal_lift(params, b.u, b.grad, b.hess).psi, 0.0);

  // n = 4, p = 3: the metric gradient is constant along the radial solution
  const Params p43(4, 3);
  for (double r : {1.0, 3.0}) {
    const auto e = radial_data(4, 3, r);
    EXPECT_NEAR(conformal_lift(p43, e.u, e.grad, e.hess).grad_psi_g, 2.0, 1e-12);
  }
}

TEST(Conformal, LiftErrors) {
  const Params params(3, 2);
  const auto d = radial_data(3, 2, 2);
  EXPECT_THROW(conformal_lift(params, 0.0, d.grad, d.hess), DomainError);
  EXPECT_THROW(conformal_lift(params, -0.1, d.grad, d.hess), DomainError);
  EXPECT_THROW(conformal_lift(params, 0.5, {0, 0, 0}, d.hess), DomainError);
}

TEST(Conformal, RadialIdentities) {
  const RadialSolution s32(Params(3, 2), 1), s315(Params(3, 1.5), 1), s425(Params(4, 2.5), 1);
  EXPECT_LT(psi_p_harmonicity_residual(s32, 2).relative(), 1e-12);
  EXPECT_LT(psi_p_harmonicity_residual(s315, 3).relative(), 1e-12);
  EXPECT_LT(psi_p_harmonicity_residual(s425, 1.5).relative(), 1e-12);
  EXPECT_LT(bochner_residual_radial(s32, 2).relative(), 1e-10);
  EXPECT_LT(bochner_residual_radial(s315, 1.5).relative(), 1e-10);
  EXPECT_LT(barrier_identity_radial(s32, 2).relative(), 1e-10);
  EXPECT_LT(barrier_identity_radial(RadialSolution(Params(4, 2), 1), 3).relative(), 1e-10);
  EXPECT_LT(std::abs(subsolution_radial(s32, 2).relative()), 1e-10);
}

TEST(Conformal, Grid) {
  const auto grid = radial_identity_grid();
  EXPECT_EQ(grid.size(), 3u * 5u * 3u * 5u);
  for (const auto& s : grid) EXPECT_LT(std::abs(s.relative()), 1e-10) << s.name << " n" << s.n << " p" << s.p;
  for (const auto& s : radial_identity_grid(2.5)) EXPECT_LT(std::abs(s.relative()), 1e-10) << s.name;

  const auto perturbed = radial_perturbation_grid();
  EXPECT_FALSE(perturbed.empty());
  for (const auto& s : perturbed) {
    EXPECT_GT(std::abs(s.relative()), 1e-6) << s.name << " n" << s.n << " p" << s.p << " r" << s.r;
    EXPECT_NE(s.name.find("_perturbed"), std::string::npos);
  }
  const std::string csv = identities_csv(grid);
  EXPECT_EQ(csv.rfind("name,n,p,r,residual,scale,relative\n", 0), 0u);
}

TEST(Conformal, KatoRadial) {
  for (int n : {3, 4, 5})
    for (double p : {1.25, 2.0, n - 0.5})
      for (double r : {1.1, 4.0})
        EXPECT_LT(kato_identity_residual_radial(RadialSolution(Params(n, p), 1), r).relative(), 1e-10);

  // p = 2: classical refined Kato with constant n/(n-1), attained
  const auto d = radial_data(3, 2, 1.7);
  const auto k = kato_inequality_check(Params(3, 2), d.grad, d.hess);
  EXPECT_NEAR(k.constant, 1.5, 1e-15);
  EXPECT_NEAR(k.hess_sq, 1.5 * k.grad_norm_sq, 1e-12 * k.hess_sq);
  EXPECT_TRUE(k.holds(1e-12 * k.hess_sq));

  const auto e = radial_data(3, 2.9, 1.3);
  const auto k29 = kato_inequality_check(Params(3, 2.9), e.grad, e.hess);
  EXPECT_EQ(k29.constant, 2.0);
  EXPECT_TRUE(k29.holds(0.0));
}

TEST(Conformal, KatoNumericConverges) {
  const Body body = Body::spheroid(1, 2);
  const auto pts = interior_points(body);
  EXPECT_EQ(pts.size(), 16u * 4u);
  const double coarse = kato_relative_residual(cached_field("spheroid:1,2", 2.0, 2.0), pts);
  const double fine = kato_relative_residual(cached_field("spheroid:1,2", 2.0), pts);
  EXPECT_LT(fine, coarse);
  EXPECT_LT(fine, 0.01);
  const auto s = sample_at(cached_field("spheroid:1,2", 2.0), 1.5, 0.5);
  EXPECT_TRUE(kato_inequality_check(Params(3, 2), s).holds(0.01 * kato_inequality_check(Params(3, 2), s).hess_sq));
}

TEST(Conformal, MaxPrinciple) {
  const auto ball = max_principle_check(cached_field("ball:1", 2.0), 0.5);
  EXPECT_FALSE(ball.skipped);
  EXPECT_GT(ball.count, 0);
  EXPECT_NEAR(ball.level_sup, 1.0, 0.02);
  EXPECT_NEAR(ball.interior_sup, 1.0, 0.02);

  const Field& f = cached_field("spheroid:1,2", 2.0);
  const auto sph = max_principle_check(f, 0.5);
  EXPECT_LE(sph.interior_sup, sph.level_sup * (1 + 1e-3));
  try {
    EXPECT_TRUE(max_principle_check(f, 0.9999).skipped);
  } catch (const RangeError&) {
  }
  EXPECT_THROW(max_principle_check(Field{}, 0.5), StateError);
}
