#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pcap/error.hpp"
#include "pcap/radial.hpp"

using namespace pcap;

TEST(Radial, Potential) {
  EXPECT_DOUBLE_EQ(radial_u(RadialSolution(Params(3, 2), 1.0), 2.0), 0.5);
  EXPECT_DOUBLE_EQ(radial_u(RadialSolution(Params(3, 2), 1.0), 1.0), 1.0);
  EXPECT_NEAR(radial_u(RadialSolution(Params(4, 3), 1.0), 16.0), 0.25, 1e-15);
  EXPECT_THROW(radial_u(RadialSolution(Params(3, 2), 1.0), 0.5), DomainError);
}

TEST(Radial, GradientNorm) {
  EXPECT_DOUBLE_EQ(radial_grad_norm(RadialSolution(Params(3, 2), 1.0), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(radial_grad_norm(RadialSolution(Params(3, 2), 1.0), 2.0), 0.25);
  EXPECT_DOUBLE_EQ(radial_grad_norm(RadialSolution(Params(3, 1.5), 1.0), 1.0), 3.0);
  EXPECT_THROW(radial_grad_norm(RadialSolution(Params(3, 2), 1.0), 0.9), DomainError);
}

// u' and u'' against central differences of u.
TEST(Radial, DerivativesMatchDifferences) {
  for (double p : {1.5, 2.0, 2.5}) {
    const RadialSolution sol(Params(3, p), 1.3);
    const double r = 2.1, d = 1e-4;
    const double fd1 = (radial_u(sol, r + d) - radial_u(sol, r - d)) / (2 * d);
    const double fd2 = (radial_u(sol, r + d) - 2 * radial_u(sol, r) + radial_u(sol, r - d)) / (d * d);
    EXPECT_NEAR(-fd1, radial_grad_norm(sol, r), 1e-7);
    EXPECT_NEAR(fd2, radial_u_rr(sol, r), 1e-5);
  }
}

// p-harmonic in radial form: (p-1) u'' + (n-1) u'/r = 0.
TEST(Radial, IsPHarmonic) {
  for (int n = 3; n <= 5; ++n) {
    for (double p : {1.5, 2.0, n - 0.5}) {
      const RadialSolution sol(Params(n, p), 1.0);
      const double r = 1.7;
      EXPECT_NEAR((p - 1) * radial_u_rr(sol, r) - (n - 1) * radial_grad_norm(sol, r) / r, 0.0, 1e-12);
    }
  }
}

TEST(Radial, Capacity) {
  EXPECT_DOUBLE_EQ(ball_capacity(Params(3, 2), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(ball_capacity(Params(3, 2), 2.0), 2.0);
  EXPECT_DOUBLE_EQ(ball_capacity(Params(5, 3), 2.0), 4.0);
}

TEST(Radial, ConstantV) {
  EXPECT_NEAR(ball_V_const(Params(3, 2), QExponent::finite(2), 1.0), 12.566370614, 1e-8);
  EXPECT_NEAR(ball_V_const(Params(3, 2), QExponent::infinity(), 1.0), 1.0, 1e-14);
  EXPECT_NEAR(ball_V_const(Params(3, 2), QExponent::infinity(), 2.0), 0.5, 1e-14);
  // Ball(2), q = 2: scales by 2^{q(n-p)} = 4
  EXPECT_NEAR(ball_V_const(Params(3, 2), QExponent::finite(2), 2.0), 16 * std::numbers::pi, 1e-10);
}

TEST(Radial, LevelCurvature) {
  EXPECT_DOUBLE_EQ(radial_level_mean_curvature(RadialSolution(Params(3, 2), 1.0), 1.0), 2.0);
  EXPECT_DOUBLE_EQ(radial_level_mean_curvature(RadialSolution(Params(3, 2), 1.0), 2.0), 1.0);
  EXPECT_DOUBLE_EQ(radial_level_mean_curvature(RadialSolution(Params(4, 2), 0.25), 0.5), 6.0);
  EXPECT_THROW(radial_level_mean_curvature(RadialSolution(Params(3, 2), 1.0), 0.5), DomainError);
}
