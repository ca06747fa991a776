#include <gtest/gtest.h>

#include <cmath>

#include "fields.hpp"
#include "pcap/capacity.hpp"
#include "pcap/error.hpp"

using namespace pcap;

namespace {
double prolate_capacity(double a, double c) { return std::sqrt(c * c - a * a) / std::acosh(c / a); }
}  // namespace

TEST(Capacity, Ball) {
  const Field& f = cached_field("ball:1", 2.0);
  EXPECT_NEAR(capacity_flux(f, 0.5), 1.0, 0.01);
  EXPECT_NEAR(capacity_flux(f, 0.2), 1.0, 0.01);
  EXPECT_NEAR(capacity_farfield(f).value, 1.0, 0.01);
  EXPECT_FALSE(capacity_farfield(f).warning);
  const auto est = capacity_consensus(f);
  EXPECT_LT(est.spread, 0.02);
  EXPECT_NEAR(est.consensus, 1.0, 0.01);
  EXPECT_EQ(reference_capacity(est), est.flux);
  EXPECT_EQ(est.body, "ball:1");
  const auto j = to_json(est);
  EXPECT_EQ(j.at("spread_warning"), false);
  EXPECT_NEAR(j.at("consensus").get<double>(), est.consensus, 0.0);
}

TEST(Capacity, BallOtherExponents) {
  EXPECT_NEAR(capacity_farfield(cached_field("ball:1", 2.5)).value, 1.0, 0.02);
  const Field& f = cached_field("ball:2", 1.5, 2.0);
  EXPECT_NEAR(capacity_flux(f, 0.5) / std::pow(2.0, 1.5), 1.0, 0.015);
}

TEST(Capacity, Spheroid) {
  const Field& f = cached_field("spheroid:1,2", 2.0);
  const double oracle = prolate_capacity(1, 2);
  EXPECT_NEAR(capacity_farfield(f).value / oracle, 1.0, 0.02);
  EXPECT_NEAR(capacity_flux(f, 0.5) / oracle, 1.0, 0.02);
  EXPECT_LT(capacity_consensus(f).spread, 0.03);
}

TEST(Capacity, CoarseSpreadGrows) {
  const double fine = capacity_consensus(cached_field("spheroid:1,2", 2.0)).spread;
  const auto coarse = capacity_consensus(cached_field("spheroid:1,2", 2.0, 8.0));
  EXPECT_GT(coarse.spread, fine);
}

TEST(Capacity, Unsolved) {
  EXPECT_THROW(capacity_flux(Field{}), StateError);
  EXPECT_THROW(capacity_consensus(Field{}), StateError);
}
