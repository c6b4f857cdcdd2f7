#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "momsafe/domain.hpp"
#include "momsafe/rng.hpp"
#include "momsafe/units.hpp"

namespace momsafe {
namespace {

VehicleSpec spec(double mass, double v_max_kmh) { return {VehicleId{1}, mass, kmh_to_ms(v_max_kmh), 4.5, 2.6, 4.5}; }
RoadEdge edge(double limit_kmh) { return {"e", 500.0, 2, kmh_to_ms(limit_kmh), 0.0}; }

const auto kClasses = three_class_partition({}, {}, {});

TEST(RhoMax, TruckLimitedByOwnTopSpeed) {
  EXPECT_NEAR(rho_max(spec(20000.0, 72.0), edge(100.0)), 4.0e5, 1e-6);
}

TEST(RhoMax, MotorcycleSitsOnClassIBoundary) {
  const double rho = rho_max(spec(300.0, 120.0), edge(130.0));
  EXPECT_NEAR(rho, 1.0e4, 1e-9);
  EXPECT_EQ(classify(rho, kClasses).name, "I");
}

TEST(RhoMax, RoadLimitBinds) {
  EXPECT_NEAR(rho_max(spec(2000.0, 144.0), edge(100.0)), 2000.0 * kmh_to_ms(100.0), 1e-9);
}

TEST(RhoMax, StationaryVehicleHasNoMomentum) { EXPECT_EQ(rho_max(spec(2500.0, 0.0), edge(130.0)), 0.0); }

TEST(RhoMax, HomogeneousInMassAndBoundedByBothLimits) {
  RngStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double m = 100.0 + 30000.0 * rng.uniform();
    const double c = 0.1 + 10.0 * rng.uniform();
    const auto s = spec(m, 200.0 * rng.uniform());
    const auto e = edge(10.0 + 140.0 * rng.uniform());
    auto scaled = s;
    scaled.mass = c * m;
    EXPECT_NEAR(rho_max(scaled, e), c * rho_max(s, e), 1e-9 * c * rho_max(s, e) + 1e-12);
    EXPECT_LE(rho_max(s, e), m * e.v_limit);
    EXPECT_LE(rho_max(s, e), m * s.v_max_self);
  }
}

TEST(Classify, BoundariesBelongToLowerClass) {
  EXPECT_EQ(classify(1.0e4, kClasses).name, "I");
  EXPECT_EQ(classify(1.0e5, kClasses).name, "II");
  EXPECT_EQ(classify(3.3e5, kClasses).name, "II");
  EXPECT_EQ(classify(3.3e5 + 1.0, kClasses).name, "III");
  EXPECT_EQ(classify_index(1.0, kClasses), 0u);
}

TEST(Classify, RejectsBrokenPartitions) {
  auto gap = kClasses;
  gap[1].rho_lower = 2.0e4;
  EXPECT_THROW(validate_classes(gap), ConfigError);
  auto open_end = kClasses;
  open_end[2].rho_upper = 1.0e6;
  EXPECT_THROW(validate_classes(open_end), ConfigError);
  EXPECT_THROW(validate_classes({}), ConfigError);
  EXPECT_NO_THROW(validate_classes(kClasses));
}

TEST(Classify, TotalOverPositiveMomenta) {
  RngStream rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double rho = std::exp(20.0 * rng.uniform() - 2.0);
    const auto k = classify_index(rho, kClasses);
    EXPECT_GT(rho, kClasses[k].rho_lower);
    EXPECT_LE(rho, kClasses[k].rho_upper);
  }
}

TEST(VehicleSpec, ValidateRejectsNonPhysicalValues) {
  EXPECT_THROW((VehicleSpec{{}, 0.0, 10.0, 4.0, 1.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((VehicleSpec{{}, 100.0, -1.0, 4.0, 1.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((VehicleSpec{{}, 100.0, 10.0, 0.0, 1.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((VehicleSpec{{}, 100.0, 10.0, 4.0, 0.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((VehicleSpec{{}, 100.0, 10.0, 4.0, 1.0, 0.0}.validate()), ConfigError);
  EXPECT_NO_THROW((VehicleSpec{{}, 100.0, 0.0, 4.0, 1.0, 1.0}.validate()));
}

TEST(RoadEdge, ValidateChecksMinimumAgainstLimit) {
  EXPECT_THROW((RoadEdge{"e", 100.0, 1, 10.0, 12.0}.validate()), ConfigError);
  EXPECT_THROW((RoadEdge{"e", 0.0, 1, 10.0, 0.0}.validate()), ConfigError);
  EXPECT_THROW((RoadEdge{"e", 100.0, 0, 10.0, 0.0}.validate()), ConfigError);
  EXPECT_NO_THROW((RoadEdge{"e", 100.0, 1, 10.0, 10.0}.validate()));
}

TEST(LogisticParams, ValidateEnforcesProbabilityRange) {
  EXPECT_THROW((LogisticParams{0.0, 0.9, 1.0, 0.0}.validate()), ConfigError);
  EXPECT_THROW((LogisticParams{0.2, 0.9, 1.0, 0.0}.validate()), ConfigError);
  EXPECT_THROW((LogisticParams{0.05, 0.9, 0.0, 0.0}.validate()), ConfigError);
  EXPECT_NO_THROW((LogisticParams{0.01, 0.98, 1.0, 3.0}.validate()));
  EXPECT_NO_THROW((LogisticParams{0.90, 0.09, 1.0, -3.0}.validate()));
}

TEST(RngStream, NamedStreamsAreIndependentAndReproducible) {
  auto a1 = RngStream::derive(42, "arrivals", 3);
  auto a2 = RngStream::derive(42, "arrivals", 3);
  auto g = RngStream::derive(42, "gate", 3);
  auto r4 = RngStream::derive(42, "arrivals", 4);
  int same_as_gate = 0, same_as_next_run = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = a1.uniform();
    EXPECT_EQ(x, a2.uniform());
    same_as_gate += x == g.uniform();
    same_as_next_run += x == r4.uniform();
  }
  EXPECT_EQ(same_as_gate, 0);
  EXPECT_EQ(same_as_next_run, 0);
}

TEST(RngStream, UniformStaysInUnitInterval) {
  RngStream rng(9);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.01);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7u);
}

}  // namespace
}  // namespace momsafe
