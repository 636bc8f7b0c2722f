#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace optomech;

namespace {

MembraneGeometry geometry(double reflectivity, double q0_over_lambda, double half_length = 5e-3, int n = 12346) {
  MembraneGeometry g;
  g.reflectivity = reflectivity;
  g.half_length = half_length;
  g.mode_number = n;
  g.equilibrium_position = q0_over_lambda * g.wavelength();
  return g;
}

/// Position-dependent part of the profile, written out independently.
double profile_shape(double q, const MembraneGeometry& g) {
  const double k = g.mode_number * constants::pi / g.half_length;
  const double tau = 2.0 * g.half_length / constants::speed_of_light;
  return -std::asin(std::sqrt(g.reflectivity) * std::cos(2.0 * k * q)) / tau;
}

/// Central first difference, Richardson-extrapolated once.
double first_derivative(const MembraneGeometry& g, double q, double h) {
  auto d = [&](double s) { return (profile_shape(q + s, g) - profile_shape(q - s, g)) / (2.0 * s); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

double second_derivative(const MembraneGeometry& g, double q, double h) {
  auto d = [&](double s) {
    return (profile_shape(q + s, g) - 2.0 * profile_shape(q, g) + profile_shape(q - s, g)) / (s * s);
  };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

}  // namespace

TEST(CavityProfile, ZeroReflectivityIsFlat) {
  const auto g = geometry(0.0, 0.0);
  const double w0 = cavity_frequency_profile(0.0, g);
  for (double x : {-0.2, -0.05, 0.01, 0.13, 0.4}) {
    EXPECT_EQ(cavity_frequency_profile(x * g.wavelength(), g), w0);
  }
  EXPECT_DOUBLE_EQ(w0, g.omega_n() + constants::pi / g.round_trip_time());
}

TEST(CavityProfile, PerfectMirrorAtAntinodeGivesBareMode) {
  const auto g = geometry(1.0, 0.0);
  EXPECT_LT(support::relative_error(cavity_frequency_profile(0.0, g), g.omega_n()), 1e-15);
}

TEST(CavityProfile, DerivedGeometry) {
  const auto g = geometry(0.5, 0.0, 5e-3, 12346);
  EXPECT_DOUBLE_EQ(g.round_trip_time(), 1e-2 / constants::speed_of_light);
  EXPECT_DOUBLE_EQ(g.omega_n(), 12346 * constants::pi * constants::speed_of_light / 5e-3);
  EXPECT_NEAR(g.wavelength(), 2.0 * 5e-3 / 12346, 1e-20);
  EXPECT_DOUBLE_EQ(g.wavenumber(), g.omega_n() / constants::speed_of_light);
}

TEST(ExpandCouplings, AntinodeHasNoLinearCoupling) {
  const double r = 0.64;
  const auto g = geometry(r, 0.0);
  const auto e = expand_couplings(g);
  const double k = g.wavenumber();
  EXPECT_EQ(e.g_1, 0.0);
  const double expected = 2.0 * k * k * std::sqrt(r) / (g.round_trip_time() * std::sqrt(1.0 - r));
  EXPECT_LT(support::relative_error(e.g_2, expected), 1e-14);
  EXPECT_LT(support::relative_error(e.sigma, std::sqrt(1.0 - r)), 1e-15);
}

TEST(ExpandCouplings, TransparentMembraneDoesNotCouple) {
  const auto e = expand_couplings(geometry(0.0, 0.037));
  EXPECT_EQ(e.g_1, 0.0);
  EXPECT_EQ(e.g_2, 0.0);
}

TEST(ExpandCouplings, QuarterPhasePointIsPurelyLinear) {
  const double r = 0.3;
  auto g = geometry(r, 0.0);
  g.equilibrium_position = constants::pi / (4.0 * g.wavenumber());
  const auto e = expand_couplings(g);
  EXPECT_NEAR(e.sigma, 1.0, 1e-15);
  EXPECT_LT(support::relative_error(e.g_1, 2.0 * g.wavenumber() * std::sqrt(r) / g.round_trip_time()), 1e-14);
  EXPECT_NEAR(e.g_2 / (g.wavenumber() * e.g_1), 0.0, 1e-14);
}

TEST(ExpandCouplings, PerfectMirrorAtNodeIsDegenerate) {
  try {
    expand_couplings(geometry(1.0, 0.0));
    FAIL() << "expected degenerate-expansion";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_expansion);
  }
}

TEST(ExpandCouplings, SignsFollowPhase) {
  for (double x : {-0.2, -0.1, -0.03, 0.02, 0.09, 0.17, 0.23}) {
    const auto g = geometry(0.5, x);
    const auto e = expand_couplings(g);
    const double phase = 2.0 * g.wavenumber() * g.equilibrium_position;
    EXPECT_EQ(std::signbit(e.g_1), std::signbit(std::sin(phase))) << x;
    EXPECT_EQ(std::signbit(e.g_2), std::signbit(std::cos(phase))) << x;
  }
}

TEST(ExpandCouplings, MatchesFiniteDifferences) {
  for (double r : {0.05, 0.3, 0.7, 0.95, 0.999}) {
    for (double x : {-0.08, -0.031, -0.004, 0.0, 0.0025, 0.017, 0.06, 0.09}) {
      const auto g = geometry(r, x);
      const auto e = expand_couplings(g);
      const double q0 = g.equilibrium_position;
      const double lambda = g.wavelength();
      const double d1 = first_derivative(g, q0, lambda * 1e-6);
      const double d2 = second_derivative(g, q0, lambda * 1e-4);
      // g₁ carries sin(2kq₀) and vanishes at the antinode; compare against the
      // natural scale k·|g₂|/k² instead of g₁ itself there.
      const double g1_scale = std::max(std::abs(e.g_1), std::abs(e.g_2) * lambda);
      EXPECT_LT(std::abs(d1 - e.g_1) / g1_scale, 1e-6) << "R=" << r << " x=" << x;
      EXPECT_LT(support::relative_error(d2, 2.0 * e.g_2), 1e-6) << "R=" << r << " x=" << x;
    }
  }
}

TEST(ExpandCouplings, SigmaSquaredInUnitInterval) {
  support::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto g = geometry(support::uniform(rng, 0.0, 0.999999), support::uniform(rng, -0.5, 0.5));
    const auto e = expand_couplings(g);
    EXPECT_GT(e.sigma * e.sigma, 0.0);
    EXPECT_LE(e.sigma * e.sigma, 1.0 + 1e-15);
  }
}

TEST(ExpandCouplings, PeriodicInHalfWavelength) {
  for (double x : {-0.07, 0.0, 0.013, 0.08}) {
    auto g = geometry(0.6, x);
    const auto a = expand_couplings(g);
    g.equilibrium_position += g.wavelength() / 2.0;
    const auto b = expand_couplings(g);
    const double g1_scale = std::max(std::abs(a.g_1), std::abs(a.g_2) * g.wavelength());
    EXPECT_LT(std::abs(a.g_1 - b.g_1) / g1_scale, 1e-9);
    EXPECT_LT(support::relative_error(a.g_2, b.g_2), 1e-9);
    EXPECT_LT(support::relative_error(a.sigma, b.sigma), 1e-9);
    EXPECT_LT(support::relative_error(a.omega_c, b.omega_c), 1e-12);
  }
}

TEST(Geometry, Warnings) {
  auto g = geometry(0.5, 0.01);
  EXPECT_TRUE(check_geometry(g, angular_from_hz(10e6)).empty());
  g.equilibrium_position = 0.2 * g.wavelength();
  EXPECT_EQ(check_geometry(g).size(), 1u);
  g.equilibrium_position = 0.0;
  g.half_length = 2.0;  // ω_m τ ≈ 0.84
  g.mode_number = 4938272;
  EXPECT_EQ(check_geometry(g, angular_from_hz(10e6)).size(), 1u);
}

TEST(Geometry, RejectsInvalid) {
  auto g = geometry(0.5, 0.0);
  g.reflectivity = 1.2;
  EXPECT_THROW(check_geometry(g), Error);
  g = geometry(0.5, 0.0);
  g.mode_number = 0;
  EXPECT_THROW(check_geometry(g), Error);
  g = geometry(0.5, 0.0);
  g.half_length = 0.0;
  EXPECT_THROW(check_geometry(g), Error);
}
