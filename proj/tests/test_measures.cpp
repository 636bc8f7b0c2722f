#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace optomech;

namespace {

CovarianceMatrix cm(const Matrix4& v) {
  CovarianceMatrix c;
  c.v = v;
  return c;
}

CovarianceMatrix two_mode_squeezed(double r) {
  Matrix4 v = Matrix4::Zero();
  v.topLeftCorner<2, 2>() = 0.5 * std::cosh(2 * r) * Matrix2::Identity();
  v.bottomRightCorner<2, 2>() = 0.5 * std::cosh(2 * r) * Matrix2::Identity();
  Matrix2 c = Matrix2::Zero();
  c(0, 0) = 0.5 * std::sinh(2 * r);
  c(1, 1) = -0.5 * std::sinh(2 * r);
  v.topRightCorner<2, 2>() = c;
  v.bottomLeftCorner<2, 2>() = c;
  return cm(v);
}

Matrix2 rotation(double phi) {
  Matrix2 r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

Matrix4 local(const Matrix2& a, const Matrix2& b) {
  Matrix4 s = Matrix4::Zero();
  s.topLeftCorner<2, 2>() = a;
  s.bottomRightCorner<2, 2>() = b;
  return s;
}

Matrix2 single_squeezer(double r) { return Matrix2(Eigen::Vector2d(std::exp(-r), std::exp(r)).asDiagonal()); }

/// Random symplectic transformation built from local rotations, local
/// squeezers, a two-mode squeezer and a beam splitter.
Matrix4 random_symplectic(support::Rng& rng) {
  auto u = [&](double lo, double hi) { return support::uniform(rng, lo, hi); };
  Matrix4 tms = Matrix4::Identity();
  const double r = u(-0.8, 0.8);
  tms.topLeftCorner<2, 2>() *= std::cosh(r);
  tms.bottomRightCorner<2, 2>() *= std::cosh(r);
  Matrix2 z;
  z << std::sinh(r), 0, 0, -std::sinh(r);
  tms.topRightCorner<2, 2>() = z;
  tms.bottomLeftCorner<2, 2>() = z;
  const double t = u(0, constants::pi);
  Matrix4 bs = Matrix4::Zero();
  bs.topLeftCorner<2, 2>() = std::cos(t) * Matrix2::Identity();
  bs.bottomRightCorner<2, 2>() = std::cos(t) * Matrix2::Identity();
  bs.topRightCorner<2, 2>() = std::sin(t) * Matrix2::Identity();
  bs.bottomLeftCorner<2, 2>() = -std::sin(t) * Matrix2::Identity();
  return local(rotation(u(0, 7)) * single_squeezer(u(-1, 1)), rotation(u(0, 7)) * single_squeezer(u(-1, 1))) * bs *
         tms * local(rotation(u(0, 7)), rotation(u(0, 7)));
}

/// Williamson form S diag(ν₁, ν₁, ν₂, ν₂) Sᵀ with ν ≥ 1/2.
CovarianceMatrix random_physical_state(support::Rng& rng) {
  const double n1 = 0.5 + support::uniform(rng, 0.0, 3.0);
  const double n2 = 0.5 + support::uniform(rng, 0.0, 3.0);
  const Matrix4 s = random_symplectic(rng);
  const Eigen::Vector4d d(n1, n1, n2, n2);
  return cm(s * d.asDiagonal() * s.transpose());
}

}  // namespace

TEST(Blocks, ReassembleExactly) {
  support::Rng rng(1);
  const auto v = random_physical_state(rng);
  const auto b = decompose(v);
  EXPECT_LT((b.reassemble() - 0.5 * (v.v + v.v.transpose())).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_TRUE((b.block_a == v.v.topLeftCorner<2, 2>()));
  EXPECT_TRUE((b.block_c == v.v.topRightCorner<2, 2>()));
}

TEST(LogNegativity, VacuumIsSeparable) {
  const auto e = log_negativity(cm(0.5 * Matrix4::Identity()));
  EXPECT_NEAR(e.nu_minus, 0.5, 1e-15);
  EXPECT_EQ(e.e_n, 0.0);
}

TEST(LogNegativity, TwoModeSqueezedClosedForm) {
  for (double r : {0.1, 0.5, 1.0}) {
    const auto e = log_negativity(two_mode_squeezed(r));
    EXPECT_NEAR(e.sigma_v, std::cosh(4 * r) / 2.0, 1e-12 * std::cosh(4 * r));
    EXPECT_LT(support::relative_error(e.nu_minus, std::exp(-2 * r) / 2.0), 1e-10);
    EXPECT_NEAR(e.e_n, 2 * r, 1e-10);
  }
}

TEST(LogNegativity, ProductStatesAreSeparable) {
  support::Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    auto u = [&](double lo, double hi) { return support::uniform(rng, lo, hi); };
    const Matrix2 sa = rotation(u(0, 7)) * single_squeezer(u(-1.5, 1.5));
    const Matrix2 sb = rotation(u(0, 7)) * single_squeezer(u(-1.5, 1.5));
    Matrix4 v = Matrix4::Zero();
    v.topLeftCorner<2, 2>() = (0.5 + u(0, 5)) * sa * sa.transpose();
    v.bottomRightCorner<2, 2>() = (0.5 + u(0, 5)) * sb * sb.transpose();
    const auto e = log_negativity(cm(v));
    EXPECT_EQ(e.e_n, 0.0);
    EXPECT_GE(e.nu_minus, 0.5 - 1e-9);
  }
}

TEST(LogNegativity, InvariantUnderLocalRotations) {
  support::Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto v = random_physical_state(rng);
    const Matrix4 s = local(rotation(support::uniform(rng, 0, 7)), rotation(support::uniform(rng, 0, 7)));
    const auto a = log_negativity(v);
    const auto b = log_negativity(cm(s * v.v * s.transpose()));
    EXPECT_NEAR(a.e_n, b.e_n, 1e-10);
  }
}

TEST(LogNegativity, ThresholdConsistency) {
  support::Rng rng(4);
  for (int i = 0; i < 5000; ++i) {
    const auto e = log_negativity(random_physical_state(rng));
    EXPECT_EQ(e.nu_minus < 0.5, e.e_n > 0.0);
  }
}

TEST(LogNegativity, RejectsGrosslyInvalidMatrices) {
  Matrix4 v = Matrix4::Zero();
  v(0, 0) = v(1, 1) = 1.0;
  v(2, 2) = 1.0;
  v(3, 3) = -1.0;
  v(0, 2) = v(2, 0) = 3.0;
  try {
    log_negativity(cm(v));
    FAIL() << "expected invalid-covariance";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_covariance);
  }
}

TEST(Squeezing, GroundStateIsZeroDecibels) {
  const auto s = squeezing_degrees(cm(0.5 * Matrix4::Identity()));
  EXPECT_EQ(s.s_q, 0.0);
  EXPECT_EQ(s.s_p, 0.0);
}

TEST(Squeezing, ThermalStateIsAntiSqueezed) {
  const double n = 1.62;
  const auto s = squeezing_degrees(cm((n + 0.5) * Matrix4::Identity()));
  EXPECT_NEAR(s.s_q, -10.0 * std::log10(2 * n + 1), 1e-12);
  EXPECT_LT(s.s_p, 0.0);
}

TEST(Squeezing, StiffenedGroundStateBeatsThreeDecibels) {
  // Uncoupled mechanics with Ω_m = 2ω_m at zero temperature.
  DriftMatrix a;
  a.a << 0, 1, 0, 0, -2, -1e-4, 0, 0, 0, 0, -0.3, 0.1, 0, 0, -0.1, -0.3;
  const auto sol = solve_lyapunov(a, build_diffusion(1e-4, 0.0, 0.3));
  const auto s = squeezing_degrees(sol.covariance);
  EXPECT_NEAR(s.sigma_q, 0.25, 1e-10);
  EXPECT_NEAR(s.s_q, 10.0 * std::log10(2.0), 1e-9);
  EXPECT_GT(s.s_q, 3.0);
}

TEST(Squeezing, NonpositiveVarianceIsInvalid) {
  Matrix4 v = 0.5 * Matrix4::Identity();
  v(0, 0) = 0.0;
  EXPECT_THROW(squeezing_degrees(cm(v)), Error);
}

TEST(Physicality, VacuumIsPhysical) {
  const auto r = physicality(cm(0.5 * Matrix4::Identity()));
  EXPECT_NEAR(r.nu_tilde_min, 0.5, 1e-15);
  EXPECT_TRUE(r.physical);
}

TEST(Physicality, SubVacuumIsUnphysical) {
  const auto r = physicality(cm(0.25 * Matrix4::Identity()));
  EXPECT_NEAR(r.nu_tilde_min, 0.25, 1e-15);
  EXPECT_FALSE(r.physical);
}

TEST(Physicality, SeralianRouteMatchesSpectrum) {
  support::Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto v = random_physical_state(rng);
    const auto r = physicality(v);
    EXPECT_LT(support::relative_error(r.nu_tilde_min, r.nu_tilde_spectral), 1e-8);
    EXPECT_TRUE(r.physical);
  }
}

TEST(Physicality, UncertaintyProductOnRandomStates) {
  support::Rng rng(6);
  for (int i = 0; i < 2000; ++i) {
    const auto s = squeezing_degrees(random_physical_state(rng));
    EXPECT_GE(s.sigma_q * s.sigma_p, 0.25 - 1e-9);
  }
}
