#include <gtest/gtest.h>

#include <cmath>

#include "elwv/error.hpp"
#include "elwv/evolve1d.hpp"
#include "elwv/initial_data.hpp"

using namespace elwv;

TEST(InitialData, CutoffProfiles) {
  EXPECT_EQ(smooth_step(-0.1), 0.0);
  EXPECT_EQ(smooth_step(1.1), 1.0);
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-15);
  for (double y : {0.0, 0.99, 2.01, 3.0}) EXPECT_EQ(chi(y), 0.0) << y;
  for (double y : {1.2, 1.5, 1.8}) EXPECT_EQ(chi(y), 1.0) << y;
  for (double y = 0.9; y < 2.1; y += 0.001) {
    EXPECT_GE(chi(y), 0.0);
    EXPECT_LE(chi(y), 1.0);
  }
  for (double y : {0.0, 0.1, 0.25, -0.25}) EXPECT_EQ(psi(y), 1.0) << y;
  for (double y : {0.5, -0.5, 0.8}) EXPECT_EQ(psi(y), 0.0) << y;
  for (double y = 0.0; y < 0.6; y += 0.01) EXPECT_EQ(psi(y), psi(-y));
}

TEST(InitialData, ProfilesHaveNoKinksAtTheJoins) {
  const double h = 1e-5;
  for (double y0 : {1.0, 1.2, 1.8, 2.0}) {
    const double right = (chi(y0 + h) - chi(y0)) / h, left = (chi(y0) - chi(y0 - h)) / h;
    EXPECT_LT(std::abs(right - left), 1e-3) << y0;
  }
  for (double y0 : {0.25, 0.5}) {
    const double right = (psi(y0 + h) - psi(y0)) / h, left = (psi(y0) - psi(y0 - h)) / h;
    EXPECT_LT(std::abs(right - left), 1e-3) << y0;
  }
}

TEST(InitialData, SeedAmplitudes) {
  DataParams dp;
  const double x = 1.5 * dp.eta;
  EXPECT_NEAR(seed_w(dp, x, 0.0, 1), dp.theta * std::pow(std::abs(std::log(x)), dp.alpha), 1e-15);
  for (int k = 2; k <= 4; ++k) EXPECT_NEAR(seed_w(dp, x, 0.0, k), dp.theta * dp.theta, 1e-15);
  EXPECT_EQ(seed_w(dp, 0.5 * dp.eta, 0.0, 1), 0.0);
  EXPECT_EQ(seed_w(dp, 2.5 * dp.eta, 0.0, 1), 0.0);
  EXPECT_EQ(seed_w(dp, -1.0, 0.0, 1), 0.0);
  // Transverse cutoff at |x2| = sqrt(x) / (2 |ln x|^delta).
  const double edge = std::sqrt(x) / std::pow(std::abs(std::log(x)), dp.delta);
  EXPECT_EQ(seed_w(dp, x, 0.51 * edge, 1), 0.0);
  EXPECT_GT(seed_w(dp, x, 0.2 * edge, 1), 0.0);
}

TEST(InitialData, PeakMatchesDenseScan) {
  for (double eta : {0.05, 0.025, 0.0125}) {
    DataParams dp;
    dp.eta = eta;
    const Peak pk = compute_W0_z0(dp);
    double best = 0.0, zb = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i <= n; ++i) {
      const double x = eta * (1.0 + static_cast<double>(i) / n);
      const double v = seed_w(dp, x, 0.0, 1);
      if (v > best) {
        best = v;
        zb = x;
      }
    }
    EXPECT_NEAR(pk.W0, best, 1e-10 * best);
    EXPECT_GE(pk.W0, best);
    EXPECT_NEAR(pk.z0, zb, 2e-3 * eta);
    EXPECT_GT(pk.z0, eta);
    EXPECT_LT(pk.z0, 2.0 * eta);
  }
}

TEST(InitialData, PeakScalesLinearlyInTheta) {
  DataParams a, b;
  b.theta = 0.05;
  EXPECT_NEAR(compute_W0_z0(b).W0, 0.5 * compute_W0_z0(a).W0, 1e-15);
}

namespace {

DataField build(Normalization mode, double spacing, const PhysParams& p = {}) {
  DataParams dp;
  const Grid1D g = Grid1D::covering(0.5 * dp.eta, 2.5 * dp.eta, spacing);
  return reconstruct_phi0(dp, p, mode, g);
}

PhysParams desk() {
  PhysParams p;
  p.kappa = 0.025;
  return p;
}

}  // namespace

TEST(InitialData, ReconstructionStaysInBallAndIsFlatOutsideSupport) {
  const DataField d = build(Normalization::Regularized, 0.05 / 200, desk());
  double mphi = 0.0;
  for (std::size_t i = 0; i < d.grid.n; ++i) {
    const State4 s = d.state(i);
    mphi = std::max(mphi, std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3]));
    if (d.grid.x(i) <= 0.05)
      for (int c = 0; c < 4; ++c) EXPECT_EQ(s[c], 0.0);
  }
  EXPECT_LT(mphi, 0.025);
  EXPECT_GT(mphi, 0.01);
  const std::size_t last = d.grid.n - 1;
  for (std::size_t i = last - 10; i < last; ++i)
    for (int c = 0; c < 4; ++c) EXPECT_EQ(d.phi[c][i], d.phi[c][last]);
}

TEST(InitialData, RoundTripThroughIndependentDecomposition) {
  const DataField d = build(Normalization::Regularized, 0.05 / 1600, desk());
  const Decomposition dec = decompose_field(desk(), d.grid, d.phi);
  double err = 0.0;
  for (std::size_t i = 2; i + 2 < d.grid.n; ++i)
    for (int k = 0; k < 4; ++k) err = std::max(err, std::abs(dec.w[k][i] - d.w[k][i]));
  EXPECT_LT(err, 1e-8);
}

TEST(InitialData, RoundTripErrorIsFourthOrderInSpacing) {
  auto err_at = [](double h) {
    const DataField d = build(Normalization::Regularized, h, desk());
    const Decomposition dec = decompose_field(desk(), d.grid, d.phi);
    double e = 0.0;
    for (std::size_t i = 2; i + 2 < d.grid.n; ++i)
      for (int k = 0; k < 4; ++k) e = std::max(e, std::abs(dec.w[k][i] - d.w[k][i]));
    return e;
  };
  const double e1 = err_at(0.05 / 200), e2 = err_at(0.05 / 400);
  EXPECT_GT(std::log2(e1 / e2), 3.5);
}

TEST(InitialData, IntegratorToleranceConverges) {
  DataParams dp;
  const Grid1D g = Grid1D::covering(0.5 * dp.eta, 2.5 * dp.eta, dp.eta / 100);
  const DataField a = reconstruct_phi0(dp, desk(), Normalization::Regularized, g, nullptr, 1e-8);
  const DataField b = reconstruct_phi0(dp, desk(), Normalization::Regularized, g, nullptr, 1e-12);
  double diff = 0.0;
  for (int c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < g.n; ++i) diff = std::max(diff, std::abs(a.phi[c][i] - b.phi[c][i]));
  EXPECT_LT(diff, 1e-9);
}

TEST(InitialData, LiteralModeLeavesTheTransverseFamiliesSilent) {
  const DataField d = build(Normalization::PaperLiteral, 0.05 / 200, desk());
  for (std::size_t i = 0; i < d.grid.n; ++i) {
    EXPECT_EQ(d.phi[1][i], 0.0);
    EXPECT_EQ(d.phi[3][i], 0.0);
  }
}

TEST(InitialData, SteepeningDirectionFlipsFamilyOneSign) {
  PhysParams p = desk();
  p.sigma1 = 1.0;  // c^1_11(0) > 0
  const DataField d = build(Normalization::Regularized, 0.05 / 100, p);
  EXPECT_EQ(d.family1_sign, -1.0);
  EXPECT_FALSE(d.notices.empty());
  const std::size_t mid = d.grid.n / 2;
  EXPECT_LT(d.w[0][mid], 0.0);
}

TEST(InitialData, BallExitIsReported) {
  PhysParams p = desk();
  p.kappa = 0.005;
  try {
    build(Normalization::Regularized, 0.05 / 100, p);
    FAIL() << "expected OutsideBall";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutsideBall);
  }
}

TEST(InitialData, GridMustCoverTheSupport) {
  DataParams dp;
  EXPECT_THROW(reconstruct_phi0(dp, desk(), Normalization::Regularized, Grid1D::covering(0.06, 0.2, 1e-3)), Error);
}

TEST(InitialData, ParameterValidation) {
  DataParams dp;
  dp.alpha = 0.6;
  EXPECT_THROW(dp.validate(), Error);
  dp = {};
  dp.delta = 0.4;  // 2 alpha - delta >= 0
  EXPECT_THROW(dp.validate(), Error);
  dp = {};
  dp.eta = 0.6;
  EXPECT_THROW(dp.validate(), Error);
  BumpPerturbation b;
  b.amplitude = 0.1;
  b.center = 1.9;
  EXPECT_THROW(b.validate(), Error);
}

TEST(InitialData, BumpAddsToTheChosenFamilyOnly) {
  DataParams dp;
  BumpPerturbation b;
  b.amplitude = 0.2;
  b.family = 2;
  const double x = 1.5 * dp.eta;
  EXPECT_EQ(seed_w(dp, x, 0.0, 1, &b), seed_w(dp, x, 0.0, 1));
  EXPECT_GT(seed_w(dp, x, 0.0, 2, &b), seed_w(dp, x, 0.0, 2));
}

TEST(InitialData, TwoDimensionalSampleMatchesPointEvaluation) {
  DataParams dp;
  const SpectralGrid g = sample_seed_2d(dp, 1, 64, 4.0);
  EXPECT_EQ(g.nx & (g.nx - 1), 0u);
  EXPECT_GE(g.nx, 256u);
  for (std::size_t iy = 0; iy < g.ny; iy += 37)
    for (std::size_t ix = 0; ix < g.nx; ix += 29)
      EXPECT_NEAR(g.values[iy * g.nx + ix], seed_w(dp, g.x0 + g.dx * ix, g.y0 + g.dy * iy, 1), 1e-15);
}
