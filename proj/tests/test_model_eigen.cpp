#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "elwv/error.hpp"
#include "elwv/model_eigen.hpp"

using namespace elwv;

namespace {

PhysParams desk() { return PhysParams{}; }

// Uniform sample of the 4-ball of radius r, kept away from phi2 = 0 so the
// literal normalization is defined.
std::vector<State4> ball_states(std::size_t n, double r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  std::vector<State4> out;
  while (out.size() < n) {
    State4 s{g(rng), g(rng), g(rng), g(rng)};
    double nn = 0.0;
    for (double v : s) nn += v * v;
    const double scale = r * std::pow(u(rng), 0.25) / std::sqrt(nn);
    for (double& v : s) v *= scale;
    if (std::abs(s[1]) > 1e-3 * r) out.push_back(s);
  }
  return out;
}

Eigen::Matrix4d to_eigen(const Mat4& A) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = A[i][j];
  return m;
}

}  // namespace

TEST(ModelEigen, EigenvaluesMatchGeneralSolverInDescendingOrder) {
  const PhysParams p = desk();
  for (const State4& s : ball_states(500, p.kappa, 1)) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(to_eigen(matrix_A(p, s)));
    std::array<double, 4> ref;
    for (int i = 0; i < 4; ++i) {
      ASSERT_LT(std::abs(es.eigenvalues()[i].imag()), 1e-12);
      ref[i] = es.eigenvalues()[i].real();
    }
    std::sort(ref.begin(), ref.end(), std::greater<>());
    const Vec4 lam = eigenvalues(p, s);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(lam[i], ref[i], 1e-12);
  }
}

TEST(ModelEigen, RestStateSpeeds) {
  const Vec4 lam = eigenvalues(desk(), {0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(lam[0], 2.0);
  EXPECT_DOUBLE_EQ(lam[1], 1.0);
  EXPECT_DOUBLE_EQ(lam[2], -1.0);
  EXPECT_DOUBLE_EQ(lam[3], -2.0);
}

TEST(ModelEigen, DualityAndSpectralResidualBothNormalizations) {
  const PhysParams p = desk();
  for (Normalization norm : {Normalization::PaperLiteral, Normalization::Regularized}) {
    double dual = 0.0, spec = 0.0;
    for (const State4& s : ball_states(2000, p.kappa, 2)) {
      const EigenSystem sys = eigenvectors(p, s, norm);
      const Mat4 A = matrix_A(p, s);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          double d = 0.0;
          for (int c = 0; c < 4; ++c) d += sys.lvec[i][c] * sys.rvec[j][c];
          dual = std::max(dual, std::abs(d - (i == j ? 1.0 : 0.0)));
        }
        double rn = 0.0, res = 0.0;
        for (int c = 0; c < 4; ++c) {
          double Ar = 0.0;
          for (int m = 0; m < 4; ++m) Ar += A[c][m] * sys.rvec[i][m];
          res = std::max(res, std::abs(Ar - sys.lambda[i] * sys.rvec[i][c]));
          rn = std::max(rn, std::abs(sys.rvec[i][c]));
        }
        spec = std::max(spec, res / rn);
      }
    }
    EXPECT_LT(dual, 1e-10);
    EXPECT_LT(spec, 1e-10);
  }
}

TEST(ModelEigen, RegularizedPairDefinedOnTheSymmetryAxis) {
  const PhysParams p = desk();
  const EigenSystem sys = eigenvectors(p, {0.004, 0.0, 0.001, -0.002}, Normalization::Regularized);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double d = 0.0;
      for (int c = 0; c < 4; ++c) d += sys.lvec[i][c] * sys.rvec[j][c];
      EXPECT_NEAR(d, i == j ? 1.0 : 0.0, 1e-12);
    }
}

TEST(ModelEigen, LiteralPairRefusedAtDegeneracy) {
  EXPECT_THROW(eigenvectors(desk(), {0.004, 0.0, 0.0, 0.0}, Normalization::PaperLiteral), Error);
}

TEST(ModelEigen, GradientsMatchFourthOrderDifferences) {
  const PhysParams p = desk();
  const double h = 1e-5;
  for (Normalization norm : {Normalization::PaperLiteral, Normalization::Regularized}) {
    double el = 0.0, er = 0.0, sl = 0.0, sr = 0.0;
    for (const State4& s : ball_states(300, p.kappa, 3)) {
      const EigenGradients g = eigen_gradients(p, s, norm);
      for (int j = 0; j < 4; ++j) {
        auto at = [&](double e) {
          State4 q = s;
          q[j] += e;
          return q;
        };
        const Vec4 lp2 = eigenvalues(p, at(2 * h)), lp1 = eigenvalues(p, at(h));
        const Vec4 lm1 = eigenvalues(p, at(-h)), lm2 = eigenvalues(p, at(-2 * h));
        const Mat4 rp2 = right_vectors(p, at(2 * h), norm), rp1 = right_vectors(p, at(h), norm);
        const Mat4 rm1 = right_vectors(p, at(-h), norm), rm2 = right_vectors(p, at(-2 * h), norm);
        for (int i = 0; i < 4; ++i) {
          const double fd = (-lp2[i] + 8 * lp1[i] - 8 * lm1[i] + lm2[i]) / (12 * h);
          el = std::max(el, std::abs(fd - g.dlambda[i][j]));
          sl = std::max(sl, std::abs(g.dlambda[i][j]));
          for (int c = 0; c < 4; ++c) {
            const double fdr = (-rp2[i][c] + 8 * rp1[i][c] - 8 * rm1[i][c] + rm2[i][c]) / (12 * h);
            er = std::max(er, std::abs(fdr - g.dr[i][c][j]));
            sr = std::max(sr, std::abs(g.dr[i][c][j]));
          }
        }
      }
    }
    EXPECT_LT(el / sl, 1e-6);
    EXPECT_LT(er / sr, 1e-6);
  }
}

TEST(ModelEigen, ClosedFormsMatchContraction) {
  const PhysParams p = desk();
  for (const State4& s : ball_states(500, p.kappa, 4)) {
    const CouplingCoeffs cc = coupling_coeffs(p, s, Normalization::PaperLiteral);
    EXPECT_NEAR(c111_closed_form(p, s), cc.c[0][0], 1e-10);
    EXPECT_NEAR(c222_closed_form(p, s), cc.c[1][1], 1e-10);
  }
}

TEST(ModelEigen, C111AtRestMatchesDirectionalDifference) {
  const PhysParams p = desk();
  EXPECT_DOUBLE_EQ(c111_at_rest(p), -0.75);
  // d/de lambda_1(e r_1(0)) at e = 0
  const Mat4 r = right_vectors(p, {0, 0, 0, 0}, Normalization::PaperLiteral);
  auto lam = [&](double e) {
    State4 q{};
    for (int c = 0; c < 4; ++c) q[c] = e * r[0][c];
    return eigenvalues(p, q)[0];
  };
  const double h = 1e-4;
  const double fd = (-lam(2 * h) + 8 * lam(h) - 8 * lam(-h) + lam(-2 * h)) / (12 * h);
  EXPECT_NEAR(fd, -0.75, 1e-6);
}

TEST(ModelEigen, SpeedsAndCouplingsAreOddUnderFamilyReflection) {
  const PhysParams p = desk();
  for (const State4& s : ball_states(200, p.kappa, 5)) {
    const Vec4 l = eigenvalues(p, s);
    EXPECT_NEAR(l[0], -l[3], 1e-15);
    EXPECT_NEAR(l[1], -l[2], 1e-15);
    const CouplingCoeffs cc = coupling_coeffs(p, s);
    for (int i = 0; i < 4; ++i)
      for (int m = 0; m < 4; ++m) EXPECT_NEAR(cc.c[i][m], -cc.c[3 - i][3 - m], 1e-12);
  }
}

TEST(ModelEigen, CouplingRowIsASliceOfTheFullTable) {
  const PhysParams p = desk();
  const State4 s{0.003, -0.002, 0.001, 0.004};
  const EigenGradients g = eigen_gradients(p, s, Normalization::Regularized);
  const CouplingCoeffs cc = coupling_coeffs(g);
  for (int i = 0; i < 4; ++i) {
    const CouplingRow row = coupling_row(g, i);
    for (int m = 0; m < 4; ++m) {
      EXPECT_EQ(row.c[m], cc.c[i][m]);
      EXPECT_EQ(row.g1[m], cc.g1[i][m]);
      for (int k = 0; k < 4; ++k) EXPECT_EQ(row.g2[k][m], cc.g2[i][k][m]);
    }
  }
}

TEST(ModelEigen, SingularCouplingsStayBoundedTowardTheAxis) {
  const PhysParams p = desk();
  double lo = INFINITY, hi = 0.0;
  for (int e = 3; e <= 12; ++e) {
    const double v = std::abs(coupling_coeffs(p, {0.5 * p.kappa, std::pow(10.0, -e), 0, 0}).g2[1][0][2]);
    ASSERT_TRUE(std::isfinite(v));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LT(hi / lo, 1.01);
}

TEST(ModelEigen, SpeedGapAgreesWithPolarGridMinimum) {
  const PhysParams p = desk();
  const GapReport g = min_gap_sigma(p, 20000);
  // Dense polar grid over the (phi1, phi2) disk of radius 2 kappa.
  double ref = INFINITY;
  for (int i = 0; i <= 200; ++i)
    for (int k = 0; k < 400; ++k) {
      const double r = 2.0 * p.kappa * i / 200.0, a = 2.0 * M_PI * k / 400.0;
      const Vec4 l = eigenvalues(p, {r * std::cos(a), r * std::sin(a), 0, 0});
      ref = std::min({ref, l[0] - l[1], l[1] - l[2]});
    }
  EXPECT_GT(g.sigma, 0.0);
  EXPECT_NEAR(g.sigma, ref, 1e-3 * ref);
}

TEST(ModelEigen, MaterialConstantsMapping) {
  const PhysParams a = material_to_phys({1.0, -0.5, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(a.c1, 2.0);
  EXPECT_DOUBLE_EQ(a.c2, 1.0);
  EXPECT_DOUBLE_EQ(a.sigma0, 6.0);
  EXPECT_DOUBLE_EQ(a.sigma1, 2.0);

  // gamma111 = -3/2 + 1/4, gamma12 = 3/2: 6 - 5 = 1 for sigma0.
  const PhysParams b = material_to_phys({1.0, -0.5, -1.25, 1.5});
  EXPECT_DOUBLE_EQ(b.sigma0, 1.0);
  EXPECT_DOUBLE_EQ(b.sigma1, -1.0);
  EXPECT_LT(b.sigma0 * b.sigma1, 0.0);
  EXPECT_LT(c111_at_rest(b), 0.0);

  EXPECT_THROW(material_to_phys({1.0, 0.0, 0.0, 0.0}), Error);
  EXPECT_THROW(material_to_phys({1.0, 0.5, 0.0, 0.0}), Error);
}

TEST(ModelEigen, CoalescingSpeedsRejected) {
  PhysParams p = desk();
  // a - b = 3 + 4 phi1 vanishes at phi1 = -3/4.
  try {
    eigenvalues(p, {-0.75, 0.0, 0.0, 0.0});
    FAIL() << "expected OutsideBall";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutsideBall);
  }
}

TEST(ModelEigen, ParameterValidation) {
  PhysParams p = desk();
  p.c2 = 3.0;
  EXPECT_THROW(p.validate(), Error);
  p = desk();
  p.sigma1 = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = desk();
  p.kappa = -1.0;
  EXPECT_THROW(p.validate(), Error);
}
