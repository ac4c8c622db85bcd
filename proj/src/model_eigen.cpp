#include "elwv/model_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "elwv/error.hpp"

namespace elwv {

namespace {

// Scalars shared by every eigen quantity; only phi1 and phi2 enter.
struct Invariants {
  double a, b, c, D, R, sum;  // sum = D + R > 0
  double lam1sq, lam2sq;
  // d/dphi1, d/dphi2
  double da[2], db[2], dc[2], dD[2], dR[2];
};

Invariants invariants(const PhysParams& p, const State4& s) {
  Invariants v{};
  v.a = p.c1 * p.c1 + 2.0 * p.sigma0 * s[0];
  v.b = p.c2 * p.c2 + 2.0 * p.sigma1 * s[0];
  v.c = 2.0 * p.sigma1 * s[1];
  v.D = v.a - v.b;
  v.R = std::sqrt(v.D * v.D + 4.0 * v.c * v.c);
  v.sum = v.D + v.R;
  if (!(v.sum > 0.0) || !(v.R > 0.0))
    fail(ErrorCode::OutsideBall, "eigenvalues: speeds coalesce (a <= b)");
  // Cancellation-free forms of (a+b)/2 +- R/2.
  const double shift = 2.0 * v.c * v.c / v.sum;
  v.lam1sq = v.a + shift;
  v.lam2sq = v.b - shift;
  if (!(v.lam2sq > 0.0)) {
    std::ostringstream os;
    os << "eigenvalues: lambda_2^2 = " << v.lam2sq << " <= 0, state outside hyperbolicity ball";
    fail(ErrorCode::OutsideBall, os.str());
  }
  v.da[0] = 2.0 * p.sigma0; v.da[1] = 0.0;
  v.db[0] = 2.0 * p.sigma1; v.db[1] = 0.0;
  v.dc[0] = 0.0;            v.dc[1] = 2.0 * p.sigma1;
  for (int j = 0; j < 2; ++j) {
    v.dD[j] = v.da[j] - v.db[j];
    v.dR[j] = (v.D * v.dD[j] + 4.0 * v.c * v.dc[j]) / v.R;
  }
  return v;
}

// Family index k = 0..3 maps to the big (0,3) or small (1,2) root.
inline bool big_root(int k) { return k == 0 || k == 3; }
inline double root_sign(int k) { return k < 2 ? 1.0 : -1.0; }

struct FamilyScalars {
  double lam;       // signed speed
  double dlam[2];
  double P;         // (lam^2 - b) / (2 sigma1)
  double dP[2];
  double q;         // P / phi2 for the small root
  double dq[2];
};

FamilyScalars family_scalars(const PhysParams& p, const State4& s, const Invariants& v, int k) {
  FamilyScalars f{};
  const double sum2 = v.sum * v.sum;
  double lsq, dlsq[2], g, dg[2];
  if (big_root(k)) {
    lsq = v.lam1sq;
    g = 0.5 * v.sum;
    for (int j = 0; j < 2; ++j) {
      dlsq[j] = 0.5 * (v.da[j] + v.db[j]) + 0.5 * v.dR[j];
      dg[j] = 0.5 * (v.dD[j] + v.dR[j]);
    }
  } else {
    lsq = v.lam2sq;
    g = -2.0 * v.c * v.c / v.sum;
    for (int j = 0; j < 2; ++j) {
      dlsq[j] = 0.5 * (v.da[j] + v.db[j]) - 0.5 * v.dR[j];
      dg[j] = -(4.0 * v.c * v.dc[j] * v.sum - 2.0 * v.c * v.c * (v.dD[j] + v.dR[j])) / sum2;
    }
  }
  const double mag = std::sqrt(lsq);
  f.lam = root_sign(k) * mag;
  for (int j = 0; j < 2; ++j) f.dlam[j] = root_sign(k) * dlsq[j] / (2.0 * mag);
  f.P = g / (2.0 * p.sigma1);
  for (int j = 0; j < 2; ++j) f.dP[j] = dg[j] / (2.0 * p.sigma1);
  f.q = -4.0 * p.sigma1 * s[1] / v.sum;
  for (int j = 0; j < 2; ++j) {
    f.dq[j] = 4.0 * p.sigma1 * s[1] * (v.dD[j] + v.dR[j]) / sum2;
  }
  f.dq[1] += -4.0 * p.sigma1 / v.sum;
  return f;
}

bool uses_regularized(Normalization norm, int k) {
  return norm == Normalization::Regularized && !big_root(k);
}

}  // namespace

void PhysParams::validate() const {
  std::ostringstream os;
  if (!(std::isfinite(c1) && std::isfinite(c2) && std::isfinite(sigma0) && std::isfinite(sigma1) &&
        std::isfinite(kappa)))
    os << "non-finite parameter; ";
  if (!(c1 > c2 && c2 > 0.0)) os << "need c1 > c2 > 0; ";
  if (sigma0 * sigma1 == 0.0) os << "need sigma0*sigma1 != 0; ";
  if (!(kappa > 0.0)) os << "need kappa > 0; ";
  const std::string msg = os.str();
  if (!msg.empty()) fail(ErrorCode::InvalidArgument, "PhysParams: " + msg);
}

PhysParams material_to_phys(const MaterialConstants& m) {
  const double c1sq = 4.0 * m.gamma11;
  const double c2sq = -2.0 * m.gamma2;
  if (!(4.0 * (m.gamma11 + m.gamma2) > 0.0) || !(c2sq > 0.0))
    fail(ErrorCode::InvalidArgument, "material_to_phys: Lame positivity violated");
  if (!(c1sq > c2sq))
    fail(ErrorCode::InvalidArgument, "material_to_phys: need c1 > c2");
  PhysParams p;
  p.c1 = std::sqrt(c1sq);
  p.c2 = std::sqrt(c2sq);
  p.sigma0 = 6.0 * m.gamma11 + 4.0 * m.gamma111;
  p.sigma1 = 2.0 * (m.gamma11 - m.gamma12);
  p.sigma2 = 2.0 * (m.gamma2 - 2.0 * m.gamma11 + 4.0 * m.gamma12);
  return p;
}

double c111_at_rest(const PhysParams& p) {
  return p.sigma0 * (p.c1 * p.c1 - p.c2 * p.c2) / (2.0 * p.sigma1 * p.c1);
}

Mat4 matrix_A(const PhysParams& p, const State4& s) {
  const double a = p.c1 * p.c1 + 2.0 * p.sigma0 * s[0];
  const double b = p.c2 * p.c2 + 2.0 * p.sigma1 * s[0];
  const double c = 2.0 * p.sigma1 * s[1];
  Mat4 A{};
  A[0] = {0.0, 0.0, -1.0, 0.0};
  A[1] = {0.0, 0.0, 0.0, -1.0};
  A[2] = {-a, -c, 0.0, 0.0};
  A[3] = {-c, -b, 0.0, 0.0};
  return A;
}

Vec4 eigenvalues(const PhysParams& p, const State4& s) {
  const Invariants v = invariants(p, s);
  const double l1 = std::sqrt(v.lam1sq);
  const double l2 = std::sqrt(v.lam2sq);
  return {l1, l2, -l2, -l1};
}

EigenSystem eigenvectors(const PhysParams& p, const State4& s, Normalization norm) {
  return eigen_gradients(p, s, norm).sys;
}

EigenGradients eigen_gradients(const PhysParams& p, const State4& s, Normalization norm) {
  const Invariants v = invariants(p, s);
  if (norm == Normalization::PaperLiteral && std::abs(s[1]) < kEpsDegenerate) {
    std::ostringstream os;
    os << "eigenvectors: |phi2| = " << std::abs(s[1]) << " < " << kEpsDegenerate
       << ", literal families 2,3 degenerate; use the regularized pair";
    fail(ErrorCode::Degenerate, os.str());
  }
  EigenGradients out;
  EigenSystem& sys = out.sys;
  sys.regularized = norm == Normalization::Regularized;
  const double phi2 = s[1];
  for (int k = 0; k < 4; ++k) {
    const FamilyScalars f = family_scalars(p, s, v, k);
    const double lam = f.lam;
    sys.lambda[k] = lam;
    out.dlambda[k] = {f.dlam[0], f.dlam[1], 0.0, 0.0};
    Mat4& dr = out.dr[k];
    dr = Mat4{};
    if (uses_regularized(norm, k)) {
      const double q = f.q;
      const double nrm = 2.0 * q * q + 2.0;
      sys.rvec[k] = {q, 1.0, -lam * q, -lam};
      sys.lvec[k] = {q / nrm, 1.0 / nrm, -q / (lam * nrm), -1.0 / (lam * nrm)};
      for (int j = 0; j < 2; ++j) {
        dr[0][j] = f.dq[j];
        dr[1][j] = 0.0;
        dr[2][j] = -(f.dlam[j] * q + lam * f.dq[j]);
        dr[3][j] = -f.dlam[j];
      }
      if (k == 1) sys.N = nrm;
    } else {
      const double P = f.P;
      const double nrm = 2.0 * P * P + 2.0 * phi2 * phi2;
      sys.rvec[k] = {P, phi2, -lam * P, -lam * phi2};
      sys.lvec[k] = {P / nrm, phi2 / nrm, -P / (lam * nrm), -phi2 / (lam * nrm)};
      for (int j = 0; j < 2; ++j) {
        const double dphi2 = j == 1 ? 1.0 : 0.0;
        dr[0][j] = f.dP[j];
        dr[1][j] = dphi2;
        dr[2][j] = -(f.dlam[j] * P + lam * f.dP[j]);
        dr[3][j] = -(f.dlam[j] * phi2 + lam * dphi2);
      }
      if (k == 0) sys.K = nrm;
      if (k == 1) sys.N = nrm;
    }
  }
  return out;
}

Mat4 right_vectors(const PhysParams& p, const State4& s, Normalization norm) {
  const Invariants v = invariants(p, s);
  Mat4 r{};
  for (int k = 0; k < 4; ++k) {
    const FamilyScalars f = family_scalars(p, s, v, k);
    if (uses_regularized(norm, k))
      r[k] = {f.q, 1.0, -f.lam * f.q, -f.lam};
    else
      r[k] = {f.P, s[1], -f.lam * f.P, -f.lam * s[1]};
  }
  return r;
}

CouplingRow coupling_row(const EigenGradients& g, int i) {
  if (i < 0 || i > 3) fail(ErrorCode::InvalidArgument, "coupling_row: family index must be 0..3");
  const EigenSystem& sys = g.sys;
  // (grad r_k) r_m contracted with l_i; only the phi1, phi2 columns of dr are nonzero.
  auto ldir = [&](int k, int m) {
    double acc = 0.0;
    for (int c = 0; c < 4; ++c)
      acc += sys.lvec[i][c] * (g.dr[k][c][0] * sys.rvec[m][0] + g.dr[k][c][1] * sys.rvec[m][1]);
    return acc;
  };
  CouplingRow row;
  for (int m = 0; m < 4; ++m) {
    row.c[m] = g.dlambda[i][0] * sys.rvec[m][0] + g.dlambda[i][1] * sys.rvec[m][1];
    if (m != i) row.g1[m] = -(sys.lambda[i] - sys.lambda[m]) * (ldir(i, m) - ldir(m, i));
  }
  for (int k = 0; k < 4; ++k) {
    if (k == i) continue;
    for (int m = 0; m < 4; ++m) {
      if (m == i || m == k) continue;
      row.g2[k][m] = -(sys.lambda[k] - sys.lambda[m]) * ldir(k, m);
    }
  }
  return row;
}

CouplingCoeffs coupling_coeffs(const EigenGradients& g) {
  CouplingCoeffs cc;
  for (int i = 0; i < 4; ++i) {
    const CouplingRow row = coupling_row(g, i);
    for (int m = 0; m < 4; ++m) {
      cc.c[i][m] = row.c[m];
      cc.g1[i][m] = row.g1[m];
      for (int k = 0; k < 4; ++k) cc.g2[i][k][m] = row.g2[k][m];
    }
  }
  return cc;
}

CouplingCoeffs coupling_coeffs(const PhysParams& p, const State4& s, Normalization norm) {
  return coupling_coeffs(eigen_gradients(p, s, norm));
}

double c111_closed_form(const PhysParams& p, const State4& s) {
  const Invariants v = invariants(p, s);
  const double g1 = v.lam1sq - v.b;
  return (2.0 * p.sigma0 * v.D * g1 + (2.0 * p.sigma0 + 6.0 * p.sigma1) * v.c * v.c) /
         (4.0 * p.sigma1 * std::sqrt(v.lam1sq) * v.R);
}

double c222_closed_form(const PhysParams& p, const State4& s) {
  const Invariants v = invariants(p, s);
  const double g2 = v.lam2sq - v.b;
  return -(2.0 * p.sigma0 * v.D * g2 + (2.0 * p.sigma0 + 6.0 * p.sigma1) * v.c * v.c) /
         (4.0 * p.sigma1 * std::sqrt(v.lam2sq) * v.R);
}

std::array<double, 2> halton2(std::size_t i) {
  auto radical = [](std::size_t n, std::size_t base) {
    double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
    while (n > 0) {
      r += f * static_cast<double>(n % base);
      n /= base;
      f *= inv;
    }
    return r;
  };
  return {radical(i + 1, 2), radical(i + 1, 3)};
}

namespace {

// Interior Halton points plus an equal share on the boundary circle.
template <class F>
void for_each_disk_point(double radius, std::size_t samples, F&& visit) {
  const std::size_t boundary = std::max<std::size_t>(64, samples / 8);
  const std::size_t interior = samples > boundary ? samples - boundary : 0;
  for (std::size_t i = 0; i < interior; ++i) {
    const auto h = halton2(i);
    const double r = radius * std::sqrt(h[0]);
    const double th = 2.0 * std::numbers::pi * h[1];
    visit(State4{r * std::cos(th), r * std::sin(th), 0.0, 0.0});
  }
  for (std::size_t i = 0; i < boundary; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(boundary);
    visit(State4{radius * std::cos(th), radius * std::sin(th), 0.0, 0.0});
  }
  visit(State4{0.0, 0.0, 0.0, 0.0});
}

double gap_from(const Vec4& inf, const Vec4& sup) {
  double sigma = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) sigma = std::min(sigma, inf[i] - sup[j]);
  return sigma;
}

}  // namespace

GapReport min_gap_sigma(const PhysParams& p, std::size_t samples) {
  p.validate();
  GapReport rep;
  auto sweep = [&](std::size_t n, Vec4& inf, Vec4& sup) {
    inf.fill(std::numeric_limits<double>::infinity());
    sup.fill(-std::numeric_limits<double>::infinity());
    std::size_t count = 0;
    for_each_disk_point(2.0 * p.kappa, n, [&](const State4& s) {
      const Vec4 lam = eigenvalues(p, s);
      for (int i = 0; i < 4; ++i) {
        inf[i] = std::min(inf[i], lam[i]);
        sup[i] = std::max(sup[i], lam[i]);
      }
      ++count;
    });
    return count;
  };
  Vec4 inf_c, sup_c;
  rep.samples_coarse = sweep(std::max<std::size_t>(samples / 4, 256), inf_c, sup_c);
  rep.sigma_coarse = gap_from(inf_c, sup_c);
  rep.samples = sweep(samples, rep.lambda_inf, rep.lambda_sup);
  rep.sigma = gap_from(rep.lambda_inf, rep.lambda_sup);
  if (!(rep.sigma > 0.0)) {
    std::ostringstream os;
    os << "min_gap_sigma: sigma = " << rep.sigma << " <= 0, kappa too large";
    fail(ErrorCode::OutsideBall, os.str());
  }
  return rep;
}

double empirical_gamma_bound(const PhysParams& p, std::size_t samples) {
  p.validate();
  double gmax = 0.0;
  for_each_disk_point(2.0 * p.kappa, samples, [&](const State4& s) {
    const CouplingCoeffs cc = coupling_coeffs(p, s, Normalization::Regularized);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        gmax = std::max({gmax, std::abs(cc.c[i][k]), std::abs(cc.g1[i][k])});
        for (int m = 0; m < 4; ++m) gmax = std::max(gmax, std::abs(cc.g2[i][k][m]));
      }
  });
  return gmax;
}

}  // namespace elwv
