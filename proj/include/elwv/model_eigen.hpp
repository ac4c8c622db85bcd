#pragma once

#include <array>
#include <cstddef>

namespace elwv {

struct MaterialConstants {
  double gamma11 = 1.0;
  double gamma2 = -0.5;
  double gamma111 = 0.0;
  double gamma12 = 0.0;
};

struct PhysParams {
  double c1 = 2.0;
  double c2 = 1.0;
  double sigma0 = 1.0;
  double sigma1 = -1.0;
  double kappa = 0.01;
  // Only carried along when derived from material constants.
  double sigma2 = 0.0;

  void validate() const;
};

using State4 = std::array<double, 4>;
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

// eps_deg below which the literal family-2/3 normalization is refused.
inline constexpr double kEpsDegenerate = 1e-8;

enum class Normalization { PaperLiteral, Regularized };

PhysParams material_to_phys(const MaterialConstants& m);

// c^1_11 at the rest state; its sign decides the direction of steepening.
double c111_at_rest(const PhysParams& p);

Mat4 matrix_A(const PhysParams& p, const State4& s);

Vec4 eigenvalues(const PhysParams& p, const State4& s);

struct EigenSystem {
  Vec4 lambda{};
  Mat4 rvec{};
  Mat4 lvec{};
  double K = 0.0;
  double N = 0.0;
  bool regularized = false;
};

EigenSystem eigenvectors(const PhysParams& p, const State4& s, Normalization norm);

// Right vectors only; defined for every state in the ball (the literal
// family-2/3 vectors simply vanish at phi2 = 0).
Mat4 right_vectors(const PhysParams& p, const State4& s, Normalization norm);

// dlambda[i][j] = d lambda_i / d phi_j, dr[k][c][j] = d (r_k)_c / d phi_j.
struct EigenGradients {
  EigenSystem sys;
  Mat4 dlambda{};
  std::array<Mat4, 4> dr{};
};

EigenGradients eigen_gradients(const PhysParams& p, const State4& s, Normalization norm);

struct CouplingCoeffs {
  double c[4][4] = {};
  double g1[4][4] = {};
  double g2[4][4][4] = {};
};

CouplingCoeffs coupling_coeffs(const PhysParams& p, const State4& s,
                               Normalization norm = Normalization::Regularized);
CouplingCoeffs coupling_coeffs(const EigenGradients& g);

// One family's slice of CouplingCoeffs, enough to transport that family.
struct CouplingRow {
  double c[4] = {};
  double g1[4] = {};
  double g2[4][4] = {};
};
CouplingRow coupling_row(const EigenGradients& g, int family_index);

double c111_closed_form(const PhysParams& p, const State4& s);
double c222_closed_form(const PhysParams& p, const State4& s);

struct GapReport {
  double sigma = 0.0;
  double sigma_coarse = 0.0;
  std::size_t samples = 0;
  std::size_t samples_coarse = 0;
  Vec4 lambda_inf{};
  Vec4 lambda_sup{};
};

// Halton sample of the (phi1, phi2) disk of radius 2*kappa; the speeds do not
// depend on phi3, phi4.
GapReport min_gap_sigma(const PhysParams& p, std::size_t samples = 20000);

// Largest |coefficient| over the same disk sample.
double empirical_gamma_bound(const PhysParams& p, std::size_t samples = 4000);

// i-th point of the 2D Halton sequence (bases 2, 3) in the unit square.
std::array<double, 2> halton2(std::size_t i);

}  // namespace elwv
