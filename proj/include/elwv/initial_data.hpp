#pragma once

#include <array>
#include <string>
#include <vector>

#include "elwv/grid.hpp"
#include "elwv/model_eigen.hpp"
#include "elwv/sobolev.hpp"

namespace elwv {

struct DataParams {
  double theta = 0.1;
  double alpha = 0.25;
  double delta = 0.6;
  double eta = 0.05;

  void validate() const;
};

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);
// Radial profile in units of eta: 0 outside [1, 2], 1 on [6/5, 9/5].
double chi(double y);
// Transverse profile: 1 for |y| <= 1/4, 0 for |y| >= 1/2.
double psi(double y);

// Optional additive smooth bump, in units of eta, scaled by theta.
struct BumpPerturbation {
  double amplitude = 0.0;
  double center = 1.5;
  double width = 0.2;
  int family = 1;

  bool active() const { return amplitude != 0.0; }
  void validate() const;
};

// family is 1..4.
double seed_w(const DataParams& dp, double x, double x2, int family,
              const BumpPerturbation* bump = nullptr);

struct Peak {
  double W0 = 0.0;
  double z0 = 0.0;
};

Peak compute_W0_z0(const DataParams& dp);

struct DataField {
  Grid1D grid;
  std::array<std::vector<double>, 4> w;
  std::array<std::vector<double>, 4> phi;
  double W0 = 0.0;
  double z0 = 0.0;
  // -1 when c^1_11(0) > 0 forced a sign flip of the family-1 seed.
  double family1_sign = 1.0;
  Normalization mode = Normalization::Regularized;
  std::vector<std::string> notices;

  State4 state(std::size_t i) const { return {phi[0][i], phi[1][i], phi[2][i], phi[3][i]}; }
};

// Integrates dPhi/dx = sum_k w_k r_k(Phi) from Phi(eta) = 0 across the support.
DataField reconstruct_phi0(const DataParams& dp, const PhysParams& p, Normalization mode,
                           const Grid1D& grid, const BumpPerturbation* bump = nullptr,
                           double tol = 1e-10);

// Half-width in x2 of the transverse cutoff support over [eta, 2 eta].
double seed_x2_halfwidth(const DataParams& dp);

// 2D sample of one seed; at least points_across nodes over the support per
// axis, box padded by pad (rounded up to a power of two per axis).
SpectralGrid sample_seed_2d(const DataParams& dp, int family, std::size_t points_across,
                            double pad = 4.0);

}  // namespace elwv
