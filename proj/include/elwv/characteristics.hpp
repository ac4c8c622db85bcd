#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "elwv/evolve1d.hpp"
#include "elwv/model_eigen.hpp"

namespace elwv {

struct SeedLayout {
  std::vector<double> z;
  // z[core_begin] = eta and z[core_end - 1] = 2 eta.
  std::size_t core_begin = 0;
  std::size_t core_end = 0;
};

SeedLayout make_seeds(double eta, std::size_t core = 512, std::size_t margin = 64);
// Adds midpoints between consecutive seeds inside [center - halfwidth, center + halfwidth].
SeedLayout refine_seeds(const SeedLayout& s, double center, double halfwidth);
// Uniform doubling of the seed density.
SeedLayout double_seeds(const SeedLayout& s);

struct CharFan {
  int family = 1;  // 1..4
  SeedLayout seeds;
  std::vector<double> t;
  // Row-major [ti * nz + iz].
  std::vector<double> X, rho, v, speed;
  double max_tracer_cfl = 0.0;
  std::vector<std::string> warnings;

  std::size_t nz() const { return seeds.z.size(); }
  std::size_t nt() const { return t.size(); }
  std::size_t at(std::size_t ti, std::size_t iz) const { return ti * nz() + iz; }
  double w(std::size_t ti, std::size_t iz) const { return v[at(ti, iz)] / rho[at(ti, iz)]; }
  // Cubic Hermite in t from stored positions and speeds; linear outside.
  double X_at(std::size_t iz, double time) const;
  // Linear in z between seeds.
  double X_at_z(double z, double time) const;
  // (X(z+) - X(z-)) / (z+ - z-) across the neighbours of seed iz.
  double rho_from_X(std::size_t ti, std::size_t iz) const;
};

CharFan trace_fan(const Trajectory& traj, const PhysParams& p, int family, const SeedLayout& seeds,
                  std::size_t substeps = 4);

struct Intersection {
  double x = 0.0;
  double t = 0.0;
};

Intersection bichar_intersection(const CharFan& fi, const CharFan& fj, double yi, double yj);

struct NormSeries {
  std::vector<double> t;
  std::vector<double> S, J, V, U;
};

// fans[i] is family i + 1; V and U use every stored snapshot of every trajectory.
NormSeries norm_series(std::span<const Trajectory* const> trajs, const std::array<const CharFan*, 4>& fans);

struct StripGeometry {
  std::vector<double> t;
  std::array<std::vector<double>, 4> left, right;
  double t_sep = 0.0;
  double t0_analytic = 0.0;
  double sigma = 0.0;
};

StripGeometry strip_separation(const std::array<const CharFan*, 4>& fans, double eta, double sigma);

struct DzRho1 {
  std::vector<double> t;
  std::vector<double> sup_abs;  // over core seeds, per time
  std::vector<double> at_z0;
  std::vector<double> rho_z0;
  double sup_overall = 0.0;
  double z_at_sup = 0.0;
  bool under_resolved = false;
  std::vector<std::string> warnings;
};

DzRho1 dz_rho1(const CharFan& fan1, double t_until, double z0);

}  // namespace elwv
