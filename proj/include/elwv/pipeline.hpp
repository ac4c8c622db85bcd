#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "elwv/characteristics.hpp"
#include "elwv/evolve1d.hpp"
#include "elwv/initial_data.hpp"
#include "elwv/model_eigen.hpp"
#include "elwv/shock_analysis.hpp"

namespace elwv {

enum class FrameMode { Comoving, Lab };

struct WindowSpec {
  // Nodes per eta in the family-1 window and in the other windows.
  double fine_points_per_eta = 400.0;
  double coarse_points_per_eta = 50.0;
  // Margins around [eta, 2 eta] in units of eta.
  double lead_margin = 0.5;
  double trail_margin = 1.5;
};

struct ExperimentConfig {
  WindowSpec window;
  EvolveConfig evolve;
  AnalysisParams analysis;
  Normalization mode = Normalization::Regularized;
  FrameMode frame = FrameMode::Comoving;
  std::size_t seeds = 512;
  std::size_t margin_seeds = 64;
  // Seed density doubled within this distance (units of eta) of z_shock.
  double refine_halfwidth = 0.1;
  bool trace_all_families = true;
  // 0: derived from the analytic shock time.
  double t_max = 0.0;
  double t_max_factor = 1.15;
  // Dense snapshot cadence from this fraction of the analytic shock time.
  double dense_from_factor = 0.95;
  BumpPerturbation bump;
};

struct ShockExperiment {
  DataParams data_params;
  PhysParams phys;
  Peak peak;
  double sigma = 0.0;
  // Index k holds the window comoving with family k + 1.
  std::array<std::shared_ptr<Trajectory>, 4> traj;
  std::array<std::shared_ptr<CharFan>, 4> fans;
  std::shared_ptr<CharFan> fan1_base;  // before the z0 refinement pass
  ShockReport report;
  BracketVerdict bracket;
  NormSeries norms;
  StripGeometry strips;
  DzRho1 dz;
  double max_abs_phi0 = 0.0;
  double recon_residual = 0.0;
  std::vector<std::string> notices;
  double seconds = 0.0;

  std::array<const CharFan*, 4> fan_ptrs() const {
    return {fans[0].get(), fans[1].get(), fans[2].get(), fans[3].get()};
  }
};

// Window for family k (1..4): frame speed, grid, and data reconstructed on it.
Grid1D window_grid(const PhysParams& p, const DataParams& dp, const ExperimentConfig& cfg, int family,
                   double t_max);

ShockExperiment run_shock_experiment(const PhysParams& p, const DataParams& dp, const ExperimentConfig& cfg);

}  // namespace elwv
