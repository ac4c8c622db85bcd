#include "elwv/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "elwv/error.hpp"

namespace elwv {

namespace {

double family_speed(const PhysParams& p, int family) {
  switch (family) {
    case 1: return p.c1;
    case 2: return p.c2;
    case 3: return -p.c2;
    default: return -p.c1;
  }
}

}  // namespace

Grid1D window_grid(const PhysParams& p, const DataParams& dp, const ExperimentConfig& cfg, int family,
                   double t_max) {
  const double eta = dp.eta;
  const WindowSpec& w = cfg.window;
  const double dx = eta / (family == 1 ? w.fine_points_per_eta : w.coarse_points_per_eta);
  double lo = eta, hi = 2.0 * eta;
  switch (family) {
    case 1:
      lo -= w.trail_margin * eta;
      hi += w.lead_margin * eta;
      if (cfg.frame == FrameMode::Lab) hi += p.c1 * t_max * 1.02;
      break;
    case 4:
      lo -= w.lead_margin * eta;
      hi += w.trail_margin * eta;
      break;
    default:
      lo -= w.trail_margin * eta;
      hi += w.trail_margin * eta;
      break;
  }
  return Grid1D::covering(lo, hi, dx);
}

ShockExperiment run_shock_experiment(const PhysParams& p, const DataParams& dp, const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  p.validate();
  dp.validate();
  ShockExperiment ex;
  ex.phys = p;
  ex.data_params = dp;
  ex.peak = compute_W0_z0(dp);
  ex.sigma = min_gap_sigma(p, 4000).sigma;
  const double c0 = std::abs(c111_at_rest(p));
  const double t_est = 1.0 / (c0 * ex.peak.W0);
  const double t_max = cfg.t_max > 0.0 ? cfg.t_max : cfg.t_max_factor * t_est;
  const double eta = dp.eta;

  auto run_window = [&](int family, double tmax, bool detect) {
    const Grid1D g = window_grid(p, dp, cfg, family, tmax);
    const DataField data = reconstruct_phi0(dp, p, cfg.mode, g, cfg.bump.active() ? &cfg.bump : nullptr);
    for (const auto& n : data.notices) ex.notices.push_back(n);
    if (family == 1) {
      for (std::size_t i = 0; i < g.n; ++i) {
        const State4 s = data.state(i);
        ex.max_abs_phi0 = std::max(ex.max_abs_phi0, std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3]));
      }
    }
    EvolveConfig ec = cfg.evolve;
    ec.t_max = tmax;
    ec.frame_speed = cfg.frame == FrameMode::Lab ? 0.0 : family_speed(p, family);
    ec.early_time = (cfg.window.trail_margin + 1.5) * eta / ex.sigma;
    if (detect) ec.dense_from = std::min(ec.dense_from, cfg.dense_from_factor * t_est);
    if (cfg.frame == FrameMode::Lab) {
      ec.track_speed = family_speed(p, family);
      ec.track_lo = eta - cfg.window.trail_margin * eta;
      ec.track_hi = 2.0 * eta + cfg.window.lead_margin * eta;
    }
    if (!detect) {
      ec.m_stop_abs = 1e300;
      ec.extend_after_detection = false;
    }
    return std::make_shared<Trajectory>(run(p, ec, data));
  };

  ex.traj[0] = run_window(1, t_max, true);
  const Trajectory& tr1 = *ex.traj[0];
  const SeedLayout seeds = make_seeds(eta, cfg.seeds, cfg.margin_seeds);
  ex.fan1_base = std::make_shared<CharFan>(trace_fan(tr1, p, 1, seeds));
  ShockReport base = detect_shock(*ex.fan1_base, tr1, cfg.analysis);
  if (base.shock && cfg.refine_halfwidth > 0.0) {
    const SeedLayout fine = refine_seeds(seeds, base.z_shock, cfg.refine_halfwidth * eta);
    ex.fans[0] = std::make_shared<CharFan>(trace_fan(tr1, p, 1, fine));
  } else {
    ex.fans[0] = ex.fan1_base;
  }
  ex.report = detect_shock(*ex.fans[0], tr1, cfg.analysis);
  ex.bracket = bracket_check(ex.report, p, ex.peak.W0);
  h2_blowup_integral(*ex.fans[0], ex.report, eta, cfg.analysis);
  ex.dz = dz_rho1(*ex.fans[0], ex.report.shock ? ex.report.T_num : tr1.t_last, ex.peak.z0);

  if (cfg.trace_all_families && cfg.frame == FrameMode::Comoving) {
    for (int f = 2; f <= 4; ++f) {
      ex.traj[f - 1] = run_window(f, tr1.t_last, false);
      ex.fans[f - 1] = std::make_shared<CharFan>(trace_fan(*ex.traj[f - 1], p, f, seeds));
    }
    const auto fp = ex.fan_ptrs();
    family_exclusivity(ex.report, fp);
    std::array<const Trajectory*, 4> tp{ex.traj[0].get(), ex.traj[1].get(), ex.traj[2].get(), ex.traj[3].get()};
    ex.norms = norm_series(tp, fp);
    ex.strips = strip_separation(fp, eta, ex.sigma);
  }
  ex.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ex;
}

}  // namespace elwv
