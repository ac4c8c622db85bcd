#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "elwv/grid.hpp"
#include "elwv/initial_data.hpp"
#include "elwv/model_eigen.hpp"

namespace elwv {

struct EvolveConfig {
  double cfl = 0.9;
  // 4th-difference coefficient, scaled by c1 / spacing.
  double dissipation = 0.02;
  // M_stop = m_stop_factor * initial max |d_x phi1| unless m_stop_abs > 0.
  double m_stop_factor = 50.0;
  double m_stop_abs = 0.0;
  double t_max = 20.0;
  // Uniform cadence t_max / snapshots.
  std::size_t snapshots = 1000;
  // Dense cadence (uniform / dense_divisor) once the gradient exceeds this factor.
  double dense_trigger = 10.0;
  std::size_t dense_divisor = 10;
  // Dense cadence also applies from this time on.
  double dense_from = std::numeric_limits<double>::infinity();
  // While t < early_time a snapshot is stored every early_stride steps.
  double early_time = 0.0;
  std::size_t early_stride = 8;
  // Galilean shift of the computational frame.
  double frame_speed = 0.0;
  // Stored window [track_lo, track_hi] in the frame moving at track_speed
  // (NaN: frame speed); empty interval stores the full grid.
  double track_speed = std::numeric_limits<double>::quiet_NaN();
  double track_lo = 0.0;
  double track_hi = 0.0;
  // After detection, continue to (1 + overshoot) * fitted blow-up time.
  bool extend_after_detection = true;
  double overshoot = 0.003;
  // Gradient-fit window in units of the initial gradient.
  double fit_lo = 2.0;
  double fit_hi = 8.0;

  void validate() const;
  double tracking_speed() const { return std::isnan(track_speed) ? frame_speed : track_speed; }
};

enum class StopReason { TimeLimit, GradientExtended, GradientThreshold, BallExit, NonFinite };
const char* stop_reason_name(StopReason r);

// Fields on a grid with two ghost nodes per side; phi[c][i + 2] is node i.
struct StateField {
  Grid1D grid;
  double t = 0.0;
  std::array<std::vector<double>, 4> phi;

  static StateField from(const DataField& d);
  double at(int c, std::size_t i) const { return phi[c][i + 2]; }
};

struct StepWorkspace {
  std::array<std::vector<double>, 4> stage, acc, k;
  // Diagnostics from the first stage of the last step.
  double max_dphi1 = 0.0;
  double max_abs_phi = 0.0;
  double max_speed = 0.0;
};

// Reference speed for CFL: max |lambda(0) - frame_speed|.
double max_relative_speed(const PhysParams& p, double frame_speed);

// One RK4 step; throws CflViolation or OutsideBall.
void step(const PhysParams& p, const EvolveConfig& cfg, StateField& f, double dt, StepWorkspace& ws);

struct Snapshot {
  double t = 0.0;
  // Lab coordinate of the first stored node.
  double origin = 0.0;
  std::size_t count = 0;
  std::array<std::vector<double>, 4> phi;
  std::array<std::vector<double>, 4> w;
};

struct GradientSample {
  double t;
  double max_dphi1;
  double max_abs_phi;
};

struct Decomposition {
  std::array<std::vector<double>, 4> w;
  double residual = 0.0;      // max |d_x Phi - sum w_k r_k|
  double max_gradient = 0.0;  // max |d_x Phi|
};

// w_i = l_i(Phi) . d_x Phi with 4th-order differences and the regularized pair.
Decomposition decompose_field(const PhysParams& p, const Grid1D& grid,
                              const std::array<std::vector<double>, 4>& phi);

class Trajectory {
 public:
  double spacing = 0.0;
  double frame_speed = 0.0;
  double track_speed = 0.0;
  std::vector<Snapshot> snaps;
  std::vector<GradientSample> gradient;
  StopReason stop = StopReason::TimeLimit;
  std::string stop_message;
  double t_detect = std::numeric_limits<double>::quiet_NaN();
  double t_grad_fit = std::numeric_limits<double>::quiet_NaN();
  double t_last = 0.0;
  double initial_gradient = 0.0;
  double m_stop = 0.0;
  std::size_t steps = 0;
  Grid1D grid;

  double t_begin() const { return snaps.front().t; }
  double t_end() const { return snaps.back().t; }
  // Index k with snaps[k].t <= t < snaps[k+1].t (clamped).
  std::size_t interval(double t, std::size_t hint = 0) const;
  // Lab-frame bounds of the stored window at time t.
  std::pair<double, double> bounds(double t) const;

  // Cubic Lagrange in x, linear in t along the tracking frame. Returns false
  // when x falls outside the stored window (values then use the edge node).
  bool sample(double x, double t, State4& phi, Vec4& w, std::size_t& hint) const;
};

// Fitted blow-up time of 1/max|d_x phi1| over samples within [lo, hi] * G0.
double fit_gradient_blowup(const std::vector<GradientSample>& g, double g0, double lo, double hi);

Trajectory run(const PhysParams& p, const EvolveConfig& cfg, const DataField& data);

}  // namespace elwv
