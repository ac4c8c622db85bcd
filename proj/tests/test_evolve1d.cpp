#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "elwv/error.hpp"
#include "elwv/evolve1d.hpp"

using namespace elwv;

namespace {

PhysParams desk() {
  PhysParams p;
  p.kappa = 0.025;
  return p;
}

DataField field(std::size_t n, const std::function<State4(double)>& phi0) {
  DataField d;
  d.grid = {0.0, 1.0, n};
  for (int c = 0; c < 4; ++c) {
    d.phi[c].assign(n, 0.0);
    d.w[c].assign(n, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const State4 s = phi0(d.grid.x(i));
    for (int c = 0; c < 4; ++c) d.phi[c][i] = s[c];
  }
  return d;
}

double bump(double x, double x0, double w) { return std::exp(-std::pow((x - x0) / w, 2)); }

// Right-moving family at rest: phi3 = -c1 phi1.
State4 right_mover(double x, double eps) {
  const double g = eps * bump(x, 0.4, 0.05);
  return {g, 0.0, -2.0 * g, 0.0};
}

EvolveConfig quick(double t_max) {
  EvolveConfig c;
  c.t_max = t_max;
  c.snapshots = 4;
  c.extend_after_detection = false;
  return c;
}

}  // namespace

TEST(Evolve1D, UniformStateIsStationary) {
  const DataField d = field(101, [](double) { return State4{0.003, 0.001, 0.002, -0.001}; });
  const Trajectory tr = run(desk(), quick(0.1), d);
  for (const Snapshot& s : tr.snaps)
    for (int c = 0; c < 4; ++c)
      for (double v : s.phi[c]) EXPECT_EQ(v, d.phi[c][0]);
}

TEST(Evolve1D, SmallPulseTranslatesAtTheFastSpeed) {
  const double eps = 1e-7, t = 0.2;
  const DataField d = field(801, [&](double x) { return right_mover(x, eps); });
  const Trajectory tr = run(desk(), quick(t), d);
  const Snapshot& s = tr.snaps.back();
  ASSERT_NEAR(s.t, t, 1e-12);
  double err = 0.0;
  for (std::size_t i = 0; i < s.count; ++i) {
    const double x = s.origin + tr.spacing * static_cast<double>(i);
    const State4 ex = right_mover(x - 2.0 * t, eps);
    err = std::max({err, std::abs(s.phi[0][i] - ex[0]), std::abs(s.phi[2][i] - ex[2])});
  }
  EXPECT_LT(err, 1e-3 * eps);
}

TEST(Evolve1D, SelfConvergenceAtLeastThirdOrder) {
  // Nonlinear steepening pulse well before its crossing time.
  auto final_state = [](std::size_t n) {
    const DataField d = field(n, [](double x) { return right_mover(x, 0.008); });
    EvolveConfig c = quick(0.15);
    c.snapshots = 1;
    return run(desk(), c, d).snaps.back();
  };
  const Snapshot a = final_state(201), b = final_state(401), f = final_state(801);
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < a.count; ++i)
    for (int c = 0; c < 4; ++c) {
      e1 = std::max(e1, std::abs(a.phi[c][i] - b.phi[c][2 * i]));
      e2 = std::max(e2, std::abs(b.phi[c][2 * i] - f.phi[c][4 * i]));
    }
  EXPECT_GE(std::log2(e1 / e2), 3.0) << e1 << " " << e2;
}

TEST(Evolve1D, ComovingFrameAgreesWithLabFrame) {
  const DataField d = field(801, [](double x) { return right_mover(x, 0.008); });
  EvolveConfig lab = quick(0.15), mov = quick(0.15);
  mov.frame_speed = 2.0;
  const Snapshot a = run(desk(), lab, d).snaps.back();
  const Trajectory tm = run(desk(), mov, d);
  const Snapshot& b = tm.snaps.back();
  // The moving grid has slid by 0.3 = 240 cells.
  EXPECT_NEAR(b.origin, 0.3, 1e-12);
  double err = 0.0, peak = 0.0;
  for (std::size_t i = 0; i + 240 < a.count; ++i) {
    err = std::max(err, std::abs(a.phi[0][i + 240] - b.phi[0][i]));
    peak = std::max(peak, std::abs(a.phi[0][i + 240]));
  }
  EXPECT_LT(err, 1e-4 * peak);
}

TEST(Evolve1D, StepRejectsCflViolation) {
  const PhysParams p = desk();
  DataField d = field(101, [](double x) { return right_mover(x, 0.001); });
  StateField f = StateField::from(d);
  StepWorkspace ws;
  EvolveConfig c;
  try {
    step(p, c, f, 2.0 * d.grid.spacing() / 2.0, ws);
    FAIL() << "expected CflViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CflViolation);
  }
}

TEST(Evolve1D, InitialDataOutsideTheBallIsRejected) {
  PhysParams p = desk();
  p.kappa = 0.004;
  const DataField d = field(201, [](double x) { return right_mover(x, 0.01); });
  try {
    run(p, quick(0.1), d);
    FAIL() << "expected OutsideBall";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutsideBall);
  }
}

TEST(Evolve1D, GradientThresholdEndsTheRunNearTheCrossing) {
  PhysParams p = desk();
  p.kappa = 0.1;
  // Crossing near 1 / (0.5 max|d_x phi1|), about 4; the frame keeps the pulse on the grid.
  const DataField d = field(1601, [](double x) { return right_mover(x, 0.03); });
  EvolveConfig c = quick(6.0);
  c.frame_speed = 2.0;
  c.m_stop_factor = 20.0;
  const Trajectory tr = run(p, c, d);
  // Nearly a simple wave: crossing at 1 / max(-d/dx sqrt(4 + 2 u0)).
  double rate = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = 0.2 + 0.4 * i / 100000.0, h = 1e-6;
    const double l1 = std::sqrt(4.0 + 2.0 * right_mover(x + h, 0.03)[0]);
    const double l0 = std::sqrt(4.0 + 2.0 * right_mover(x - h, 0.03)[0]);
    rate = std::max(rate, -(l1 - l0) / (2 * h));
  }
  const double T = 1.0 / rate;
  EXPECT_EQ(tr.stop, StopReason::GradientThreshold);
  EXPECT_GT(tr.t_detect, T);
  // dx = 1/1600 leaves the front a dozen cells wide in the fit window.
  EXPECT_NEAR(tr.t_grad_fit, T, 0.1 * T);
}

TEST(Evolve1D, BlowupFitIsExactOnInverseLinearGrowth) {
  std::vector<GradientSample> g;
  const double T = 2.5, A = 0.7;
  for (int i = 0; i < 200; ++i) {
    const double t = 2.5 * i / 200.0;
    g.push_back({t, A / (T - t), 0.0});
  }
  const double g0 = A / T;
  EXPECT_NEAR(fit_gradient_blowup(g, g0, 2.0, 8.0), T, 1e-12);
  EXPECT_TRUE(std::isnan(fit_gradient_blowup(g, g0, 1e5, 1e6)));
}

TEST(Evolve1D, DecompositionInvertsAConstantGradientField) {
  const PhysParams p = desk();
  // Phi = x * r_1(0) * eps is nearly a pure family-1 ramp at small amplitude.
  const DataField d = field(201, [](double x) { return State4{1e-6 * x, 0.0, -2e-6 * x, 0.0}; });
  const Decomposition dec = decompose_field(p, d.grid, d.phi);
  EXPECT_LT(dec.residual, 1e-15);
  for (std::size_t i = 2; i + 2 < d.grid.n; ++i) {
    EXPECT_NEAR(std::abs(dec.w[1][i]) + std::abs(dec.w[2][i]) + std::abs(dec.w[3][i]), 0.0, 1e-11);
    EXPECT_GT(std::abs(dec.w[0][i]), 1e-7);
  }
}

TEST(Evolve1D, TrajectorySampleInterpolatesCubicsExactly) {
  // A cubic-in-x, time-independent field must be reproduced between nodes.
  const DataField d = field(101, [](double x) {
    const double u = 1e-3 * (x * x * x - 0.5 * x * x + 0.1 * x);
    return State4{u, 0.0, 0.0, 0.0};
  });
  Trajectory tr;
  tr.spacing = d.grid.spacing();
  tr.grid = d.grid;
  for (double t : {0.0, 1.0}) {
    Snapshot s;
    s.t = t;
    s.origin = 0.0;
    s.count = d.grid.n;
    s.phi = d.phi;
    s.w = d.w;
    tr.snaps.push_back(s);
  }
  std::size_t hint = 0;
  State4 phi;
  Vec4 w;
  for (double x : {0.123, 0.5051, 0.777}) {
    ASSERT_TRUE(tr.sample(x, 0.4, phi, w, hint));
    EXPECT_NEAR(phi[0], 1e-3 * (x * x * x - 0.5 * x * x + 0.1 * x), 1e-17);
  }
  EXPECT_FALSE(tr.sample(1.5, 0.4, phi, w, hint));
}

TEST(Evolve1D, ConfigValidation) {
  EvolveConfig c;
  c.cfl = 1.2;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.fit_lo = 9.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.dissipation = -1.0;
  EXPECT_THROW(c.validate(), Error);
}
