#include "elwv/evolve1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elwv/error.hpp"

namespace elwv {

void EvolveConfig::validate() const {
  std::ostringstream os;
  if (!(cfl > 0.0 && cfl < 1.0)) os << "need cfl in (0,1); ";
  if (!(dissipation >= 0.0)) os << "need dissipation >= 0; ";
  if (!(t_max > 0.0)) os << "need t_max > 0; ";
  if (snapshots < 1) os << "need snapshots >= 1; ";
  if (dense_divisor < 1 || early_stride < 1) os << "need dense_divisor, early_stride >= 1; ";
  if (!(m_stop_factor > 1.0) && !(m_stop_abs > 0.0)) os << "need m_stop_factor > 1; ";
  if (!(overshoot >= 0.0)) os << "need overshoot >= 0; ";
  if (!(fit_hi > fit_lo && fit_lo > 0.0)) os << "need 0 < fit_lo < fit_hi; ";
  const std::string msg = os.str();
  if (!msg.empty()) fail(ErrorCode::InvalidArgument, "EvolveConfig: " + msg);
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::TimeLimit: return "time-limit";
    case StopReason::GradientExtended: return "gradient-threshold-extended";
    case StopReason::GradientThreshold: return "gradient-threshold";
    case StopReason::BallExit: return "ball-exit";
    case StopReason::NonFinite: return "non-finite";
  }
  return "unknown";
}

StateField StateField::from(const DataField& d) {
  StateField f;
  f.grid = d.grid;
  f.t = 0.0;
  for (int c = 0; c < 4; ++c) {
    f.phi[c].assign(d.grid.n + 4, 0.0);
    std::copy(d.phi[c].begin(), d.phi[c].end(), f.phi[c].begin() + 2);
  }
  return f;
}

double max_relative_speed(const PhysParams& p, double frame_speed) {
  return std::max(std::abs(p.c1 - frame_speed), std::abs(-p.c1 - frame_speed));
}

namespace {

inline void fill_ghosts(std::vector<double>& f, std::size_t n) {
  f[0] = f[1] = f[2];
  f[n + 2] = f[n + 3] = f[n + 1];
}

struct Diag {
  double max_d0 = 0.0;
  double max_phi2 = 0.0;
  double max_speed = 0.0;
};

// out = -A(Phi) d_x Phi + s d_x Phi - kd * delta^4 Phi, node-local.
template <bool WithDiag>
void rhs(const PhysParams& p, double s, double kd, double inv12dx,
         std::array<std::vector<double>, 4>& in, std::array<std::vector<double>, 4>& out,
         std::size_t n, Diag* diag) {
  for (int c = 0; c < 4; ++c) fill_ghosts(in[c], n);
  const double c1sq = p.c1 * p.c1, c2sq = p.c2 * p.c2;
  const double ts0 = 2.0 * p.sigma0, ts1 = 2.0 * p.sigma1;
  const double* __restrict f0 = in[0].data();
  const double* __restrict f1 = in[1].data();
  const double* __restrict f2 = in[2].data();
  const double* __restrict f3 = in[3].data();
  double* __restrict o0 = out[0].data();
  double* __restrict o1 = out[1].data();
  double* __restrict o2 = out[2].data();
  double* __restrict o3 = out[3].data();
  double md0 = 0.0, mphi = 0.0, mspeed = 0.0, nan_probe = 0.0;
#pragma GCC ivdep
  for (std::size_t i = 2; i < n + 2; ++i) {
    const double d0 = (f0[i - 2] - 8.0 * f0[i - 1] + 8.0 * f0[i + 1] - f0[i + 2]) * inv12dx;
    const double d1 = (f1[i - 2] - 8.0 * f1[i - 1] + 8.0 * f1[i + 1] - f1[i + 2]) * inv12dx;
    const double d2 = (f2[i - 2] - 8.0 * f2[i - 1] + 8.0 * f2[i + 1] - f2[i + 2]) * inv12dx;
    const double d3 = (f3[i - 2] - 8.0 * f3[i - 1] + 8.0 * f3[i + 1] - f3[i + 2]) * inv12dx;
    const double q0 = f0[i - 2] - 4.0 * f0[i - 1] + 6.0 * f0[i] - 4.0 * f0[i + 1] + f0[i + 2];
    const double q1 = f1[i - 2] - 4.0 * f1[i - 1] + 6.0 * f1[i] - 4.0 * f1[i + 1] + f1[i + 2];
    const double q2 = f2[i - 2] - 4.0 * f2[i - 1] + 6.0 * f2[i] - 4.0 * f2[i + 1] + f2[i + 2];
    const double q3 = f3[i - 2] - 4.0 * f3[i - 1] + 6.0 * f3[i] - 4.0 * f3[i + 1] + f3[i + 2];
    const double a = c1sq + ts0 * f0[i];
    const double b = c2sq + ts1 * f0[i];
    const double c = ts1 * f1[i];
    o0[i] = d2 + s * d0 - kd * q0;
    o1[i] = d3 + s * d1 - kd * q1;
    o2[i] = a * d0 + c * d1 + s * d2 - kd * q2;
    o3[i] = c * d0 + b * d1 + s * d3 - kd * q3;
    if constexpr (WithDiag) {
      md0 = std::max(md0, std::abs(d0));
      const double nrm = f0[i] * f0[i] + f1[i] * f1[i] + f2[i] * f2[i] + f3[i] * f3[i];
      mphi = std::max(mphi, nrm);
      nan_probe += nrm;
      const double D = a - b;
      const double R = std::sqrt(D * D + 4.0 * c * c);
      const double l1 = std::sqrt(0.5 * (a + b + R));
      mspeed = std::max(mspeed, std::max(std::abs(l1 - s), std::abs(l1 + s)));
    }
  }
  if constexpr (WithDiag) {
    diag->max_d0 = md0;
    // A NaN anywhere poisons the sum; std::max alone would drop it.
    diag->max_phi2 = std::isfinite(nan_probe) ? mphi : nan_probe;
    diag->max_speed = mspeed;
  }
}

}  // namespace

void step(const PhysParams& p, const EvolveConfig& cfg, StateField& f, double dt, StepWorkspace& ws) {
  const std::size_t n = f.grid.n;
  const std::size_t m = n + 4;
  for (int c = 0; c < 4; ++c) {
    if (ws.stage[c].size() != m) {
      ws.stage[c].assign(m, 0.0);
      ws.acc[c].assign(m, 0.0);
      ws.k[c].assign(m, 0.0);
    }
  }
  const double dx = f.grid.spacing();
  const double inv12dx = 1.0 / (12.0 * dx);
  const double s = cfg.frame_speed;
  const double kd = cfg.dissipation * p.c1 / dx;

  Diag diag;
  rhs<true>(p, s, kd, inv12dx, f.phi, ws.k, n, &diag);
  ws.max_dphi1 = diag.max_d0;
  ws.max_abs_phi = std::sqrt(diag.max_phi2);
  ws.max_speed = diag.max_speed;
  if (!std::isfinite(ws.max_abs_phi) || !std::isfinite(diag.max_d0))
    fail(ErrorCode::OutsideBall, "step: non-finite state");
  if (!(ws.max_abs_phi < 2.0 * p.kappa)) {
    std::ostringstream os;
    os << "step: |Phi| = " << ws.max_abs_phi << " left the ball 2*kappa = " << 2.0 * p.kappa;
    fail(ErrorCode::OutsideBall, os.str());
  }
  if (dt * diag.max_speed > cfg.cfl * dx * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "step: dt = " << dt << " exceeds cfl*dx/max|lambda-s| = " << cfg.cfl * dx / diag.max_speed;
    fail(ErrorCode::CflViolation, os.str());
  }

  const double h2 = 0.5 * dt, h3 = dt / 3.0, h6 = dt / 6.0;
  for (int c = 0; c < 4; ++c) {
    const double* __restrict y = f.phi[c].data();
    const double* __restrict k = ws.k[c].data();
    double* __restrict acc = ws.acc[c].data();
    double* __restrict st = ws.stage[c].data();
    for (std::size_t i = 2; i < n + 2; ++i) {
      acc[i] = y[i] + h6 * k[i];
      st[i] = y[i] + h2 * k[i];
    }
  }
  rhs<false>(p, s, kd, inv12dx, ws.stage, ws.k, n, nullptr);
  for (int c = 0; c < 4; ++c) {
    const double* __restrict y = f.phi[c].data();
    const double* __restrict k = ws.k[c].data();
    double* __restrict acc = ws.acc[c].data();
    double* __restrict st = ws.stage[c].data();
    for (std::size_t i = 2; i < n + 2; ++i) {
      acc[i] += h3 * k[i];
      st[i] = y[i] + h2 * k[i];
    }
  }
  rhs<false>(p, s, kd, inv12dx, ws.stage, ws.k, n, nullptr);
  for (int c = 0; c < 4; ++c) {
    const double* __restrict y = f.phi[c].data();
    const double* __restrict k = ws.k[c].data();
    double* __restrict acc = ws.acc[c].data();
    double* __restrict st = ws.stage[c].data();
    for (std::size_t i = 2; i < n + 2; ++i) {
      acc[i] += h3 * k[i];
      st[i] = y[i] + dt * k[i];
    }
  }
  rhs<false>(p, s, kd, inv12dx, ws.stage, ws.k, n, nullptr);
  for (int c = 0; c < 4; ++c) {
    const double* k = ws.k[c].data();
    double* acc = ws.acc[c].data();
    double* y = f.phi[c].data();
    for (std::size_t i = 2; i < n + 2; ++i) y[i] = acc[i] + h6 * k[i];
  }
  f.t += dt;
}

Decomposition decompose_field(const PhysParams& p, const Grid1D& grid,
                              const std::array<std::vector<double>, 4>& phi) {
  const std::size_t n = grid.n;
  for (int c = 0; c < 4; ++c)
    if (phi[c].size() != n) fail(ErrorCode::InvalidArgument, "decompose_field: size mismatch");
  const double inv12dx = 1.0 / (12.0 * grid.spacing());
  Decomposition out;
  for (int c = 0; c < 4; ++c) out.w[c].assign(n, 0.0);
  auto at = [&](int c, long i) {
    i = std::clamp<long>(i, 0, static_cast<long>(n) - 1);
    return phi[c][static_cast<std::size_t>(i)];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const long j = static_cast<long>(i);
    Vec4 d;
    double dmax = 0.0;
    for (int c = 0; c < 4; ++c) {
      d[c] = (at(c, j - 2) - 8.0 * at(c, j - 1) + 8.0 * at(c, j + 1) - at(c, j + 2)) * inv12dx;
      dmax = std::max(dmax, std::abs(d[c]));
    }
    out.max_gradient = std::max(out.max_gradient, dmax);
    if (dmax == 0.0) continue;
    const State4 s{phi[0][i], phi[1][i], phi[2][i], phi[3][i]};
    const EigenSystem sys = eigenvectors(p, s, Normalization::Regularized);
    Vec4 rec{};
    for (int k = 0; k < 4; ++k) {
      double wk = 0.0;
      for (int c = 0; c < 4; ++c) wk += sys.lvec[k][c] * d[c];
      out.w[k][i] = wk;
      for (int c = 0; c < 4; ++c) rec[c] += wk * sys.rvec[k][c];
    }
    for (int c = 0; c < 4; ++c) out.residual = std::max(out.residual, std::abs(rec[c] - d[c]));
  }
  return out;
}

std::size_t Trajectory::interval(double t, std::size_t hint) const {
  const std::size_t n = snaps.size();
  if (n < 2 || t <= snaps.front().t) return 0;
  if (t >= snaps.back().t) return n - 2;
  if (hint < n - 1 && snaps[hint].t <= t && t < snaps[hint + 1].t) return hint;
  if (hint + 2 < n && snaps[hint + 1].t <= t && t < snaps[hint + 2].t) return hint + 1;
  auto it = std::upper_bound(snaps.begin(), snaps.end(), t,
                             [](double v, const Snapshot& s) { return v < s.t; });
  return static_cast<std::size_t>(it - snaps.begin()) - 1;
}

std::pair<double, double> Trajectory::bounds(double t) const {
  std::size_t k = interval(t);
  const Snapshot& s = snaps[k];
  const double shift = track_speed * (t - s.t);
  return {s.origin + shift, s.origin + shift + spacing * static_cast<double>(s.count - 1)};
}

namespace {

// Returns false when x lies outside the stored nodes.
inline bool eval_snapshot(const Snapshot& s, double dx, double x, double* out) {
  const long cnt = static_cast<long>(s.count);
  const double raw = (x - s.origin) / dx;
  const bool inside = raw >= -0.5 && raw <= static_cast<double>(cnt) - 0.5;
  if (cnt < 4) {
    const long i = std::clamp<long>(std::lround(raw), 0, cnt - 1);
    for (int c = 0; c < 4; ++c) {
      out[c] = s.phi[c][static_cast<std::size_t>(i)];
      out[4 + c] = s.w[c][static_cast<std::size_t>(i)];
    }
    return inside;
  }
  const double u = std::clamp(raw, 0.0, static_cast<double>(cnt - 1));
  // Stencil base..base+3, f measured from node base+1.
  const long base = std::clamp<long>(static_cast<long>(std::floor(u)) - 1, 0, cnt - 4);
  const double f = u - static_cast<double>(base + 1);
  const double wm = -f * (f - 1.0) * (f - 2.0) / 6.0;
  const double w0 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
  const double w1 = -(f + 1.0) * f * (f - 2.0) / 2.0;
  const double w2 = (f + 1.0) * f * (f - 1.0) / 6.0;
  const auto b = static_cast<std::size_t>(base);
  for (int c = 0; c < 4; ++c) {
    const double* p = s.phi[c].data() + b;
    out[c] = wm * p[0] + w0 * p[1] + w1 * p[2] + w2 * p[3];
    const double* q = s.w[c].data() + b;
    out[4 + c] = wm * q[0] + w0 * q[1] + w1 * q[2] + w2 * q[3];
  }
  return inside;
}

}  // namespace

bool Trajectory::sample(double x, double t, State4& phi, Vec4& w, std::size_t& hint) const {
  const std::size_t k = interval(t, hint);
  hint = k;
  double a[8], b[8];
  if (snaps.size() == 1) {
    const bool ok = eval_snapshot(snaps[0], spacing, x + track_speed * (snaps[0].t - t), a);
    for (int c = 0; c < 4; ++c) { phi[c] = a[c]; w[c] = a[4 + c]; }
    return ok;
  }
  const Snapshot& s0 = snaps[k];
  const Snapshot& s1 = snaps[k + 1];
  const double th = std::clamp((t - s0.t) / (s1.t - s0.t), 0.0, 1.0);
  const bool ok0 = eval_snapshot(s0, spacing, x + track_speed * (s0.t - t), a);
  const bool ok1 = eval_snapshot(s1, spacing, x + track_speed * (s1.t - t), b);
  for (int c = 0; c < 4; ++c) {
    phi[c] = (1.0 - th) * a[c] + th * b[c];
    w[c] = (1.0 - th) * a[4 + c] + th * b[4 + c];
  }
  return ok0 && ok1;
}

double fit_gradient_blowup(const std::vector<GradientSample>& g, double g0, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& s : g) {
    if (s.max_dphi1 < lo * g0 || s.max_dphi1 > hi * g0) continue;
    const double y = 1.0 / s.max_dphi1;
    sx += s.t; sy += y; sxx += s.t * s.t; sxy += s.t * y;
    ++n;
  }
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double slope = (dn * sxy - sx * sy) / den;
  const double icpt = (sy - slope * sx) / dn;
  if (!(slope < 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return -icpt / slope;
}

namespace {

void store_snapshot(const PhysParams& p, const EvolveConfig& cfg, const StateField& f, Trajectory& traj) {
  const std::size_t n = f.grid.n;
  std::array<std::vector<double>, 4> phi;
  for (int c = 0; c < 4; ++c) phi[c].assign(f.phi[c].begin() + 2, f.phi[c].begin() + 2 + static_cast<long>(n));
  const Decomposition dec = decompose_field(p, f.grid, phi);
  const double dx = f.grid.spacing();
  const double lab0 = f.grid.x_min + cfg.frame_speed * f.t;
  std::size_t lo = 0, hi = n - 1;
  if (cfg.track_hi > cfg.track_lo) {
    const double ts = cfg.tracking_speed();
    const double a = cfg.track_lo + ts * f.t - 3.0 * dx;
    const double b = cfg.track_hi + ts * f.t + 3.0 * dx;
    const double ua = std::floor((a - lab0) / dx), ub = std::ceil((b - lab0) / dx);
    lo = static_cast<std::size_t>(std::clamp(ua, 0.0, static_cast<double>(n - 1)));
    hi = static_cast<std::size_t>(std::clamp(ub, 0.0, static_cast<double>(n - 1)));
  }
  Snapshot s;
  s.t = f.t;
  s.origin = lab0 + dx * static_cast<double>(lo);
  s.count = hi - lo + 1;
  for (int c = 0; c < 4; ++c) {
    s.phi[c].assign(phi[c].begin() + static_cast<long>(lo), phi[c].begin() + static_cast<long>(hi) + 1);
    s.w[c].assign(dec.w[c].begin() + static_cast<long>(lo), dec.w[c].begin() + static_cast<long>(hi) + 1);
  }
  traj.snaps.push_back(std::move(s));
}

}  // namespace

Trajectory run(const PhysParams& p, const EvolveConfig& cfg, const DataField& data) {
  p.validate();
  cfg.validate();
  data.grid.validate();
  StateField f = StateField::from(data);
  Trajectory traj;
  traj.grid = data.grid;
  traj.spacing = data.grid.spacing();
  traj.frame_speed = cfg.frame_speed;
  traj.track_speed = cfg.tracking_speed();
  const double dx = traj.spacing;

  StepWorkspace ws;
  // Initial diagnostics without advancing.
  {
    StateField probe = f;
    step(p, cfg, probe, 0.0, ws);
  }
  traj.initial_gradient = ws.max_dphi1;
  traj.m_stop = cfg.m_stop_abs > 0.0 ? cfg.m_stop_abs : cfg.m_stop_factor * traj.initial_gradient;
  double speed = std::max(ws.max_speed, max_relative_speed(p, cfg.frame_speed));
  const double dt_nominal = cfg.cfl * dx / max_relative_speed(p, cfg.frame_speed);

  const double uniform = cfg.t_max / static_cast<double>(cfg.snapshots);
  double t_target = cfg.t_max;
  bool detected = false, dense = false;
  store_snapshot(p, cfg, f, traj);
  auto next_snapshot_time = [&](double t) {
    double d = uniform;
    if (dense) d = uniform / static_cast<double>(cfg.dense_divisor);
    else if (t < cfg.early_time) d = std::min(uniform, static_cast<double>(cfg.early_stride) * dt_nominal);
    return std::min(t + d, t_target);
  };
  double t_next = next_snapshot_time(0.0);

  while (f.t < t_target * (1.0 - 1e-14)) {
    double dt = cfg.cfl * dx / (speed * 1.0005);
    bool hits = false;
    if (f.t + dt >= t_next * (1.0 - 1e-13)) {
      dt = t_next - f.t;
      hits = true;
    }
    try {
      step(p, cfg, f, dt, ws);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CflViolation) {
        speed = ws.max_speed;
        continue;
      }
      traj.stop = std::isfinite(ws.max_abs_phi) ? StopReason::BallExit : StopReason::NonFinite;
      traj.stop_message = e.what();
      break;
    }
    ++traj.steps;
    speed = std::max(ws.max_speed, max_relative_speed(p, cfg.frame_speed));
    // Diagnostics describe the state at the start of the step just taken.
    traj.gradient.push_back({f.t - dt, ws.max_dphi1, ws.max_abs_phi});
    const double g = ws.max_dphi1;
    if (!dense && (g >= cfg.dense_trigger * traj.initial_gradient || f.t >= cfg.dense_from)) dense = true;
    if (!detected && traj.m_stop > 0.0 && g >= traj.m_stop) {
      detected = true;
      traj.t_detect = f.t - dt;
      traj.t_grad_fit = fit_gradient_blowup(traj.gradient, traj.initial_gradient, cfg.fit_lo, cfg.fit_hi);
      if (cfg.extend_after_detection) {
        double target = traj.t_detect;
        if (std::isfinite(traj.t_grad_fit)) target = std::max(target, traj.t_grad_fit);
        t_target = std::min(cfg.t_max, target * (1.0 + cfg.overshoot));
        traj.stop = StopReason::GradientExtended;
      } else {
        t_target = f.t;
        traj.stop = StopReason::GradientThreshold;
        hits = true;
      }
      t_next = std::min(t_next, t_target);
    }
    if (hits || f.t >= t_target * (1.0 - 1e-14)) {
      double mphi = 0.0;
      bool finite = true;
      for (int c = 0; c < 4; ++c)
        for (std::size_t i = 2; i < f.grid.n + 2; ++i) {
          const double v = f.phi[c][i];
          finite = finite && std::isfinite(v);
          mphi = std::max(mphi, std::abs(v));
        }
      if (!finite || !(mphi < p.kappa * 2.0)) {
        traj.stop = finite ? StopReason::BallExit : StopReason::NonFinite;
        traj.stop_message = "state left the ball before snapshot";
        break;
      }
      store_snapshot(p, cfg, f, traj);
      t_next = next_snapshot_time(f.t);
    }
  }
  if (!detected && traj.stop != StopReason::BallExit && traj.stop != StopReason::NonFinite)
    traj.stop = StopReason::TimeLimit;
  if (!detected) traj.t_grad_fit = fit_gradient_blowup(traj.gradient, traj.initial_gradient, cfg.fit_lo, cfg.fit_hi);
  traj.t_last = traj.snaps.back().t;
  return traj;
}

}  // namespace elwv
