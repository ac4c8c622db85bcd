#include "elwv/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "elwv/error.hpp"

namespace elwv {

void Grid1D::validate() const {
  if (!(n >= 2) || !(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
    fail(ErrorCode::InvalidArgument, "Grid1D: need n >= 2 and x_max > x_min");
}

Grid1D Grid1D::covering(double lo, double hi, double dx) {
  if (!(dx > 0.0) || !(hi > lo)) fail(ErrorCode::InvalidArgument, "Grid1D::covering: bad range");
  const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / dx - 1e-9));
  Grid1D g;
  g.x_min = lo;
  g.n = std::max<std::size_t>(cells, 1) + 1;
  g.x_max = lo + dx * static_cast<double>(g.n - 1);
  return g;
}

void DataParams::validate() const {
  std::ostringstream os;
  if (!(theta > 0.0 && theta < 1.0)) os << "need 0 < theta < 1; ";
  if (!(alpha > 0.0 && alpha < 0.5)) os << "need 0 < alpha < 1/2; ";
  if (!(delta > 0.0)) os << "need delta > 0; ";
  if (!(2.0 * alpha - delta < 0.0)) os << "need 2*alpha - delta < 0; ";
  if (!(eta > 0.0 && eta < 0.5)) os << "need 0 < eta < 1/2; ";
  const std::string msg = os.str();
  if (!msg.empty()) fail(ErrorCode::InvalidArgument, "DataParams: " + msg);
}

void BumpPerturbation::validate() const {
  if (!active()) return;
  if (!(width > 0.0) || center - width < 1.0 || center + width > 2.0 || family < 1 || family > 4)
    fail(ErrorCode::InvalidArgument, "BumpPerturbation: support must lie in [1, 2] (units of eta)");
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double f0 = std::exp(-1.0 / t);
  const double f1 = std::exp(-1.0 / (1.0 - t));
  return f0 / (f0 + f1);
}

double chi(double y) {
  if (y <= 1.0 || y >= 2.0) return 0.0;
  if (y < 1.2) return smooth_step((y - 1.0) / 0.2);
  if (y > 1.8) return smooth_step((2.0 - y) / 0.2);
  return 1.0;
}

double psi(double y) {
  return smooth_step((0.5 - std::abs(y)) / 0.25);
}

namespace {

double bump_profile(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

}  // namespace

double seed_w(const DataParams& dp, double x, double x2, int family, const BumpPerturbation* bump) {
  if (x <= 0.0) return 0.0;
  const double base = chi(x / dp.eta);
  double extra = 0.0;
  if (bump && bump->active() && bump->family == family)
    extra = bump->amplitude * dp.theta * bump_profile((x / dp.eta - bump->center) / bump->width);
  if (base == 0.0 && extra == 0.0) return 0.0;
  const double lx = std::abs(std::log(x));
  const double cut = x2 == 0.0 ? 1.0 : psi(std::pow(lx, dp.delta) * x2 / std::sqrt(x));
  if (cut == 0.0) return 0.0;
  const double amp = family == 1 ? dp.theta * std::pow(lx, dp.alpha) : dp.theta * dp.theta;
  return (amp * base + extra) * cut;
}

Peak compute_W0_z0(const DataParams& dp) {
  dp.validate();
  auto f = [&](double x) { return seed_w(dp, x, 0.0, 1); };
  const int n = 4000;
  const double lo = dp.eta, hi = 2.0 * dp.eta, h = (hi - lo) / n;
  int best = 0;
  double fbest = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double v = f(lo + h * i);
    if (v > fbest) {
      fbest = v;
      best = i;
    }
  }
  double a = lo + h * std::max(best - 1, 0);
  double b = lo + h * std::min(best + 1, n);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-13 * dp.eta) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = f(d);
    }
  }
  Peak pk;
  pk.z0 = 0.5 * (a + b);
  pk.W0 = f(pk.z0);
  return pk;
}

namespace {

using Vec = State4;

Vec rhs(const PhysParams& p, Normalization mode, const std::array<double, 4>& w, const Vec& s) {
  const Mat4 r = right_vectors(p, s, mode);
  Vec out{};
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < 4; ++c) out[c] += w[k] * r[k][c];
  return out;
}

double norm4(const Vec& s) {
  return std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3]);
}

}  // namespace

DataField reconstruct_phi0(const DataParams& dp, const PhysParams& p, Normalization mode,
                           const Grid1D& grid, const BumpPerturbation* bump, double tol) {
  dp.validate();
  p.validate();
  grid.validate();
  if (bump) bump->validate();
  const double eta = dp.eta;
  if (grid.x_min > eta || grid.x_max < 2.0 * eta)
    fail(ErrorCode::InvalidArgument, "reconstruct_phi0: grid must cover [eta, 2 eta]");

  DataField out;
  out.grid = grid;
  out.mode = mode;
  const Peak pk = compute_W0_z0(dp);
  out.W0 = pk.W0;
  out.z0 = pk.z0;
  if (c111_at_rest(p) > 0.0) {
    out.family1_sign = -1.0;
    out.notices.push_back("c^1_11(0) > 0: family-1 seed amplitude sign flipped");
  }
  auto seeds = [&](double x) {
    std::array<double, 4> w{};
    for (int k = 0; k < 4; ++k) w[k] = seed_w(dp, x, 0.0, k + 1, bump);
    w[0] *= out.family1_sign;
    return w;
  };

  const std::size_t n = grid.n;
  for (int k = 0; k < 4; ++k) {
    out.w[k].assign(n, 0.0);
    out.phi[k].assign(n, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = seeds(grid.x(i));
    for (int k = 0; k < 4; ++k) out.w[k][i] = w[k];
  }

  auto rk4 = [&](double x, const Vec& y, double h) {
    const Vec k1 = rhs(p, mode, seeds(x), y);
    Vec t;
    for (int c = 0; c < 4; ++c) t[c] = y[c] + 0.5 * h * k1[c];
    const Vec k2 = rhs(p, mode, seeds(x + 0.5 * h), t);
    for (int c = 0; c < 4; ++c) t[c] = y[c] + 0.5 * h * k2[c];
    const Vec k3 = rhs(p, mode, seeds(x + 0.5 * h), t);
    for (int c = 0; c < 4; ++c) t[c] = y[c] + h * k3[c];
    const Vec k4 = rhs(p, mode, seeds(x + h), t);
    Vec o;
    for (int c = 0; c < 4; ++c) o[c] = y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    return o;
  };

  // Step-halving control with local Richardson correction.
  Vec y{};
  double x = eta;
  double h = eta / 64.0;
  auto advance_to = [&](double target) {
    while (x < target) {
      const double step = std::min(h, target - x);
      const Vec full = rk4(x, y, step);
      const Vec half = rk4(x + 0.5 * step, rk4(x, y, 0.5 * step), 0.5 * step);
      double err = 0.0;
      for (int c = 0; c < 4; ++c) err = std::max(err, std::abs(half[c] - full[c]) / 15.0);
      double ymax = 0.0;
      for (int c = 0; c < 4; ++c) ymax = std::max(ymax, std::abs(half[c]));
      // Accept at the round-off floor as well.
      const double thr = tol * step + 64.0 * std::numeric_limits<double>::epsilon() * ymax;
      const double grow = err > 0.0 ? 0.9 * std::pow(thr / err, 0.2) : 2.0;
      if (err <= thr) {
        for (int c = 0; c < 4; ++c) y[c] = half[c] + (half[c] - full[c]) / 15.0;
        x = step >= target - x ? target : x + step;
        if (norm4(y) >= p.kappa) {
          std::ostringstream os;
          os << "reconstruct_phi0: |Phi| = " << norm4(y) << " >= kappa = " << p.kappa << " at x = " << x;
          fail(ErrorCode::OutsideBall, os.str());
        }
        h = std::min(std::max(h, step * std::min(grow, 2.0)), eta / 16.0);
      } else {
        h = step * std::max(grow, 0.2);
      }
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double xi = grid.x(i);
    if (xi <= eta) continue;
    advance_to(std::min(xi, 2.0 * eta));
    for (int c = 0; c < 4; ++c) out.phi[c][i] = y[c];
  }
  if (x < 2.0 * eta) advance_to(2.0 * eta);
  return out;
}

double seed_x2_halfwidth(const DataParams& dp) {
  double hw = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = dp.eta * (1.0 + i / 1000.0);
    hw = std::max(hw, 0.5 * std::sqrt(x) / std::pow(std::abs(std::log(x)), dp.delta));
  }
  return hw;
}

namespace {

std::size_t next_pow2(double v) {
  std::size_t n = 1;
  while (static_cast<double>(n) < v) n <<= 1;
  return n;
}

}  // namespace

SpectralGrid sample_seed_2d(const DataParams& dp, int family, std::size_t points_across, double pad) {
  dp.validate();
  if (points_across < 8 || pad < 1.0)
    fail(ErrorCode::InvalidArgument, "sample_seed_2d: need points_across >= 8 and pad >= 1");
  const double eta = dp.eta;
  const double hw = seed_x2_halfwidth(dp);
  SpectralGrid g;
  g.nx = next_pow2(pad * static_cast<double>(points_across));
  g.ny = g.nx;
  const double Lx = pad * eta;
  const double Ly = pad * 2.0 * hw;
  g.dx = Lx / static_cast<double>(g.nx);
  g.dy = Ly / static_cast<double>(g.ny);
  // Box centered on the support.
  g.x0 = 1.5 * eta - 0.5 * Lx;
  g.y0 = -0.5 * Ly;
  g.values.assign(g.nx * g.ny, 0.0);
  for (std::size_t iy = 0; iy < g.ny; ++iy) {
    const double y = g.y0 + g.dy * static_cast<double>(iy);
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const double x = g.x0 + g.dx * static_cast<double>(ix);
      g.values[iy * g.nx + ix] = seed_w(dp, x, y, family);
    }
  }
  return g;
}

}  // namespace elwv
