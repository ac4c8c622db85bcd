#include "elwv/shock_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elwv/error.hpp"

namespace elwv {

void AnalysisParams::validate() const {
  std::ostringstream os;
  if (!(rho_floor > 0.0 && rho_floor < 0.1)) os << "need rho_floor in (0, 0.1); ";
  if (!(epsilon > 0.0 && epsilon <= 0.01)) os << "need epsilon in (0, 1/100]; ";
  if (!(h_min > 0.0 && h_max > h_min)) os << "need 0 < h_min < h_max; ";
  if (ladder_points < 3) os << "need ladder_points >= 3; ";
  const std::string msg = os.str();
  if (!msg.empty()) fail(ErrorCode::InvalidArgument, "AnalysisParams: " + msg);
}

std::vector<double> min_rho_series(const CharFan& fan) {
  std::vector<double> out(fan.nt(), 1.0);
  for (std::size_t ti = 0; ti < fan.nt(); ++ti) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t iz = fan.seeds.core_begin; iz < fan.seeds.core_end; ++iz)
      m = std::min(m, fan.rho[fan.at(ti, iz)]);
    out[ti] = m;
  }
  return out;
}

ShockReport detect_shock(const CharFan& fan1, const Trajectory& traj, const AnalysisParams& ap) {
  ap.validate();
  ShockReport rep;
  const std::vector<double> m = min_rho_series(fan1);
  rep.min_rho1_end = m.back();
  rep.t_end = fan1.t.back();
  rep.T_grad = traj.t_grad_fit;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0, last = 0;
  // Last contiguous run inside the window, before rho_1 first crosses the floor.
  std::size_t first_below = m.size();
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m[k] < ap.rho_floor) {
      first_below = k;
      break;
    }
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (k > first_below) break;
    if (m[k] >= ap.rho_floor && m[k] <= 10.0 * ap.rho_floor) {
      sx += fan1.t[k]; sy += m[k]; sxx += fan1.t[k] * fan1.t[k]; sxy += fan1.t[k] * m[k];
      ++n;
      last = k;
    }
  }
  rep.fit_points = n;
  if (n < 3) {
    std::ostringstream os;
    os << "no shock in window: min rho_1 reached " << *std::min_element(m.begin(), m.end()) << " by t = "
       << fan1.t.back() << " (" << n << " samples in [rho_floor, 10 rho_floor])";
    rep.reason = os.str();
    return rep;
  }
  const double dn = static_cast<double>(n);
  const double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / dn;
  if (!(slope < 0.0)) {
    rep.reason = "min rho_1 not decreasing in the detection window";
    return rep;
  }
  rep.shock = true;
  rep.T_num = -icpt / slope;
  std::size_t arg = fan1.seeds.core_begin;
  for (std::size_t iz = fan1.seeds.core_begin; iz < fan1.seeds.core_end; ++iz)
    if (fan1.rho[fan1.at(last, iz)] < fan1.rho[fan1.at(last, arg)]) arg = iz;
  rep.z_shock = fan1.seeds.z[arg];
  if (std::isfinite(rep.T_grad)) rep.discrepancy = std::abs(rep.T_num - rep.T_grad) / rep.T_num;
  rep.reason = "min rho_1 extrapolated to zero";
  return rep;
}

std::array<double, 2> shock_bracket(double c111_0, double W0, double epsilon) {
  const double base = std::abs(c111_0) * W0;
  return {1.0 / (std::pow(1.0 + epsilon, 3) * base), 1.0 / (std::pow(1.0 - epsilon, 4) * base)};
}

BracketVerdict bracket_check(ShockReport& report, const PhysParams& p, double W0) {
  BracketVerdict v;
  report.W0 = W0;
  report.c111_0 = c111_at_rest(p);
  const double base = std::abs(report.c111_0) * W0;
  v.P = report.shock ? report.T_num * base : std::numeric_limits<double>::quiet_NaN();
  report.P = v.P;
  v.in_range = report.shock && v.P >= 0.7 && v.P <= 1.4;
  const auto bs = shock_bracket(report.c111_0, W0, 0.01);
  const auto bl = shock_bracket(report.c111_0, W0, 0.1);
  v.bracket_eps_small = {bs[0] * base, bs[1] * base};
  v.bracket_eps_large = {bl[0] * base, bl[1] * base};
  return v;
}

bool theta_trend_ok(std::span<const ShockReport> reports) {
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (!reports[k].shock || !std::isfinite(reports[k].P)) return false;
    if (k > 0 && std::abs(reports[k].P - 1.0) > std::abs(reports[k - 1].P - 1.0)) return false;
  }
  return !reports.empty();
}

void family_exclusivity(ShockReport& report, const std::array<const CharFan*, 4>& fans) {
  const double tcut = report.shock ? report.T_num : fans[0]->t.back();
  double mr = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 4; ++i) {
    const CharFan& f = *fans[static_cast<std::size_t>(i)];
    double sw = 0.0;
    for (std::size_t ti = 0; ti < f.nt() && f.t[ti] <= tcut; ++ti)
      for (std::size_t iz = f.seeds.core_begin; iz < f.seeds.core_end; ++iz) {
        mr = std::min(mr, f.rho[f.at(ti, iz)]);
        sw = std::max(sw, std::abs(f.w(ti, iz)));
      }
    report.sup_w_others[static_cast<std::size_t>(i - 1)] = sw;
  }
  report.min_rho_others = mr;
  report.exclusive = report.shock && mr >= 0.5 && report.min_rho1_end <= 1.0;
}

IllposednessVerdict illposedness_trend(std::span<const ShockReport> reports, std::span<const double> W0s) {
  if (reports.size() < 3 || reports.size() != W0s.size())
    fail(ErrorCode::InvalidArgument, "illposedness_trend: need >= 3 reports with W0 values");
  IllposednessVerdict v;
  v.decreasing = true;
  double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (!reports[k].shock) {
      v.decreasing = false;
      continue;
    }
    if (k > 0 && !(reports[k].T_num < reports[k - 1].T_num)) v.decreasing = false;
    const double prod = reports[k].T_num * W0s[k];
    pmin = std::min(pmin, prod);
    pmax = std::max(pmax, prod);
  }
  v.product_ratio = pmax / pmin;
  v.pass = v.decreasing && v.product_ratio < 1.15;
  return v;
}

double h2_integral_at(const CharFan& fan1, std::size_t ti, double z0, double h) {
  const auto& z = fan1.seeds.z;
  const double eta = z[fan1.seeds.core_begin];
  auto integrand = [&](std::size_t iz) {
    const double rho = fan1.rho[fan1.at(ti, iz)];
    const double v = fan1.v[fan1.at(ti, iz)];
    const double zz = z[iz];
    const double wgt = std::sqrt(std::max((zz - eta) * (2.0 * eta - zz), 0.0));
    return v * v / rho * wgt;
  };
  double I = 0.0;
  for (std::size_t iz = fan1.seeds.core_begin; iz + 1 < fan1.seeds.core_end; ++iz) {
    double a = z[iz], b = z[iz + 1];
    const double fa = integrand(iz), fb = integrand(iz + 1);
    auto lerp = [&](double x) { return fa + (fb - fa) * (x - z[iz]) / (z[iz + 1] - z[iz]); };
    // Clip the segment against the excluded band (z0 - h, z0 + h).
    const double lo = z0 - h, hi = z0 + h;
    auto piece = [&](double x0, double x1) {
      if (x1 <= x0) return 0.0;
      return 0.5 * (x1 - x0) * (lerp(x0) + lerp(x1));
    };
    I += piece(a, std::min(b, lo)) + piece(std::max(a, hi), b);
  }
  return I;
}

LogFit fit_log_ladder(std::span<const LadderPoint> ladder) {
  LogFit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : ladder) {
    if (!p.resolved) continue;
    const double x = std::log(1.0 / p.h);
    pts.emplace_back(x, p.I);
    sx += x; sy += p.I; sxx += x * x; sxy += x * p.I;
  }
  f.points = pts.size();
  if (pts.size() < 3) return f;
  const double n = static_cast<double>(pts.size());
  f.c = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.d = (sy - f.c * sx) / n;
  const double ybar = sy / n;
  double ssr = 0, sst = 0;
  for (auto [x, y] : pts) {
    const double e = y - (f.c * x + f.d);
    ssr += e * e;
    sst += (y - ybar) * (y - ybar);
  }
  f.r2 = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
  return f;
}

std::vector<LadderPoint> h2_blowup_integral(const CharFan& fan1, ShockReport& report, double eta,
                                            const AnalysisParams& ap) {
  ap.validate();
  std::vector<LadderPoint> ladder;
  if (!report.shock) return ladder;
  const std::vector<double> m = min_rho_series(fan1);
  std::size_t ti = 0;
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m[k] >= ap.rho_floor) ti = k;
  report.ladder_time = fan1.t[ti];
  const double z0 = report.z_shock;
  const auto& z = fan1.seeds.z;
  auto local_slope = [&](std::size_t iz) {
    const std::size_t a = iz == 0 ? 0 : iz - 1, b = std::min(iz + 1, fan1.nz() - 1);
    return std::abs(fan1.rho[fan1.at(ti, b)] - fan1.rho[fan1.at(ti, a)]) / (z[b] - z[a]);
  };
  for (std::size_t k = 0; k < ap.ladder_points; ++k) {
    const double frac = static_cast<double>(k) / static_cast<double>(ap.ladder_points - 1);
    const double h = eta * ap.h_min * std::pow(ap.h_max / ap.h_min, frac);
    LadderPoint pt;
    pt.h = h;
    pt.I = h2_integral_at(fan1, ti, z0, h);
    // Innermost retained seed on each side.
    for (int side = -1; side <= 1; side += 2) {
      const double edge = z0 + side * h;
      if (edge <= z[fan1.seeds.core_begin] || edge >= z[fan1.seeds.core_end - 1]) continue;
      std::size_t iz = static_cast<std::size_t>(std::lower_bound(z.begin(), z.end(), edge) - z.begin());
      if (side < 0 && iz > 0 && z[iz] > edge) --iz;
      const double dz = z[std::min(iz + 1, fan1.nz() - 1)] - z[iz];
      if (fan1.rho[fan1.at(ti, iz)] < 10.0 * dz * local_slope(iz)) pt.resolved = false;
    }
    ladder.push_back(pt);
  }
  report.ladder = ladder;
  report.ladder_fit = fit_log_ladder(ladder);
  return ladder;
}

}  // namespace elwv
