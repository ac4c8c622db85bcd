#include "elwv/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "elwv/error.hpp"

namespace elwv {

namespace {

SeedLayout locate_core(std::vector<double> z, double eta) {
  SeedLayout s;
  s.z = std::move(z);
  const double tol = 1e-12 * eta;
  s.core_begin = static_cast<std::size_t>(
      std::lower_bound(s.z.begin(), s.z.end(), eta - tol) - s.z.begin());
  s.core_end = static_cast<std::size_t>(
      std::upper_bound(s.z.begin(), s.z.end(), 2.0 * eta + tol) - s.z.begin());
  return s;
}

double infer_eta(const SeedLayout& s) { return s.z[s.core_begin]; }

}  // namespace

SeedLayout make_seeds(double eta, std::size_t core, std::size_t margin) {
  if (!(eta > 0.0) || core < 3) fail(ErrorCode::InvalidArgument, "make_seeds: need eta > 0, core >= 3");
  const double dz = eta / static_cast<double>(core - 1);
  std::vector<double> z;
  z.reserve(core + 2 * margin);
  for (std::size_t k = margin; k >= 1; --k) z.push_back(eta - dz * static_cast<double>(k));
  for (std::size_t i = 0; i < core; ++i) z.push_back(eta + dz * static_cast<double>(i));
  for (std::size_t k = 1; k <= margin; ++k) z.push_back(2.0 * eta + dz * static_cast<double>(k));
  z[margin] = eta;
  z[margin + core - 1] = 2.0 * eta;
  SeedLayout s;
  s.z = std::move(z);
  s.core_begin = margin;
  s.core_end = margin + core;
  return s;
}

SeedLayout refine_seeds(const SeedLayout& s, double center, double halfwidth) {
  std::vector<double> z;
  z.reserve(s.z.size() * 2);
  for (std::size_t i = 0; i < s.z.size(); ++i) {
    z.push_back(s.z[i]);
    if (i + 1 < s.z.size()) {
      const double mid = 0.5 * (s.z[i] + s.z[i + 1]);
      if (std::abs(mid - center) <= halfwidth) z.push_back(mid);
    }
  }
  return locate_core(std::move(z), infer_eta(s));
}

SeedLayout double_seeds(const SeedLayout& s) {
  return refine_seeds(s, 0.5 * (s.z.front() + s.z.back()), std::numeric_limits<double>::infinity());
}

double CharFan::X_at(std::size_t iz, double time) const {
  const std::size_t n = nt();
  if (n == 1) return X[at(0, iz)] + speed[at(0, iz)] * (time - t[0]);
  if (time <= t.front()) return X[at(0, iz)] + speed[at(0, iz)] * (time - t.front());
  if (time >= t.back()) return X[at(n - 1, iz)] + speed[at(n - 1, iz)] * (time - t.back());
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
  const double h = t[k + 1] - t[k];
  const double s = (time - t[k]) / h;
  const double x0 = X[at(k, iz)], x1 = X[at(k + 1, iz)];
  const double m0 = speed[at(k, iz)] * h, m1 = speed[at(k + 1, iz)] * h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * m1;
}

double CharFan::X_at_z(double z, double time) const {
  const auto& zs = seeds.z;
  if (z < zs.front() || z > zs.back()) fail(ErrorCode::OutOfRange, "CharFan::X_at_z: label outside seeds");
  std::size_t j = static_cast<std::size_t>(std::upper_bound(zs.begin(), zs.end(), z) - zs.begin());
  if (j == 0) j = 1;
  if (j >= zs.size()) j = zs.size() - 1;
  const double a = zs[j - 1], b = zs[j];
  const double th = (z - a) / (b - a);
  if (th == 0.0) return X_at(j - 1, time);
  if (th == 1.0) return X_at(j, time);
  return (1.0 - th) * X_at(j - 1, time) + th * X_at(j, time);
}

double CharFan::rho_from_X(std::size_t ti, std::size_t iz) const {
  const std::size_t a = iz == 0 ? 0 : iz - 1;
  const std::size_t b = std::min(iz + 1, nz() - 1);
  return (X[at(ti, b)] - X[at(ti, a)]) / (seeds.z[b] - seeds.z[a]);
}

CharFan trace_fan(const Trajectory& traj, const PhysParams& p, int family, const SeedLayout& seeds,
                  std::size_t substeps) {
  if (family < 1 || family > 4) fail(ErrorCode::InvalidArgument, "trace_fan: family must be 1..4");
  if (traj.snaps.empty()) fail(ErrorCode::InvalidArgument, "trace_fan: empty trajectory");
  if (substeps < 1) fail(ErrorCode::InvalidArgument, "trace_fan: substeps >= 1");
  const int i = family - 1;
  const std::size_t nz = seeds.z.size();
  CharFan fan;
  fan.family = family;
  fan.seeds = seeds;
  const std::size_t ns = traj.snaps.size();
  fan.t.reserve(ns);
  fan.X.reserve(ns * nz);
  fan.rho.reserve(ns * nz);
  fan.v.reserve(ns * nz);
  fan.speed.reserve(ns * nz);

  struct Deriv {
    double dX, drho, dv;
  };
  std::size_t hint = 0;
  bool exited = false;
  auto deriv = [&](double X, double rho, double v, double t, double& lam) -> Deriv {
    State4 phi;
    Vec4 w;
    if (!traj.sample(X, t, phi, w, hint)) exited = true;
    const EigenGradients g = eigen_gradients(p, phi, Normalization::Regularized);
    const CouplingRow cc = coupling_row(g, i);
    lam = g.sys.lambda[i];
    double lin_rho = 0.0, lin_v = 0.0, quad = 0.0;
    for (int m = 0; m < 4; ++m) {
      if (m == i) continue;
      lin_rho += cc.c[m] * w[m];
      lin_v += cc.g1[m] * w[m];
      for (int k = 0; k < 4; ++k) {
        if (k == i || k == m) continue;
        quad += cc.g2[k][m] * w[k] * w[m];
      }
    }
    return {lam, cc.c[i] * v + lin_rho * rho, lin_v * v + quad * rho};
  };

  std::vector<double> X(nz), rho(nz, 1.0), v(nz), lam(nz);
  const double t0 = traj.snaps.front().t;
  for (std::size_t iz = 0; iz < nz; ++iz) {
    State4 phi;
    Vec4 w;
    if (!traj.sample(seeds.z[iz], t0, phi, w, hint)) exited = true;
    X[iz] = seeds.z[iz];
    v[iz] = w[i];
    lam[iz] = eigenvalues(p, phi)[i];
  }
  auto record = [&](double t) {
    fan.t.push_back(t);
    fan.X.insert(fan.X.end(), X.begin(), X.end());
    fan.rho.insert(fan.rho.end(), rho.begin(), rho.end());
    fan.v.insert(fan.v.end(), v.begin(), v.end());
    fan.speed.insert(fan.speed.end(), lam.begin(), lam.end());
  };
  record(t0);
  if (exited) fail(ErrorCode::OutOfRange, "trace_fan: seed outside the trajectory window");

  const double dx = traj.spacing;
  for (std::size_t k = 0; k + 1 < ns; ++k) {
    const double ta = traj.snaps[k].t, tb = traj.snaps[k + 1].t;
    const double h = (tb - ta) / static_cast<double>(substeps);
    hint = k;
    for (std::size_t sub = 0; sub < substeps; ++sub) {
      const double t = ta + h * static_cast<double>(sub);
      for (std::size_t iz = 0; iz < nz; ++iz) {
        double l1, l2, l3, l4;
        const Deriv k1 = deriv(X[iz], rho[iz], v[iz], t, l1);
        const Deriv k2 = deriv(X[iz] + 0.5 * h * k1.dX, rho[iz] + 0.5 * h * k1.drho, v[iz] + 0.5 * h * k1.dv,
                               t + 0.5 * h, l2);
        const Deriv k3 = deriv(X[iz] + 0.5 * h * k2.dX, rho[iz] + 0.5 * h * k2.drho, v[iz] + 0.5 * h * k2.dv,
                               t + 0.5 * h, l3);
        const Deriv k4 = deriv(X[iz] + h * k3.dX, rho[iz] + h * k3.drho, v[iz] + h * k3.dv, t + h, l4);
        X[iz] += h / 6.0 * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
        rho[iz] += h / 6.0 * (k1.drho + 2.0 * k2.drho + 2.0 * k3.drho + k4.drho);
        v[iz] += h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
        fan.max_tracer_cfl = std::max(fan.max_tracer_cfl, std::abs(l1 - traj.track_speed) * h / dx);
      }
      if (exited) {
        std::ostringstream os;
        os << "trace_fan: family-" << family << " curve exits the stored window near t = " << t;
        fail(ErrorCode::OutOfRange, os.str());
      }
    }
    for (std::size_t iz = 0; iz < nz; ++iz) {
      State4 phi;
      Vec4 w;
      traj.sample(X[iz], tb, phi, w, hint);
      lam[iz] = eigenvalues(p, phi)[i];
    }
    record(tb);
  }
  if (fan.max_tracer_cfl > 1.0) {
    std::ostringstream os;
    os << "tracer local CFL " << fan.max_tracer_cfl << " > 1: interpolation under-resolved";
    fan.warnings.push_back(os.str());
  }
  return fan;
}

Intersection bichar_intersection(const CharFan& fi, const CharFan& fj, double yi, double yj) {
  if (fi.family == fj.family) fail(ErrorCode::InvalidArgument, "bichar_intersection: need i != j");
  const double lo0 = std::max(fi.t.front(), fj.t.front());
  const double hi0 = std::min(fi.t.back(), fj.t.back());
  auto g = [&](double t) { return fi.X_at_z(yi, t) - fj.X_at_z(yj, t); };
  double lo = lo0, hi = hi0;
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return {fi.X_at_z(yi, lo), lo};
  if (ghi == 0.0) return {fi.X_at_z(yi, hi), hi};
  if ((glo > 0.0) == (ghi > 0.0))
    fail(ErrorCode::OutOfRange, "bichar_intersection: no intersection in the traced window");
  const double tol = 1e-12 * std::max(hi0 - lo0, 1e-300);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  return {fi.X_at_z(yi, t), t};
}

namespace {

// Running maximum of per-sample values, queried at arbitrary times.
struct RunningMax {
  std::vector<double> t, v;
  void add(double time, double value) {
    t.push_back(time);
    v.push_back(value);
  }
  void finish() {
    std::vector<std::size_t> idx(t.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
    std::vector<double> ts, vs;
    double m = 0.0;
    for (std::size_t k : idx) {
      m = std::max(m, v[k]);
      ts.push_back(t[k]);
      vs.push_back(m);
    }
    t = std::move(ts);
    v = std::move(vs);
  }
  double query(double time) const {
    auto it = std::upper_bound(t.begin(), t.end(), time * (1.0 + 1e-14) + 1e-300);
    if (it == t.begin()) return 0.0;
    return v[static_cast<std::size_t>(it - t.begin()) - 1];
  }
};

}  // namespace

NormSeries norm_series(std::span<const Trajectory* const> trajs, const std::array<const CharFan*, 4>& fans) {
  for (const CharFan* f : fans)
    if (!f) fail(ErrorCode::InvalidArgument, "norm_series: all four fans required");
  RunningMax S, J, V, U;
  for (const CharFan* f : fans) {
    for (std::size_t ti = 0; ti < f->nt(); ++ti) {
      double smax = 0.0, jmax = 0.0;
      for (std::size_t iz = f->seeds.core_begin; iz < f->seeds.core_end; ++iz) {
        smax = std::max(smax, f->rho[f->at(ti, iz)]);
        jmax = std::max(jmax, std::abs(f->v[f->at(ti, iz)]));
      }
      S.add(f->t[ti], smax);
      J.add(f->t[ti], jmax);
    }
  }
  for (const Trajectory* tr : trajs) {
    for (const Snapshot& s : tr->snaps) {
      double umax = 0.0, vmax = 0.0;
      std::array<double, 4> lo, hi;
      for (int i = 0; i < 4; ++i) {
        const CharFan* f = fans[static_cast<std::size_t>(i)];
        lo[i] = f->X_at(f->seeds.core_begin, s.t);
        hi[i] = f->X_at(f->seeds.core_end - 1, s.t);
      }
      for (std::size_t j = 0; j < s.count; ++j) {
        const double x = s.origin + tr->spacing * static_cast<double>(j);
        double n2 = 0.0;
        for (int c = 0; c < 4; ++c) n2 += s.phi[c][j] * s.phi[c][j];
        umax = std::max(umax, std::sqrt(n2));
        for (int i = 0; i < 4; ++i)
          if (x < lo[i] || x > hi[i]) vmax = std::max(vmax, std::abs(s.w[i][j]));
      }
      U.add(s.t, umax);
      V.add(s.t, vmax);
    }
  }
  S.finish(); J.finish(); V.finish(); U.finish();
  NormSeries out;
  const CharFan& master = *fans[0];
  for (double t : master.t) {
    out.t.push_back(t);
    out.S.push_back(S.query(t));
    out.J.push_back(J.query(t));
    out.V.push_back(V.query(t));
    out.U.push_back(U.query(t));
  }
  return out;
}

StripGeometry strip_separation(const std::array<const CharFan*, 4>& fans, double eta, double sigma) {
  for (const CharFan* f : fans)
    if (!f) fail(ErrorCode::InvalidArgument, "strip_separation: all four fans required");
  StripGeometry g;
  g.sigma = sigma;
  g.t0_analytic = eta / sigma;
  const CharFan& master = *fans[0];
  for (double t : master.t) {
    g.t.push_back(t);
    for (int i = 0; i < 4; ++i) {
      const CharFan& f = *fans[static_cast<std::size_t>(i)];
      g.left[i].push_back(f.X_at(f.seeds.core_begin, t));
      g.right[i].push_back(f.X_at(f.seeds.core_end - 1, t));
    }
  }
  double tsep = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const CharFan& fi = *fans[static_cast<std::size_t>(i)];
      const CharFan& fj = *fans[static_cast<std::size_t>(j)];
      auto gap = [&](double t) { return fi.X_at(fi.seeds.core_begin, t) - fj.X_at(fj.seeds.core_end - 1, t); };
      const double tend = std::min(fi.t.back(), fj.t.back());
      if (gap(0.0) > 0.0) continue;
      // Gaps grow monotonically; scan then bisect the first crossing.
      const std::size_t scan = 4096;
      double a = 0.0, b = -1.0;
      for (std::size_t k = 1; k <= scan; ++k) {
        const double t = tend * static_cast<double>(k) / static_cast<double>(scan);
        if (gap(t) > 0.0) {
          b = t;
          a = tend * static_cast<double>(k - 1) / static_cast<double>(scan);
          break;
        }
      }
      if (b < 0.0) {
        tsep = std::numeric_limits<double>::infinity();
        continue;
      }
      for (int it = 0; it < 200 && b - a > 1e-14 * b; ++it) {
        const double mid = 0.5 * (a + b);
        (gap(mid) > 0.0 ? b : a) = mid;
      }
      tsep = std::max(tsep, b);
    }
  g.t_sep = tsep;
  return g;
}

DzRho1 dz_rho1(const CharFan& fan1, double t_until, double z0) {
  DzRho1 out;
  const auto& z = fan1.seeds.z;
  std::size_t iz0 = fan1.seeds.core_begin;
  for (std::size_t iz = fan1.seeds.core_begin; iz < fan1.seeds.core_end; ++iz)
    if (std::abs(z[iz] - z0) < std::abs(z[iz0] - z0)) iz0 = iz;
  const std::size_t b = std::max<std::size_t>(fan1.seeds.core_begin, 1);
  const std::size_t e = std::min(fan1.seeds.core_end, fan1.nz() - 1);
  auto centered = [&](std::size_t ti, std::size_t iz) {
    return (fan1.rho[fan1.at(ti, iz + 1)] - fan1.rho[fan1.at(ti, iz - 1)]) / (z[iz + 1] - z[iz - 1]);
  };
  bool noisy_sup = false;
  for (std::size_t ti = 0; ti < fan1.nt() && fan1.t[ti] <= t_until * (1.0 + 1e-14); ++ti) {
    double sup = 0.0;
    std::size_t arg = b;
    for (std::size_t iz = b; iz < e; ++iz) {
      const double d = std::abs(centered(ti, iz));
      if (d > sup) {
        sup = d;
        arg = iz;
      }
    }
    out.t.push_back(fan1.t[ti]);
    out.sup_abs.push_back(sup);
    out.at_z0.push_back(iz0 >= 1 && iz0 + 1 < fan1.nz() ? centered(ti, iz0) : 0.0);
    out.rho_z0.push_back(fan1.rho[fan1.at(ti, iz0)]);
    if (sup > out.sup_overall) {
      out.sup_overall = sup;
      out.z_at_sup = z[arg];
      const double diff = std::abs(fan1.rho[fan1.at(ti, arg + 1)] - fan1.rho[fan1.at(ti, arg - 1)]);
      noisy_sup = diff < 1e-12;
    }
  }
  if (noisy_sup && out.sup_overall > 0.0) {
    out.under_resolved = true;
    out.warnings.push_back("sup |d_z rho_1| set by neighbour differences at the noise floor");
  }
  return out;
}

}  // namespace elwv
