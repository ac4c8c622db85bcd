#include "elwv/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "elwv/error.hpp"

#ifndef ELWV_VERSION
#define ELWV_VERSION "0.0.0"
#endif

namespace elwv {

using nlohmann::json;

const char* code_version() { return ELWV_VERSION; }

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Skip: return "SKIP";
  }
  return "?";
}

void Report::add(std::string name, bool pass, std::string reason, json data) {
  checks.push_back({std::move(name), pass ? Verdict::Pass : Verdict::Fail, std::move(reason), std::move(data)});
}

void Report::skip(std::string name, std::string reason) {
  checks.push_back({std::move(name), Verdict::Skip, std::move(reason), {}});
}

std::size_t Report::count(Verdict v) const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [v](const CheckResult& c) { return c.verdict == v; }));
}

namespace {

// JSON cannot carry NaN or infinity; they become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string git_blob_sha1(const std::string& content) {
  return sha1_hex("blob " + std::to_string(content.size()) + std::string(1, '\0') + content);
}

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

State4 sample_ball(std::mt19937_64& rng, double radius) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  State4 s{};
  double n2 = 0.0;
  for (auto& v : s) {
    v = g(rng);
    n2 += v * v;
  }
  const double r = radius * std::pow(u(rng), 0.25) / std::sqrt(n2);
  for (auto& v : s) v *= r;
  return s;
}

double dot4(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }

double duality_residual(const EigenSystem& e) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(dot4(e.lvec[i], e.rvec[j]) - (i == j ? 1.0 : 0.0)));
  return worst;
}

double spectral_residual(const PhysParams& p, const State4& s, const EigenSystem& e) {
  const Mat4 A = matrix_A(p, s);
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    double res = 0.0, nr = 0.0;
    for (int r = 0; r < 4; ++r) {
      double ar = 0.0;
      for (int c = 0; c < 4; ++c) ar += A[r][c] * e.rvec[k][c];
      res += (ar - e.lambda[k] * e.rvec[k][r]) * (ar - e.lambda[k] * e.rvec[k][r]);
      nr += e.rvec[k][r] * e.rvec[k][r];
    }
    worst = std::max(worst, std::sqrt(res / nr));
  }
  return worst;
}

template <class F>
auto central4(F&& f, State4 s, int j, double h) {
  auto at = [&](double d) {
    State4 t = s;
    t[j] += d;
    return f(t);
  };
  const auto p2 = at(2 * h), p1 = at(h), m1 = at(-h), m2 = at(-2 * h);
  auto out = p1;
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = 0; b < out[a].size(); ++b)
      out[a][b] = (-p2[a][b] + 8.0 * p1[a][b] - 8.0 * m1[a][b] + m2[a][b]) / (12.0 * h);
  return out;
}

}  // namespace

EigenCheckSummary eigen_check(const PhysParams& p, const EigenCheckParams& ep, std::uint64_t seed) {
  p.validate();
  EigenCheckSummary out;
  std::mt19937_64 rng(seed);
  const double h = ep.fd_step;
  for (std::size_t n = 0; n < ep.samples; ++n) {
    State4 s = sample_ball(rng, p.kappa);
    while (std::abs(s[1]) <= 1e-3) s = sample_ball(rng, p.kappa);
    const EigenSystem lit = eigenvectors(p, s, Normalization::PaperLiteral);
    out.duality_literal = std::max(out.duality_literal, duality_residual(lit));
    out.spectral = std::max(out.spectral, spectral_residual(p, s, lit));
    // Regularized pair on the same state and on its phi2 = 0 projection.
    State4 s0 = s;
    s0[1] = 0.0;
    for (const State4& t : {s, s0}) {
      const EigenSystem reg = eigenvectors(p, t, Normalization::Regularized);
      out.duality_regularized = std::max(out.duality_regularized, duality_residual(reg));
      out.spectral = std::max(out.spectral, spectral_residual(p, t, reg));
    }

    const EigenGradients g = eigen_gradients(p, s, Normalization::Regularized);
    Mat4 fd_l{};
    std::array<Mat4, 4> fd_r{};
    for (int j = 0; j < 4; ++j) {
      const auto dl = central4([&](const State4& t) { return std::array<Vec4, 1>{eigenvalues(p, t)}; }, s, j, h);
      const auto dr = central4([&](const State4& t) { return right_vectors(p, t, Normalization::Regularized); }, s, j, h);
      for (int i = 0; i < 4; ++i) fd_l[i][j] = dl[0][i];
      for (int k = 0; k < 4; ++k)
        for (int c = 0; c < 4; ++c) fd_r[k][c][j] = dr[k][c];
    }
    double el = 0.0, sl = 0.0, er = 0.0, sr = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        el = std::max(el, std::abs(g.dlambda[i][j] - fd_l[i][j]));
        sl = std::max(sl, std::abs(g.dlambda[i][j]));
        for (int c = 0; c < 4; ++c) {
          er = std::max(er, std::abs(g.dr[i][c][j] - fd_r[i][c][j]));
          sr = std::max(sr, std::abs(g.dr[i][c][j]));
        }
      }
    out.grad_lambda = std::max(out.grad_lambda, el / sl);
    out.grad_rvec = std::max(out.grad_rvec, er / sr);

    const Vec4 lam = lit.lambda;
    out.symmetry_lambda = std::max({out.symmetry_lambda, std::abs(lam[0] + lam[3]), std::abs(lam[1] + lam[2])});
    const CouplingCoeffs cl = coupling_coeffs(p, s, Normalization::PaperLiteral);
    out.symmetry_c = std::max({out.symmetry_c, std::abs(cl.c[0][0] + cl.c[3][3]) / std::abs(cl.c[0][0]),
                               std::abs(cl.c[1][1] + cl.c[2][2]) / std::max(std::abs(cl.c[1][1]), 1e-300)});
    out.closed_form = std::max({out.closed_form, std::abs(c111_closed_form(p, s) - cl.c[0][0]) / std::abs(cl.c[0][0]),
                                std::abs(c222_closed_form(p, s) - cl.c[1][1]) / std::max(std::abs(cl.c[1][1]), 1e-300)});
    ++out.samples;
  }

  // c^1_11(0) by differencing lambda_1 along r_1 at the rest state.
  const State4 rest{};
  const Vec4 r1 = right_vectors(p, rest, Normalization::Regularized)[0];
  auto lam1 = [&](double e) {
    State4 t{};
    for (int c = 0; c < 4; ++c) t[c] = e * r1[c];
    return eigenvalues(p, t)[0];
  };
  const double e = 1e-4;
  out.c111_0 = c111_closed_form(p, rest);
  out.c111_0_fd = (-lam1(2 * e) + 8 * lam1(e) - 8 * lam1(-e) + lam1(-2 * e)) / (12 * e);

  const GapReport gap = min_gap_sigma(p, ep.gap_samples);
  out.sigma = gap.sigma;
  out.sigma_coarse = gap.sigma_coarse;
  out.gamma_empirical = empirical_gamma_bound(p, std::min<std::size_t>(ep.gap_samples, 4000));

  double gmin = HUGE_VAL, gmax = 0.0;
  for (int k = 3; k <= 12; ++k) {
    const State4 t{0.5 * p.kappa, std::pow(10.0, -k), 0.0, 0.0};
    const double g = std::abs(coupling_coeffs(p, t, Normalization::Regularized).g2[1][0][2]);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  out.singular_ratio = gmin > 0.0 ? gmax / gmin : (gmax == 0.0 ? 1.0 : HUGE_VAL);
  return out;
}

void eigen_check_verdicts(const EigenCheckSummary& s, Report& r) {
  auto fmt = [](double v) { return format_double(v); };
  r.add("duality", s.duality_literal < 1e-10 && s.duality_regularized < 1e-10,
        "max |l_i.r_j - delta_ij| literal " + fmt(s.duality_literal) + ", regularized " + fmt(s.duality_regularized) + " (< 1e-10)",
        {{"literal", s.duality_literal}, {"regularized", s.duality_regularized}});
  r.add("spectral-residual", s.spectral < 1e-10, "max |A r - lambda r| / |r| = " + fmt(s.spectral) + " (< 1e-10)",
        {{"max", s.spectral}});
  r.add("gradient-consistency", s.grad_lambda < 1e-6 && s.grad_rvec < 1e-6,
        "analytic vs 4th-order differences: lambda " + fmt(s.grad_lambda) + ", r " + fmt(s.grad_rvec) + " (< 1e-6)",
        {{"lambda", s.grad_lambda}, {"rvec", s.grad_rvec}});
  r.add("sign-symmetry", s.symmetry_lambda == 0.0 && s.symmetry_c < 1e-12,
        "|lambda_1 + lambda_4|, |lambda_2 + lambda_3| = " + fmt(s.symmetry_lambda) + "; c-symmetry " + fmt(s.symmetry_c),
        {{"lambda", s.symmetry_lambda}, {"c", s.symmetry_c}});
  r.add("closed-form", s.closed_form < 1e-10, "closed-form c111, c222 vs contraction: " + fmt(s.closed_form) + " (< 1e-10)",
        {{"max_rel", s.closed_form}});
  const double rel = std::abs(s.c111_0 - s.c111_0_fd) / std::abs(s.c111_0);
  r.add("c111-at-rest", rel < 1e-6, "closed form " + fmt(s.c111_0) + " vs difference oracle " + fmt(s.c111_0_fd),
        {{"closed_form", s.c111_0}, {"fd", s.c111_0_fd}, {"rel", rel}});
  r.add("speed-gap", s.sigma > 0.0 && std::abs(s.sigma - s.sigma_coarse) < 1e-3,
        "sigma " + fmt(s.sigma) + ", coarse " + fmt(s.sigma_coarse),
        {{"sigma", s.sigma}, {"sigma_coarse", s.sigma_coarse}, {"gamma_empirical", s.gamma_empirical}});
  r.add("singular-coefficients", std::isfinite(s.singular_ratio) && s.singular_ratio < 2.0,
        "|gamma^2_13| max/min along phi2 = 1e-3..1e-12: " + fmt(s.singular_ratio), {{"ratio", s.singular_ratio}});
}

double gaussian_hdot_exact(double width, double s) {
  // f^(xi) = 2 pi w^2 exp(-2 pi^2 w^2 |xi|^2), integrated radially.
  const double a = 4.0 * M_PI * M_PI * width * width;
  const double amp = 2.0 * M_PI * width * width;
  return amp * amp * M_PI * std::tgamma(s + 1.0) / std::pow(a, s + 1.0);
}

SpectralGrid sample_gaussian(double width, std::size_t n, double box) {
  SpectralGrid g;
  g.nx = g.ny = n;
  g.dx = g.dy = box / static_cast<double>(n);
  g.x0 = g.y0 = -0.5 * box;
  g.values.resize(n * n);
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = g.x0 + g.dx * static_cast<double>(ix), y = g.y0 + g.dy * static_cast<double>(iy);
      g.values[iy * n + ix] = std::exp(-(x * x + y * y) / (2.0 * width * width));
    }
  return g;
}

SobolevScan sobolev_scan(const DataParams& dp, const SobolevScanParams& sp) {
  SobolevScan out;
  for (int k = sp.eta_exp_min; k <= sp.eta_exp_max; ++k) {
    DataParams d = dp;
    d.eta = std::ldexp(1.0, -k);
    d.validate();
    SobolevReport r = hdot_norm_sq_refined(
        [&](int m) { return sample_seed_2d(d, 1, sp.points_across * static_cast<std::size_t>(m), sp.pad); }, sp.s,
        lemma_cuts(d.eta, d.delta));
    out.etas.push_back(d.eta);
    out.reports.push_back(std::move(r));
  }
  std::vector<double> norms;
  for (const auto& r : out.reports) norms.push_back(r.richardson);
  out.fit = scaling_fit(out.etas, norms, out.reports);

  DataParams half = dp;
  half.eta = out.etas.front();
  const double full = hdot_norm_sq(sample_seed_2d(half, 1, sp.points_across, sp.pad), sp.s).norm_sq;
  half.theta = 0.5 * dp.theta;
  const double halved = hdot_norm_sq(sample_seed_2d(half, 1, sp.points_across, sp.pad), sp.s).norm_sq;
  out.homogeneity_ratio = halved / full;

  const double w = 0.1;
  double prev = 0.0;
  for (std::size_t n : {128u, 256u, 512u}) {
    const double v = hdot_norm_sq(sample_gaussian(w, n, 16.0 * w), sp.s).norm_sq;
    out.gaussian_cauchy = prev > 0.0 ? std::abs(v - prev) / v : 0.0;
    out.gaussian_numeric = prev = v;
  }
  out.gaussian_exact = gaussian_hdot_exact(w, sp.s);
  return out;
}

CsvTable fan_csv(const CharFan& fan, std::size_t seed_stride) {
  CsvTable t("fan", 1, {"z", "t", "X", "rho", "v", "w"});
  const std::size_t stride = std::max<std::size_t>(seed_stride, 1);
  for (std::size_t iz = 0; iz < fan.nz(); iz += stride)
    for (std::size_t ti = 0; ti < fan.nt(); ++ti) {
      const std::size_t k = fan.at(ti, iz);
      t.row({fan.seeds.z[iz], fan.t[ti], fan.X[k], fan.rho[k], fan.v[k], fan.w(ti, iz)});
    }
  return t;
}

CsvTable ladder_csv(const ShockReport& r) {
  CsvTable t("ladder", 1, {"h", "I", "resolved"});
  for (const auto& l : r.ladder) t.row({l.h, l.I, l.resolved ? 1.0 : 0.0});
  return t;
}

json norm_series_json(const NormSeries& n) {
  json j;
  j["schema"] = "norm-series";
  j["schema_version"] = 1;
  auto arr = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
  };
  j["t"] = arr(n.t);
  j["S"] = arr(n.S);
  j["J"] = arr(n.J);
  j["V"] = arr(n.V);
  j["U"] = arr(n.U);
  return j;
}

json shock_report_json(const ShockExperiment& ex) {
  const ShockReport& r = ex.report;
  json j;
  j["schema"] = "shock-report";
  j["schema_version"] = kReportSchemaVersion;
  j["shock"] = r.shock;
  j["reason"] = r.reason;
  j["T_num"] = num(r.T_num);
  j["z_shock"] = num(r.z_shock);
  j["T_grad"] = num(r.T_grad);
  j["discrepancy"] = num(r.discrepancy);
  j["fit_points"] = r.fit_points;
  j["min_rho1_end"] = num(r.min_rho1_end);
  j["t_end"] = num(r.t_end);
  j["W0"] = num(r.W0);
  j["z0"] = num(ex.peak.z0);
  j["c111_0"] = num(r.c111_0);
  j["P"] = num(r.P);
  const auto b = shock_bracket(r.c111_0, r.W0, 0.01), bl = shock_bracket(r.c111_0, r.W0, 0.1);
  j["bracket"] = {{"in_range", ex.bracket.in_range},
                  {"eps_0.01", {num(b[0]), num(b[1])}},
                  {"eps_0.1", {num(bl[0]), num(bl[1])}},
                  {"product_eps_0.01", {num(ex.bracket.bracket_eps_small[0]), num(ex.bracket.bracket_eps_small[1])}},
                  {"product_eps_0.1", {num(ex.bracket.bracket_eps_large[0]), num(ex.bracket.bracket_eps_large[1])}}};
  j["exclusivity"] = {{"exclusive", r.exclusive},
                      {"min_rho_others", num(r.min_rho_others)},
                      {"sup_w_others", {num(r.sup_w_others[0]), num(r.sup_w_others[1]), num(r.sup_w_others[2])}}};
  json ladder = json::array();
  for (const auto& l : r.ladder) ladder.push_back({{"h", l.h}, {"I", num(l.I)}, {"resolved", l.resolved}});
  j["blowup_integral"] = {{"time", num(r.ladder_time)},
                          {"ladder", ladder},
                          {"fit", {{"c", num(r.ladder_fit.c)}, {"d", num(r.ladder_fit.d)}, {"r2", num(r.ladder_fit.r2)}, {"points", r.ladder_fit.points}}}};
  j["dz_rho1"] = {{"sup", num(ex.dz.sup_overall)}, {"z_at_sup", num(ex.dz.z_at_sup)}, {"under_resolved", ex.dz.under_resolved}};
  j["strips"] = {{"t_sep", num(ex.strips.t_sep)}, {"t0", num(ex.strips.t0_analytic)}, {"sigma", num(ex.sigma)}};
  j["max_abs_phi0"] = num(ex.max_abs_phi0);
  j["notices"] = ex.notices;
  const Trajectory& tr = *ex.traj[0];
  j["run"] = {{"steps", tr.steps},
              {"stop", stop_reason_name(tr.stop)},
              {"stop_message", tr.stop_message},
              {"t_detect", num(tr.t_detect)},
              {"t_last", num(tr.t_last)},
              {"nodes", tr.grid.n},
              {"spacing", tr.spacing},
              {"snapshots", tr.snaps.size()}};
  return j;
}

json Report::to_json(const RunConfig& cfg) const {
  json j;
  j["schema"] = "report";
  j["schema_version"] = kReportSchemaVersion;
  j["suite"] = suite;
  const std::string text = dump_config(cfg);
  j["provenance"] = {{"config_fingerprint", config_fingerprint(cfg)},
                     {"input_hash", git_blob_sha1(text)},
                     {"code_version", code_version()},
                     {"preset", cfg.preset}};
  if (cfg.output.timestamps) j["provenance"]["timestamp"] = iso_now();
  json cs = json::array();
  for (const auto& c : checks) {
    json e{{"name", c.name}, {"verdict", verdict_name(c.verdict)}, {"reason", c.reason}};
    if (!c.data.is_null()) e["data"] = c.data;
    cs.push_back(std::move(e));
  }
  j["checks"] = std::move(cs);
  j["summary"] = {{"pass", count(Verdict::Pass)}, {"fail", count(Verdict::Fail)}, {"skip", count(Verdict::Skip)}};
  if (!body.is_null()) j["body"] = body;
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"eigen-check", "make-data", "sobolev-scan", "evolve", "shock-scan", "report", "full"};
  return names;
}

namespace {

struct Ctx {
  const RunConfig& cfg;
  ArtifactWriter& out;
  const LogSink& log;
  void say(const std::string& m) const {
    if (log) log(m);
  }
};

std::string member_name(double theta, double eta) {
  return "theta" + format_double(theta) + "_eta" + format_double(eta);
}

void suite_eigen(Ctx& c, Report& r) {
  c.say("eigen-check: " + std::to_string(c.cfg.eigen.samples) + " states");
  const EigenCheckSummary s = eigen_check(c.cfg.phys, c.cfg.eigen, c.cfg.seed);
  eigen_check_verdicts(s, r);
  r.body["eigen"] = {{"samples", s.samples}, {"kappa", c.cfg.phys.kappa}, {"gamma_empirical", s.gamma_empirical}};
}

void suite_make_data(Ctx& c, Report& r) {
  const RunConfig& cfg = c.cfg;
  const Peak peak = compute_W0_z0(cfg.data);
  const Grid1D g = window_grid(cfg.phys, cfg.data, cfg.experiment, 1, 0.0);
  const DataField d = reconstruct_phi0(cfg.data, cfg.phys, cfg.experiment.mode, g,
                                       cfg.experiment.bump.active() ? &cfg.experiment.bump : nullptr);
  CsvTable t("data", 1, {"x", "w1", "w2", "w3", "w4", "phi1", "phi2", "phi3", "phi4"});
  ElwvArray a;
  a.axes = {{g.x_min, g.spacing(), g.n}};
  a.ncomp = 8;
  for (int k = 0; k < 4; ++k) a.data.insert(a.data.end(), d.w[k].begin(), d.w[k].end());
  for (int k = 0; k < 4; ++k) a.data.insert(a.data.end(), d.phi[k].begin(), d.phi[k].end());
  double mphi = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const State4 s = d.state(i);
    t.row({g.x(i), d.w[0][i], d.w[1][i], d.w[2][i], d.w[3][i], s[0], s[1], s[2], s[3]});
    mphi = std::max(mphi, std::sqrt(dot4(s, s)));
  }
  c.out.text("data/data.csv", t.str());
  c.out.binary("data/data.elwv", encode_elwv(a));
  // The identity is checked on its own fine grid so the 4th-order derivative error
  // (about 1e-9 at eta/1600) stays below the 1e-8 tolerance whatever the window spacing.
  const double rdx = cfg.data.eta / 1600.0;
  const Grid1D rg = Grid1D::covering(cfg.data.eta - 4.0 * rdx, 2.0 * cfg.data.eta + 4.0 * rdx, rdx);
  const DataField rd = reconstruct_phi0(cfg.data, cfg.phys, cfg.experiment.mode, rg,
                                        cfg.experiment.bump.active() ? &cfg.experiment.bump : nullptr);
  const Decomposition dec = decompose_field(cfg.phys, rg, rd.phi);
  double rt = 0.0;
  // Families 2, 3 are silent in paper-literal mode, so only 1 and 4 are compared there.
  const bool literal = cfg.experiment.mode == Normalization::PaperLiteral;
  for (std::size_t i = 2; i + 2 < rg.n; ++i)
    for (int k = 0; k < 4; ++k)
      if (!literal || k == 0 || k == 3) rt = std::max(rt, std::abs(dec.w[k][i] - rd.w[k][i]));
  r.add("ball", mphi < cfg.phys.kappa, "max |Phi0| = " + format_double(mphi) + " vs kappa " + format_double(cfg.phys.kappa),
        {{"max_abs_phi0", mphi}});
  r.add("round-trip", rt < 1e-8,
        "max |decompose(Phi0) - w| = " + format_double(rt) + " at spacing " + format_double(rdx) + " (< 1e-8)",
        {{"max", rt}, {"spacing", rdx}});
  r.body["data"] = {{"W0", peak.W0}, {"z0", peak.z0}, {"nodes", g.n}, {"max_abs_phi0", mphi}, {"notices", d.notices}};
}

void suite_sobolev(Ctx& c, Report& r) {
  const RunConfig& cfg = c.cfg;
  c.say("sobolev-scan: eta = 2^-" + std::to_string(cfg.sobolev.eta_exp_min) + " .. 2^-" + std::to_string(cfg.sobolev.eta_exp_max));
  const SobolevScan sc = sobolev_scan(cfg.data, cfg.sobolev);
  CsvTable t("sobolev", 1, {"eta", "s", "norm_sq", "d1", "d2", "d3", "d4", "refinement_level"});
  bool finite = true, converged = true;
  json rows = json::array();
  for (std::size_t k = 0; k < sc.etas.size(); ++k) {
    const auto& rep = sc.reports[k];
    t.row({sc.etas[k], rep.s, rep.norm_sq, rep.region[0], rep.region[1], rep.region[2], rep.region[3], 2.0});
    finite = finite && std::isfinite(rep.richardson) && rep.richardson > 0.0;
    converged = converged && rep.digits >= 2.0;
    rows.push_back({{"eta", sc.etas[k]}, {"norm_sq", rep.norm_sq}, {"coarse", rep.norm_sq_coarse}, {"richardson", rep.richardson},
                    {"digits", rep.digits}});
  }
  c.out.text("sobolev/norms.csv", t.str());
  const double bound = 2.0 * cfg.data.alpha - cfg.data.delta;
  r.add("finite", finite && converged, "all norms finite with >= 2 converged digits");
  r.add("homogeneity", sc.homogeneity_ratio == 0.25, "norm(theta/2)/norm(theta) = " + format_double(sc.homogeneity_ratio),
        {{"ratio", sc.homogeneity_ratio}});
  r.add("scaling-slope", sc.fit.slope <= bound + 0.05,
        "slope " + format_double(sc.fit.slope) + " vs 2 alpha - delta + 0.05 = " + format_double(bound + 0.05),
        {{"slope", sc.fit.slope}, {"r2", sc.fit.r2}, {"residual", sc.fit.residual}});
  const double g = std::abs(sc.gaussian_numeric - sc.gaussian_exact) / sc.gaussian_exact;
  r.add("gaussian-oracle", g < 0.01 && sc.gaussian_cauchy < 0.01,
        "numeric " + format_double(sc.gaussian_numeric) + " vs closed form " + format_double(sc.gaussian_exact),
        {{"rel", g}, {"cauchy", sc.gaussian_cauchy}});
  r.body["sobolev"] = {{"s", cfg.sobolev.s}, {"rows", rows}, {"slope", sc.fit.slope}, {"warnings", sc.fit.warnings}};
}

void write_trajectory(Ctx& c, const std::string& dir, const Trajectory& tr) {
  const std::size_t stride = c.cfg.output.snapshot_stride;
  if (stride > 0) {
    for (std::size_t k = 0; k < tr.snaps.size(); k += stride) {
      const Snapshot& s = tr.snaps[k];
      ElwvArray a;
      a.axes = {{s.origin, tr.spacing, s.count}};
      a.ncomp = 8;
      a.time = s.t;
      for (int q = 0; q < 4; ++q) a.data.insert(a.data.end(), s.phi[q].begin(), s.phi[q].end());
      for (int q = 0; q < 4; ++q) a.data.insert(a.data.end(), s.w[q].begin(), s.w[q].end());
      char name[32];
      std::snprintf(name, sizeof(name), "/snap_%06zu.elwv", k);
      c.out.binary(dir + name, encode_elwv(a));
    }
  }
  CsvTable g("gradient", 1, {"t", "max_dphi1", "max_abs_phi"});
  const std::size_t every = std::max<std::size_t>(1, tr.gradient.size() / 4000);
  for (std::size_t k = 0; k < tr.gradient.size(); k += every)
    g.row({tr.gradient[k].t, tr.gradient[k].max_dphi1, tr.gradient[k].max_abs_phi});
  c.out.text(dir + "/gradient.csv", g.str());
}

json run_json(const Trajectory& tr) {
  return {{"nodes", tr.grid.n},
          {"x_min", tr.grid.x_min},
          {"spacing", tr.spacing},
          {"frame_speed", tr.frame_speed},
          {"steps", tr.steps},
          {"stop", stop_reason_name(tr.stop)},
          {"stop_message", tr.stop_message},
          {"t_detect", num(tr.t_detect)},
          {"t_grad_fit", num(tr.t_grad_fit)},
          {"t_last", num(tr.t_last)},
          {"initial_gradient", tr.initial_gradient},
          {"m_stop", tr.m_stop},
          {"snapshots", tr.snaps.size()}};
}

void suite_evolve(Ctx& c, Report& r) {
  const RunConfig& cfg = c.cfg;
  const Peak peak = compute_W0_z0(cfg.data);
  const double t_est = 1.0 / (std::abs(c111_at_rest(cfg.phys)) * peak.W0);
  const double t_max = cfg.experiment.t_max > 0.0 ? cfg.experiment.t_max : cfg.experiment.t_max_factor * t_est;
  const Grid1D g = window_grid(cfg.phys, cfg.data, cfg.experiment, 1, t_max);
  const DataField d = reconstruct_phi0(cfg.data, cfg.phys, cfg.experiment.mode, g,
                                       cfg.experiment.bump.active() ? &cfg.experiment.bump : nullptr);
  EvolveConfig ec = cfg.experiment.evolve;
  ec.t_max = t_max;
  ec.frame_speed = cfg.experiment.frame == FrameMode::Comoving ? cfg.phys.c1 : 0.0;
  ec.dense_from = cfg.experiment.dense_from_factor * t_est;
  c.say("evolve: " + std::to_string(g.n) + " nodes to t = " + format_double(t_max));
  const Trajectory tr = run(cfg.phys, ec, d);
  write_trajectory(c, "evolve", tr);
  json m = run_json(tr);
  m["schema"] = "run-manifest";
  m["schema_version"] = 1;
  m["config"] = dump_config(cfg);
  c.out.text("evolve/run.json", m.dump(2) + "\n");
  const bool ok = tr.stop != StopReason::NonFinite && tr.stop != StopReason::BallExit;
  r.add("integrated", ok, std::string("stop: ") + stop_reason_name(tr.stop) + (tr.stop_message.empty() ? "" : " (" + tr.stop_message + ")"));
  const bool grew = !tr.gradient.empty() && tr.gradient.back().max_dphi1 > 2.0 * tr.initial_gradient;
  r.add("gradient-growth", grew, "final max |d_x phi1| / initial = " +
        format_double(tr.gradient.empty() ? 0.0 : tr.gradient.back().max_dphi1 / tr.initial_gradient));
  r.body["evolve"] = run_json(tr);
}

struct Member {
  double theta = 0.0, eta = 0.0;
  bool in_theta_sweep = false, in_eta_sweep = false;
  std::shared_ptr<ShockExperiment> ex;
  std::string error;
};

double sup_on(const NormSeries& n, const std::vector<double>& v, double t_hi) {
  double m = 0.0;
  for (std::size_t k = 0; k < n.t.size(); ++k)
    if (n.t[k] <= t_hi && std::isfinite(v[k])) m = std::max(m, v[k]);
  return m;
}

void suite_shock(Ctx& c, Report& r) {
  const RunConfig& cfg = c.cfg;
  std::vector<Member> members;
  auto add_member = [&](double theta, double eta, bool th, bool et) {
    for (auto& m : members)
      if (m.theta == theta && m.eta == eta) {
        m.in_theta_sweep = m.in_theta_sweep || th;
        m.in_eta_sweep = m.in_eta_sweep || et;
        return;
      }
    members.push_back({theta, eta, th, et, nullptr, {}});
  };
  for (double th : cfg.sweep.thetas) add_member(th, cfg.data.eta, true, false);
  for (double e : cfg.sweep.etas) add_member(cfg.data.theta, e, false, true);

  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= members.size()) return;
        k = next++;
        c.say("shock-scan: " + member_name(members[k].theta, members[k].eta));
      }
      Member& m = members[k];
      DataParams dp = cfg.data;
      dp.theta = m.theta;
      dp.eta = m.eta;
      try {
        m.ex = std::make_shared<ShockExperiment>(run_shock_experiment(cfg.phys, dp, cfg.experiment));
      } catch (const std::exception& e) {
        m.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t nw = std::min(cfg.workers, members.size());
  for (std::size_t i = 1; i < nw; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json summary = json::array();
  for (auto& m : members) {
    const std::string name = member_name(m.theta, m.eta);
    if (!m.ex) {
      r.add(name + ":run", false, m.error);
      continue;
    }
    const ShockExperiment& ex = *m.ex;
    const std::string dir = "shock/" + name;
    c.out.text(dir + "/shock_report.json", shock_report_json(ex).dump(2) + "\n");
    c.out.text(dir + "/ladder.csv", ladder_csv(ex.report).str());
    for (int f = 0; f < 4; ++f)
      if (ex.fans[f]) c.out.text(dir + "/fan" + std::to_string(f + 1) + ".csv", fan_csv(*ex.fans[f], cfg.output.fan_seed_stride).str());
    if (!ex.norms.t.empty()) c.out.text(dir + "/norm_series.json", norm_series_json(ex.norms).dump(1) + "\n");
    write_trajectory(c, dir + "/family1", *ex.traj[0]);
    CsvTable mr("min-rho", 1, {"t", "min_rho1"});
    const auto series = min_rho_series(*ex.fans[0]);
    for (std::size_t k = 0; k < series.size(); ++k) mr.row({ex.fans[0]->t[k], series[k]});
    c.out.text(dir + "/min_rho1.csv", mr.str());

    const ShockReport& rep = ex.report;
    r.add(name + ":shock", rep.shock, rep.reason, {{"T_num", num(rep.T_num)}});
    if (!rep.shock) continue;
    r.add(name + ":bracket", ex.bracket.in_range, "P = " + format_double(rep.P) + " in [0.7, 1.4]", {{"P", rep.P}});
    r.add(name + ":estimators", rep.discrepancy < 0.02,
          "|T_rho - T_grad| / T_rho = " + format_double(rep.discrepancy) + " (< 0.02)", {{"T_grad", num(rep.T_grad)}});
    r.add(name + ":blowup-integral", rep.ladder_fit.r2 > 0.98 && rep.ladder_fit.c > 0.0,
          "I(h) = c ln(1/h) + d: c " + format_double(rep.ladder_fit.c) + ", R^2 " + format_double(rep.ladder_fit.r2));
    if (cfg.experiment.trace_all_families) {
      r.add(name + ":exclusivity", rep.min_rho_others >= 0.5,
            "min rho over families 2-4 up to T_num = " + format_double(rep.min_rho_others));
      const double W0 = rep.W0, t_hi = 0.8 * rep.T_num;
      const double S = sup_on(ex.norms, ex.norms.S, t_hi), J = sup_on(ex.norms, ex.norms.J, t_hi);
      r.add(name + ":norm-bounds", S <= 1.3 && J <= 1.3 * W0,
            "sup S = " + format_double(S) + ", sup J / W0 = " + format_double(J / W0) + " on [0, 0.8 T_num]");
    }
    summary.push_back({{"name", name}, {"theta", m.theta}, {"eta", m.eta}, {"T_num", rep.T_num}, {"P", rep.P}, {"W0", rep.W0}});
  }

  // Sweep-level verdicts.
  std::vector<const Member*> th, et;
  for (const auto& m : members) {
    if (!m.ex || !m.ex->report.shock) continue;
    if (m.in_theta_sweep) th.push_back(&m);
    if (m.in_eta_sweep) et.push_back(&m);
  }
  std::sort(th.begin(), th.end(), [](auto a, auto b) { return a->theta > b->theta; });
  std::sort(et.begin(), et.end(), [](auto a, auto b) { return a->eta > b->eta; });
  if (th.size() >= 2 && th.size() == cfg.sweep.thetas.size()) {
    std::vector<ShockReport> reps;
    for (auto m : th) reps.push_back(m->ex->report);
    r.add("theta-trend", theta_trend_ok(reps), "|P - 1| non-increasing as theta decreases");
    if (cfg.experiment.trace_all_families) {
      double lo = HUGE_VAL, hi = 0.0;
      for (auto m : th)
        for (double w : m->ex->report.sup_w_others) {
          const double v = w / (m->ex->report.W0 * m->ex->report.W0);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      r.add("w-others-scaling", hi / lo < 3.0, "sup|w_i| / W0^2 spread max/min = " + format_double(hi / lo));
    }
  } else {
    r.skip("theta-trend", "needs every theta member with a detected shock");
  }
  if (et.size() >= 3 && et.size() == cfg.sweep.etas.size()) {
    std::vector<ShockReport> reps;
    std::vector<double> W0s;
    for (auto m : et) {
      reps.push_back(m->ex->report);
      W0s.push_back(m->ex->report.W0);
    }
    const IllposednessVerdict v = illposedness_trend(reps, W0s);
    r.add("illposedness", v.pass, "T_num decreasing: " + std::string(v.decreasing ? "yes" : "no") +
                                      ", T_num W0 max/min = " + format_double(v.product_ratio));
    if (cfg.experiment.trace_all_families) {
      double vlo = HUGE_VAL, vhi = 0.0, ulo = HUGE_VAL, uhi = 0.0;
      for (auto m : et) {
        const auto& ex = *m->ex;
        const double t_hi = 0.8 * ex.report.T_num, W0 = ex.report.W0, eta = m->eta;
        const double V = sup_on(ex.norms, ex.norms.V, t_hi) / (eta * W0 * W0);
        const double U = sup_on(ex.norms, ex.norms.U, t_hi) / (eta * W0);
        vlo = std::min(vlo, V), vhi = std::max(vhi, V), ulo = std::min(ulo, U), uhi = std::max(uhi, U);
      }
      r.add("norm-scaling", vhi / vlo < 3.0 && uhi / ulo < 3.0,
            "V/(eta W0^2) spread " + format_double(vhi / vlo) + ", U/(eta W0) spread " + format_double(uhi / ulo));
    }
  } else {
    r.skip("illposedness", "needs >= 3 eta members with detected shocks");
  }
  r.body["members"] = summary;
}

void suite_report(Ctx& c, Report& r) {
  namespace fs = std::filesystem;
  const fs::path root(c.cfg.out_dir);
  json suites = json::object();
  for (const auto& name : suite_names()) {
    if (name == "report" || name == "full") continue;
    const fs::path p = root / name / "report.json";
    if (!fs::exists(p)) {
      r.skip(name, "no report under " + p.string());
      continue;
    }
    std::ifstream f(p);
    json j = json::parse(f, nullptr, false);
    if (j.is_discarded()) {
      r.add(name, false, "unreadable " + p.string());
      continue;
    }
    const auto fails = j["summary"]["fail"].get<std::size_t>();
    r.add(name, fails == 0, std::to_string(fails) + " failing checks", j["summary"]);
    suites[name] = j["summary"];
  }
  r.body["suites"] = suites;
}

Report run_one(const RunConfig& cfg, const std::string& suite, const LogSink& log) {
  namespace fs = std::filesystem;
  Report r;
  r.suite = suite;
  const fs::path dir = fs::path(cfg.out_dir) / suite;
  ArtifactWriter out(dir);
  Ctx c{cfg, out, log};
  const auto start = std::chrono::steady_clock::now();
  try {
    if (suite == "eigen-check") suite_eigen(c, r);
    else if (suite == "make-data") suite_make_data(c, r);
    else if (suite == "sobolev-scan") suite_sobolev(c, r);
    else if (suite == "evolve") suite_evolve(c, r);
    else if (suite == "shock-scan") suite_shock(c, r);
    else if (suite == "report") suite_report(c, r);
    else fail(ErrorCode::InvalidArgument, "unknown suite '" + suite + "'");
  } catch (const Error& e) {
    r.add(suite + ":error", false, std::string(error_code_name(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    r.add(suite + ":error", false, e.what());
  }
  out.text("report.json", r.to_json(cfg).dump(2) + "\n");
  out.text("config.txt", dump_config(cfg));
  json meta{{"schema", "manifest"}, {"schema_version", 1}, {"suite", suite}, {"code_version", code_version()},
            {"config_fingerprint", config_fingerprint(cfg)}};
  if (cfg.output.timestamps) {
    meta["timestamp"] = iso_now();
    meta["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  out.manifest(meta);
  return r;
}

}  // namespace

Report run_suite(const RunConfig& cfg, std::string_view suite, const LogSink& log) {
  const auto issues = validate_config(cfg);
  if (!issues.empty()) {
    std::string msg = "invalid config:";
    for (const auto& i : issues) msg += "\n  " + i.key + ": " + i.message;
    fail(ErrorCode::Config, msg);
  }
  const std::string s(suite);
  if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
    fail(ErrorCode::InvalidArgument, "unknown suite '" + s + "'");
  if (s != "full") return run_one(cfg, s, log);
  Report all;
  all.suite = "full";
  for (const char* part : {"eigen-check", "make-data", "sobolev-scan", "shock-scan", "report"}) {
    const Report r = run_one(cfg, part, log);
    for (const auto& ch : r.checks) all.checks.push_back({std::string(part) + "/" + ch.name, ch.verdict, ch.reason, ch.data});
    all.body[part] = r.body;
  }
  ArtifactWriter out(std::filesystem::path(cfg.out_dir) / "full");
  out.text("report.json", all.to_json(cfg).dump(2) + "\n");
  out.manifest({{"schema", "manifest"}, {"schema_version", 1}, {"suite", "full"}, {"code_version", code_version()}});
  return all;
}

}  // namespace elwv
