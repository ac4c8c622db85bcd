#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "elwv/error.hpp"
#include "elwv/shock_analysis.hpp"

using namespace elwv;

namespace {

constexpr double kEta = 0.05;

CharFan synthetic_fan(int family, std::size_t core, const std::vector<double>& times,
                      const std::function<double(double, double)>& rho,
                      const std::function<double(double, double)>& v) {
  CharFan f;
  f.family = family;
  f.seeds = make_seeds(kEta, core, 8);
  f.t = times;
  for (double t : times)
    for (double z : f.seeds.z) {
      f.X.push_back(z + 2.0 * t);
      f.speed.push_back(2.0);
      f.rho.push_back(rho(z, t));
      f.v.push_back(v(z, t));
    }
  return f;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

}  // namespace

TEST(ShockAnalysis, LinearDensityDecayGivesTheExactShockTime) {
  const double T = 3.0, z0 = 0.07;
  auto rho = [&](double z, double t) {
    const double shape = std::max(0.0, 1.0 - std::pow((z - z0) / kEta, 2));
    return 1.0 - (t / T) * shape;
  };
  // Grid hits z0 exactly: seeds are eta + k eta/100.
  const CharFan f = synthetic_fan(1, 101, linspace(0.0, 2.999, 3000), rho, [](double, double) { return 0.01; });
  Trajectory tr;
  tr.t_grad_fit = 1.01 * T;
  const ShockReport r = detect_shock(f, tr, AnalysisParams{});
  ASSERT_TRUE(r.shock) << r.reason;
  EXPECT_NEAR(r.T_num, T, 1e-9);
  EXPECT_NEAR(r.z_shock, z0, 1e-12);
  EXPECT_NEAR(r.discrepancy, 0.01 / 1.0, 1e-9);
  EXPECT_GE(r.fit_points, 3u);
}

TEST(ShockAnalysis, ZeroDataHasNoShock) {
  const CharFan f = synthetic_fan(1, 33, linspace(0.0, 5.0, 50), [](double, double) { return 1.0; },
                                  [](double, double) { return 0.0; });
  ShockReport r = detect_shock(f, Trajectory{}, AnalysisParams{});
  EXPECT_FALSE(r.shock);
  EXPECT_FALSE(r.reason.empty());
  EXPECT_TRUE(h2_blowup_integral(f, r, kEta, AnalysisParams{}).empty());
  EXPECT_EQ(h2_integral_at(f, 0, 0.07, 0.001), 0.0);
}

TEST(ShockAnalysis, BracketEndpoints) {
  const auto b = shock_bracket(-0.75, 1.0, 0.01);
  EXPECT_NEAR(b[0] * 0.75, 1.0 / std::pow(1.01, 3), 1e-15);
  EXPECT_NEAR(b[1] * 0.75, 1.0 / std::pow(0.99, 4), 1e-15);
  EXPECT_NEAR(b[0] * 0.75, 0.9706, 1e-4);
  EXPECT_NEAR(b[1] * 0.75, 1.0410, 1e-4);
}

TEST(ShockAnalysis, BracketProductOnAMeasuredShockTime) {
  ShockReport r;
  r.shock = true;
  r.T_num = 10.5;
  const BracketVerdict v = bracket_check(r, PhysParams{}, 0.12958);
  EXPECT_NEAR(v.P, 10.5 * 0.75 * 0.12958, 1e-15);
  EXPECT_NEAR(v.P, 1.0205, 1e-4);
  EXPECT_TRUE(v.in_range);
  r.T_num = 20.0;
  EXPECT_FALSE(bracket_check(r, PhysParams{}, 0.12958).in_range);
}

TEST(ShockAnalysis, ThetaTrendRequiresNonIncreasingDeviation) {
  std::vector<ShockReport> rs(3);
  for (auto& r : rs) r.shock = true;
  rs[0].P = 1.0006;
  rs[1].P = 1.0004;
  rs[2].P = 0.9998;
  EXPECT_TRUE(theta_trend_ok(rs));
  rs[2].P = 1.0009;
  EXPECT_FALSE(theta_trend_ok(rs));
  rs[2].P = 1.0001;
  rs[1].shock = false;
  EXPECT_FALSE(theta_trend_ok(rs));
}

TEST(ShockAnalysis, IllposednessTrend) {
  std::vector<ShockReport> rs(3);
  for (auto& r : rs) r.shock = true;
  rs[0].T_num = 10.29;
  rs[1].T_num = 9.74;
  rs[2].T_num = 9.31;
  const std::vector<double> W0 = {0.1297, 0.1370, 0.1433};
  IllposednessVerdict v = illposedness_trend(rs, W0);
  EXPECT_TRUE(v.decreasing);
  EXPECT_LT(v.product_ratio, 1.01);
  EXPECT_TRUE(v.pass);
  rs[2].T_num = 9.9;
  EXPECT_FALSE(illposedness_trend(rs, W0).pass);
  EXPECT_THROW(illposedness_trend(std::span(rs).first(2), std::span(W0).first(2)), Error);
}

TEST(ShockAnalysis, ExclusivityVerdict) {
  auto unit = [](double, double) { return 1.0; };
  auto small = [](double, double) { return 1e-4; };
  const auto times = linspace(0.0, 1.0, 11);
  CharFan f1 = synthetic_fan(1, 33, times, unit, small);
  CharFan f2 = synthetic_fan(2, 33, times, [](double, double t) { return 1.0 - 0.3 * t; }, small);
  CharFan f3 = synthetic_fan(3, 33, times, unit, small);
  CharFan f4 = synthetic_fan(4, 33, times, unit, small);
  ShockReport r;
  r.shock = true;
  r.T_num = 0.5;
  r.min_rho1_end = 1e-4;
  family_exclusivity(r, {&f1, &f2, &f3, &f4});
  EXPECT_NEAR(r.min_rho_others, 0.85, 1e-12);
  EXPECT_TRUE(r.exclusive);
  EXPECT_NEAR(r.sup_w_others[0], 1e-4 / 0.85, 1e-12);
  r.T_num = 1.0;
  CharFan g2 = synthetic_fan(2, 33, times, [](double, double t) { return 1.0 - 0.6 * t; }, small);
  family_exclusivity(r, {&f1, &g2, &f3, &f4});
  EXPECT_FALSE(r.exclusive);
}

TEST(ShockAnalysis, BlowupIntegralWeightIntegratesToTheSemicircle) {
  // rho = v = 1: I(h -> 0) is the area under sqrt((z - eta)(2 eta - z)), pi eta^2 / 8.
  const CharFan f = synthetic_fan(1, 4001, {0.0}, [](double, double) { return 1.0; },
                                  [](double, double) { return 1.0; });
  // Trapezoid error at the square-root endpoints is O(dz^1.5), about 4e-6 relative here.
  EXPECT_NEAR(h2_integral_at(f, 0, 0.075, 0.0), std::numbers::pi * kEta * kEta / 8.0, 2e-5 * kEta * kEta);
  // Excluding a band around the centre removes about 2h * eta / 2.
  const double h = 1e-3;
  EXPECT_NEAR(h2_integral_at(f, 0, 0.075, 0.0) - h2_integral_at(f, 0, 0.075, h), h * kEta, 1e-3 * h * kEta);
}

TEST(ShockAnalysis, LogarithmicDivergenceIsDetected) {
  const double z0 = 0.07;
  // rho vanishing linearly at z0 makes the integrand ~ 1 / |z - z0|.
  auto rho = [&](double z, double t) { return t == 0.0 ? 1.0 : 1e-4 + std::abs(z - z0) / kEta; };
  CharFan f = synthetic_fan(1, 4001, {0.0, 1.0}, rho, [](double, double) { return 1.0; });
  ShockReport r;
  r.shock = true;
  r.z_shock = z0;
  AnalysisParams ap;
  ap.rho_floor = 1e-4;
  const auto ladder = h2_blowup_integral(f, r, kEta, ap);
  ASSERT_EQ(ladder.size(), ap.ladder_points);
  for (std::size_t k = 1; k < ladder.size(); ++k) EXPECT_LT(ladder[k].I, ladder[k - 1].I);
  const LogFit fit = fit_log_ladder(ladder);
  EXPECT_GT(fit.r2, 0.98);
  // c -> 2 eta * weight(z0) for small h.
  const double c_exact = 2.0 * kEta * std::sqrt((z0 - kEta) * (2.0 * kEta - z0));
  EXPECT_GT(fit.c, 0.0);
  EXPECT_NEAR(fit.c, c_exact, 0.1 * c_exact);
}

TEST(ShockAnalysis, LogFitIsExactOnLogData) {
  std::vector<LadderPoint> pts;
  for (double h : {0.1, 0.05, 0.02, 0.01}) pts.push_back({h, 2.0 * std::log(1.0 / h) + 0.5, true});
  pts.push_back({0.001, 1e9, false});
  const LogFit f = fit_log_ladder(pts);
  EXPECT_EQ(f.points, 4u);
  EXPECT_NEAR(f.c, 2.0, 1e-12);
  EXPECT_NEAR(f.d, 0.5, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(ShockAnalysis, ParameterValidation) {
  AnalysisParams ap;
  ap.rho_floor = 0.5;
  EXPECT_THROW(ap.validate(), Error);
  ap = {};
  ap.epsilon = 0.5;
  EXPECT_THROW(ap.validate(), Error);
}
