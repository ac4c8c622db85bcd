#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "elwv/characteristics.hpp"
#include "elwv/evolve1d.hpp"
#include "elwv/model_eigen.hpp"

namespace elwv {

struct AnalysisParams {
  double rho_floor = 1e-3;
  double epsilon = 0.01;
  // Exclusion ladder for the blow-up integral, in units of eta.
  double h_min = 0.04;
  double h_max = 0.4;
  std::size_t ladder_points = 8;

  void validate() const;
};

struct LadderPoint {
  double h = 0.0;
  double I = 0.0;
  bool resolved = true;
};

struct LogFit {
  double c = 0.0;  // I ~ c ln(1/h) + d
  double d = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

struct ShockReport {
  bool shock = false;
  std::string reason;
  double T_num = std::numeric_limits<double>::quiet_NaN();
  double z_shock = std::numeric_limits<double>::quiet_NaN();
  double T_grad = std::numeric_limits<double>::quiet_NaN();
  double discrepancy = std::numeric_limits<double>::quiet_NaN();
  std::size_t fit_points = 0;
  double min_rho1_end = 1.0;
  double t_end = 0.0;
  // Bracket ingredients, filled by bracket_check.
  double W0 = 0.0;
  double c111_0 = 0.0;
  double P = std::numeric_limits<double>::quiet_NaN();
  // Family exclusivity over t <= T_num.
  double min_rho_others = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 3> sup_w_others{};
  bool exclusive = false;
  // Blow-up integral.
  double ladder_time = 0.0;
  std::vector<LadderPoint> ladder;
  LogFit ladder_fit;
};

// min over core seeds of rho_1 at each stored time.
std::vector<double> min_rho_series(const CharFan& fan);

ShockReport detect_shock(const CharFan& fan1, const Trajectory& traj, const AnalysisParams& ap);

// Shock-time bracket endpoints for a given epsilon.
std::array<double, 2> shock_bracket(double c111_0, double W0, double epsilon);

struct BracketVerdict {
  double P = 0.0;
  bool in_range = false;  // P in [0.7, 1.4]
  std::array<double, 2> bracket_eps_small{};  // epsilon = 0.01, as products
  std::array<double, 2> bracket_eps_large{};  // epsilon = 0.1
};

BracketVerdict bracket_check(ShockReport& report, const PhysParams& p, double W0);

// reports ordered by decreasing theta.
bool theta_trend_ok(std::span<const ShockReport> reports);

void family_exclusivity(ShockReport& report, const std::array<const CharFan*, 4>& fans);

struct IllposednessVerdict {
  bool decreasing = false;
  double product_ratio = 0.0;  // max/min of T_num * W0
  bool pass = false;
};

// reports ordered by decreasing eta; W0s aligned.
IllposednessVerdict illposedness_trend(std::span<const ShockReport> reports, std::span<const double> W0s);

double h2_integral_at(const CharFan& fan1, std::size_t ti, double z0, double h);

// Ladder at the last time with min rho_1 >= rho_floor; fills report.ladder*.
std::vector<LadderPoint> h2_blowup_integral(const CharFan& fan1, ShockReport& report, double eta,
                                            const AnalysisParams& ap);

LogFit fit_log_ladder(std::span<const LadderPoint> ladder);

}  // namespace elwv
