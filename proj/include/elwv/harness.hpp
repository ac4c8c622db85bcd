#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "elwv/config.hpp"
#include "elwv/io.hpp"

namespace elwv {

inline constexpr int kReportSchemaVersion = 1;
const char* code_version();

enum class Verdict { Pass, Fail, Skip };
const char* verdict_name(Verdict v);

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::Skip;
  std::string reason;
  nlohmann::json data;
};

struct Report {
  std::string suite;
  std::vector<CheckResult> checks;
  nlohmann::json body;

  void add(std::string name, bool pass, std::string reason, nlohmann::json data = {});
  void skip(std::string name, std::string reason);
  std::size_t count(Verdict v) const;
  bool passed() const { return count(Verdict::Fail) == 0; }
  nlohmann::json to_json(const RunConfig& cfg) const;
};

using LogSink = std::function<void(const std::string&)>;

const std::vector<std::string>& suite_names();

// Runs a suite and writes its artifacts plus manifest.json under cfg.out_dir.
// Module errors become FAIL checks; the config must already be valid.
Report run_suite(const RunConfig& cfg, std::string_view suite, const LogSink& log = {});

// Building blocks, also used by the acceptance driver.
struct EigenCheckSummary {
  std::size_t samples = 0;
  double duality_literal = 0.0;
  double duality_regularized = 0.0;
  double spectral = 0.0;
  double grad_lambda = 0.0;
  double grad_rvec = 0.0;
  double symmetry_lambda = 0.0;
  double symmetry_c = 0.0;
  double closed_form = 0.0;
  double c111_0 = 0.0;
  double c111_0_fd = 0.0;
  double sigma = 0.0;
  double sigma_coarse = 0.0;
  double gamma_empirical = 0.0;
  double singular_ratio = 0.0;  // max/min of |gamma^2_13| along phi2 -> 0
};
EigenCheckSummary eigen_check(const PhysParams& p, const EigenCheckParams& ep, std::uint64_t seed);
void eigen_check_verdicts(const EigenCheckSummary& s, Report& r);

struct SobolevScan {
  std::vector<double> etas;
  std::vector<SobolevReport> reports;
  ScalingFit fit;
  double homogeneity_ratio = 0.0;   // norm(theta/2) / norm(theta), expected 1/4
  double gaussian_numeric = 0.0;
  double gaussian_exact = 0.0;
  double gaussian_cauchy = 0.0;     // relative change between the finest two levels
};
SobolevScan sobolev_scan(const DataParams& dp, const SobolevScanParams& sp);
// Closed form of the homogeneous norm of exp(-|x|^2 / (2 w^2)) in 2D, frequencies in cycles/length.
double gaussian_hdot_exact(double width, double s);
SpectralGrid sample_gaussian(double width, std::size_t n, double box);

// Seeds per fan CSV row: z, t, X, rho, v, w.
CsvTable fan_csv(const CharFan& fan, std::size_t seed_stride);
CsvTable ladder_csv(const ShockReport& r);
nlohmann::json shock_report_json(const ShockExperiment& ex);
nlohmann::json norm_series_json(const NormSeries& n);

}  // namespace elwv
