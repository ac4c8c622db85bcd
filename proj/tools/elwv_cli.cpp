#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elwv/elwv.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config_file;
  std::string preset;
  std::string out;
  int workers = 0;
  std::vector<std::string> sets;
  bool dump = false;
  bool quiet = false;
  bool json = false;
  // evolve shortcuts
  double points_per_eta = 0.0;
  double cfl = 0.0;
  double dissipation = -1.0;
  double t_max = -1.0;
};

std::string take(char* s) {
  std::string out = s ? s : "";
  elwv_string_free(s);
  return out;
}

void log_line(const char* msg, void* user) {
  if (!*static_cast<bool*>(user)) std::fprintf(stderr, "%s\n", msg);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int config_error(const std::string& what) {
  std::fprintf(stderr, "config error:\n%s", what.c_str());
  if (what.empty() || what.back() != '\n') std::fputc('\n', stderr);
  return kExitConfig;
}

int run(const Options& o, const std::string& suite) {
  elwv_config* cfg = nullptr;
  int rc;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) return config_error("cannot read " + o.config_file);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (!o.preset.empty()) text = "preset = " + o.preset + "\n" + text;
    rc = elwv_config_parse(text.c_str(), &cfg);
  } else {
    rc = elwv_config_new(o.preset.empty() ? nullptr : o.preset.c_str(), &cfg);
  }
  if (rc != ELWV_OK) return config_error(elwv_last_error());

  std::vector<std::pair<std::string, std::string>> overrides;
  if (!o.out.empty()) overrides.emplace_back("run.out", o.out);
  if (o.workers > 0) overrides.emplace_back("run.workers", std::to_string(o.workers));
  if (o.points_per_eta > 0) overrides.emplace_back("grid.fine_points_per_eta", fmt(o.points_per_eta));
  if (o.cfl > 0) overrides.emplace_back("evolve.cfl", fmt(o.cfl));
  if (o.dissipation >= 0) overrides.emplace_back("evolve.dissipation", fmt(o.dissipation));
  if (o.t_max >= 0) overrides.emplace_back("evolve.t_max", fmt(o.t_max));
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      elwv_config_free(cfg);
      return config_error("--set expects key=value, got '" + s + "'");
    }
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [k, v] : overrides) {
    if (elwv_config_set(cfg, k.c_str(), v.c_str()) != ELWV_OK) {
      const std::string msg = elwv_last_error();
      elwv_config_free(cfg);
      return config_error(msg);
    }
  }

  if (o.dump) {
    char* text = nullptr;
    elwv_config_dump(cfg, &text);
    std::fputs(take(text).c_str(), stdout);
    elwv_config_free(cfg);
    return kExitPass;
  }

  bool quiet = o.quiet;
  elwv_report* rep = nullptr;
  rc = elwv_run_suite(cfg, suite.c_str(), log_line, &quiet, &rep);
  elwv_config_free(cfg);
  if (rc == ELWV_ERR_CONFIG) return config_error(elwv_last_error());
  if (rc != ELWV_OK) {
    std::fprintf(stderr, "%s: %s\n", elwv_error_name(rc), elwv_last_error());
    return kExitFail;
  }

  if (o.json) {
    char* js = nullptr;
    elwv_report_json(rep, &js);
    std::printf("%s\n", take(js).c_str());
  } else {
    const size_t n = elwv_report_check_count(rep);
    for (size_t i = 0; i < n; ++i) {
      const char* name = nullptr;
      const char* reason = nullptr;
      int verdict = 0;
      elwv_report_check(rep, i, &name, &verdict, &reason);
      static const char* tags[] = {"PASS", "FAIL", "SKIP"};
      std::printf("%s  %s  %s\n", tags[verdict], name, reason);
    }
  }
  size_t pass = 0, fail = 0, skip = 0;
  elwv_report_counts(rep, &pass, &fail, &skip);
  elwv_report_free(rep);
  std::fprintf(stderr, "%s: %zu passed, %zu failed, %zu skipped\n", suite.c_str(), pass, fail, skip);
  return fail == 0 ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shock formation experiments for the 2D elastic-wave model"};
  app.set_version_flag("--version", std::string(elwv_version()));
  app.require_subcommand(1);

  Options o;
  std::string presets;
  for (size_t i = 0; i < elwv_preset_count(); ++i) presets += std::string(i ? ", " : "") + elwv_preset_name(i);

  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config_file, "Config file (key = value, [section] headers)")
        ->check(CLI::ExistingFile);
    sub->add_option("-p,--preset", o.preset, "Base preset: " + presets);
    sub->add_option("-o,--out", o.out, "Output directory");
    sub->add_option("-j,--workers", o.workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("-s,--set", o.sets, "Override a config key, e.g. --set data.theta=0.05");
    sub->add_flag("--dump-config", o.dump, "Print the effective config and exit");
    sub->add_flag("-q,--quiet", o.quiet, "No progress log");
    sub->add_flag("--json", o.json, "Print the report as JSON");
  };

  const struct {
    const char* name;
    const char* help;
  } suites[] = {
      {"eigen-check", "Eigenstructure identities, coupling symmetries, speed gap"},
      {"make-data", "Build the initial data and write data.csv / data.elwv"},
      {"sobolev-scan", "Homogeneous Sobolev norm of the data across eta"},
      {"evolve", "Single 1D run of the detecting family"},
      {"shock-scan", "Full shock experiment over the theta and eta sweeps"},
      {"report", "Aggregate existing suite reports"},
      {"full", "eigen-check, make-data, sobolev-scan, shock-scan, report"},
  };
  std::string chosen;
  for (const auto& s : suites) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    if (std::string(s.name) == "evolve") {
      sub->add_option("--points-per-eta", o.points_per_eta, "Fine grid resolution")->check(CLI::PositiveNumber);
      sub->add_option("--cfl", o.cfl, "CFL number")->check(CLI::PositiveNumber);
      sub->add_option("--dissipation", o.dissipation, "Fourth-difference dissipation coefficient")
          ->check(CLI::NonNegativeNumber);
      sub->add_option("--t-max", o.t_max, "Final time; 0 picks it from the blow-up estimate")
          ->check(CLI::NonNegativeNumber);
    }
    sub->callback([&chosen, name = std::string(s.name)] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  return run(o, chosen);
}
