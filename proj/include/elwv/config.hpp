#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "elwv/pipeline.hpp"

namespace elwv {

struct EigenCheckParams {
  std::size_t samples = 10000;
  std::size_t gap_samples = 20000;
  double fd_step = 1e-5;
};

struct SobolevScanParams {
  double s = 0.75;
  // eta = 2^-k for k in [eta_exp_min, eta_exp_max].
  int eta_exp_min = 6;
  int eta_exp_max = 14;
  std::size_t points_across = 256;
  double pad = 4.0;
};

struct SweepParams {
  std::vector<double> thetas{0.1, 0.05, 0.02};
  std::vector<double> etas{0.05, 0.025, 0.0125};
};

struct OutputParams {
  // Every k-th stored snapshot of the family-1 window goes to an ELWV file; 0 disables.
  std::size_t snapshot_stride = 100;
  // Seeds written to the fan CSV (every k-th seed).
  std::size_t fan_seed_stride = 8;
  // Wall-clock fields break byte-identical reruns, so they are opt-in.
  bool timestamps = false;
};

struct RunConfig {
  std::string preset = "paper-desk";
  std::string out_dir = "elwv-out";
  std::uint64_t seed = 20240611;
  std::size_t workers = 1;
  PhysParams phys;
  DataParams data;
  ExperimentConfig experiment;
  EigenCheckParams eigen;
  SobolevScanParams sobolev;
  SweepParams sweep;
  OutputParams output;
};

struct ConfigIssue {
  std::string key;
  std::string message;
};

struct ParseResult {
  RunConfig config;
  std::vector<ConfigIssue> issues;
  bool ok() const { return issues.empty(); }
};

std::vector<std::string> preset_names();
// Throws Config on an unknown name.
RunConfig make_preset(std::string_view name);

// Flat "key = value" text; "[section]" prefixes following keys with "section.".
// "preset = name" (first key only) selects the base; later keys override it.
ParseResult parse_config(std::string_view text);
// All violations of the module invariants, keyed by config path.
std::vector<ConfigIssue> validate_config(const RunConfig& cfg);
// Parseable text with every key and its unit; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& cfg);
std::string config_fingerprint(const RunConfig& cfg);

struct KeyDoc {
  std::string key;
  std::string doc;
};
std::vector<KeyDoc> config_keys();

}  // namespace elwv
