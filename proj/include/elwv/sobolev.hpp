#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace elwv {

// values[iy * nx + ix] sampled at (x0 + ix*dx, y0 + iy*dy).
struct SpectralGrid {
  std::size_t nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0;
  double dx = 1.0, dy = 1.0;
  std::vector<double> values;

  double extent_x() const { return dx * static_cast<double>(nx); }
  double extent_y() const { return dy * static_cast<double>(ny); }
};

struct RegionCuts {
  double xi1 = 0.0;  // |xi_1| threshold
  double xi2 = 0.0;  // |xi_2| threshold
};

// Cuts 1/eta and |ln eta|^delta / sqrt(eta) splitting frequency space.
RegionCuts lemma_cuts(double eta, double delta);

struct SobolevReport {
  double s = 0.0;
  double norm_sq = 0.0;
  // D1: |xi1|<=c1,|xi2|<=c2   D2: |xi1|>c1,|xi2|<=c2
  // D3: |xi1|<=c1,|xi2|>c2    D4: |xi1|>c1,|xi2|>c2
  double region[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t nx = 0, ny = 0;
  int levels = 1;
  double norm_sq_coarse = 0.0;
  double richardson = 0.0;
  double rel_change = 0.0;
  double digits = 0.0;
  std::vector<std::string> warnings;
};

SobolevReport hdot_norm_sq(const SpectralGrid& g, double s,
                           std::optional<RegionCuts> cuts = std::nullopt);

// Two-level refinement: the sampler is called with a per-axis resolution
// multiplier (1, then 2) and must return a grid of the same box.
template <class Sampler>
SobolevReport hdot_norm_sq_refined(Sampler&& sample, double s, std::optional<RegionCuts> cuts);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of the log residuals
  double r2 = 0.0;
  std::vector<std::string> warnings;
};

// Least squares of ln(norm_sq) against ln|ln eta|.
ScalingFit scaling_fit(std::span<const double> etas, std::span<const double> norm_sq,
                       std::span<const SobolevReport> reports = {});

SobolevReport combine_refinement(SobolevReport coarse, SobolevReport fine);

template <class Sampler>
SobolevReport hdot_norm_sq_refined(Sampler&& sample, double s, std::optional<RegionCuts> cuts) {
  SobolevReport coarse = hdot_norm_sq(sample(1), s, cuts);
  SobolevReport fine = hdot_norm_sq(sample(2), s, cuts);
  return combine_refinement(std::move(coarse), std::move(fine));
}

}  // namespace elwv
