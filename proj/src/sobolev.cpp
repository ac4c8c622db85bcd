#include "elwv/sobolev.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "elwv/error.hpp"

namespace elwv {

namespace {

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

RegionCuts lemma_cuts(double eta, double delta) {
  RegionCuts c;
  c.xi1 = 1.0 / eta;
  c.xi2 = std::pow(std::abs(std::log(eta)), delta) / std::sqrt(eta);
  return c;
}

SobolevReport hdot_norm_sq(const SpectralGrid& g, double s, std::optional<RegionCuts> cuts) {
  if (!is_pow2(g.nx) || !is_pow2(g.ny))
    fail(ErrorCode::InvalidArgument, "hdot_norm_sq: grid dimensions must be powers of two");
  if (g.values.size() != g.nx * g.ny)
    fail(ErrorCode::InvalidArgument, "hdot_norm_sq: value count does not match grid");
  if (!(s >= 0.0 && s < 2.0)) fail(ErrorCode::InvalidArgument, "hdot_norm_sq: need s in [0, 2)");

  SobolevReport rep;
  rep.s = s;
  rep.nx = g.nx;
  rep.ny = g.ny;

  double peak = 0.0, edge = 0.0;
  for (std::size_t iy = 0; iy < g.ny; ++iy)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const double v = std::abs(g.values[iy * g.nx + ix]);
      peak = std::max(peak, v);
      if (ix == 0 || iy == 0 || ix + 1 == g.nx || iy + 1 == g.ny) edge = std::max(edge, v);
    }
  if (peak == 0.0) return rep;
  if (edge > 1e-12 * peak) rep.warnings.push_back("field not negligible on the box boundary");

  const std::size_t nxc = g.nx / 2 + 1;
  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * g.nx * g.ny)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * g.ny * nxc)));
  fftw_plan plan = fftw_plan_dft_r2c_2d(static_cast<int>(g.ny), static_cast<int>(g.nx), in.get(),
                                        out.get(), FFTW_ESTIMATE);
  std::copy(g.values.begin(), g.values.end(), in.get());
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  const double cell = g.dx * g.dy;
  const double dxi1 = 1.0 / g.extent_x();
  const double dxi2 = 1.0 / g.extent_y();
  const double dxi = dxi1 * dxi2;
  const double c1 = cuts ? cuts->xi1 : INFINITY;
  const double c2 = cuts ? cuts->xi2 : INFINITY;

  for (std::size_t iy = 0; iy < g.ny; ++iy) {
    const long ky = iy <= g.ny / 2 ? static_cast<long>(iy) : static_cast<long>(iy) - static_cast<long>(g.ny);
    const double xi2 = dxi2 * static_cast<double>(ky);
    double row[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t ix = 0; ix < nxc; ++ix) {
      const double xi1 = dxi1 * static_cast<double>(ix);
      const double mag2 = xi1 * xi1 + xi2 * xi2;
      double weight;
      if (mag2 == 0.0)
        weight = s == 0.0 ? 1.0 : 0.0;
      else
        weight = std::pow(mag2, s);
      const double re = out.get()[iy * nxc + ix][0];
      const double im = out.get()[iy * nxc + ix][1];
      // Hermitian symmetry: interior columns stand for two modes.
      const double mult = (ix == 0 || (g.nx % 2 == 0 && ix == g.nx / 2)) ? 1.0 : 2.0;
      const double term = mult * weight * (re * re + im * im);
      const int region = (std::abs(xi1) > c1 ? 1 : 0) + (std::abs(xi2) > c2 ? 2 : 0);
      row[region] += term;
    }
    for (int r = 0; r < 4; ++r) rep.region[r] += row[r];
  }
  const double scale = cell * cell * dxi;
  for (double& r : rep.region) r *= scale;
  rep.norm_sq = rep.region[0] + rep.region[1] + rep.region[2] + rep.region[3];
  if (!std::isfinite(rep.norm_sq)) fail(ErrorCode::NotConverged, "hdot_norm_sq: non-finite result");
  return rep;
}

SobolevReport combine_refinement(SobolevReport coarse, SobolevReport fine) {
  fine.levels = 2;
  fine.norm_sq_coarse = coarse.norm_sq;
  const double diff = fine.norm_sq - coarse.norm_sq;
  // Second-order extrapolation; conservative for the spectrally accurate case.
  fine.richardson = fine.norm_sq + diff / 3.0;
  fine.rel_change = fine.norm_sq != 0.0 ? std::abs(diff) / std::abs(fine.norm_sq) : 0.0;
  fine.digits = fine.rel_change > 0.0 ? -std::log10(fine.rel_change) : 16.0;
  if (fine.digits < 2.0) {
    std::ostringstream os;
    os << "refinement indicates only " << fine.digits << " significant digits";
    fine.warnings.push_back(os.str());
  }
  for (auto& w : coarse.warnings) fine.warnings.push_back("coarse: " + w);
  return fine;
}

ScalingFit scaling_fit(std::span<const double> etas, std::span<const double> norm_sq,
                       std::span<const SobolevReport> reports) {
  if (etas.size() != norm_sq.size() || etas.size() < 5)
    fail(ErrorCode::InvalidArgument, "scaling_fit: need >= 5 (eta, norm) pairs");
  ScalingFit fit;
  for (const auto& r : reports)
    for (const auto& w : r.warnings) fit.warnings.push_back(w);
  const std::size_t n = etas.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> X(n), Y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(norm_sq[i] > 0.0) || !(etas[i] > 0.0 && etas[i] < 1.0))
      fail(ErrorCode::InvalidArgument, "scaling_fit: need positive norms and eta in (0,1)");
    X[i] = std::log(std::abs(std::log(etas[i])));
    Y[i] = std::log(norm_sq[i]);
    sx += X[i]; sy += Y[i]; sxx += X[i] * X[i]; sxy += X[i] * Y[i];
  }
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  fit.slope = (dn * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / dn;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / dn;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = Y[i] - (fit.intercept + fit.slope * X[i]);
    ss_res += e * e;
    ss_tot += (Y[i] - ybar) * (Y[i] - ybar);
  }
  fit.residual = std::sqrt(ss_res / dn);
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace elwv
