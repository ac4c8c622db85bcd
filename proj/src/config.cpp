#include "elwv/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "elwv/error.hpp"
#include "elwv/io.hpp"

namespace elwv {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_number(std::string_view s, double& out) {
  if (s == "nan") { out = std::nan(""); return true; }
  if (s == "inf") { out = HUGE_VAL; return true; }
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

template <class U>
bool parse_unsigned(std::string_view s, U& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

struct Field {
  std::string key;
  std::string doc;
  std::function<std::string(const RunConfig&)> get;
  // Empty return on success, else the reason.
  std::function<std::string(RunConfig&, const std::string&)> set;
  // Range check of the stored value; empty when valid.
  std::function<std::string(const RunConfig&)> check;
};

using Check = std::function<std::string(double)>;

Check positive() { return [](double v) { return v > 0.0 ? "" : "must be > 0"; }; }
Check nonneg() { return [](double v) { return v >= 0.0 ? "" : "must be >= 0"; }; }
Check open_range(double lo, double hi) {
  return [lo, hi](double v) {
    return v > lo && v < hi ? std::string() : "must lie in (" + format_double(lo) + ", " + format_double(hi) + ")";
  };
}
Check any() { return [](double v) { return std::isnan(v) ? "must be a number" : ""; }; }

Field real(std::string key, std::string doc, double& (*acc)(RunConfig&), Check chk) {
  return {key, doc,
          [acc](const RunConfig& c) { return format_double(acc(const_cast<RunConfig&>(c))); },
          [acc](RunConfig& c, const std::string& v) -> std::string {
            double x = 0.0;
            if (!parse_number(v, x)) return "expected a number, got '" + v + "'";
            acc(c) = x;
            return {};
          },
          [acc, chk](const RunConfig& c) { return chk(acc(const_cast<RunConfig&>(c))); }};
}

template <class U>
Field count(std::string key, std::string doc, U& (*acc)(RunConfig&), U min_value) {
  return {key, doc,
          [acc](const RunConfig& c) { return std::to_string(acc(const_cast<RunConfig&>(c))); },
          [acc](RunConfig& c, const std::string& v) -> std::string {
            U x{};
            if (!parse_unsigned(v, x)) return "expected a non-negative integer, got '" + v + "'";
            acc(c) = x;
            return {};
          },
          [acc, min_value](const RunConfig& c) -> std::string {
            return acc(const_cast<RunConfig&>(c)) >= min_value ? "" : "must be >= " + std::to_string(min_value);
          }};
}

Field integer(std::string key, std::string doc, int& (*acc)(RunConfig&), int lo, int hi) {
  return {key, doc,
          [acc](const RunConfig& c) { return std::to_string(acc(const_cast<RunConfig&>(c))); },
          [acc](RunConfig& c, const std::string& v) -> std::string {
            int x = 0;
            const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
            if (r.ec != std::errc() || r.ptr != v.data() + v.size()) return "expected an integer, got '" + v + "'";
            acc(c) = x;
            return {};
          },
          [acc, lo, hi](const RunConfig& c) -> std::string {
            const int x = acc(const_cast<RunConfig&>(c));
            return x >= lo && x <= hi ? "" : "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
          }};
}

Field flag(std::string key, std::string doc, bool& (*acc)(RunConfig&)) {
  return {key, doc,
          [acc](const RunConfig& c) { return std::string(acc(const_cast<RunConfig&>(c)) ? "true" : "false"); },
          [acc](RunConfig& c, const std::string& v) -> std::string {
            if (v == "true" || v == "yes" || v == "1") acc(c) = true;
            else if (v == "false" || v == "no" || v == "0") acc(c) = false;
            else return "expected true/false, got '" + v + "'";
            return {};
          },
          [](const RunConfig&) { return std::string(); }};
}

Field text(std::string key, std::string doc, std::string& (*acc)(RunConfig&)) {
  return {key, doc,
          [acc](const RunConfig& c) { return acc(const_cast<RunConfig&>(c)); },
          [acc](RunConfig& c, const std::string& v) -> std::string {
            acc(c) = v;
            return {};
          },
          [acc](const RunConfig& c) -> std::string {
            return acc(const_cast<RunConfig&>(c)).empty() ? "must not be empty" : "";
          }};
}

Field list(std::string key, std::string doc, std::vector<double>& (*acc)(RunConfig&), Check chk) {
  return {key, doc,
          [acc](const RunConfig& c) {
            std::string out;
            for (double v : acc(const_cast<RunConfig&>(c))) out += (out.empty() ? "" : ", ") + format_double(v);
            return out;
          },
          [acc](RunConfig& c, const std::string& v) -> std::string {
            std::vector<double> xs;
            std::stringstream ss(v);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
              double x = 0.0;
              if (!parse_number(trim(cell), x)) return "expected comma-separated numbers, got '" + v + "'";
              xs.push_back(x);
            }
            acc(c) = std::move(xs);
            return {};
          },
          [acc, chk](const RunConfig& c) -> std::string {
            const auto& xs = acc(const_cast<RunConfig&>(c));
            if (xs.empty()) return "must not be empty";
            for (double x : xs)
              if (auto m = chk(x); !m.empty()) return "every entry " + m;
            return {};
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(text("run.out", "output directory", [](RunConfig& c) -> std::string& { return c.out_dir; }));
    f.push_back(count<std::uint64_t>("run.seed", "seed of the sampling-based checks",
                                     [](RunConfig& c) -> std::uint64_t& { return c.seed; }, 0));
    f.push_back(count<std::size_t>("run.workers", "concurrent sweep members",
                                   [](RunConfig& c) -> std::size_t& { return c.workers; }, 1));

    f.push_back(real("phys.c1", "fast wave speed [length/time]", [](RunConfig& c) -> double& { return c.phys.c1; }, positive()));
    f.push_back(real("phys.c2", "slow wave speed [length/time]", [](RunConfig& c) -> double& { return c.phys.c2; }, positive()));
    f.push_back(real("phys.sigma0", "quadratic coupling of phi1 in a [1/length]",
                     [](RunConfig& c) -> double& { return c.phys.sigma0; }, any()));
    f.push_back(real("phys.sigma1", "quadratic coupling of phi1, phi2 in b, c [1/length]",
                     [](RunConfig& c) -> double& { return c.phys.sigma1; }, any()));
    f.push_back(real("phys.kappa", "state ball radius [dimensionless]", [](RunConfig& c) -> double& { return c.phys.kappa; },
                     open_range(0.0, 1.0)));

    f.push_back(real("data.theta", "seed amplitude [dimensionless]", [](RunConfig& c) -> double& { return c.data.theta; },
                     open_range(0.0, 1.0)));
    f.push_back(real("data.alpha", "log exponent, 0 < alpha < 1/2", [](RunConfig& c) -> double& { return c.data.alpha; },
                     open_range(0.0, 0.5)));
    f.push_back(real("data.delta", "anisotropy exponent, > 2 alpha", [](RunConfig& c) -> double& { return c.data.delta; },
                     positive()));
    f.push_back(real("data.eta", "support scale [length], 0 < eta < 1/2", [](RunConfig& c) -> double& { return c.data.eta; },
                     open_range(0.0, 0.5)));
    f.push_back({"data.mode", "regularized | paper-literal (families 2, 3 silent)",
                 [](const RunConfig& c) {
                   return std::string(c.experiment.mode == Normalization::Regularized ? "regularized" : "paper-literal");
                 },
                 [](RunConfig& c, const std::string& v) -> std::string {
                   if (v == "regularized") c.experiment.mode = Normalization::Regularized;
                   else if (v == "paper-literal") c.experiment.mode = Normalization::PaperLiteral;
                   else return "expected regularized or paper-literal, got '" + v + "'";
                   return {};
                 },
                 [](const RunConfig&) { return std::string(); }});
    f.push_back(real("data.bump_amplitude", "additive bump amplitude, times theta (0: off)",
                     [](RunConfig& c) -> double& { return c.experiment.bump.amplitude; }, any()));
    f.push_back(real("data.bump_center", "bump center [eta]", [](RunConfig& c) -> double& { return c.experiment.bump.center; },
                     open_range(1.0, 2.0)));
    f.push_back(real("data.bump_width", "bump half-width [eta]", [](RunConfig& c) -> double& { return c.experiment.bump.width; },
                     open_range(0.0, 0.5)));
    f.push_back(integer("data.bump_family", "family receiving the bump", [](RunConfig& c) -> int& { return c.experiment.bump.family; },
                        1, 4));

    f.push_back(real("grid.fine_points_per_eta", "nodes per eta, family-1 window",
                     [](RunConfig& c) -> double& { return c.experiment.window.fine_points_per_eta; }, positive()));
    f.push_back(real("grid.coarse_points_per_eta", "nodes per eta, families 2-4",
                     [](RunConfig& c) -> double& { return c.experiment.window.coarse_points_per_eta; }, positive()));
    f.push_back(real("grid.lead_margin", "window margin ahead of the pulse [eta]",
                     [](RunConfig& c) -> double& { return c.experiment.window.lead_margin; }, nonneg()));
    f.push_back(real("grid.trail_margin", "window margin behind the pulse [eta]",
                     [](RunConfig& c) -> double& { return c.experiment.window.trail_margin; }, nonneg()));

    f.push_back(real("evolve.cfl", "Courant number", [](RunConfig& c) -> double& { return c.experiment.evolve.cfl; },
                     open_range(0.0, 1.0)));
    f.push_back(real("evolve.dissipation", "4th-difference coefficient, scaled by c1/dx",
                     [](RunConfig& c) -> double& { return c.experiment.evolve.dissipation; }, nonneg()));
    f.push_back(real("evolve.m_stop_factor", "gradient stop, multiple of the initial max |d_x phi1|",
                     [](RunConfig& c) -> double& { return c.experiment.evolve.m_stop_factor; },
                     [](double v) { return v > 1.0 ? "" : "must be > 1"; }));
    f.push_back(real("evolve.t_max", "end time [time]; 0 derives it from t_max_factor",
                     [](RunConfig& c) -> double& { return c.experiment.t_max; }, nonneg()));
    f.push_back(real("evolve.t_max_factor", "end time in units of 1/(|c111(0)| W0)",
                     [](RunConfig& c) -> double& { return c.experiment.t_max_factor; }, positive()));
    f.push_back(count<std::size_t>("evolve.snapshots", "uniform snapshots over t_max",
                                   [](RunConfig& c) -> std::size_t& { return c.experiment.evolve.snapshots; }, 10));
    f.push_back(count<std::size_t>("evolve.dense_divisor", "cadence refinement near the shock",
                                   [](RunConfig& c) -> std::size_t& { return c.experiment.evolve.dense_divisor; }, 1));
    f.push_back(real("evolve.dense_from_factor", "dense cadence from this fraction of 1/(|c111(0)| W0)",
                     [](RunConfig& c) -> double& { return c.experiment.dense_from_factor; }, positive()));
    f.push_back(real("evolve.fit_lo", "gradient-fit window start [initial gradient]",
                     [](RunConfig& c) -> double& { return c.experiment.evolve.fit_lo; }, positive()));
    f.push_back(real("evolve.fit_hi", "gradient-fit window end [initial gradient]",
                     [](RunConfig& c) -> double& { return c.experiment.evolve.fit_hi; }, positive()));
    f.push_back({"evolve.frame", "comoving | lab",
                 [](const RunConfig& c) { return std::string(c.experiment.frame == FrameMode::Comoving ? "comoving" : "lab"); },
                 [](RunConfig& c, const std::string& v) -> std::string {
                   if (v == "comoving") c.experiment.frame = FrameMode::Comoving;
                   else if (v == "lab") c.experiment.frame = FrameMode::Lab;
                   else return "expected comoving or lab, got '" + v + "'";
                   return {};
                 },
                 [](const RunConfig&) { return std::string(); }});

    f.push_back(count<std::size_t>("trace.seeds", "characteristics across [eta, 2 eta]",
                                   [](RunConfig& c) -> std::size_t& { return c.experiment.seeds; }, 16));
    f.push_back(count<std::size_t>("trace.margin_seeds", "characteristics in each margin",
                                   [](RunConfig& c) -> std::size_t& { return c.experiment.margin_seeds; }, 0));
    f.push_back(real("trace.refine_halfwidth", "seed doubling around z_shock [eta]; 0 disables",
                     [](RunConfig& c) -> double& { return c.experiment.refine_halfwidth; }, nonneg()));
    f.push_back(flag("trace.all_families", "also evolve and trace families 2-4",
                     [](RunConfig& c) -> bool& { return c.experiment.trace_all_families; }));

    f.push_back(real("analysis.rho_floor", "rho_1 floor for detection", [](RunConfig& c) -> double& { return c.experiment.analysis.rho_floor; },
                     open_range(0.0, 0.1)));
    f.push_back(real("analysis.epsilon", "bracket epsilon, <= 1/100",
                     [](RunConfig& c) -> double& { return c.experiment.analysis.epsilon; },
                     [](double v) { return v > 0.0 && v <= 0.01 ? "" : "must lie in (0, 0.01]"; }));
    f.push_back(real("analysis.h_min", "smallest exclusion radius [eta]", [](RunConfig& c) -> double& { return c.experiment.analysis.h_min; },
                     positive()));
    f.push_back(real("analysis.h_max", "largest exclusion radius [eta]", [](RunConfig& c) -> double& { return c.experiment.analysis.h_max; },
                     positive()));
    f.push_back(count<std::size_t>("analysis.ladder_points", "exclusion radii in the ladder",
                                   [](RunConfig& c) -> std::size_t& { return c.experiment.analysis.ladder_points; }, 3));

    f.push_back(count<std::size_t>("eigen.samples", "states sampled by eigen-check",
                                   [](RunConfig& c) -> std::size_t& { return c.eigen.samples; }, 1));
    f.push_back(count<std::size_t>("eigen.gap_samples", "ball points for the speed gap",
                                   [](RunConfig& c) -> std::size_t& { return c.eigen.gap_samples; }, 100));
    f.push_back(real("eigen.fd_step", "finite-difference step [dimensionless]", [](RunConfig& c) -> double& { return c.eigen.fd_step; },
                     open_range(0.0, 1e-2)));

    f.push_back(real("sobolev.s", "regularity index, 0 <= s < 2", [](RunConfig& c) -> double& { return c.sobolev.s; },
                     [](double v) { return v >= 0.0 && v < 2.0 ? "" : "must lie in [0, 2)"; }));
    f.push_back(integer("sobolev.eta_exp_min", "largest eta is 2^-eta_exp_min",
                        [](RunConfig& c) -> int& { return c.sobolev.eta_exp_min; }, 2, 40));
    f.push_back(integer("sobolev.eta_exp_max", "smallest eta is 2^-eta_exp_max",
                        [](RunConfig& c) -> int& { return c.sobolev.eta_exp_max; }, 2, 40));
    f.push_back(count<std::size_t>("sobolev.points_across", "samples across the support per axis",
                                   [](RunConfig& c) -> std::size_t& { return c.sobolev.points_across; }, 16));
    f.push_back(real("sobolev.pad", "box extent over support extent", [](RunConfig& c) -> double& { return c.sobolev.pad; },
                     [](double v) { return v >= 4.0 ? "" : "must be >= 4"; }));

    f.push_back(list("sweep.thetas", "theta values of the shock sweep", [](RunConfig& c) -> std::vector<double>& { return c.sweep.thetas; },
                     open_range(0.0, 1.0)));
    f.push_back(list("sweep.etas", "eta values of the shock sweep", [](RunConfig& c) -> std::vector<double>& { return c.sweep.etas; },
                     open_range(0.0, 0.5)));

    f.push_back(count<std::size_t>("output.snapshot_stride", "every k-th snapshot as ELWV; 0 disables",
                                   [](RunConfig& c) -> std::size_t& { return c.output.snapshot_stride; }, 0));
    f.push_back(count<std::size_t>("output.fan_seed_stride", "every k-th seed in fan CSVs",
                                   [](RunConfig& c) -> std::size_t& { return c.output.fan_seed_stride; }, 1));
    f.push_back(flag("output.timestamps", "wall-clock fields in reports", [](RunConfig& c) -> bool& { return c.output.timestamps; }));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

}  // namespace

std::vector<std::string> preset_names() { return {"paper-desk", "scalar-reduction", "smoke"}; }

RunConfig make_preset(std::string_view name) {
  RunConfig c;
  // |Phi0| reaches about 0.016 at theta = 0.1, so the default ball 0.01 is too small.
  c.phys.kappa = 0.025;
  if (name == "paper-desk") {
  } else if (name == "scalar-reduction") {
    c.experiment.mode = Normalization::PaperLiteral;
    c.experiment.trace_all_families = false;
  } else if (name == "smoke") {
    c.experiment.window.fine_points_per_eta = 100.0;
    c.experiment.window.coarse_points_per_eta = 25.0;
    c.experiment.seeds = 128;
    c.experiment.margin_seeds = 16;
    c.experiment.evolve.snapshots = 400;
    c.eigen.samples = 500;
    c.eigen.gap_samples = 2000;
    c.sobolev.eta_exp_max = 10;
    c.sobolev.points_across = 64;
    c.sweep.thetas = {0.1};
    c.sweep.etas = {0.05};
    c.output.snapshot_stride = 200;
  } else {
    fail(ErrorCode::Config, "unknown preset '" + std::string(name) + "'");
  }
  c.preset = std::string(name);
  return c;
}

ParseResult parse_config(std::string_view text) {
  ParseResult res;
  struct Entry {
    std::string key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(ln);
    if (line.front() == '[') {
      if (line.back() != ']') {
        res.issues.push_back({where, "unterminated section header"});
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      res.issues.push_back({where, "expected key = value"});
      continue;
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    entries.push_back({key, trim(std::string_view(line).substr(eq + 1)), ln});
  }

  std::string preset = "paper-desk";
  for (const auto& e : entries)
    if (e.key == "preset" || e.key == "run.preset") preset = e.value;
  try {
    res.config = make_preset(preset);
  } catch (const Error& e) {
    res.issues.push_back({"run.preset", e.what()});
    res.config = make_preset("paper-desk");
  }

  std::map<std::string, int> seen;
  for (const auto& e : entries) {
    if (e.key == "preset" || e.key == "run.preset") continue;
    if (auto it = seen.find(e.key); it != seen.end()) {
      res.issues.push_back({e.key, "duplicate key (first on line " + std::to_string(it->second) + ")"});
      continue;
    }
    seen[e.key] = e.line;
    const Field* f = find_field(e.key);
    if (!f) {
      res.issues.push_back({e.key, "unknown key (line " + std::to_string(e.line) + ")"});
      continue;
    }
    if (auto msg = f->set(res.config, e.value); !msg.empty()) res.issues.push_back({e.key, msg});
  }
  for (auto& issue : validate_config(res.config)) {
    bool dup = false;
    for (const auto& i : res.issues) dup = dup || i.key == issue.key;
    if (!dup) res.issues.push_back(std::move(issue));
  }
  return res;
}

std::vector<ConfigIssue> validate_config(const RunConfig& cfg) {
  std::vector<ConfigIssue> out;
  for (const auto& f : fields())
    if (auto msg = f.check(cfg); !msg.empty()) out.push_back({f.key, msg});
  auto add = [&](const std::string& key, const std::string& msg) {
    for (const auto& i : out)
      if (i.key == key) return;
    out.push_back({key, msg});
  };
  const PhysParams& p = cfg.phys;
  if (!(p.c1 > p.c2)) add("phys.c1", "must exceed phys.c2");
  if (p.sigma0 * p.sigma1 == 0.0) add("phys.sigma0", "sigma0 * sigma1 must be nonzero");
  if (out.empty()) {
    try {
      if (!(min_gap_sigma(p, 2000).sigma > 0.0)) add("phys.kappa", "speed gap closes inside the ball");
    } catch (const Error& e) {
      add("phys.kappa", e.what());
    }
  }
  const DataParams& d = cfg.data;
  if (!(2.0 * d.alpha - d.delta < 0.0)) add("data.delta", "2*alpha - delta must be < 0");
  const auto& b = cfg.experiment.bump;
  if (b.active() && (b.center - b.width < 1.0 || b.center + b.width > 2.0))
    add("data.bump_center", "bump support must lie in [1, 2] (units of eta)");
  const auto& a = cfg.experiment.analysis;
  if (!(a.h_max > a.h_min)) add("analysis.h_max", "must exceed analysis.h_min");
  if (a.h_max >= 1.0) add("analysis.h_max", "must be < 1 (units of eta)");
  const auto& e = cfg.experiment.evolve;
  if (!(e.fit_hi > e.fit_lo)) add("evolve.fit_hi", "must exceed evolve.fit_lo");
  if (cfg.sobolev.eta_exp_max - cfg.sobolev.eta_exp_min < 4)
    add("sobolev.eta_exp_max", "the scaling fit needs at least 5 eta values");
  return out;
}

std::string dump_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# elwv run configuration\n";
  os << "preset = " << cfg.preset << "\n";
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string sec = f.key.substr(0, dot);
    if (sec != section) {
      os << "\n[" << sec << "]\n";
      section = sec;
    }
    os << f.key.substr(dot + 1) << " = " << f.get(cfg) << "  # " << f.doc << "\n";
  }
  return os.str();
}

std::string config_fingerprint(const RunConfig& cfg) {
  // out_dir and workers do not change results.
  RunConfig c = cfg;
  c.out_dir = "-";
  c.workers = 1;
  return sha1_hex(dump_config(c));
}

std::vector<KeyDoc> config_keys() {
  std::vector<KeyDoc> out;
  for (const auto& f : fields()) out.push_back({f.key, f.doc});
  return out;
}

}  // namespace elwv
