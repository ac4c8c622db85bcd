#include "elwv/elwv.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "elwv/config.hpp"
#include "elwv/error.hpp"
#include "elwv/harness.hpp"

struct elwv_config {
  elwv::RunConfig cfg;
};

struct elwv_report {
  elwv::Report report;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
int guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const elwv::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ELWV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ELWV_ERR_INTERNAL, e.what());
  }
}

elwv::PhysParams to_phys(const elwv_phys* p) {
  elwv::PhysParams q;
  q.c1 = p->c1;
  q.c2 = p->c2;
  q.sigma0 = p->sigma0;
  q.sigma1 = p->sigma1;
  q.kappa = p->kappa;
  return q;
}

std::string issues_text(const std::vector<elwv::ConfigIssue>& issues) {
  std::string msg;
  for (const auto& i : issues) msg += i.key + ": " + i.message + "\n";
  return msg;
}

}  // namespace

extern "C" {

const char* elwv_version(void) { return elwv::code_version(); }

const char* elwv_error_name(int code) { return elwv::error_code_name(static_cast<elwv::ErrorCode>(code)); }

const char* elwv_last_error(void) { return g_last_error.c_str(); }

void elwv_string_free(char* s) { std::free(s); }

size_t elwv_preset_count(void) { return elwv::preset_names().size(); }

const char* elwv_preset_name(size_t i) {
  static const auto names = elwv::preset_names();
  return i < names.size() ? names[i].c_str() : nullptr;
}

int elwv_config_new(const char* preset, elwv_config** out) {
  if (!out) return set_error(ELWV_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&]() -> int {
    auto* c = new elwv_config{elwv::make_preset(preset ? preset : "paper-desk")};
    *out = c;
    return ELWV_OK;
  });
}

int elwv_config_parse(const char* text, elwv_config** out) {
  if (!out) return set_error(ELWV_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&]() -> int {
    elwv::ParseResult r = elwv::parse_config(text ? text : "");
    if (!r.ok()) return set_error(ELWV_ERR_CONFIG, issues_text(r.issues));
    *out = new elwv_config{std::move(r.config)};
    return ELWV_OK;
  });
}

int elwv_config_set(elwv_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() -> int {
    // Re-parse the dump with the override so typing and checks stay in one place.
    // The dump already carries the key; drop that line so the override is not a duplicate.
    const std::string text = elwv::dump_config(cfg->cfg);
    std::string patched;
    const std::string k(key);
    const auto dot = k.find('.');
    std::string section, line;
    for (std::size_t pos = 0; pos < text.size();) {
      const auto end = text.find('\n', pos);
      line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      pos = end == std::string::npos ? text.size() : end + 1;
      if (!line.empty() && line[0] == '[') section = line.substr(1, line.find(']') - 1);
      const auto eq = line.find('=');
      if (eq != std::string::npos && dot != std::string::npos && section == k.substr(0, dot)) {
        std::string lk = line.substr(0, eq);
        lk.erase(lk.find_last_not_of(' ') + 1);
        if (lk == k.substr(dot + 1)) continue;
      }
      patched += line + "\n";
    }
    elwv::ParseResult r = elwv::parse_config(patched + k + " = " + value + "\n");
    if (!r.ok()) return set_error(ELWV_ERR_CONFIG, issues_text(r.issues));
    cfg->cfg = std::move(r.config);
    return ELWV_OK;
  });
}

int elwv_config_get(const elwv_config* cfg, const char* key, char** value) {
  if (!cfg || !key || !value) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  *value = nullptr;
  return guarded([&]() -> int {
    const std::string k(key);
    const auto dot = k.find('.');
    if (dot == std::string::npos) return set_error(ELWV_ERR_CONFIG, "key must be section.name");
    const std::string text = elwv::dump_config(cfg->cfg);
    std::string section;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto end = text.find('\n', pos);
      const std::string line = text.substr(pos, end - pos);
      pos = end == std::string::npos ? text.size() : end + 1;
      if (!line.empty() && line[0] == '[') {
        section = line.substr(1, line.find(']') - 1);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos || section != k.substr(0, dot)) continue;
      std::string lk = line.substr(0, eq);
      lk.erase(lk.find_last_not_of(' ') + 1);
      if (lk != k.substr(dot + 1)) continue;
      std::string v = line.substr(eq + 1);
      const auto hash = v.find("  #");
      if (hash != std::string::npos) v.resize(hash);
      v.erase(0, v.find_first_not_of(' '));
      *value = dup(v);
      return ELWV_OK;
    }
    return set_error(ELWV_ERR_CONFIG, "unknown key '" + k + "'");
  });
}

int elwv_config_dump(const elwv_config* cfg, char** text) {
  if (!cfg || !text) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() -> int {
    *text = dup(elwv::dump_config(cfg->cfg));
    return ELWV_OK;
  });
}

int elwv_config_validate(const elwv_config* cfg) {
  if (!cfg) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() -> int {
    const auto issues = elwv::validate_config(cfg->cfg);
    return issues.empty() ? ELWV_OK : set_error(ELWV_ERR_CONFIG, issues_text(issues));
  });
}

void elwv_config_free(elwv_config* cfg) { delete cfg; }

size_t elwv_suite_count(void) { return elwv::suite_names().size(); }

const char* elwv_suite_name(size_t i) {
  const auto& names = elwv::suite_names();
  return i < names.size() ? names[i].c_str() : nullptr;
}

int elwv_run_suite(const elwv_config* cfg, const char* suite, elwv_log_fn log, void* user, elwv_report** out) {
  if (!cfg || !suite || !out) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&]() -> int {
    elwv::LogSink sink;
    if (log) sink = [log, user](const std::string& m) { log(m.c_str(), user); };
    auto* r = new elwv_report{elwv::run_suite(cfg->cfg, suite, sink), {}};
    r->json = r->report.to_json(cfg->cfg).dump(2);
    *out = r;
    return ELWV_OK;
  });
}

int elwv_report_json(const elwv_report* r, char** json) {
  if (!r || !json) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  *json = dup(r->json);
  return ELWV_OK;
}

int elwv_report_counts(const elwv_report* r, size_t* pass, size_t* fail, size_t* skip) {
  if (!r) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  if (pass) *pass = r->report.count(elwv::Verdict::Pass);
  if (fail) *fail = r->report.count(elwv::Verdict::Fail);
  if (skip) *skip = r->report.count(elwv::Verdict::Skip);
  return ELWV_OK;
}

size_t elwv_report_check_count(const elwv_report* r) { return r ? r->report.checks.size() : 0; }

int elwv_report_check(const elwv_report* r, size_t i, const char** name, int* verdict, const char** reason) {
  if (!r || i >= r->report.checks.size()) return set_error(ELWV_ERR_OUT_OF_RANGE, "check index out of range");
  const auto& c = r->report.checks[i];
  if (name) *name = c.name.c_str();
  if (verdict) *verdict = c.verdict == elwv::Verdict::Pass ? 0 : c.verdict == elwv::Verdict::Fail ? 1 : 2;
  if (reason) *reason = c.reason.c_str();
  return ELWV_OK;
}

void elwv_report_free(elwv_report* r) { delete r; }

elwv_phys elwv_phys_default(void) {
  const elwv::PhysParams p;
  return {p.c1, p.c2, p.sigma0, p.sigma1, p.kappa};
}

int elwv_eigenvalues(const elwv_phys* p, const double phi[4], double lambda[4]) {
  if (!p || !phi || !lambda) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() -> int {
    const elwv::PhysParams q = to_phys(p);
    q.validate();
    const elwv::Vec4 l = elwv::eigenvalues(q, {phi[0], phi[1], phi[2], phi[3]});
    for (int i = 0; i < 4; ++i) lambda[i] = l[i];
    return ELWV_OK;
  });
}

int elwv_c111_at_rest(const elwv_phys* p, double* value) {
  if (!p || !value) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() -> int {
    const elwv::PhysParams q = to_phys(p);
    q.validate();
    *value = elwv::c111_at_rest(q);
    return ELWV_OK;
  });
}

int elwv_min_gap(const elwv_phys* p, size_t samples, double* sigma) {
  if (!p || !sigma) return set_error(ELWV_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() -> int {
    *sigma = elwv::min_gap_sigma(to_phys(p), samples).sigma;
    return ELWV_OK;
  });
}

}  // extern "C"
