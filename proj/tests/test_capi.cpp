#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "elwv/elwv.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  elwv_string_free(s);
  return out;
}

void collect(const char* msg, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(msg); }

}  // namespace

TEST(CApi, VersionAndNames) {
  EXPECT_STRNE(elwv_version(), "");
  EXPECT_STREQ(elwv_error_name(ELWV_OK), "ok");
  EXPECT_GE(elwv_preset_count(), 2u);
  EXPECT_EQ(elwv_preset_name(elwv_preset_count()), nullptr);
  bool has_eigen = false;
  for (size_t i = 0; i < elwv_suite_count(); ++i) has_eigen = has_eigen || std::string(elwv_suite_name(i)) == "eigen-check";
  EXPECT_TRUE(has_eigen);
}

TEST(CApi, ConfigSetGetDump) {
  elwv_config* cfg = nullptr;
  ASSERT_EQ(elwv_config_new("smoke", &cfg), ELWV_OK);
  ASSERT_EQ(elwv_config_set(cfg, "data.theta", "0.05"), ELWV_OK);
  char* v = nullptr;
  ASSERT_EQ(elwv_config_get(cfg, "data.theta", &v), ELWV_OK);
  EXPECT_EQ(take(v), "0.05");
  char* text = nullptr;
  ASSERT_EQ(elwv_config_dump(cfg, &text), ELWV_OK);
  const std::string dumped = take(text);
  EXPECT_NE(dumped.find("theta = 0.05"), std::string::npos);

  // Setting again replaces rather than duplicates.
  ASSERT_EQ(elwv_config_set(cfg, "data.theta", "0.02"), ELWV_OK);
  ASSERT_EQ(elwv_config_get(cfg, "data.theta", &v), ELWV_OK);
  EXPECT_EQ(take(v), "0.02");

  elwv_config* back = nullptr;
  ASSERT_EQ(elwv_config_dump(cfg, &text), ELWV_OK);
  ASSERT_EQ(elwv_config_parse(text, &back), ELWV_OK);
  elwv_string_free(text);
  EXPECT_EQ(elwv_config_validate(back), ELWV_OK);
  elwv_config_free(back);
  elwv_config_free(cfg);
}

TEST(CApi, ErrorsCarryMessages) {
  elwv_config* cfg = nullptr;
  EXPECT_EQ(elwv_config_new("no-such-preset", &cfg), ELWV_ERR_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_NE(std::string(elwv_last_error()).find("no-such-preset"), std::string::npos);

  EXPECT_EQ(elwv_config_parse("data.nonsense = 1\nphys.c2 = 5\n", &cfg), ELWV_ERR_CONFIG);
  const std::string msg = elwv_last_error();
  EXPECT_NE(msg.find("data.nonsense"), std::string::npos);
  EXPECT_NE(msg.find("phys.c1"), std::string::npos);

  ASSERT_EQ(elwv_config_new("smoke", &cfg), ELWV_OK);
  EXPECT_EQ(elwv_config_set(cfg, "data.theta", "abc"), ELWV_ERR_CONFIG);
  char* v = nullptr;
  EXPECT_EQ(elwv_config_get(cfg, "no.such.key", &v), ELWV_ERR_CONFIG);
  EXPECT_EQ(elwv_config_get(nullptr, "data.theta", &v), ELWV_ERR_INVALID_ARGUMENT);
  elwv_config_free(cfg);
}

TEST(CApi, NumericEntryPoints) {
  const elwv_phys p = elwv_phys_default();
  const double rest[4] = {0, 0, 0, 0};
  double lam[4];
  ASSERT_EQ(elwv_eigenvalues(&p, rest, lam), ELWV_OK);
  EXPECT_DOUBLE_EQ(lam[0], 2.0);
  EXPECT_DOUBLE_EQ(lam[1], 1.0);
  EXPECT_DOUBLE_EQ(lam[2], -1.0);
  EXPECT_DOUBLE_EQ(lam[3], -2.0);
  double c = 0.0;
  ASSERT_EQ(elwv_c111_at_rest(&p, &c), ELWV_OK);
  EXPECT_DOUBLE_EQ(c, -0.75);
  double sigma = 0.0;
  ASSERT_EQ(elwv_min_gap(&p, 2000, &sigma), ELWV_OK);
  EXPECT_GT(sigma, 0.9);
  EXPECT_LT(sigma, 1.0);
  const double far[4] = {1.0, 0, 0, 0};
  EXPECT_EQ(elwv_eigenvalues(&p, far, lam), ELWV_ERR_OUTSIDE_BALL);
}

TEST(CApi, RunsASuiteAndExposesTheReport) {
  const std::string out = (std::filesystem::temp_directory_path() / "elwv-capi").string();
  std::filesystem::remove_all(out);
  elwv_config* cfg = nullptr;
  ASSERT_EQ(elwv_config_new("smoke", &cfg), ELWV_OK);
  ASSERT_EQ(elwv_config_set(cfg, "run.out", out.c_str()), ELWV_OK);
  ASSERT_EQ(elwv_config_set(cfg, "eigen.samples", "500"), ELWV_OK);
  std::vector<std::string> log;
  elwv_report* r = nullptr;
  ASSERT_EQ(elwv_run_suite(cfg, "eigen-check", collect, &log, &r), ELWV_OK) << elwv_last_error();
  size_t pass = 0, fail = 0, skip = 0;
  ASSERT_EQ(elwv_report_counts(r, &pass, &fail, &skip), ELWV_OK);
  EXPECT_EQ(fail, 0u);
  EXPECT_EQ(pass + fail + skip, elwv_report_check_count(r));
  const char* name = nullptr;
  const char* reason = nullptr;
  int verdict = -1;
  ASSERT_EQ(elwv_report_check(r, 0, &name, &verdict, &reason), ELWV_OK);
  EXPECT_STRNE(name, "");
  EXPECT_EQ(verdict, 0);
  EXPECT_EQ(elwv_report_check(r, 1000, &name, &verdict, &reason), ELWV_ERR_OUT_OF_RANGE);
  char* json = nullptr;
  ASSERT_EQ(elwv_report_json(r, &json), ELWV_OK);
  EXPECT_NE(take(json).find("\"suite\": \"eigen-check\""), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(out) / "eigen-check" / "manifest.json"));
  elwv_report* none = nullptr;
  EXPECT_EQ(elwv_run_suite(cfg, "no-such-suite", nullptr, nullptr, &none), ELWV_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(none, nullptr);
  elwv_report_free(r);
  elwv_config_free(cfg);
  std::filesystem::remove_all(out);
}
