#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "elwv/config.hpp"
#include "elwv/error.hpp"
#include "elwv/harness.hpp"
#include "elwv/io.hpp"

using namespace elwv;
namespace fs = std::filesystem;

namespace {

bool has_issue(const std::vector<ConfigIssue>& issues, const std::string& key, const std::string& fragment) {
  for (const auto& i : issues)
    if (i.key == key && i.message.find(fragment) != std::string::npos) return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("elwv-test-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Elwv, EncodeDecodeRoundTrip) {
  ElwvArray a;
  a.axes = {{-0.5, 0.25, 3}, {1.0, 0.5, 2}};
  a.ncomp = 2;
  a.time = 3.75;
  for (std::size_t i = 0; i < a.points() * a.ncomp; ++i) a.data.push_back(std::ldexp(1.0, -static_cast<int>(i)) + 0.1);
  const std::vector<char> bytes = encode_elwv(a);
  EXPECT_EQ(std::string(bytes.data(), 4), "ELWV");
  EXPECT_EQ(bytes.size(), 16u + 2 * 24u + 8u + 8u * a.data.size());
  const ElwvArray b = decode_elwv(bytes);
  ASSERT_EQ(b.axes.size(), 2u);
  EXPECT_EQ(b.axes[1].count, 2u);
  EXPECT_EQ(b.axes[0].spacing, 0.25);
  EXPECT_EQ(b.ncomp, 2u);
  EXPECT_EQ(b.time, 3.75);
  EXPECT_EQ(b.data, a.data);
}

TEST(Elwv, CorruptInputIsRejected) {
  ElwvArray a;
  a.axes = {{0.0, 1.0, 4}};
  a.data = {1, 2, 3, 4};
  std::vector<char> bytes = encode_elwv(a);
  std::vector<char> bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_elwv(bad_magic), Error);
  bytes.pop_back();
  EXPECT_THROW(decode_elwv(bytes), Error);
  a.data.pop_back();
  EXPECT_THROW(encode_elwv(a), Error);
}

TEST(Elwv, FileRoundTrip) {
  const fs::path dir = scratch("elwv");
  fs::create_directories(dir);
  ElwvArray a;
  a.axes = {{0.0, 0.1, 5}};
  a.data = {0.0, -1.5, 2.0, 1e-300, 7.0};
  write_elwv(dir / "a.elwv", a);
  EXPECT_EQ(read_elwv(dir / "a.elwv").data, a.data);
  fs::remove_all(dir);
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Csv, WriteAndParse) {
  CsvTable t("ladder", 2, {"h", "I"});
  t.row({0.01, 1.25});
  t.row({0.02, 0.1 + 0.2});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.str().substr(0, t.str().find('\n')), "# schema=ladder version=2");
  const CsvData d = parse_csv(t.str());
  EXPECT_EQ(d.schema, "ladder");
  EXPECT_EQ(d.version, 2);
  EXPECT_EQ(d.columns, (std::vector<std::string>{"h", "I"}));
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(d.rows[1][1], 0.1 + 0.2);
  EXPECT_THROW(t.row({1.0}), Error);
}

TEST(Sha1, KnownDigests) {
  EXPECT_EQ(sha1_hex("abc"), "a9993e364706816aba3e25717850c26c9cd0d89d");
  EXPECT_EQ(sha1_hex(""), "da39a3ee5e6b4b0d3255bfef95601890afd80709");
}

TEST(Artifacts, ManifestListsEveryFileWithItsHash) {
  const fs::path dir = scratch("artifacts");
  ArtifactWriter w(dir);
  w.text("a/b.txt", "abc");
  w.manifest({{"suite", "x"}});
  ASSERT_EQ(w.entries().size(), 1u);
  EXPECT_EQ(w.entries()[0].sha1, sha1_hex("abc"));
  EXPECT_EQ(sha1_file(dir / "a/b.txt"), sha1_hex("abc"));
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["files"][0]["path"], "a/b.txt");
  fs::remove_all(dir);
}

TEST(Config, DumpParsesBackToTheSameConfigForEveryPreset) {
  for (const std::string& name : preset_names()) {
    const RunConfig c = make_preset(name);
    EXPECT_TRUE(validate_config(c).empty()) << name;
    const std::string text = dump_config(c);
    const ParseResult r = parse_config(text);
    EXPECT_TRUE(r.ok()) << name << ": " << (r.issues.empty() ? "" : r.issues[0].key + " " + r.issues[0].message);
    EXPECT_EQ(dump_config(r.config), text) << name;
  }
}

TEST(Config, EveryKeyIsDocumentedAndDumped) {
  const std::string text = dump_config(make_preset("paper-desk"));
  for (const KeyDoc& k : config_keys()) {
    EXPECT_FALSE(k.doc.empty()) << k.key;
    const auto dot = k.key.find('.');
    EXPECT_NE(text.find(k.key.substr(dot + 1) + " ="), std::string::npos) << k.key;
  }
}

TEST(Config, SectionsAndOverrides) {
  const ParseResult r = parse_config("preset = smoke\n[data]\ntheta = 0.05  # smaller\n[phys]\nkappa = 0.02\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config.preset, "smoke");
  EXPECT_EQ(r.config.data.theta, 0.05);
  EXPECT_EQ(r.config.phys.kappa, 0.02);
}

TEST(Config, AllIssuesAreReportedTogether) {
  const ParseResult r = parse_config(
      "data.theta = 0.1\n"
      "data.theta = 0.2\n"
      "data.nonsense = 1\n"
      "phys.c2 = 3\n"
      "evolve.cfl = abc\n"
      "[broken\n"
      "no equals sign\n");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_issue(r.issues, "data.theta", "duplicate"));
  EXPECT_TRUE(has_issue(r.issues, "data.nonsense", "unknown key"));
  EXPECT_TRUE(has_issue(r.issues, "phys.c1", "must exceed phys.c2"));
  EXPECT_TRUE(has_issue(r.issues, "evolve.cfl", ""));
  EXPECT_TRUE(has_issue(r.issues, "line 6", "section"));
  EXPECT_TRUE(has_issue(r.issues, "line 7", "key = value"));
}

TEST(Config, ValidationNamesTheOffendingKey) {
  RunConfig c = make_preset("paper-desk");
  c.data.delta = 0.4;
  c.experiment.analysis.h_max = 0.01;
  const auto issues = validate_config(c);
  EXPECT_TRUE(has_issue(issues, "data.delta", "2*alpha - delta"));
  EXPECT_TRUE(has_issue(issues, "analysis.h_max", "h_min"));
  EXPECT_THROW(make_preset("no-such-preset"), Error);
}

TEST(Config, FingerprintIgnoresOutputLocationAndWorkers) {
  RunConfig a = make_preset("paper-desk"), b = a;
  b.out_dir = "/elsewhere";
  b.workers = 3;
  EXPECT_EQ(config_fingerprint(a), config_fingerprint(b));
  b.data.theta = 0.05;
  EXPECT_NE(config_fingerprint(a), config_fingerprint(b));
}

TEST(Determinism, RepeatedSuiteRunsWriteIdenticalArtifacts) {
  RunConfig c = make_preset("smoke");
  c.eigen.samples = 500;
  c.eigen.gap_samples = 2000;
  std::string manifests[2], reports[2];
  for (int k = 0; k < 2; ++k) {
    // Same directory each time: config.txt records the output location.
    c.out_dir = scratch("determinism").string();
    const Report r = run_suite(c, "eigen-check");
    EXPECT_TRUE(r.passed());
    manifests[k] = slurp(fs::path(c.out_dir) / "eigen-check" / "manifest.json");
    reports[k] = slurp(fs::path(c.out_dir) / "eigen-check" / "report.json");
  }
  ASSERT_FALSE(manifests[0].empty());
  EXPECT_EQ(manifests[0], manifests[1]);
  EXPECT_EQ(reports[0], reports[1]);
}
