#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "runner.hpp"
#include "sgchurn/errors.hpp"

using namespace sgchurn;
using namespace sgchurn::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sgchurn-cli-test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path config_file(const std::string& name, const std::string& body) {
  const fs::path p = scratch(name) / "run.conf";
  std::ofstream(p) << body;
  return p;
}

RunSpec tiny_spec() {
  RunSpec s;
  s.base.capacity = 32;
  s.base.slots = 6;
  s.base.topologies = 2;
  s.base.searchCap = 40;
  s.threads = 2;
  return s;
}

std::string csv_of(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  write_csv(rows, out);
  return out.str();
}

}  // namespace

TEST(ParseConfig, EmptyFileGivesDefaults) {
  const auto spec = parse_config(config_file("empty", ""), {});
  EXPECT_EQ(spec.base.capacity, 1024U);
  EXPECT_EQ(spec.base.slots, 168U);
  EXPECT_EQ(spec.base.topologies, 100U);
  EXPECT_EQ(spec.base.churn.kind, ChurnKind::Debian);
  EXPECT_EQ(spec.backupSizes, std::vector<std::size_t>{40});
}

TEST(ParseConfig, CapacityMustBePowerOfTwo) {
  try {
    parse_config(config_file("cap", "capacity = 100\n"), {});
    FAIL() << "expected rejection";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("capacity must be a power of two"), std::string::npos);
  }
}

TEST(ParseConfig, CommandLineWins) {
  const auto p = config_file("override", "backup-size = 40\nslots = 12\n");
  const auto spec = parse_config(p, {"--backup-size", "20"});
  EXPECT_EQ(spec.backupSizes, std::vector<std::size_t>{20});
  EXPECT_EQ(spec.base.slots, 12U);
}

TEST(ParseConfig, UnknownKeyRejected) {
  EXPECT_THROW(parse_config(config_file("unknown", "bogus-key = 1\n"), {}), ConfigError);
  EXPECT_THROW(parse_run_args({"--stabilizer", "chord"}), ConfigError);
  EXPECT_THROW(parse_run_args({"--uniform-q", "1.5", "--churn-kind", "uniform"}), ConfigError);
}

TEST(ParseConfig, ListsAndSearchCap) {
  const auto spec = parse_run_args({"--backup-size", "10,20,30", "--stabilizer", "interlaced,dks", "--search-cap", "none"});
  EXPECT_EQ(spec.backupSizes, (std::vector<std::size_t>{10, 20, 30}));
  EXPECT_EQ(spec.stabilizers.size(), 2U);
  EXPECT_FALSE(spec.base.searchCap.has_value());
}

TEST(RunExperiments, OneCombinationAggregatesTopologies) {
  const auto rows = run_experiments(tiny_spec());
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_EQ(rows[0].topologies, 2U);
  EXPECT_EQ(rows[0].metrics.topologySuccessRatio.size(), 2U);
  EXPECT_EQ(rows[0].metrics.perSlot.size(), 6U);
}

TEST(RunExperiments, SweepRowCount) {
  auto spec = tiny_spec();
  spec.base.topologies = 1;
  spec.base.slots = 2;
  spec.backupSizes = {10, 20, 30, 40, 50};
  spec.stabilizers = {StabilizerKind::Interlaced, StabilizerKind::Kademlia};
  const auto rows = run_experiments(spec);
  ASSERT_EQ(rows.size(), 10U);
  EXPECT_EQ(rows[0].stabilizer, StabilizerKind::Interlaced);
  EXPECT_EQ(rows[9].stabilizer, StabilizerKind::Kademlia);
  EXPECT_EQ(rows[9].backupSize, 50U);
}

TEST(RunExperiments, RerunIsByteIdentical) {
  auto spec = tiny_spec();
  spec.threads = 1;
  const auto a = csv_of(run_experiments(spec));
  spec.threads = 3;
  const auto b = csv_of(run_experiments(spec));
  EXPECT_EQ(a, b);
}

TEST(Reports, OneRowCsvHasTwoLines) {
  const auto text = csv_of(run_experiments(tiny_spec()));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(text.substr(0, text.find(',')), "stabilizer");
}

TEST(Reports, JsonRoundTripAndRecomputableAverages) {
  const auto rows = run_experiments(tiny_spec());
  const auto j = rows_to_json(rows);
  const auto back = rows_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(csv_of(back), csv_of(rows));

  const auto& series = j.at("rows").at(0).at("perSlot");
  EXPECT_EQ(series.at("searchesInitiated").size(), 6U);
  double init = 0;
  double succ = 0;
  double lat = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    init += series["searchesInitiated"][i].get<double>();
    succ += series["searchesSucceeded"][i].get<double>();
    lat += series["sumLatencyMs"][i].get<double>();
  }
  EXPECT_NEAR(rows[0].metrics.avgSuccessRatio, succ / init, 1e-12);
  EXPECT_NEAR(rows[0].metrics.avgSearchLatencyMs, lat / init, 1e-9);
}

TEST(Reports, EmitWritesBothFormats) {
  auto spec = tiny_spec();
  spec.outDir = scratch("emit");
  emit_reports(run_experiments(spec), spec);
  EXPECT_TRUE(fs::exists(spec.outDir / "report.csv"));
  EXPECT_TRUE(fs::exists(spec.outDir / "report.json"));
}

TEST(Reports, PreflightRejectsUnwritable) {
  const fs::path file = scratch("blocked") / "plain-file";
  std::ofstream(file) << "x";
  EXPECT_THROW(preflight_output(file / "sub"), ConfigError);
}
