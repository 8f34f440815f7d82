#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgchurn/engine.hpp"

namespace sgchurn::cli {

struct RunSpec {
  SimConfig base;
  std::vector<std::size_t> backupSizes{40};
  std::vector<StabilizerKind> stabilizers{StabilizerKind::Interlaced};
  std::vector<PredictorKind> predictors{PredictorKind::SwDbg};
  std::filesystem::path outDir = "results";
  bool csv = true;
  bool json = true;
  bool trace = false;
  std::size_t threads = 1;
};

struct ReportRow {
  StabilizerKind stabilizer = StabilizerKind::Interlaced;
  PredictorKind predictor = PredictorKind::SwDbg;
  std::size_t backupSize = 0;
  std::size_t topologies = 0;
  std::size_t slots = 0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
};

// Parses `run` arguments (without the program and subcommand names). A
// `--config FILE` supplies defaults; explicit flags override it.
RunSpec parse_run_args(const std::vector<std::string>& args);
RunSpec parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);

// Creates the output directory and checks that it accepts files.
void preflight_output(const std::filesystem::path& dir);

// Every (stabilizer, predictor, backupSize) combination, in that nesting
// order, aggregated over the configured topologies. Progress goes to
// `progress` when non-null.
std::vector<ReportRow> run_experiments(const RunSpec& spec, std::ostream* progress = nullptr);

extern const std::vector<std::string> kCsvColumns;
void write_csv(const std::vector<ReportRow>& rows, std::ostream& out);
nlohmann::json rows_to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_json(const nlohmann::json& j);
void emit_reports(const std::vector<ReportRow>& rows, const RunSpec& spec);

std::string format_number(double v);

int main_run(const std::vector<std::string>& args);
int main_analyze(const std::vector<std::string>& args);
int main_predict_bench(const std::vector<std::string>& args);

}  // namespace sgchurn::cli
