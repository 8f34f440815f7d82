#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sgchurn/analytics.hpp"
#include "sgchurn/errors.hpp"

namespace sgchurn::cli {

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      piece.erase(0, piece.find_first_not_of(" \t"));
      piece.erase(piece.find_last_not_of(" \t") + 1);
      if (!piece.empty()) out.push_back(piece);
    }
  }
  return out;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected a non-negative integer (got '" + text + "')");
  }
  return v;
}

// Options shared by `run` and `predict-bench`.
struct RawOptions {
  std::string config;
  std::uint64_t seed = 1;
  std::size_t capacity = 1024;
  std::size_t slots = 168;
  std::size_t topologies = 100;
  std::vector<std::string> backupSizes{"40"};
  std::vector<std::string> stabilizers{"interlaced"};
  std::vector<std::string> predictors{"swdbg"};
  std::string searchCap = "2000";
  std::string out = "results";
  std::vector<std::string> formats{"csv", "json"};
  bool trace = false;
  double timeoutMultiplier = 2.0;
  double rttBaseMs = 10.0;
  double rttPerUnitMs = 190.0;
  std::string rejoin = "fresh";
  std::string predError = "window";
  unsigned maxStateSize = 8;
  double sessionShape = 0.59;
  double sessionMeanHours = 2.71;
  double interarrivalMeanSeconds = 39.86;
  std::string churnKind = "debian";
  double uniformQ = 0.82;
  std::string arrivals = "poisson";
  std::size_t threads = std::max(1U, std::thread::hardware_concurrency());
};

void add_options(CLI::App& app, RawOptions& o) {
  app.set_config("--config", "", "flat key = value file; flags given on the command line win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--seed", o.seed, "experiment seed");
  app.add_option("--capacity", o.capacity, "system capacity (power of two)");
  app.add_option("--slots", o.slots, "time slots per topology");
  app.add_option("--topologies", o.topologies, "independent topologies per combination");
  app.add_option("--backup-size", o.backupSizes, "backup size b, comma list")->delimiter(',');
  app.add_option("--stabilizer", o.stabilizers, "interlaced|kademlia|dks|none, comma list")->delimiter(',');
  app.add_option("--predictor", o.predictors, "swdbg|dbg1..dbg4|lifetime|ludp, comma list")->delimiter(',');
  app.add_option("--search-cap", o.searchCap, "searches per slot upper bound, or 'none'");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--format", o.formats, "csv,json")->delimiter(',');
  app.add_flag("--trace", o.trace, "write per-search NDJSON traces");
  app.add_option("--timeout-multiplier", o.timeoutMultiplier, "timeout as a multiple of the rtt");
  app.add_option("--rtt-base-ms", o.rttBaseMs);
  app.add_option("--rtt-per-unit-ms", o.rttPerUnitMs, "rtt per unit of coordinate distance");
  app.add_option("--rejoin", o.rejoin, "fresh|stale");
  app.add_option("--pred-error", o.predError, "window|instant");
  app.add_option("--max-state-size", o.maxStateSize);
  app.add_option("--session-shape", o.sessionShape, "Weibull shape of session lengths");
  app.add_option("--session-mean-hours", o.sessionMeanHours);
  app.add_option("--interarrival-mean-seconds", o.interarrivalMeanSeconds);
  app.add_option("--churn-kind", o.churnKind, "debian|uniform");
  app.add_option("--uniform-q", o.uniformQ, "offline probability of the uniform model");
  app.add_option("--arrivals", o.arrivals, "poisson|deterministic");
  app.add_option("--threads", o.threads, "worker threads");
}

RunSpec resolve(const RawOptions& o) {
  RunSpec spec;
  SimConfig& c = spec.base;
  c.seed = o.seed;
  c.capacity = o.capacity;
  c.slots = o.slots;
  c.topologies = o.topologies;
  c.timeoutMultiplier = o.timeoutMultiplier;
  c.latency = {o.rttBaseMs, o.rttPerUnitMs};
  if (o.searchCap == "none") {
    c.searchCap.reset();
  } else {
    c.searchCap = parse_size("search-cap", o.searchCap);
  }
  c.rejoin = parse_rejoin_mode(o.rejoin);
  c.swDbg.errorMode = parse_pred_error_mode(o.predError);
  c.swDbg.maxStateSize = o.maxStateSize;
  c.churn.sessionShape = o.sessionShape;
  c.churn.sessionMeanHours = o.sessionMeanHours;
  c.churn.interarrivalMeanSeconds = o.interarrivalMeanSeconds;
  c.churn.kind = parse_churn_kind(o.churnKind);
  c.churn.uniformQ = o.uniformQ;
  if (o.arrivals == "poisson") {
    c.churn.arrivals = ArrivalProcess::Poisson;
  } else if (o.arrivals == "deterministic") {
    c.churn.arrivals = ArrivalProcess::Deterministic;
  } else {
    throw ConfigError("arrivals: unknown process '" + o.arrivals + "' (expected poisson|deterministic)");
  }

  spec.backupSizes.clear();
  for (const auto& s : split_list(o.backupSizes)) spec.backupSizes.push_back(parse_size("backup-size", s));
  spec.stabilizers.clear();
  for (const auto& s : split_list(o.stabilizers)) spec.stabilizers.push_back(parse_stabilizer_kind(s));
  spec.predictors.clear();
  for (const auto& s : split_list(o.predictors)) spec.predictors.push_back(parse_predictor_kind(s));
  if (spec.backupSizes.empty()) throw ConfigError("backup-size: list is empty");
  if (spec.stabilizers.empty()) throw ConfigError("stabilizer: list is empty");
  if (spec.predictors.empty()) throw ConfigError("predictor: list is empty");

  spec.outDir = o.out;
  spec.csv = false;
  spec.json = false;
  for (const auto& f : split_list(o.formats)) {
    if (f == "csv") {
      spec.csv = true;
    } else if (f == "json") {
      spec.json = true;
    } else {
      throw ConfigError("format: unknown format '" + f + "' (expected csv,json)");
    }
  }
  spec.trace = o.trace;
  if (o.threads == 0) throw ConfigError("threads must be >= 1");
  spec.threads = o.threads;
  c.backupSize = spec.backupSizes.front();
  c.validate();
  return spec;
}

std::vector<const char*> argv_of(const std::string& name, const std::vector<std::string>& args) {
  std::vector<const char*> argv{name.c_str()};
  for (const auto& a : args) argv.push_back(a.c_str());
  return argv;
}

// Parses into `o`; CLI11 parse errors become ConfigError.
void parse_into(CLI::App& app, const std::vector<std::string>& args) {
  static const std::string name = "sgchurn";
  auto argv = argv_of(name, args);
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
}

void put(std::ostream& out, double v) { out << format_number(v); }

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

RunSpec parse_run_args(const std::vector<std::string>& args) {
  CLI::App app{"run churn experiments"};
  RawOptions o;
  add_options(app, o);
  parse_into(app, args);
  return resolve(o);
}

RunSpec parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::vector<std::string> args{"--config", path.string()};
  args.insert(args.end(), overrides.begin(), overrides.end());
  return parse_run_args(args);
}

void preflight_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto probe = dir / ".sgchurn-write-probe";
  std::ofstream f(probe);
  if (ec || !f) throw ConfigError("out: directory '" + dir.string() + "' is not writable");
  f.close();
  std::filesystem::remove(probe, ec);
}

std::vector<ReportRow> run_experiments(const RunSpec& spec, std::ostream* progress) {
  struct Combo {
    StabilizerKind stabilizer;
    PredictorKind predictor;
    std::size_t backupSize;
  };
  std::vector<Combo> combos;
  for (auto s : spec.stabilizers) {
    for (auto p : spec.predictors) {
      for (auto b : spec.backupSizes) combos.push_back({s, p, b});
    }
  }
  const std::size_t topo = spec.base.topologies;
  const std::size_t tasks = combos.size() * topo;
  std::vector<RunMetrics> results(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progressMutex;

  auto config_of = [&](const Combo& c) {
    SimConfig cfg = spec.base;
    cfg.stabilizer = c.stabilizer;
    cfg.predictor = c.predictor;
    cfg.backupSize = c.backupSize;
    return cfg;
  };
  auto label = [](const Combo& c) {
    return to_string(c.stabilizer) + "/" + to_string(c.predictor) + "/b=" + std::to_string(c.backupSize);
  };

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const Combo& c = combos[t / topo];
      const std::size_t ti = t % topo;
      try {
        const SimConfig cfg = config_of(c);
        if (spec.trace) {
          const auto path = spec.outDir / ("trace-" + to_string(c.stabilizer) + "-" + to_string(c.predictor) + "-b" +
                                           std::to_string(c.backupSize) + "-t" + std::to_string(ti) + ".ndjson");
          std::ofstream trace(path);
          results[t] = run_topology(cfg, ti, &trace);
        } else {
          results[t] = run_topology(cfg, ti);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
      const std::size_t d = ++done;
      if (progress != nullptr) {
        std::lock_guard lock(progressMutex);
        *progress << "[" << d << "/" << tasks << "] " << label(c) << " topology " << ti << '\n';
      }
    }
  };

  const std::size_t nThreads = std::min(spec.threads, std::max<std::size_t>(tasks, 1));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < nThreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t t = 0; t < tasks; ++t) {
    if (!errors[t]) continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const std::exception& e) {
      throw std::runtime_error("combination " + label(combos[t / topo]) + " failed: " + e.what());
    }
  }

  std::vector<ReportRow> rows;
  for (std::size_t ci = 0; ci < combos.size(); ++ci) {
    std::vector<RunMetrics> runs(std::make_move_iterator(results.begin() + static_cast<std::ptrdiff_t>(ci * topo)),
                                 std::make_move_iterator(results.begin() + static_cast<std::ptrdiff_t>((ci + 1) * topo)));
    ReportRow row;
    row.stabilizer = combos[ci].stabilizer;
    row.predictor = combos[ci].predictor;
    row.backupSize = combos[ci].backupSize;
    row.topologies = topo;
    row.slots = spec.base.slots;
    row.seed = spec.base.seed;
    row.metrics = aggregate(runs);
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::vector<std::string> kCsvColumns = {
    "stabilizer",      "predictor",         "backupSize",       "avgSuccessRatio", "avgSearchLatencyMs",
    "avgPredictionError", "avgResolveMessages", "sdSuccessRatio", "sdSearchLatencyMs", "sdPredictionError",
    "topologies",      "slots",             "seed"};

void write_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
  for (const auto& r : rows) {
    const RunMetrics& m = r.metrics;
    out << to_string(r.stabilizer) << ',' << to_string(r.predictor) << ',' << r.backupSize << ',';
    put(out, m.avgSuccessRatio);
    out << ',';
    put(out, m.avgSearchLatencyMs);
    out << ',';
    put(out, m.avgPredictionError);
    out << ',';
    put(out, m.avgResolveMessages);
    out << ',';
    put(out, m.sdSuccessRatio);
    out << ',';
    put(out, m.sdSearchLatencyMs);
    out << ',';
    put(out, m.sdPredictionError);
    out << ',' << r.topologies << ',' << r.slots << ',' << r.seed << '\n';
  }
}

nlohmann::json rows_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    const RunMetrics& m = r.metrics;
    nlohmann::json j;
    j["stabilizer"] = to_string(r.stabilizer);
    j["predictor"] = to_string(r.predictor);
    j["backupSize"] = r.backupSize;
    j["avgSuccessRatio"] = m.avgSuccessRatio;
    j["avgSearchLatencyMs"] = m.avgSearchLatencyMs;
    j["avgPredictionError"] = m.avgPredictionError;
    j["avgResolveMessages"] = m.avgResolveMessages;
    j["sdSuccessRatio"] = m.sdSuccessRatio;
    j["sdSearchLatencyMs"] = m.sdSearchLatencyMs;
    j["sdPredictionError"] = m.sdPredictionError;
    j["topologies"] = r.topologies;
    j["slots"] = r.slots;
    j["seed"] = r.seed;
    j["avgBackupNeighborsPerLevel"] = m.avgBackupNeighborsPerLevel;
    j["avgRightStateSize"] = m.avgRightStateSize;
    j["avgHops"] = m.avgHops;
    j["topologySuccessRatio"] = m.topologySuccessRatio;
    j["topologySearchLatencyMs"] = m.topologySearchLatencyMs;
    j["topologyPredictionError"] = m.topologyPredictionError;

    nlohmann::json series;
    auto column = [&](const char* name, auto field) {
      nlohmann::json a = nlohmann::json::array();
      for (const SlotMetrics& s : m.perSlot) a.push_back(s.*field);
      series[name] = std::move(a);
    };
    column("onlineCount", &SlotMetrics::onlineCount);
    column("searchesInitiated", &SlotMetrics::searchesInitiated);
    column("searchesSucceeded", &SlotMetrics::searchesSucceeded);
    column("sumLatencyMs", &SlotMetrics::sumLatencyMs);
    column("sumPredictionError", &SlotMetrics::sumPredictionError);
    column("predictionSamples", &SlotMetrics::predictionSamples);
    column("sumHops", &SlotMetrics::sumHops);
    column("resolveInvocations", &SlotMetrics::resolveInvocations);
    column("resolveMessages", &SlotMetrics::resolveMessages);
    column("sumBackupPerLevel", &SlotMetrics::sumBackupPerLevel);
    column("backupSamples", &SlotMetrics::backupSamples);
    column("sumRightStateSize", &SlotMetrics::sumRightStateSize);
    column("rightStateSamples", &SlotMetrics::rightStateSamples);
    j["perSlot"] = std::move(series);
    arr.push_back(std::move(j));
  }
  return nlohmann::json{{"rows", std::move(arr)}};
}

std::vector<ReportRow> rows_from_json(const nlohmann::json& doc) {
  std::vector<ReportRow> rows;
  for (const auto& j : doc.at("rows")) {
    ReportRow r;
    r.stabilizer = parse_stabilizer_kind(j.at("stabilizer").get<std::string>());
    r.predictor = parse_predictor_kind(j.at("predictor").get<std::string>());
    r.backupSize = j.at("backupSize").get<std::size_t>();
    r.topologies = j.at("topologies").get<std::size_t>();
    r.slots = j.at("slots").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    RunMetrics& m = r.metrics;
    m.topologies = r.topologies;
    m.topologySuccessRatio = j.at("topologySuccessRatio").get<std::vector<double>>();
    m.topologySearchLatencyMs = j.at("topologySearchLatencyMs").get<std::vector<double>>();
    m.topologyPredictionError = j.at("topologyPredictionError").get<std::vector<double>>();
    const auto& series = j.at("perSlot");
    const std::size_t n = series.at("onlineCount").size();
    m.perSlot.resize(n);
    auto column = [&](const char* name, auto field) {
      const auto& a = series.at(name);
      for (std::size_t s = 0; s < n; ++s) a.at(s).get_to(m.perSlot[s].*field);
    };
    column("onlineCount", &SlotMetrics::onlineCount);
    column("searchesInitiated", &SlotMetrics::searchesInitiated);
    column("searchesSucceeded", &SlotMetrics::searchesSucceeded);
    column("sumLatencyMs", &SlotMetrics::sumLatencyMs);
    column("sumPredictionError", &SlotMetrics::sumPredictionError);
    column("predictionSamples", &SlotMetrics::predictionSamples);
    column("sumHops", &SlotMetrics::sumHops);
    column("resolveInvocations", &SlotMetrics::resolveInvocations);
    column("resolveMessages", &SlotMetrics::resolveMessages);
    column("sumBackupPerLevel", &SlotMetrics::sumBackupPerLevel);
    column("backupSamples", &SlotMetrics::backupSamples);
    column("sumRightStateSize", &SlotMetrics::sumRightStateSize);
    column("rightStateSamples", &SlotMetrics::rightStateSamples);
    for (std::size_t s = 0; s < n; ++s) {
      m.perSlot[s].slotIndex = s;
      m.totals += m.perSlot[s];
    }
    finalize(m);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_reports(const std::vector<ReportRow>& rows, const RunSpec& spec) {
  if (spec.csv) {
    std::ofstream f(spec.outDir / "report.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (spec.outDir / "report.csv").string());
    write_csv(rows, f);
  }
  if (spec.json) {
    std::ofstream f(spec.outDir / "report.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (spec.outDir / "report.json").string());
    f << rows_to_json(rows).dump(2) << '\n';
  }
}

int main_run(const std::vector<std::string>& args) {
  const RunSpec spec = parse_run_args(args);
  preflight_output(spec.outDir);
  const auto rows = run_experiments(spec, &std::cerr);
  emit_reports(rows, spec);
  return 0;
}

int main_predict_bench(const std::vector<std::string>& args) {
  CLI::App app{"predictor error table without the overlay workload"};
  RawOptions o;
  o.predictors = {"swdbg", "dbg4", "dbg3", "dbg2", "dbg1", "lifetime", "ludp"};
  o.stabilizers = {"none"};
  o.backupSizes = {"0"};
  o.searchCap = "0";
  o.formats = {"csv"};
  add_options(app, o);
  parse_into(app, args);
  RunSpec spec = resolve(o);
  // the overlay workload does not feed the predictors, so it is switched off
  spec.stabilizers = {StabilizerKind::None};
  spec.backupSizes = {0};
  spec.base.searchCap = 0;
  spec.json = false;
  preflight_output(spec.outDir);
  const auto rows = run_experiments(spec, &std::cerr);

  std::ofstream f(spec.outDir / "prediction_error.csv", std::ios::binary);
  f << "predictor,avgPredictionError,sdPredictionError,avgRightStateSize,topologies,slots,seed\n";
  std::cout << "predictor  mean error  sd\n";
  for (const auto& r : rows) {
    const RunMetrics& m = r.metrics;
    f << to_string(r.predictor) << ',' << format_number(m.avgPredictionError) << ','
      << format_number(m.sdPredictionError) << ',' << format_number(m.avgRightStateSize) << ',' << r.topologies
      << ',' << r.slots << ',' << r.seed << '\n';
    std::cout << to_string(r.predictor) << "  " << format_number(m.avgPredictionError) << "  "
              << format_number(m.sdPredictionError) << '\n';
  }
  return 0;
}

int main_analyze(const std::vector<std::string>& args) {
  CLI::App app{"analytical chain for the uniform churn model"};
  std::size_t n = 1024;
  double q = 0.82;
  std::optional<std::size_t> b;
  std::optional<double> target;
  app.add_option("--n", n, "system size");
  app.add_option("--q", q, "offline probability");
  app.add_option("-b,--backup-size", b, "backup size for the forward chain");
  app.add_option("--target-path-len", target, "E_f to invert for the backup size");
  parse_into(app, args);
  if (n == 0) throw ConfigError("n must be >= 1");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q must lie in [0, 1]");

  nlohmann::json j;
  const double p = candidate_probability(n);
  const double pe = effective_probability(p, q);
  const double online = expected_online(n, q);
  j["n"] = n;
  j["q"] = q;
  j["candidateProbability"] = p;
  j["effectiveProbability"] = pe;
  j["expectedOnline"] = online;
  const auto onlineCount = static_cast<std::size_t>(std::llround(online));
  j["searchPathBound"] = onlineCount > 0 ? nlohmann::json(estimate_search_path_bound(onlineCount)) : nlohmann::json();
  if (b) {
    const double pf = failure_probability(pe, *b);
    j["backupSize"] = *b;
    j["failureProbability"] = pf;
    j["expectedFailurePath"] = pf > 0.0 ? nlohmann::json(expected_failure_path(pf)) : nlohmann::json();
  }
  if (target) {
    j["targetPathLen"] = *target;
    j["estimatedBackupSize"] = estimate_backup_size(n, q, *target);
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace sgchurn::cli
