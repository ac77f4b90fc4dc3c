#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aisolsr/config.hpp"
#include "aisolsr/metrics.hpp"
#include "aisolsr/simulator.hpp"

namespace aisolsr {

/// Report JSON for one run: labels, metrics, ledger, AIS counters and the
/// effective configuration (as re-parsable config text and as an object).
std::string report_json(const RunResult& result);

/// Metrics-only JSON, used when recomputing from a stored trace.
std::string metrics_json(const MetricsReport& metrics);

struct RunArtifacts {
  std::filesystem::path trace;
  std::filesystem::path report;
  std::filesystem::path summary;
};

/// Writes <stem>.trace.csv, <stem>.report.json and <stem>.summary.txt.
RunArtifacts write_run_artifacts(const RunResult& result, const std::filesystem::path& dir, const std::string& stem);

std::string run_summary_text(const RunResult& result);

struct SweepSpec {
  std::string parameter = "pause_time";
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::vector<Protocol> protocols{Protocol::olsr, Protocol::ais_olsr};
  unsigned jobs = 1;
};

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  Protocol protocol = Protocol::olsr;
  std::optional<double> pdr;
  double mean_delay = 0.0;
  double throughput = 0.0;
  double lifetime = 0.0;
  bool lifetime_censored = false;
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  bool ledger_balanced = true;
};

/// Checks the sweep parameter against the schema; ConfigError otherwise.
void validate_sweep(const ScenarioConfig& base, const SweepSpec& spec);

/// One run per (value, seed, protocol), up to `jobs` at a time. Rows come
/// back ordered by (value, seed, protocol) whatever the completion order.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec);

void write_sweep_csv(std::ostream& out, const std::string& parameter, const std::vector<SweepRow>& rows);

struct SweepMean {
  double value = 0.0;
  Protocol protocol = Protocol::olsr;
  std::size_t runs = 0;
  std::size_t runs_with_traffic = 0;
  double mean_pdr = 0.0;  // over runs with traffic
  double mean_delay = 0.0;
  double mean_throughput = 0.0;
  double mean_lifetime = 0.0;
  double min_lifetime = 0.0;
  double max_lifetime = 0.0;
};

/// Means per (value, protocol), in row order.
std::vector<SweepMean> summarize_sweep(const std::vector<SweepRow>& rows);

}  // namespace aisolsr
