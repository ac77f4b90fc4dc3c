// aisolsr: run OLSR / AIS-OLSR scenarios and sweeps, and recompute metrics
// from stored traces.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aisolsr/config.hpp"
#include "aisolsr/experiment.hpp"
#include "aisolsr/metrics.hpp"
#include "aisolsr/simulator.hpp"
#include "aisolsr/trace.hpp"

namespace {

using namespace aisolsr;

constexpr int kConfigErrorExit = 2;

std::string default_out_dir() {
  if (const char* env = std::getenv("AISOLSR_OUT_DIR"); env && *env) return env;
  return "out";
}

struct ConfigOptions {
  std::string config = "table2";
  std::vector<std::string> overrides;
  std::string protocol;
  std::int64_t seed = -1;

  void attach(CLI::App* app) {
    app->add_option("config", config, "Config file, or a bundled name: table2, desk")->capture_default_str();
    app->add_option("--set", overrides, "Override a config key (key=value), repeatable");
    app->add_option("--protocol", protocol, "olsr or ais-olsr");
    app->add_option("--seed", seed, "Scenario seed");
  }

  ScenarioConfig effective() const {
    ScenarioConfig c = resolve_config(config);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError(kv, "override must look like key=value");
      set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!protocol.empty()) c.protocol = parse_protocol(protocol);
    if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
    c.validate();
    return c;
  }
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(what, "not a number: '" + s + "'");
}

// "1-10" or "1,4,7"
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(text, ',')) {
    const auto dash = part.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw ConfigError("seeds", "empty range '" + part + "'");
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(part));
      }
    } catch (const std::logic_error&) {
      throw ConfigError("seeds", "bad seed list '" + text + "'");
    }
  }
  return out;
}

int cmd_run(const ConfigOptions& opts, const std::string& out_dir, std::string stem, bool quiet) {
  const ScenarioConfig config = opts.effective();
  if (stem.empty()) stem = std::string(to_string(config.protocol)) + "-seed" + std::to_string(config.seed);
  const RunResult result = run_scenario(config);
  const RunArtifacts a = write_run_artifacts(result, out_dir, stem);
  if (!quiet) std::cout << run_summary_text(result);
  std::cout << "trace   " << a.trace.string() << "\nreport  " << a.report.string() << "\nsummary "
            << a.summary.string() << "\n";
  return result.ledger.violations == 0 ? 0 : 1;
}

int cmd_validate(const ConfigOptions& opts, bool print) {
  const ScenarioConfig config = opts.effective();
  if (print) {
    std::cout << to_config_text(config);
    return 0;
  }
  std::cout << "config ok: " << config.node_count << " nodes, " << to_string(config.protocol) << ", seed "
            << config.seed << "\n";
  return 0;
}

int cmd_sweep(const ConfigOptions& opts, const std::string& parameter, const std::string& values,
              const std::string& seeds, const std::string& protocols, unsigned jobs, std::string out_path) {
  const ScenarioConfig base = opts.effective();
  SweepSpec spec;
  spec.parameter = parameter;
  for (const auto& v : split(values, ',')) spec.values.push_back(parse_number(v, "values"));
  spec.seeds = parse_seeds(seeds);
  spec.protocols.clear();
  for (const auto& p : split(protocols, ',')) spec.protocols.push_back(parse_protocol(p));
  spec.jobs = jobs;
  validate_sweep(base, spec);

  const auto rows = run_sweep(base, spec);
  if (out_path.empty()) out_path = (std::filesystem::path(default_out_dir()) / ("sweep-" + parameter + ".csv")).string();
  const auto parent = std::filesystem::path(out_path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  write_sweep_csv(out, parameter, rows);

  std::printf("%-12s %-9s %5s %9s %11s %14s %11s\n", parameter.c_str(), "protocol", "runs", "pdr %", "delay ms",
              "tput kbit/s", "lifetime s");
  for (const auto& m : summarize_sweep(rows)) {
    std::printf("%-12s %-9s %5zu %9.2f %11.3f %14.3f %11.2f\n", format_double(m.value).c_str(),
                to_string(m.protocol), m.runs, m.mean_pdr, m.mean_delay * 1000.0, m.mean_throughput / 1000.0,
                m.mean_lifetime);
  }
  std::cout << rows.size() << " rows -> " << out_path << "\n";
  return 0;
}

int cmd_report(const std::string& trace_path, bool json) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace " + trace_path);
  const auto trace = read_trace_csv(in);
  const MetricsReport m = compute_metrics(trace);
  std::cout << (json ? metrics_json(m) : format_metrics_table(m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OLSR and AIS-OLSR MANET simulator"};
  app.require_subcommand(1);

  ConfigOptions run_opts;
  std::string run_out = default_out_dir();
  std::string run_stem;
  bool run_quiet = false;
  auto* run = app.add_subcommand("run", "Run one scenario and write trace, report and summary");
  run_opts.attach(run);
  run->add_option("--out", run_out, "Output directory (default $AISOLSR_OUT_DIR or ./out)");
  run->add_option("--stem", run_stem, "Artifact file name stem");
  run->add_flag("--quiet", run_quiet, "Skip the metrics table");

  ConfigOptions sweep_opts;
  std::string sweep_param = "pause_time";
  std::string sweep_values = "0,10,20,30";
  std::string sweep_seeds = "1-5";
  std::string sweep_protocols = "olsr,ais-olsr";
  unsigned sweep_jobs = 1;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter x seed x protocol grid and write a CSV");
  sweep_opts.attach(sweep);
  sweep->add_option("--param", sweep_param, "Numeric config key to vary")->capture_default_str();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->capture_default_str();
  sweep->add_option("--seeds", sweep_seeds, "Seed list, e.g. 1-10 or 1,3,5")->capture_default_str();
  sweep->add_option("--protocols", sweep_protocols, "Comma-separated protocols")->capture_default_str();
  sweep->add_option("--jobs,-j", sweep_jobs, "Concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "Sweep CSV path");

  ConfigOptions validate_opts;
  bool validate_print = false;
  auto* validate = app.add_subcommand("validate", "Check a config and overrides without running");
  validate_opts.attach(validate);
  validate->add_flag("--print", validate_print, "Print the effective config as re-loadable text instead of the status line");

  std::string report_trace;
  bool report_json_flag = false;
  auto* report = app.add_subcommand("report", "Recompute metrics from a trace CSV");
  report->add_option("trace", report_trace, "Trace CSV")->required();
  report->add_flag("--json", report_json_flag, "Emit JSON instead of a table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts, run_out, run_stem, run_quiet);
    if (*sweep)
      return cmd_sweep(sweep_opts, sweep_param, sweep_values, sweep_seeds, sweep_protocols, sweep_jobs, sweep_out);
    if (*validate) return cmd_validate(validate_opts, validate_print);
    if (*report) return cmd_report(report_trace, report_json_flag);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigErrorExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
