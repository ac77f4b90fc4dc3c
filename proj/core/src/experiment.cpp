#include "aisolsr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace aisolsr {

namespace {

using nlohmann::ordered_json;

ordered_json metrics_object(const MetricsReport& m) {
  ordered_json j;
  j["pdr"] = m.pdr ? ordered_json(*m.pdr) : ordered_json(nullptr);
  j["no_traffic"] = !m.pdr.has_value();
  j["mean_delay"] = m.mean_delay;
  j["delay_samples"] = m.delay_samples;
  j["throughput"] = m.throughput;
  j["lifetime"] = m.lifetime.seconds;
  j["lifetime_censored"] = m.lifetime.censored;
  j["first_dead"] = m.lifetime.first_dead ? ordered_json(m.lifetime.first_dead->value) : ordered_json(nullptr);
  j["sent"] = m.sent;
  j["received"] = m.received;
  j["delivered_bytes"] = m.delivered_bytes;
  ordered_json dropped = ordered_json::object();
  for (const auto& [reason, n] : m.dropped) dropped[reason] = n;
  j["dropped"] = dropped;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string metrics_json(const MetricsReport& metrics) { return metrics_object(metrics).dump(2) + "\n"; }

std::string report_json(const RunResult& r) {
  ordered_json j;
  j["protocol"] = to_string(r.config.protocol);
  j["seed"] = r.config.seed;
  j["metrics"] = metrics_object(r.metrics);

  ordered_json ledger;
  ledger["checkpoints"] = r.ledger.checkpoints;
  ledger["node_checks"] = r.ledger.node_checks;
  ledger["violations"] = r.ledger.violations;
  ledger["final_energy"] = r.final_energy;
  j["ledger"] = ledger;

  ordered_json diag;
  diag["events"] = r.diagnostics.events;
  diag["malformed_control"] = r.diagnostics.malformed_control;
  diag["control_queue_drops"] = r.diagnostics.control_queue_drops;
  diag["ais_pipeline_runs"] = r.diagnostics.ais.pipeline_runs;
  diag["ais_memory_hits"] = r.diagnostics.ais.memory_hits;
  diag["ais_invalidations"] = r.diagnostics.ais.invalidations;
  diag["ais_fallbacks"] = r.diagnostics.ais.fallbacks;
  j["diagnostics"] = diag;

  ordered_json config;
  for (const auto& key : config_keys()) config[key] = get_config_value(r.config, key);
  j["config"] = config;
  j["config_text"] = to_config_text(r.config);
  return j.dump(2) + "\n";
}

std::string run_summary_text(const RunResult& r) {
  std::string out = "protocol " + std::string(to_string(r.config.protocol)) + ", seed " +
                    std::to_string(r.config.seed) + ", " + std::to_string(r.config.node_count) + " nodes, " +
                    format_double(r.config.sim_time) + " s\n";
  out += format_metrics_table(r.metrics);
  out += "  ledger checkpoints     " + std::to_string(r.ledger.checkpoints) + " (" +
         std::to_string(r.ledger.violations) + " violations)\n";
  return out;
}

RunArtifacts write_run_artifacts(const RunResult& result, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  RunArtifacts a{dir / (stem + ".trace.csv"), dir / (stem + ".report.json"), dir / (stem + ".summary.txt")};
  write_file(a.trace, trace_to_csv(result.trace));
  write_file(a.report, report_json(result));
  write_file(a.summary, run_summary_text(result));
  return a;
}

void validate_sweep(const ScenarioConfig& base, const SweepSpec& spec) {
  if (!is_config_key(spec.parameter)) throw ConfigError(spec.parameter, "unknown sweep parameter");
  if (!is_numeric_config_key(spec.parameter)) throw ConfigError(spec.parameter, "sweep parameter is not numeric");
  if (spec.values.empty()) throw ConfigError("values", "sweep needs at least one value");
  if (spec.seeds.empty()) throw ConfigError("seeds", "sweep needs at least one seed");
  if (spec.protocols.empty()) throw ConfigError("protocols", "sweep needs at least one protocol");
  for (double v : spec.values) {
    ScenarioConfig c = base;
    set_config_value(c, spec.parameter, format_double(v));
    c.validate();
  }
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec) {
  validate_sweep(base, spec);

  struct Job {
    double value;
    std::uint64_t seed;
    Protocol protocol;
  };
  std::vector<Job> jobs;
  for (double v : spec.values)
    for (auto s : spec.seeds)
      for (auto p : spec.protocols) jobs.push_back({v, s, p});

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        ScenarioConfig c = base;
        set_config_value(c, spec.parameter, format_double(jobs[i].value));
        c.seed = jobs[i].seed;
        c.protocol = jobs[i].protocol;
        c.trace_control = false;
        const RunResult r = run_scenario(c);
        SweepRow& row = rows[i];
        row.value = jobs[i].value;
        row.seed = jobs[i].seed;
        row.protocol = jobs[i].protocol;
        row.pdr = r.metrics.pdr;
        row.mean_delay = r.metrics.mean_delay;
        row.throughput = r.metrics.throughput;
        row.lifetime = r.metrics.lifetime.seconds;
        row.lifetime_censored = r.metrics.lifetime.censored;
        row.sent = r.metrics.sent;
        row.received = r.metrics.received;
        row.ledger_balanced = r.ledger.violations == 0;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.value, a.seed, a.protocol) < std::tie(b.value, b.seed, b.protocol);
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::string& parameter, const std::vector<SweepRow>& rows) {
  out << parameter << ",seed,protocol,pdr,mean_delay,throughput,lifetime,lifetime_censored,sent,received\n";
  for (const auto& r : rows) {
    out << format_double(r.value) << ',' << r.seed << ',' << to_string(r.protocol) << ','
        << (r.pdr ? format_double(*r.pdr) : std::string()) << ',' << format_double(r.mean_delay) << ','
        << format_double(r.throughput) << ',' << format_double(r.lifetime) << ',' << (r.lifetime_censored ? 1 : 0)
        << ',' << r.sent << ',' << r.received << '\n';
  }
}

std::vector<SweepMean> summarize_sweep(const std::vector<SweepRow>& rows) {
  std::vector<SweepMean> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SweepMean& m) { return m.value == r.value && m.protocol == r.protocol; });
    if (it == out.end()) {
      out.push_back({r.value, r.protocol});
      it = std::prev(out.end());
      it->min_lifetime = it->max_lifetime = r.lifetime;
    }
    ++it->runs;
    if (r.pdr) {
      ++it->runs_with_traffic;
      it->mean_pdr += *r.pdr;
    }
    it->mean_delay += r.mean_delay;
    it->mean_throughput += r.throughput;
    it->mean_lifetime += r.lifetime;
    it->min_lifetime = std::min(it->min_lifetime, r.lifetime);
    it->max_lifetime = std::max(it->max_lifetime, r.lifetime);
  }
  for (auto& m : out) {
    const auto n = static_cast<double>(m.runs);
    if (m.runs_with_traffic) m.mean_pdr /= static_cast<double>(m.runs_with_traffic);
    m.mean_delay /= n;
    m.mean_throughput /= n;
    m.mean_lifetime /= n;
  }
  return out;
}

}  // namespace aisolsr
