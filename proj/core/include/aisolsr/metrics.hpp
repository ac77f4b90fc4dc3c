#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "aisolsr/trace.hpp"

namespace aisolsr {

/// Raised when a trace contradicts itself (more receipts than sends,
/// negative delays, unaccounted packets).
class TraceCorruption : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// received / sent * 100. nullopt when nothing was sent.
std::optional<double> pdr(std::uint64_t sent, std::uint64_t received);

/// arrival - send.
double end_to_end_delay(double send_time, double arrival_time);

/// Delivered bits per second over [first_send, last_arrival].
double throughput(std::uint64_t delivered_bytes, double first_send, double last_arrival);

struct Lifetime {
  double seconds = 0.0;
  bool censored = false;  // nobody died; seconds is the run end
  std::optional<NodeId> first_dead;
};

/// Time of the first node death, or the run end when nobody died.
Lifetime network_lifetime(std::span<const TraceRecord> trace);

struct MetricsReport {
  std::optional<double> pdr;  // percent; nullopt = no traffic
  double mean_delay = 0.0;    // seconds
  std::uint64_t delay_samples = 0;
  double throughput = 0.0;    // bits per second
  Lifetime lifetime;
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::uint64_t delivered_bytes = 0;
  std::map<std::string, std::uint64_t> dropped;  // by reason

  std::uint64_t dropped_total() const;
};

/// Data-plane metrics from a complete trace (one ending in an `end` row).
MetricsReport compute_metrics(std::span<const TraceRecord> trace);

/// Aligned human-readable table.
std::string format_metrics_table(const MetricsReport& report);

}  // namespace aisolsr
