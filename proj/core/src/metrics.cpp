#include "aisolsr/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <utility>

namespace aisolsr {

std::optional<double> pdr(std::uint64_t sent, std::uint64_t received) {
  if (received > sent) throw TraceCorruption("more packets received than sent");
  if (sent == 0) return std::nullopt;
  return static_cast<double>(received) / static_cast<double>(sent) * 100.0;
}

double end_to_end_delay(double send_time, double arrival_time) {
  const double d = arrival_time - send_time;
  if (d < 0.0) throw TraceCorruption("packet arrived before it was sent");
  return d;
}

double throughput(std::uint64_t delivered_bytes, double first_send, double last_arrival) {
  if (delivered_bytes == 0) return 0.0;
  const double window = last_arrival - first_send;
  if (!(window > 0.0)) throw TraceCorruption("delivered data over an empty time window");
  return static_cast<double>(delivered_bytes) * 8.0 / window;
}

Lifetime network_lifetime(std::span<const TraceRecord> trace) {
  Lifetime life;
  double end = 0.0;
  for (const auto& r : trace) {
    if (r.event == TraceEvent::death && !life.first_dead) {
      life.first_dead = r.node;
      life.seconds = r.time;
    }
    end = std::max(end, r.time);
  }
  if (!life.first_dead) {
    life.seconds = end;
    life.censored = true;
  }
  return life;
}

std::uint64_t MetricsReport::dropped_total() const {
  std::uint64_t total = 0;
  for (const auto& [reason, n] : dropped) total += n;
  return total;
}

MetricsReport compute_metrics(std::span<const TraceRecord> trace) {
  MetricsReport m;
  std::map<std::pair<std::uint32_t, std::uint64_t>, double> send_time;
  double first_send = std::numeric_limits<double>::infinity();
  double last_arrival = -std::numeric_limits<double>::infinity();
  double delay_sum = 0.0;

  for (const auto& r : trace) {
    switch (r.event) {
      case TraceEvent::data_send: {
        if (!r.flow || !r.seq) throw TraceCorruption("data_send row without flow/seq");
        if (!send_time.emplace(std::make_pair(*r.flow, *r.seq), r.time).second) {
          throw TraceCorruption("packet sent twice");
        }
        ++m.sent;
        first_send = std::min(first_send, r.time);
        break;
      }
      case TraceEvent::data_recv: {
        if (!r.flow || !r.seq) throw TraceCorruption("data_recv row without flow/seq");
        auto it = send_time.find({*r.flow, *r.seq});
        if (it == send_time.end()) throw TraceCorruption("packet received but never sent");
        delay_sum += end_to_end_delay(it->second, r.time);
        ++m.delay_samples;
        ++m.received;
        m.delivered_bytes += r.bytes;
        last_arrival = std::max(last_arrival, r.time);
        break;
      }
      case TraceEvent::data_drop:
        ++m.dropped[r.reason];
        break;
      default:
        break;
    }
  }

  m.pdr = pdr(m.sent, m.received);
  m.mean_delay = m.delay_samples ? delay_sum / static_cast<double>(m.delay_samples) : 0.0;
  m.throughput = m.delivered_bytes ? throughput(m.delivered_bytes, first_send, last_arrival) : 0.0;
  m.lifetime = network_lifetime(trace);
  if (m.dropped_total() != m.sent - m.received) {
    throw TraceCorruption("dropped packets do not account for sent minus received");
  }
  return m;
}

std::string format_metrics_table(const MetricsReport& r) {
  std::string out;
  char line[128];
  auto row = [&](const char* name, const std::string& value) {
    std::snprintf(line, sizeof line, "  %-22s %s\n", name, value.c_str());
    out += line;
  };
  auto num = [](double v, const char* fmt) {
    char b[64];
    std::snprintf(b, sizeof b, fmt, v);
    return std::string(b);
  };
  row("packet delivery ratio", r.pdr ? num(*r.pdr, "%.2f %%") : std::string("no traffic"));
  row("mean end-to-end delay", num(r.mean_delay * 1000.0, "%.3f ms"));
  row("throughput", num(r.throughput / 1000.0, "%.3f kbit/s"));
  row("network lifetime",
      num(r.lifetime.seconds, "%.3f s") + (r.lifetime.censored ? " (censored: no node died)" : ""));
  row("sent", std::to_string(r.sent));
  row("received", std::to_string(r.received));
  for (const auto& [reason, n] : r.dropped) row(("dropped " + reason).c_str(), std::to_string(n));
  return out;
}

}  // namespace aisolsr
