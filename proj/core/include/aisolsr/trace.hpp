#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aisolsr/types.hpp"

namespace aisolsr {

enum class TraceEvent {
  data_send,  // CBR source injects a packet (counts as sent)
  data_tx,    // a node transmits a data packet to its next hop
  data_rx,    // a node receives a data packet
  data_recv,  // packet reached its destination (counts as received)
  data_drop,  // packet lost; reason says why
  ctrl_tx,
  ctrl_rx,
  death,
  end,
};

const char* to_string(TraceEvent e);
std::optional<TraceEvent> parse_trace_event(std::string_view text);

namespace drop_reason {
inline constexpr const char* no_route = "no-route";
inline constexpr const char* route_break = "route-break";
inline constexpr const char* next_hop_dead = "next-hop-dead";
inline constexpr const char* out_of_range = "out-of-range";
inline constexpr const char* ttl_exhausted = "ttl-exhausted";
inline constexpr const char* queue_full = "queue-full";
inline constexpr const char* energy_exhausted = "energy-exhausted";
inline constexpr const char* in_flight_at_end = "in-flight-at-end";
}  // namespace drop_reason

struct TraceRecord {
  double time = 0.0;
  TraceEvent event = TraceEvent::end;
  std::optional<NodeId> node;
  std::optional<std::uint32_t> flow;
  std::optional<std::uint64_t> seq;
  std::uint32_t bytes = 0;
  std::string reason;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// CSV columns: time,event,node,flow,seq,bytes,reason. Absent values are
/// empty cells; times use shortest round-trip decimal form.
inline constexpr std::string_view kTraceHeader = "time,event,node,flow,seq,bytes,reason";

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
std::string trace_to_csv(const std::vector<TraceRecord>& trace);
/// Throws std::runtime_error with the offending line number.
std::vector<TraceRecord> read_trace_csv(std::istream& in);

}  // namespace aisolsr
