#include "aisolsr/trace.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "aisolsr/config.hpp"

namespace aisolsr {

namespace {

constexpr std::pair<TraceEvent, const char*> kEventNames[] = {
    {TraceEvent::data_send, "data_send"}, {TraceEvent::data_tx, "data_tx"},     {TraceEvent::data_rx, "data_rx"},
    {TraceEvent::data_recv, "data_recv"}, {TraceEvent::data_drop, "data_drop"}, {TraceEvent::ctrl_tx, "ctrl_tx"},
    {TraceEvent::ctrl_rx, "ctrl_rx"},     {TraceEvent::death, "death"},         {TraceEvent::end, "end"},
};

template <typename T>
std::optional<T> parse_optional_int(std::string_view cell, std::size_t line) {
  if (cell.empty()) return std::nullopt;
  T v{};
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw std::runtime_error("trace line " + std::to_string(line) + ": bad integer '" + std::string(cell) + "'");
  }
  return v;
}

}  // namespace

const char* to_string(TraceEvent e) {
  for (const auto& [ev, name] : kEventNames) {
    if (ev == e) return name;
  }
  return "unknown";
}

std::optional<TraceEvent> parse_trace_event(std::string_view text) {
  for (const auto& [ev, name] : kEventNames) {
    if (text == name) return ev;
  }
  return std::nullopt;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << format_double(r.time) << ',' << to_string(r.event) << ',';
    if (r.node) out << r.node->value;
    out << ',';
    if (r.flow) out << *r.flow;
    out << ',';
    if (r.seq) out << *r.seq;
    out << ',' << r.bytes << ',' << r.reason << '\n';
  }
}

std::string trace_to_csv(const std::vector<TraceRecord>& trace) {
  std::ostringstream ss;
  write_trace_csv(ss, trace);
  return ss.str();
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error("trace: missing or unexpected header");
  }
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (int i = 0; i < 6; ++i) {
      const auto comma = rest.find(',');
      if (comma == std::string_view::npos) {
        throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected 7 columns");
      }
      cells.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    cells.push_back(rest);

    TraceRecord r;
    auto [ptr, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), r.time);
    if (ec != std::errc() || ptr != cells[0].data() + cells[0].size()) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": bad time");
    }
    auto ev = parse_trace_event(cells[1]);
    if (!ev) throw std::runtime_error("trace line " + std::to_string(line_no) + ": unknown event");
    r.event = *ev;
    if (auto n = parse_optional_int<std::uint32_t>(cells[2], line_no)) r.node = NodeId(*n);
    r.flow = parse_optional_int<std::uint32_t>(cells[3], line_no);
    r.seq = parse_optional_int<std::uint64_t>(cells[4], line_no);
    r.bytes = parse_optional_int<std::uint32_t>(cells[5], line_no).value_or(0);
    r.reason = std::string(cells[6]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace aisolsr
