#include "aisolsr/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "aisolsr/codec.hpp"

namespace aisolsr {

std::int64_t to_microjoules(double joules) { return std::llround(joules * 1e6); }

EnergyLedger::EnergyLedger(const std::vector<double>& initial_joules) {
  for (double j : initial_joules) initial_.push_back(to_microjoules(j));
  remaining_ = initial_;
  tx_.assign(initial_.size(), 0);
  rx_.assign(initial_.size(), 0);
  death_.assign(initial_.size(), std::nullopt);
}

EnergyLedger::Debit EnergyLedger::debit(NodeId n, std::int64_t microjoules, bool transmit, double now) {
  const std::size_t i = n.index();
  if (death_[i]) return Debit::refused;
  if (remaining_[i] < microjoules) {
    death_[i] = now;
    return Debit::refused;
  }
  remaining_[i] -= microjoules;
  (transmit ? tx_ : rx_)[i] += microjoules;
  if (remaining_[i] <= 0) {
    death_[i] = now;
    return Debit::depleted;
  }
  return Debit::ok;
}

bool EnergyLedger::balanced(NodeId n) const {
  const std::size_t i = n.index();
  return initial_[i] - tx_[i] - rx_[i] == remaining_[i];
}

Simulator::Simulator(ScenarioConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::size_t n = config_.node_count;
  initial_max_ = config_.initial_max();
  mobility_params_ = config_.mobility_params();

  std::vector<double> initial(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId id(static_cast<std::uint32_t>(i));
    mobility_rng_.push_back(make_stream(config_.seed, StreamKind::mobility, i));
    timer_rng_.push_back(make_stream(config_.seed, StreamKind::timers, i));
    MobilityState s = initial_mobility_state(mobility_rng_.back(), mobility_params_);
    if (!config_.positions.empty()) {
      s.current = s.waypoint = config_.positions[i];
    }
    mobility_.push_back(s);
    initial[i] = config_.initial_energy_of(id);
    agents_.push_back(std::make_unique<OlsrAgent>(id, n, config_.olsr_params()));
    routers_.push_back(std::make_unique<AisRouter>(id, config_.ais_params()));
  }
  radio_rng_ = make_stream(config_.seed, StreamKind::radio);
  ledger_ = EnergyLedger(initial);

  if (!config_.flows.empty()) {
    flows_ = config_.flows;
  } else {
    Rng traffic = make_stream(config_.seed, StreamKind::traffic);
    for (std::size_t f = 0; f < config_.flow_count; ++f) {
      const auto src = static_cast<std::uint32_t>(uniform_index(traffic, n));
      auto dst = static_cast<std::uint32_t>(uniform_index(traffic, n - 1));
      if (dst >= src) ++dst;
      flows_.push_back({NodeId(src), NodeId(dst)});
    }
  }
  flow_next_seq_.assign(flows_.size(), 0);
  busy_until_.assign(n, 0.0);
  departures_.resize(n);
}

Simulator::~Simulator() = default;

void Simulator::schedule(double time, Payload payload) {
  if (time < now_) throw std::logic_error("event scheduled in the past");
  queue_.push(Event{time, next_sequence_++, std::move(payload)});
}

double Simulator::jittered(double interval, NodeId node) {
  const double j = config_.timer_jitter;
  if (j <= 0.0) return interval;
  return interval * (1.0 + uniform(timer_rng_[node.index()], -j, j));
}

void Simulator::start() {
  if (started_) return;
  started_ = true;
  const bool jitter = config_.timer_jitter > 0.0;
  for (std::size_t i = 0; i < config_.node_count; ++i) {
    const NodeId id(static_cast<std::uint32_t>(i));
    auto& rng = timer_rng_[i];
    const double hello_at = jitter ? uniform01(rng) * config_.hello_interval : 0.0;
    const double tc_at = jitter ? uniform01(rng) * config_.tc_interval : config_.tc_interval;
    schedule(hello_at, HelloTimer{id});
    schedule(tc_at, TcTimer{id});
  }
  if (config_.mobile()) schedule(config_.mobility_step, MobilityTick{});
  const double interval = 1.0 / config_.packet_rate;
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    const double at = config_.traffic_start + static_cast<double>(f) * interval / static_cast<double>(flows_.size());
    if (at < config_.sim_time) schedule(at, TrafficTick{f, 0});
  }
  schedule(config_.checkpoint_interval, Checkpoint{});
}

void Simulator::run_until(double t) {
  start();
  while (!queue_.empty() && queue_.top().time <= t) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ++diagnostics_.events;
    dispatch(ev);
  }
  if (t > now_) now_ = t;
}

RunResult Simulator::run() {
  run_until(config_.sim_time);
  return finish();
}

void Simulator::dispatch(Event& ev) {
  std::visit([this](auto& payload) { handle(payload); }, ev.payload);
}

bool Simulator::in_range(NodeId a, NodeId b) const {
  return euclidean_distance(position(a), position(b)) <= config_.radio_range;
}

bool Simulator::pay(NodeId n, double joules, bool transmit) {
  const bool was_alive = ledger_.alive(n);
  const auto result = ledger_.debit(n, to_microjoules(joules), transmit, now_);
  if (was_alive && !ledger_.alive(n)) record(TraceEvent::death, n, nullptr);
  return result != EnergyLedger::Debit::refused;
}

std::optional<double> Simulator::enqueue(NodeId node) {
  auto& q = departures_[node.index()];
  while (!q.empty() && q.front() <= now_) q.pop_front();
  if (q.size() >= config_.queue_limit) return std::nullopt;
  const double latency = config_.hop_latency + uniform(radio_rng_, 0.0, config_.latency_jitter);
  const double start = std::max(now_, busy_until_[node.index()]);
  const double done = start + latency;
  busy_until_[node.index()] = done;
  q.push_back(done);
  return done;
}

void Simulator::record(TraceEvent ev, std::optional<NodeId> node, const DataPacket* packet, std::string reason,
                       std::uint64_t ctrl_seq, std::uint32_t ctrl_bytes) {
  const bool control = ev == TraceEvent::ctrl_tx || ev == TraceEvent::ctrl_rx;
  if (control && !config_.trace_control) return;
  TraceRecord r;
  r.time = now_;
  r.event = ev;
  r.node = node;
  if (packet) {
    r.flow = packet->flow;
    r.seq = packet->seq;
    r.bytes = packet->bytes;
  } else if (control) {
    r.seq = ctrl_seq;
    r.bytes = ctrl_bytes;
  }
  r.reason = std::move(reason);
  trace_.push_back(std::move(r));
}

std::vector<NodeId> Simulator::deliver(NodeId sender, std::vector<std::uint8_t> bytes) {
  if (!ledger_.alive(sender)) return {};
  auto& q = departures_[sender.index()];
  while (!q.empty() && q.front() <= now_) q.pop_front();
  if (q.size() >= config_.queue_limit) {
    ++diagnostics_.control_queue_drops;
    return {};
  }
  if (!pay(sender, config_.ctrl_tx_cost, true)) return {};
  const double arrival = *enqueue(sender);

  const std::uint64_t seq = bytes.size() >= 16 ? (std::uint64_t{bytes[14]} << 8 | bytes[15]) : 0;
  const char* kind = bytes.size() > 4 && bytes[4] == kTcType ? "tc" : "hello";
  record(TraceEvent::ctrl_tx, sender, nullptr, kind, seq, static_cast<std::uint32_t>(bytes.size()));

  auto shared = std::make_shared<const std::vector<std::uint8_t>>(std::move(bytes));
  std::vector<NodeId> receivers;
  for (std::size_t i = 0; i < config_.node_count; ++i) {
    const NodeId r(static_cast<std::uint32_t>(i));
    if (r == sender || !ledger_.alive(r) || !in_range(sender, r)) continue;
    receivers.push_back(r);
    schedule(arrival, ControlArrival{r, sender, shared});
  }
  return receivers;
}

void Simulator::handle(const HelloTimer& e) {
  if (!ledger_.alive(e.node)) return;
  if (auto msg = agent(e.node).emit_hello(position(e.node), ledger_.remaining(e.node), now_)) {
    deliver(e.node, encode(*msg));
  }
  const double next = now_ + jittered(config_.hello_interval, e.node);
  if (next <= config_.sim_time) schedule(next, HelloTimer{e.node});
}

void Simulator::handle(const TcTimer& e) {
  if (!ledger_.alive(e.node)) return;
  if (auto msg = agent(e.node).emit_tc(position(e.node), ledger_.remaining(e.node), now_)) {
    deliver(e.node, encode(*msg));
  }
  const double next = now_ + jittered(config_.tc_interval, e.node);
  if (next <= config_.sim_time) schedule(next, TcTimer{e.node});
}

void Simulator::handle(const MobilityTick&) {
  for (std::size_t i = 0; i < mobility_.size(); ++i) {
    mobility_[i] = advance(mobility_[i], config_.mobility_step, mobility_rng_[i], mobility_params_);
  }
  const double next = now_ + config_.mobility_step;
  if (next <= config_.sim_time) schedule(next, MobilityTick{});
}

void Simulator::handle(const TrafficTick& e) {
  if (!cbr_tick(e.flow)) return;
  const double interval = 1.0 / config_.packet_rate;
  const double start =
      config_.traffic_start + static_cast<double>(e.flow) * interval / static_cast<double>(flows_.size());
  const double next = start + static_cast<double>(e.index + 1) * interval;
  if (next < config_.sim_time) schedule(next, TrafficTick{e.flow, e.index + 1});
}

void Simulator::handle(ControlArrival& e) {
  if (!ledger_.alive(e.receiver)) return;
  if (!pay(e.receiver, config_.ctrl_rx_cost, false)) return;
  const auto& bytes = *e.bytes;
  const std::uint64_t seq = bytes.size() >= 16 ? (std::uint64_t{bytes[14]} << 8 | bytes[15]) : 0;
  record(TraceEvent::ctrl_rx, e.receiver, nullptr, bytes.size() > 4 && bytes[4] == kTcType ? "tc" : "hello", seq,
         static_cast<std::uint32_t>(bytes.size()));

  ControlMessage msg;
  try {
    msg = decode(bytes);
  } catch (const DecodeError&) {
    ++diagnostics_.malformed_control;
    return;
  }
  OlsrAgent& ag = agent(e.receiver);
  if (auto* hello = std::get_if<HelloMessage>(&msg)) {
    ag.process_hello(*hello, position(e.receiver), now_);
    return;
  }
  auto& tc = std::get<TcMessage>(msg);
  if (ag.process_tc(tc, e.sender, now_).forward) {
    tc.header.ttl = static_cast<std::uint8_t>(tc.header.ttl - 1);
    tc.header.hop_count = static_cast<std::uint8_t>(tc.header.hop_count + 1);
    deliver(e.receiver, encode(tc));
  }
}

void Simulator::handle(DataArrival& e) {
  if (!ledger_.alive(e.receiver) || !pay(e.receiver, config_.data_rx_cost, false)) {
    drop(e.sender, e.packet, drop_reason::next_hop_dead);
    return;
  }
  record(TraceEvent::data_rx, e.receiver, &e.packet);
  forward_data(e.receiver, std::move(e.packet));
}

void Simulator::handle(const Checkpoint&) {
  ++ledger_check_.checkpoints;
  for (std::size_t i = 0; i < ledger_.size(); ++i) {
    ++ledger_check_.node_checks;
    if (!ledger_.balanced(NodeId(static_cast<std::uint32_t>(i)))) ++ledger_check_.violations;
  }
  const double next = now_ + config_.checkpoint_interval;
  if (next <= config_.sim_time) schedule(next, Checkpoint{});
}

bool Simulator::cbr_tick(std::size_t flow) {
  const Flow& f = flows_.at(flow);
  if (!ledger_.alive(f.source)) return false;
  DataPacket p;
  p.flow = static_cast<std::uint32_t>(flow);
  p.seq = flow_next_seq_[flow]++;
  p.source = f.source;
  p.destination = f.destination;
  p.bytes = static_cast<std::uint32_t>(config_.packet_size);
  p.send_time = now_;
  p.ttl = static_cast<std::uint32_t>(config_.data_ttl);
  in_flight_.insert({p.flow, p.seq});
  record(TraceEvent::data_send, f.source, &p);
  forward_data(f.source, std::move(p));
  return true;
}

void Simulator::drop(NodeId node, const DataPacket& packet, const char* reason) {
  record(TraceEvent::data_drop, node, &packet, reason);
  in_flight_.erase({packet.flow, packet.seq});
}

void Simulator::deliver_locally(NodeId node, const DataPacket& packet) {
  record(TraceEvent::data_recv, node, &packet);
  in_flight_.erase({packet.flow, packet.seq});
}

void Simulator::forward_data(NodeId node, DataPacket packet) {
  if (node == packet.destination) {
    deliver_locally(node, packet);
    return;
  }
  if (!ledger_.alive(node)) {
    drop(node, packet, drop_reason::energy_exhausted);
    return;
  }

  OlsrAgent& ag = agent(node);
  NodeId next;
  if (config_.protocol == Protocol::olsr) {
    const auto& table = ag.routing_table(now_);
    auto it = table.find(packet.destination);
    if (it == table.end()) {
      drop(node, packet, drop_reason::no_route);
      return;
    }
    next = it->second.next_hop;
  } else {
    if (packet.stamped_route.empty()) {
      const Graph& g = ag.graph(now_);
      const EnergyTable energies = ag.energy_view(ledger_.remaining(node), initial_max_);
      auto decision = routers_[node.index()]->route(packet.destination, g, energies, ag.version(), now_);
      if (!decision) {
        drop(node, packet, drop_reason::no_route);
        return;
      }
      packet.stamped_route = std::move(decision->route.nodes);
      packet.hop_index = 0;
    }
    if (packet.hop_index + 1 >= packet.stamped_route.size() || packet.stamped_route[packet.hop_index] != node) {
      drop(node, packet, drop_reason::route_break);
      return;
    }
    next = packet.stamped_route[packet.hop_index + 1];
    ag.expire(now_);
    if (!ag.neighbors().is_symmetric(next)) {
      drop(node, packet, drop_reason::route_break);
      return;
    }
  }
  transmit_data(node, next, std::move(packet));
}

void Simulator::transmit_data(NodeId node, NodeId next, DataPacket packet) {
  if (packet.ttl == 0) {
    drop(node, packet, drop_reason::ttl_exhausted);
    return;
  }
  auto& q = departures_[node.index()];
  while (!q.empty() && q.front() <= now_) q.pop_front();
  if (q.size() >= config_.queue_limit) {
    drop(node, packet, drop_reason::queue_full);
    return;
  }
  if (!pay(node, config_.data_tx_cost, true)) {
    drop(node, packet, drop_reason::energy_exhausted);
    return;
  }
  const double arrival = *enqueue(node);
  --packet.ttl;
  record(TraceEvent::data_tx, node, &packet);
  if (!in_range(node, next)) {
    drop(node, packet, drop_reason::out_of_range);
    return;
  }
  if (!packet.stamped_route.empty()) ++packet.hop_index;
  schedule(arrival, DataArrival{next, node, std::move(packet)});
}

RunResult Simulator::finish() {
  start();
  now_ = std::max(now_, config_.sim_time);
  for (const auto& [flow, seq] : in_flight_) {
    TraceRecord r;
    r.time = now_;
    r.event = TraceEvent::data_drop;
    r.flow = flow;
    r.seq = seq;
    r.bytes = static_cast<std::uint32_t>(config_.packet_size);
    r.reason = drop_reason::in_flight_at_end;
    trace_.push_back(std::move(r));
  }
  in_flight_.clear();
  record(TraceEvent::end, std::nullopt, nullptr);

  RunResult out;
  out.config = config_;
  out.metrics = compute_metrics(trace_);
  out.ledger = ledger_check_;
  out.diagnostics = diagnostics_;
  for (std::size_t i = 0; i < config_.node_count; ++i) {
    const NodeId id(static_cast<std::uint32_t>(i));
    out.diagnostics.malformed_control += agents_[i]->malformed_count();
    const AisStats& s = routers_[i]->stats();
    out.diagnostics.ais.pipeline_runs += s.pipeline_runs;
    out.diagnostics.ais.memory_hits += s.memory_hits;
    out.diagnostics.ais.invalidations += s.invalidations;
    out.diagnostics.ais.fallbacks += s.fallbacks;
    out.final_energy.push_back(ledger_.remaining(id));
  }
  out.trace = trace_;
  return out;
}

RunResult run_scenario(const ScenarioConfig& config) {
  Simulator sim(config);
  return sim.run();
}

}  // namespace aisolsr
