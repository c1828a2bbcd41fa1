#include "ettbicc/packet_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ettbicc/csv.hpp"
#include "ettbicc/errors.hpp"

namespace ettbicc {

namespace {

bool positive(double v) { return v > 0.0 && std::isfinite(v); }
bool non_negative(double v) { return v >= 0.0 && std::isfinite(v); }

SenderParams sender_params(const FluidParams& p, int flow) {
  SenderParams s;
  s.a = p.a.at(static_cast<std::size_t>(flow));
  s.epsilon = p.epsilon;
  s.b = p.b;
  return s;
}

}  // namespace

void ScenarioConfig::validate() const {
  FieldChecker check;
  check.require(k >= 1, "k must be >= 1");
  check.require(positive(capacity), "B must be > 0");
  check.require(positive(access_bw), "access_bw must be > 0");
  check.require(access_bw >= capacity, "access_bw must be >= B");
  check.require(positive(rtt), "rtt must be > 0");
  check.require(queue_capacity > 0, "queue_capacity must be > 0");
  check.require(positive(duration), "duration must be > 0");
  check.require(initial_W.size() == static_cast<std::size_t>(std::max(k, 0)),
                "initial_W must have k entries");
  check.require(std::all_of(initial_W.begin(), initial_W.end(), positive),
                "initial_W entries must be > 0");
  check.require(non_negative(initial_C), "initial_C must be >= 0");
  check.require(non_negative(initial_Q), "initial_Q must be >= 0");
  check.require(params.k == k, "params.k must equal k");
  check.require(params.capacity == capacity, "params B must equal B");
  check.throw_if_any();
  params.validate();
}

ScenarioConfig reference_scenario() { return ScenarioConfig{}; }

long round_half_even(double x) {
  const double r = std::round(x);
  if (std::abs(x - std::trunc(x)) == 0.5) return static_cast<long>(2.0 * std::round(x / 2.0));
  return static_cast<long>(r);
}

std::vector<double> Trace::times() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.t);
  return out;
}

std::vector<double> Trace::total_window() const {
  std::vector<double> out;
  for (const auto& r : rows) {
    double s = 0.0;
    for (double w : r.W) s += w;
    out.push_back(s);
  }
  return out;
}

std::vector<double> Trace::window(int flow) const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.W.at(static_cast<std::size_t>(flow)));
  return out;
}

std::vector<double> Trace::queue() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(static_cast<double>(r.queue));
  return out;
}

std::vector<double> Trace::delivered() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(static_cast<double>(r.delivered));
  return out;
}

std::size_t Trace::queue_max() const {
  std::size_t m = 0;
  for (const auto& r : rows) m = std::max(m, r.queue);
  return m;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << 't';
  for (int i = 1; i <= trace.k; ++i) out << ",W" << i;
  out << ",C,Q,queue,delivered,drops\n";
  for (const auto& r : trace.rows) {
    out << format_double(r.t);
    for (double w : r.W) out << ',' << format_double(w);
    out << ',' << format_double(r.C) << ',' << format_double(r.Q) << ',' << r.queue << ','
        << r.delivered << ',' << r.drops << '\n';
  }
}

bool Simulation::Later::operator()(const Event& x, const Event& y) const {
  if (x.t != y.t) return x.t > y.t;
  if (x.kind != y.kind) return x.kind > y.kind;
  if (x.flow != y.flow) return x.flow > y.flow;
  return x.seq > y.seq;
}

Simulation::Simulation(const ScenarioConfig& config)
    : config_((config.validate(), config)),
      router_(router_params(config.params), config.initial_C, config.initial_Q) {
  for (int i = 0; i < config_.k; ++i) {
    senders_.emplace_back(sender_params(config_.params, i), config_.initial_W[i]);
  }
  latest_ack_.assign(config_.k, std::nullopt);
  access_free_.assign(config_.k, 0.0);
  residual_.assign(config_.k, 0.0);

  const double rtt = config_.rtt;
  tx_bottleneck_ = rtt / config_.capacity;
  tx_access_ = rtt / config_.access_bw;
  // Two-way propagation split: source -> router -> sink is half the RTT,
  // the ACK path the other half.
  prop_to_router_ = rtt / 4.0;
  prop_to_receiver_ = rtt / 4.0;
  prop_ack_ = rtt / 2.0;

  schedule(rtt, EventKind::EpochTick, -1);
}

void Simulation::schedule(double t, EventKind kind, int flow, const CongestionHeader& hdr) {
  events_.push(Event{t, kind, flow, next_seq_++, hdr});
}

// Each sender paces its packets evenly over the coming RTT. The count is
// W rounded half-to-even after adding the rounding residual of the previous
// epoch, so the long-run rate equals W. Flow i is offset by i/k of its
// packet gap so that flows do not arrive in lockstep.
void Simulation::emit_epoch(double start) {
  for (int i = 0; i < config_.k; ++i) {
    const double W = senders_[i].window();
    const double owed = W + residual_[i];
    const long count = round_half_even(owed);
    residual_[i] = owed - static_cast<double>(count);
    if (count <= 0) continue;
    const double gap = config_.rtt / static_cast<double>(count);
    const double phase = static_cast<double>(i) / config_.k;
    for (long j = 0; j < count; ++j) {
      const double emit = start + (static_cast<double>(j) + phase) * gap;
      const double serialized = std::max(emit, access_free_[i]) + tx_access_;
      access_free_[i] = serialized;
      schedule(serialized + prop_to_router_, EventKind::ArrivalAtRouter, i,
               CongestionHeader{0.0, 0.0, 0.0, W});
      ++sent_;
      ++toward_router_;
    }
  }
}

void Simulation::start_service(const Packet& pkt) {
  on_wire_ = pkt;
  schedule(now_ + tx_bottleneck_, EventKind::Departure, pkt.flow, pkt.hdr);
}

void Simulation::on_arrival(const Event& ev) {
  --toward_router_;
  router_.on_arrival(ev.hdr);
  const Packet pkt{ev.flow, ev.hdr};
  if (!on_wire_) {
    start_service(pkt);
  } else if (fifo_.size() < static_cast<std::size_t>(config_.queue_capacity)) {
    fifo_.push_back(pkt);
  } else {
    ++drops_;
  }
}

void Simulation::on_departure(const Event& ev) {
  const CongestionHeader stamped = router_.stamp(on_wire_->hdr);
  ++delivered_;
  ++delivered_since_sample_;
  const CongestionHeader ack = receiver_on_packet(stamped);
  schedule(now_ + prop_to_receiver_ + prop_ack_, EventKind::AckArrival, ev.flow, ack);
  on_wire_.reset();
  if (!fifo_.empty()) {
    const Packet next = fifo_.front();
    fifo_.pop_front();
    start_service(next);
  }
}

void Simulation::on_epoch_tick(const Event&) {
  router_.on_epoch();
  for (int i = 0; i < config_.k; ++i) {
    if (latest_ack_[i]) senders_[i].on_ack(*latest_ack_[i], router_.params().epoch_len);
  }
  emit_epoch(now_);
  ++epoch_count_;
  schedule(static_cast<double>(epoch_count_ + 1) * config_.rtt, EventKind::EpochTick, -1);
}

TraceRow Simulation::snapshot(double t_rtt) const {
  TraceRow row;
  row.t = t_rtt;
  for (const auto& s : senders_) row.W.push_back(s.window());
  row.C = router_.C();
  row.Q = router_.Q();
  row.queue = fifo_.size();
  row.delivered = delivered_since_sample_;
  row.drops = drops_;
  row.sent = sent_;
  row.in_flight = toward_router_ + fifo_.size() + (on_wire_ ? 1 : 0);
  return row;
}

void Simulation::on_sample(Trace& trace, const Event&) {
  ++sample_count_;
  trace.rows.push_back(snapshot(static_cast<double>(sample_count_)));
  delivered_since_sample_ = 0;
  const auto& r = trace.rows.back();
  if (r.sent != delivered_ + r.drops + r.in_flight) {
    throw std::logic_error("packet conservation violated");
  }
  schedule(static_cast<double>(sample_count_ + 1) * config_.rtt, EventKind::SampleTick, -1);
}

Trace Simulation::run(double duration) {
  if (ran_) throw std::logic_error("simulation already ran");
  if (!positive(duration)) throw std::invalid_argument("duration must be > 0");
  ran_ = true;

  Trace trace;
  trace.k = config_.k;
  trace.rows.push_back(snapshot(0.0));

  emit_epoch(0.0);
  schedule(config_.rtt, EventKind::SampleTick, -1);

  const double end = std::floor(duration) * config_.rtt;
  while (!events_.empty() && events_.top().t <= end) {
    const Event ev = events_.top();
    events_.pop();
    if (ev.t < now_) throw std::logic_error("event dispatched out of order");
    now_ = ev.t;
    switch (ev.kind) {
      case EventKind::Departure:
        on_departure(ev);
        break;
      case EventKind::ArrivalAtRouter:
        on_arrival(ev);
        break;
      case EventKind::AckArrival:
        latest_ack_[ev.flow] = ev.hdr;
        break;
      case EventKind::EpochTick:
        on_epoch_tick(ev);
        break;
      case EventKind::SampleTick:
        on_sample(trace, ev);
        break;
    }
  }
  return trace;
}

}  // namespace ettbicc
