#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <queue>
#include <vector>

#include "ettbicc/fluid.hpp"
#include "ettbicc/protocol.hpp"

namespace ettbicc {

// Dumbbell: k sources on access links of `access_bw`, one bottleneck router
// serving `capacity` packets per RTT from a drop-tail FIFO, k sinks.
struct ScenarioConfig {
  int k = 4;
  double capacity = 50.0;     // B, packets/RTT
  double access_bw = 100.0;   // packets/RTT
  double rtt = 0.02;          // two-way propagation, seconds
  int queue_capacity = 10;    // packets waiting, excluding the one on the wire
  double duration = 200.0;    // RTTs
  std::vector<double> initial_W{1.0, 2.0, 1.0, 3.0};
  double initial_C = 50.0;
  double initial_Q = 50.0;
  std::uint64_t seed = 0;     // reserved; the simulator draws no random numbers
  FluidParams params = default_params(50.0, 4);

  // Throws ConfigError listing each failed field.
  void validate() const;
};

// k = 4, B = 50, 100 pkt/RTT access links, 10-packet buffer, initial
// C = Q = 50 and W = (1, 2, 1, 3).
ScenarioConfig reference_scenario();

// Nearest integer, ties to even.
long round_half_even(double x);

struct TraceRow {
  double t = 0.0;  // RTTs
  std::vector<double> W;
  double C = 0.0;
  double Q = 0.0;
  std::size_t queue = 0;         // packets waiting at the bottleneck
  std::uint64_t delivered = 0;   // bottleneck departures during the last RTT
  std::uint64_t drops = 0;       // cumulative
  std::uint64_t sent = 0;        // cumulative
  std::uint64_t in_flight = 0;   // sent but neither delivered nor dropped
};

struct Trace {
  int k = 0;
  std::vector<TraceRow> rows;

  std::vector<double> times() const;
  std::vector<double> total_window() const;
  std::vector<double> window(int flow) const;
  std::vector<double> queue() const;
  std::vector<double> delivered() const;
  std::size_t queue_max() const;
};

// `t,W1..Wk,C,Q,queue,delivered,drops`
void write_trace_csv(std::ostream& out, const Trace& trace);

class Simulation {
 public:
  // Builds the dumbbell; throws ConfigError on an invalid scenario.
  explicit Simulation(const ScenarioConfig& config);

  // Runs for `duration` RTTs from t = 0, sampling once per RTT. A simulation
  // runs once.
  Trace run(double duration);

  const ScenarioConfig& config() const { return config_; }
  const Router& router() const { return router_; }
  const std::vector<Sender>& senders() const { return senders_; }
  std::size_t pending_events() const { return events_.size(); }

 private:
  // Values double as tie-break priority at equal timestamps.
  enum class EventKind : std::uint8_t {
    Departure = 0,
    ArrivalAtRouter = 1,
    AckArrival = 2,
    EpochTick = 3,
    SampleTick = 4,
  };

  struct Event {
    double t;
    EventKind kind;
    int flow;
    std::uint64_t seq;
    CongestionHeader hdr;
  };

  struct Later {
    bool operator()(const Event& x, const Event& y) const;
  };

  struct Packet {
    int flow;
    CongestionHeader hdr;
  };

  void schedule(double t, EventKind kind, int flow, const CongestionHeader& hdr = {});
  void emit_epoch(double start);
  void on_arrival(const Event& ev);
  void on_departure(const Event& ev);
  void on_epoch_tick(const Event& ev);
  void on_sample(Trace& trace, const Event& ev);
  void start_service(const Packet& pkt);
  TraceRow snapshot(double t_rtt) const;

  ScenarioConfig config_;
  Router router_;
  std::vector<Sender> senders_;
  std::vector<std::optional<CongestionHeader>> latest_ack_;
  std::vector<double> access_free_;
  std::vector<double> residual_;

  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
  bool ran_ = false;
  long sample_count_ = 0;
  long epoch_count_ = 0;

  std::deque<Packet> fifo_;
  std::optional<Packet> on_wire_;
  std::uint64_t sent_ = 0;
  std::uint64_t toward_router_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t delivered_since_sample_ = 0;
  std::uint64_t drops_ = 0;

  double tx_bottleneck_;
  double tx_access_;
  double prop_to_router_;
  double prop_to_receiver_;
  double prop_ack_;
};

}  // namespace ettbicc
