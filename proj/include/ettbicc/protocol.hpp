#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "ettbicc/fluid.hpp"

namespace ettbicc {

// Per-packet feedback record. `w` is the sender's window at send time; the
// router needs it to aggregate sum_j W_j / (C + W_j) without per-flow state.
struct CongestionHeader {
  double bw = 0.0;  // congested link bandwidth, packets/RTT
  double c = 0.0;   // router's last virtual capacity
  double q = 0.0;   // router's last virtual queue
  double w = 0.0;   // sender window, packets

  bool finite() const;
  friend bool operator==(const CongestionHeader&, const CongestionHeader&) = default;
};

inline constexpr std::size_t kHeaderWireSize = 32;

// 4 x IEEE-754 binary64, little-endian, order (bw, c, q, w).
std::array<std::uint8_t, kHeaderWireSize> encode_header(const CongestionHeader& hdr);
CongestionHeader decode_header(std::span<const std::uint8_t, kHeaderWireSize> bytes);

// Scalar subset of FluidParams the router needs. Per-flow coefficients are
// taken as 1 at the router.
struct RouterParams {
  double capacity = 1.0;
  double effective_capacity = 1.0;
  double alpha = 1.0;
  double beta = 0.5;
  double eta = 1.0;
  double carrying_C = 1.0;
  double epoch_len = 1.0;  // RTT units
};

RouterParams router_params(const FluidParams& params);

// Bottleneck feedback law. Holds no per-flow entries: memory is constant in
// the number of flows.
class Router {
 public:
  Router(const RouterParams& params, double C, double Q);

  // Accumulates one arriving packet against the C of the current epoch.
  void on_arrival(const CongestionHeader& hdr);
  // Header with the router's C, Q and B written in; `w` is left untouched.
  CongestionHeader stamp(const CongestionHeader& hdr) const;
  // on_arrival followed by stamp.
  CongestionHeader on_packet(const CongestionHeader& hdr);

  // One forward-Euler step of the C and Q dynamics over the epoch, using the
  // accumulated packet count for sum W and the accumulated ratio for
  // sum W/(C+W). Clamps at zero and resets the accumulators.
  void on_epoch();

  double C() const { return C_; }
  double Q() const { return Q_; }
  std::uint64_t acc_pkts() const { return acc_pkts_; }
  double acc_ratio() const { return acc_ratio_; }
  const RouterParams& params() const { return params_; }

 private:
  RouterParams params_;
  double C_;
  double Q_;
  std::uint64_t acc_pkts_ = 0;
  double acc_ratio_ = 0.0;
};

// The receiver copies the data header into its ACK.
inline CongestionHeader receiver_on_packet(const CongestionHeader& hdr) { return hdr; }

struct SenderParams {
  double a = 1.0;
  double epsilon = 0.5;
  double b = 1.0;
  double window_floor = 1.0;
  double max_step = 1.0;  // cap on accumulated update time, RTTs
};

class Sender {
 public:
  Sender(const SenderParams& params, double initial_window);

  // Applies the window update when (bw, c, q) differs from the last header
  // applied. Time of unchanged headers accumulates into the next update, up
  // to `max_step`.
  // Non-finite headers are dropped and counted. Returns true if W changed.
  bool on_ack(const CongestionHeader& hdr, double dt);

  double window() const { return W_; }
  double pending_dt() const { return pending_dt_; }
  std::uint64_t rejected_headers() const { return rejected_; }
  const std::optional<std::array<double, 3>>& last_seen() const { return last_seen_; }

 private:
  SenderParams params_;
  double W_;
  double pending_dt_ = 0.0;
  std::optional<std::array<double, 3>> last_seen_;
  std::uint64_t rejected_ = 0;
};

}  // namespace ettbicc
