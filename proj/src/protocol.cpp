#include "ettbicc/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace ettbicc {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void put_le(std::uint8_t* dst, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) dst[i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

double get_le(const std::uint8_t* src) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(src[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

bool CongestionHeader::finite() const {
  return std::isfinite(bw) && std::isfinite(c) && std::isfinite(q) && std::isfinite(w);
}

std::array<std::uint8_t, kHeaderWireSize> encode_header(const CongestionHeader& hdr) {
  std::array<std::uint8_t, kHeaderWireSize> out{};
  put_le(out.data(), hdr.bw);
  put_le(out.data() + 8, hdr.c);
  put_le(out.data() + 16, hdr.q);
  put_le(out.data() + 24, hdr.w);
  return out;
}

CongestionHeader decode_header(std::span<const std::uint8_t, kHeaderWireSize> bytes) {
  return {get_le(bytes.data()), get_le(bytes.data() + 8), get_le(bytes.data() + 16),
          get_le(bytes.data() + 24)};
}

RouterParams router_params(const FluidParams& params) {
  RouterParams r;
  r.capacity = params.capacity;
  r.effective_capacity = params.effective_capacity;
  r.alpha = params.alpha;
  r.beta = params.beta;
  r.eta = params.eta;
  r.carrying_C = params.carrying_C;
  return r;
}

Router::Router(const RouterParams& params, double C, double Q) : params_(params), C_(C), Q_(Q) {
  if (!(C >= 0.0) || !(Q >= 0.0) || !std::isfinite(C) || !std::isfinite(Q)) {
    throw std::invalid_argument("router C and Q must be finite and non-negative");
  }
}

void Router::on_arrival(const CongestionHeader& hdr) {
  ++acc_pkts_;
  acc_ratio_ += ratio(1.0, C_ + hdr.w);
}

CongestionHeader Router::stamp(const CongestionHeader& hdr) const {
  return {params_.capacity, C_, Q_, hdr.w};
}

CongestionHeader Router::on_packet(const CongestionHeader& hdr) {
  on_arrival(hdr);
  return stamp(hdr);
}

void Router::on_epoch() {
  const auto& p = params_;
  const double load = static_cast<double>(acc_pkts_);
  const double served = std::min(p.effective_capacity, Q_ + load);
  const double dC = C_ * (p.alpha * (1.0 - C_ / p.carrying_C) - p.beta * acc_ratio_);
  const double dQ = Q_ * (ratio(load, Q_ + load) - p.eta * ratio(served, Q_ + served));
  C_ = std::max(0.0, C_ + p.epoch_len * dC);
  Q_ = std::max(0.0, Q_ + p.epoch_len * dQ);
  acc_pkts_ = 0;
  acc_ratio_ = 0.0;
}

Sender::Sender(const SenderParams& params, double initial_window)
    : params_(params), W_(std::max(params.window_floor, initial_window)) {
  if (!(params.window_floor > 0.0)) throw std::invalid_argument("window floor must be > 0");
  if (!(params.max_step > 0.0)) throw std::invalid_argument("max_step must be > 0");
}

bool Sender::on_ack(const CongestionHeader& hdr, double dt) {
  if (!hdr.finite() || hdr.bw <= 0.0) {
    ++rejected_;
    return false;
  }
  pending_dt_ = std::min(params_.max_step, pending_dt_ + dt);
  const std::array<double, 3> seen{hdr.c, hdr.q, hdr.bw};
  if (last_seen_ && *last_seen_ == seen) return false;

  const auto& p = params_;
  const double cap = hdr.bw / 2.0;
  const double bracket = p.a * (1.0 - W_ / cap) + p.epsilon * ratio(hdr.c, hdr.c + W_) -
                         p.b * ratio(hdr.q, hdr.q + W_);
  W_ = std::max(p.window_floor, W_ + pending_dt_ * W_ * bracket);
  pending_dt_ = 0.0;
  last_seen_ = seen;
  return true;
}

}  // namespace ettbicc
