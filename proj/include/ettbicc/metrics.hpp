#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ettbicc/csv.hpp"
#include "ettbicc/fluid.hpp"
#include "ettbicc/packet_sim.hpp"

namespace ettbicc {

// Closed interval of time in RTTs.
struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
};

// (sum x)^2 / (k * sum x^2). Throws std::domain_error when sum x is 0 or any
// entry is negative.
double jain_index(std::span<const double> x);

// Mean delivered-per-RTT over trace rows with start < t <= end, divided by
// `capacity` and clamped to [0, 1]. Each row's count covers the RTT ending
// at its timestamp. Throws std::domain_error if no row falls in the window.
double utilization(const Trace& trace, double capacity, TimeWindow window);

// Earliest sample time after which the series stays within
// target * (1 +- band) through the last sample.
std::optional<double> convergence_time(std::span<const double> t, std::span<const double> values,
                                       double target, double band);

// Total variation of the samples inside the window divided by the window
// length.
double oscillation_index(std::span<const double> t, std::span<const double> values,
                         TimeWindow window);

// Final quarter of [first, last].
TimeWindow steady_window(std::span<const double> t);

struct MetricsReport {
  double jain = 0.0;
  double utilization = 0.0;
  std::optional<double> convergence_time;  // of sum W, 5% band around its final value
  double oscillation_index = 0.0;          // of sum W over the whole run
  double queue_max = 0.0;
  double queue_mean_steady = 0.0;
  std::uint64_t drops = 0;

  static std::string csv_header();
  std::string csv_row() const;
  void write_key_values(std::ostream& out) const;
};

inline constexpr double kConvergenceBand = 0.05;

// Packet-level trace: queue is the physical FIFO.
MetricsReport report_for_trace(const Trace& trace, double capacity);

// Fluid trajectory: utilization is min(sum W, B)/B and the queue fields
// describe the virtual queue Q.
MetricsReport report_for_fluid(const Trajectory& trajectory, double capacity);

// Dispatches on the columns of a CSV written by write_trace_csv or
// write_fluid_csv.
MetricsReport report_for_csv(const CsvTable& table, double capacity);

}  // namespace ettbicc
