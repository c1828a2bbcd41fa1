#include "ettbicc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ettbicc {

namespace {

struct Series {
  std::vector<double> t;
  std::vector<double> total_window;
  std::vector<double> final_windows;
  std::vector<double> queue;
  std::vector<double> delivered;  // empty for fluid runs
  std::uint64_t drops = 0;
};

MetricsReport summarize(const Series& s, double capacity) {
  if (s.t.empty()) throw std::domain_error("cannot summarize an empty series");
  MetricsReport r;
  r.jain = jain_index(s.final_windows);

  const TimeWindow steady = steady_window(s.t);
  double util_sum = 0.0;
  double queue_sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] < steady.start) continue;
    const double served = s.delivered.empty() ? std::min(s.total_window[i], capacity) : s.delivered[i];
    util_sum += served / capacity;
    queue_sum += s.queue[i];
    ++n;
  }
  r.utilization = std::clamp(util_sum / static_cast<double>(n), 0.0, 1.0);
  r.queue_mean_steady = queue_sum / static_cast<double>(n);
  r.queue_max = *std::max_element(s.queue.begin(), s.queue.end());

  const double target = s.total_window.back();
  if (target > 0.0) r.convergence_time = convergence_time(s.t, s.total_window, target, kConvergenceBand);
  if (s.t.size() >= 2) {
    r.oscillation_index = oscillation_index(s.t, s.total_window, {s.t.front(), s.t.back()});
  }
  r.drops = s.drops;
  return r;
}

}  // namespace

double jain_index(std::span<const double> x) {
  if (x.empty()) throw std::domain_error("jain_index of an empty vector");
  double sum = 0.0;
  double sq = 0.0;
  for (double v : x) {
    if (!(v >= 0.0)) throw std::domain_error("jain_index needs non-negative rates");
    sum += v;
    sq += v * v;
  }
  if (sum <= 0.0) throw std::domain_error("jain_index of an all-zero vector");
  return sum * sum / (static_cast<double>(x.size()) * sq);
}

double utilization(const Trace& trace, double capacity, TimeWindow window) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : trace.rows) {
    if (r.t > window.start && r.t <= window.end) {
      sum += static_cast<double>(r.delivered);
      ++n;
    }
  }
  if (n == 0) throw std::domain_error("utilization window contains no samples");
  return std::clamp(sum / static_cast<double>(n) / capacity, 0.0, 1.0);
}

std::optional<double> convergence_time(std::span<const double> t, std::span<const double> values,
                                       double target, double band) {
  if (t.empty() || t.size() != values.size()) return std::nullopt;
  const double lo = target * (1.0 - band);
  const double hi = target * (1.0 + band);
  auto inside = [&](double v) { return v >= lo && v <= hi; };
  std::size_t i = values.size();
  while (i > 0 && inside(values[i - 1])) --i;
  if (i == values.size()) return std::nullopt;
  return t[i];
}

double oscillation_index(std::span<const double> t, std::span<const double> values,
                         TimeWindow window) {
  if (!(window.end > window.start)) throw std::domain_error("oscillation window must have positive length");
  double total = 0.0;
  std::optional<double> prev;
  std::size_t count = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.start || t[i] > window.end) continue;
    if (prev) total += std::abs(values[i] - *prev);
    prev = values[i];
    ++count;
  }
  if (count < 2) throw std::domain_error("oscillation window needs at least two samples");
  return total / (window.end - window.start);
}

TimeWindow steady_window(std::span<const double> t) {
  if (t.empty()) return {};
  const double first = t.front();
  const double last = t.back();
  return {first + 0.75 * (last - first), last};
}

std::string MetricsReport::csv_header() {
  return "jain,utilization,convergence_time,oscillation_index,queue_max,queue_mean_steady,drops";
}

std::string MetricsReport::csv_row() const {
  std::ostringstream out;
  out << format_double(jain) << ',' << format_double(utilization) << ','
      << (convergence_time ? format_double(*convergence_time) : std::string("not-converged")) << ','
      << format_double(oscillation_index) << ',' << format_double(queue_max) << ','
      << format_double(queue_mean_steady) << ',' << drops;
  return out.str();
}

void MetricsReport::write_key_values(std::ostream& out) const {
  out << "jain = " << format_double(jain) << '\n'
      << "utilization = " << format_double(utilization) << '\n'
      << "convergence_time = "
      << (convergence_time ? format_double(*convergence_time) : std::string("not-converged")) << '\n'
      << "oscillation_index = " << format_double(oscillation_index) << '\n'
      << "queue_max = " << format_double(queue_max) << '\n'
      << "queue_mean_steady = " << format_double(queue_mean_steady) << '\n'
      << "drops = " << drops << '\n';
}

MetricsReport report_for_trace(const Trace& trace, double capacity) {
  Series s;
  s.t = trace.times();
  s.total_window = trace.total_window();
  s.final_windows = trace.rows.back().W;
  s.queue = trace.queue();
  s.delivered = trace.delivered();
  s.drops = trace.rows.back().drops;
  return summarize(s, capacity);
}

MetricsReport report_for_fluid(const Trajectory& trajectory, double capacity) {
  Series s;
  s.t = trajectory.t;
  for (const auto& x : trajectory.x) {
    double sum = 0.0;
    for (std::size_t i = 2; i < x.size(); ++i) sum += x[i];
    s.total_window.push_back(sum);
    s.queue.push_back(x[1]);
  }
  const auto& last = trajectory.final_state();
  s.final_windows.assign(last.begin() + 2, last.end());
  return summarize(s, capacity);
}

MetricsReport report_for_csv(const CsvTable& table, double capacity) {
  if (table.rows.empty()) throw std::domain_error("trace has no rows");
  std::vector<std::size_t> w_cols;
  for (int i = 1; table.has_column("W" + std::to_string(i)); ++i) {
    w_cols.push_back(table.column_index("W" + std::to_string(i)));
  }
  if (w_cols.empty()) throw std::runtime_error("trace has no W1 column");

  Series s;
  s.t = table.column("t");
  for (const auto& row : table.rows) {
    double sum = 0.0;
    for (auto c : w_cols) sum += row[c];
    s.total_window.push_back(sum);
  }
  for (auto c : w_cols) s.final_windows.push_back(table.rows.back()[c]);

  if (table.has_column("delivered")) {
    s.queue = table.column("queue");
    s.delivered = table.column("delivered");
    s.drops = static_cast<std::uint64_t>(table.rows.back()[table.column_index("drops")]);
  } else {
    s.queue = table.column("Q");
  }
  return summarize(s, capacity);
}

}  // namespace ettbicc
