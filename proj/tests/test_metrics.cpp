#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ettbicc/csv.hpp"
#include "ettbicc/metrics.hpp"

using namespace ettbicc;

namespace {

Trace delivered_trace(const std::vector<std::uint64_t>& counts) {
  Trace tr;
  tr.k = 1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    TraceRow r;
    r.t = static_cast<double>(i);
    r.W = {1.0};
    r.delivered = counts[i];
    tr.rows.push_back(r);
  }
  return tr;
}

double jain_oracle(const std::vector<double>& x) {
  double s = 0, q = 0;
  for (double v : x) {
    s += v;
    q += v * v;
  }
  return s * s / (x.size() * q);
}

}  // namespace

TEST_CASE("Jain index examples") {
  CHECK(jain_index(std::vector<double>{12.25, 12.25, 12.25, 12.25}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(jain_index(std::vector<double>{10, 0, 0, 0}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(jain_index(std::vector<double>{1, 2, 3, 4}) == doctest::Approx(100.0 / 120.0).epsilon(1e-12));
  CHECK(jain_index(std::vector<double>{1, 2, 1, 3}) == doctest::Approx(49.0 / 60.0).epsilon(1e-12));
  CHECK_THROWS_AS(jain_index(std::vector<double>{0, 0}), std::domain_error);
  CHECK_THROWS_AS(jain_index(std::vector<double>{}), std::domain_error);
  CHECK_THROWS_AS(jain_index(std::vector<double>{1, -1}), std::domain_error);
}

TEST_CASE("Jain index is scale invariant and bounded") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 100);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int n = 0; n < 500; ++n) {
    std::vector<double> x(1 + n % 9);
    for (auto& v : x) v = u(rng);
    const double j = jain_index(x);
    const double k = static_cast<double>(x.size());
    CHECK(j >= 1.0 / k - 1e-12);
    CHECK(j <= 1.0 + 1e-12);
    CHECK(j == doctest::Approx(jain_oracle(x)).epsilon(1e-12));
    const double c = scale(rng);
    auto y = x;
    for (auto& v : y) v *= c;
    CHECK(jain_index(y) == doctest::Approx(j).epsilon(1e-12));
  }
}

TEST_CASE("utilization over a window") {
  const auto tr = delivered_trace({0, 50, 50, 25, 25});
  CHECK(utilization(tr, 50, {0, 2}) == doctest::Approx(1.0));
  CHECK(utilization(tr, 50, {2, 4}) == doctest::Approx(0.5));
  CHECK(utilization(tr, 50, {0, 4}) == doctest::Approx(0.75));
  // Row t=0 carries no delivered interval and lies outside (start, end].
  CHECK(utilization(tr, 100, {0, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(utilization(tr, 50, {10, 20}), std::domain_error);
}

TEST_CASE("utilization is clamped to [0, 1]") {
  const auto tr = delivered_trace({0, 80, 80});
  CHECK(utilization(tr, 50, {0, 2}) == 1.0);
}

TEST_CASE("convergence time is the last entry into the band") {
  const std::vector<double> t{0, 1, 2, 3, 4, 5};
  CHECK(convergence_time(t, std::vector<double>{0, 10, 8, 9.8, 10.2, 10}, 10, 0.05) == 3.0);
  CHECK(convergence_time(t, std::vector<double>{10, 10, 10, 10, 10, 10}, 10, 0.05) == 0.0);
  CHECK(convergence_time(t, std::vector<double>{0, 0, 0, 0, 0, 20}, 10, 0.05) == std::nullopt);
  // Band edges are inclusive.
  CHECK(convergence_time(t, std::vector<double>{0, 9.5, 10.5, 10, 10, 10}, 10, 0.05) == 1.0);
}

TEST_CASE("oscillation index") {
  const std::vector<double> t{0, 1, 2, 3};
  CHECK(oscillation_index(t, std::vector<double>{0, 1, 0, 1}, {0, 3}) == doctest::Approx(1.0));
  CHECK(oscillation_index(t, std::vector<double>{5, 5, 5, 5}, {0, 3}) == 0.0);
  CHECK(oscillation_index(t, std::vector<double>{0, 1, 0, 1}, {1, 3}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(oscillation_index(t, std::vector<double>{0, 1, 0, 1}, {3, 3}), std::domain_error);
  CHECK_THROWS_AS(oscillation_index(t, std::vector<double>{0, 1, 0, 1}, {2.5, 3}), std::domain_error);
}

TEST_CASE("oscillation index of a monotone series is its net change per unit time") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> step(0, 3);
  for (int n = 0; n < 100; ++n) {
    std::vector<double> t, v;
    double x = step(rng);
    for (int i = 0; i <= 20; ++i) {
      t.push_back(i * 0.5);
      v.push_back(x);
      x += step(rng);
    }
    const double expected = (v.back() - v.front()) / (t.back() - t.front());
    CHECK(oscillation_index(t, v, {t.front(), t.back()}) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("steady window is the final quarter") {
  const std::vector<double> t{0, 100, 200};
  const auto w = steady_window(t);
  CHECK(w.start == 150.0);
  CHECK(w.end == 200.0);
}

TEST_CASE("report formatting") {
  MetricsReport r;
  r.jain = 1;
  r.utilization = 0.5;
  r.oscillation_index = 0.25;
  r.queue_max = 3;
  r.queue_mean_steady = 1.5;
  r.drops = 7;
  CHECK(r.csv_row() == "1,0.5,not-converged,0.25,3,1.5,7");
  r.convergence_time = 12;
  CHECK(r.csv_row() == "1,0.5,12,0.25,3,1.5,7");
  CHECK(MetricsReport::csv_header() ==
        "jain,utilization,convergence_time,oscillation_index,queue_max,queue_mean_steady,drops");
  std::ostringstream out;
  r.write_key_values(out);
  CHECK(out.str().find("convergence_time = 12\n") != std::string::npos);
}

TEST_CASE("report from a trace CSV matches the in-memory report") {
  Trace tr;
  tr.k = 2;
  for (int i = 0; i <= 8; ++i) {
    TraceRow r;
    r.t = i;
    r.W = {10.0 + (i % 2), 10.0};
    r.queue = static_cast<std::size_t>(i % 3);
    r.delivered = i == 0 ? 0 : 20;
    r.drops = static_cast<std::uint64_t>(i);
    tr.rows.push_back(r);
  }
  std::ostringstream out;
  write_trace_csv(out, tr);
  std::istringstream in(out.str());
  const auto from_csv = report_for_csv(read_csv(in), 25);
  const auto direct = report_for_trace(tr, 25);
  CHECK(from_csv.csv_row() == direct.csv_row());
  CHECK(direct.utilization == doctest::Approx(0.8));
  CHECK(direct.queue_max == 2);
  CHECK(direct.drops == 8);
  // sum W alternates between 20 and 21: 8 changes of 1 over 8 time units.
  CHECK(direct.oscillation_index == doctest::Approx(1.0));
}
