#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fblrate/optimize.hpp"

using namespace fblrate;
using channel::ChannelParams;
using channel::Deterministic;
using channel::QosSpec;
using channel::Rayleigh;
using effective::FixedRate;
using effective::ParallelPair;
using effective::VariableRate;
using optimize::EpsStrategyKind;
using optimize::SweepAxis;
using optimize::SweepSpec;

namespace {
const ChannelParams kParams{1.0, 1000, Rayleigh{1.0}, false};
}

TEST_CASE("optimal_eps reproduces the reference points", "[optimize]") {
  auto r1 = optimize::optimal_eps(EpsStrategyKind::variable_rate, kParams, {0.001});
  CHECK(r1.arg == Catch::Approx(0.0127).margin(5e-4));
  CHECK(r1.value == Catch::Approx(0.6256).margin(2e-3));

  auto r0 = optimize::optimal_eps(EpsStrategyKind::variable_rate, kParams, {0.0});
  CHECK(r0.arg == Catch::Approx(0.0171).margin(5e-4));
  CHECK(r0.value == Catch::Approx(0.7750).margin(2e-3));
  CHECK(r0.bracket_lo <= r0.arg);
  CHECK(r0.arg <= r0.bracket_hi);
}

TEST_CASE("optimization result value matches effective_rate at arg", "[optimize]") {
  auto r = optimize::optimal_eps(EpsStrategyKind::variable_rate, kParams, {0.01});
  const double direct =
      effective::effective_rate(VariableRate{r.arg}, kParams, {0.01}).rate;
  CHECK(std::abs(r.value - direct) <= 1e-12);
}

TEST_CASE("deterministic fading optimum depends only on the product snr z", "[optimize]") {
  ChannelParams a{1.0, 1000, Deterministic{1.0}, false};
  ChannelParams b{0.25, 1000, Deterministic{4.0}, false};
  auto ra = optimize::optimal_eps(EpsStrategyKind::variable_rate, a, {0.01});
  auto rb = optimize::optimal_eps(EpsStrategyKind::variable_rate, b, {0.01});
  CHECK(ra.arg == Catch::Approx(rb.arg).margin(1e-9));
  CHECK(ra.value == Catch::Approx(rb.value).margin(1e-12));
}

TEST_CASE("golden search matches a brute-force grid argmin", "[optimize]") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int grid_points = 10000;
  const double lo = 1e-6, hi = 1.0 - 1e-6;
  const double spacing = (hi - lo) / grid_points;

  for (int trial = 0; trial < 20; ++trial) {
    ChannelParams params = kParams;
    params.snr = std::pow(10.0, -0.5 + 1.5 * u(gen));
    params.blocklength_m = 200 + std::int64_t(3800 * u(gen));
    QosSpec qos{std::pow(10.0, -3.0 + 1.7 * u(gen))};

    auto objective = [&](double eps) {
      return effective::detail::variable_rate_kernel_mean(eps, params, qos.theta, {}).value;
    };

    int best = 0;
    double best_val = 1e300;
    std::vector<double> vals(grid_points);
    for (int i = 0; i < grid_points; ++i) {
      vals[i] = objective(lo + (i + 0.5) * spacing);
      if (vals[i] < best_val) {
        best_val = vals[i];
        best = i;
      }
    }
    // uniqueness witness: at most one sign change of the first difference
    // (zero when the minimizer sits at the clipped boundary)
    int sign_changes = 0;
    int prev_sign = 0;
    for (int i = 1; i < grid_points; ++i) {
      const double d = vals[i] - vals[i - 1];
      const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : prev_sign);
      if (prev_sign != 0 && sign != prev_sign) ++sign_changes;
      prev_sign = sign;
    }
    REQUIRE(sign_changes <= 1);
    if (sign_changes == 0) REQUIRE((best == 0 || best == grid_points - 1));

    auto found = optimize::optimal_eps(EpsStrategyKind::variable_rate, params, qos);
    REQUIRE(std::abs(found.arg - (lo + (best + 0.5) * spacing)) <= spacing + 1e-5);
  }
}

TEST_CASE("optimal_fixed_rate matches a fine grid scan", "[optimize]") {
  auto result = optimize::optimal_fixed_rate(kParams, {0.0});
  double best_r = 0.0, best_val = -1.0;
  for (int i = 1; i <= 10000; ++i) {
    const double r = 6.0 * i / 10000.0;
    const double v = effective::effective_rate_zero_theta(FixedRate{r}, kParams).rate;
    if (v > best_val) {
      best_val = v;
      best_r = r;
    }
  }
  CHECK(std::abs(result.arg - best_r) <= 6.0 / 10000.0 + 1e-5);
  CHECK(result.value >= best_val - 1e-9);
}

TEST_CASE("optimal fixed rate decreases with stricter QoS", "[optimize]") {
  double prev = 1e300;
  for (double theta : {0.01, 0.05, 0.1, 0.3}) {
    auto r = optimize::optimal_fixed_rate(kParams, {theta});
    CHECK(r.arg < prev);
    prev = r.arg;
  }
}

TEST_CASE("crossover_theta basics", "[optimize]") {
  auto same = [](double) { return 1.0; };
  CHECK(!optimize::crossover_theta(same, same, 0.01, 1.0).has_value());

  auto a = [](double t) { return 1.0 - t; };
  auto b = [](double t) { return t; };
  auto cross = optimize::crossover_theta(a, b, 0.0, 1.0, 1e-6);
  REQUIRE(cross.has_value());
  CHECK(*cross == Catch::Approx(0.5).margin(1e-6));
}

TEST_CASE("sweep over eps reproduces a quasiconcave curve", "[optimize]") {
  SweepSpec spec;
  spec.axis = SweepAxis::eps;
  spec.params = kParams;
  spec.qos = {0.01};
  spec.strategy = VariableRate{0.01};
  spec.grid.resize(200);
  for (int i = 0; i < 200; ++i) spec.grid[i] = std::pow(10.0, -4.0 + 3.9 * i / 199.0);
  auto rows = optimize::sweep(spec);
  REQUIRE(rows.size() == 200);

  int maxima = 0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    REQUIRE(rows[i].error.empty());
    REQUIRE(rows[i].evaluation.has_value());
    const double prev = rows[i - 1].evaluation->rate;
    const double cur = rows[i].evaluation->rate;
    const double next = rows[i + 1].evaluation->rate;
    if (cur > prev && cur >= next) ++maxima;
  }
  CHECK(maxima == 1);
}

TEST_CASE("sweep optimizes on the theta axis and records row errors", "[optimize]") {
  SweepSpec spec;
  spec.axis = SweepAxis::theta;
  spec.params = kParams;
  spec.strategy = VariableRate{0.01};
  spec.grid = {0.001, 0.01, 0.1};
  auto rows = optimize::sweep(spec);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    REQUIRE(row.error.empty());
    REQUIRE(row.optimum.has_value());
  }
  CHECK(rows[0].optimum->value > rows[1].optimum->value);
  CHECK(rows[1].optimum->value > rows[2].optimum->value);

  // single-point grid degenerates to one row
  spec.grid = {0.01};
  CHECK(optimize::sweep(spec).size() == 1);

  // a row whose evaluation violates a domain records its error, the rest run
  SweepSpec bad = spec;
  bad.axis = SweepAxis::eps;
  bad.grid = {0.01, 1.5};
  auto bad_rows = optimize::sweep(bad);
  REQUIRE(bad_rows.size() == 2);
  CHECK(bad_rows[0].error.empty());
  CHECK(!bad_rows[1].error.empty());
}

TEST_CASE("sweep over m shows the interior blocklength maximum", "[optimize]") {
  SweepSpec spec;
  spec.axis = SweepAxis::m;
  spec.params = kParams;
  spec.qos = {0.001};
  spec.strategy = VariableRate{0.01};
  for (int i = 0; i < 12; ++i)
    spec.grid.push_back(200.0 * std::pow(100.0, i / 11.0));
  auto rows = optimize::sweep(spec);
  double best = -1.0;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].optimum.has_value());
    if (rows[i].optimum->value > best) {
      best = rows[i].optimum->value;
      best_idx = i;
    }
  }
  CHECK(best_idx > 0);
  CHECK(best_idx + 1 < rows.size());
}

TEST_CASE("sweep spec validation", "[optimize]") {
  SweepSpec spec;
  spec.params = kParams;
  spec.strategy = VariableRate{0.01};
  CHECK_THROWS_AS(optimize::sweep(spec), std::domain_error);  // empty grid
  spec.grid = {0.2, 0.1};
  CHECK_THROWS_AS(optimize::sweep(spec), std::domain_error);  // not increasing
}
