// Discrete-time buffer simulation driven by the per-block service
// processes, with tail-histogram collection and estimation of the
// queue-tail decay exponent.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fblrate/effective.hpp"

namespace fblrate::queuesim {

using channel::ChannelParams;
using channel::CounterRng;
using effective::StrategyModel;
using fbl::ServiceOutcome;

struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  StrategyModel strategy;
  ChannelParams params;
  double arrival_bits_per_block = 0.0;  // constant arrival per block
  std::int64_t num_blocks = 100000;     // total across replicas
  std::int64_t warmup_blocks = 10000;   // per replica, excluded from statistics
  std::uint64_t seed = 1;
  int replicas = 1;  // parallel chains on disjoint RNG substreams

  void validate() const {
    params.validate();
    if (std::holds_alternative<effective::PowerAdapted>(strategy))
      throw std::domain_error("SimConfig: the power-adapted strategy is not simulated");
    std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, effective::FixedRate>) {
            if (!(s.rate_fixed > 0.0) || !std::isfinite(s.rate_fixed))
              throw std::domain_error("SimConfig: rate_fixed must be positive and finite");
          } else {
            if (!(s.eps >= 0.0 && s.eps <= 1.0))
              throw std::domain_error("SimConfig: eps must lie in [0, 1]");
          }
        },
        strategy);
    if (!(arrival_bits_per_block >= 0.0) || !std::isfinite(arrival_bits_per_block))
      throw std::domain_error("SimConfig: arrival must be nonnegative and finite");
    if (num_blocks < 100000)
      throw std::domain_error("SimConfig: num_blocks must be at least 1e5");
    if (replicas < 1 || replicas > 4096)
      throw std::domain_error("SimConfig: replicas must lie in [1, 4096]");
    if (warmup_blocks < 0 || warmup_blocks >= num_blocks / replicas)
      throw std::domain_error("SimConfig: warmup must be shorter than a replica's run");
  }
};

struct DecayEstimate {
  double theta_hat = 0.0;      // 1/bit
  double standard_error = 0.0;
  int points_used = 0;
};

struct QueueTrace {
  std::vector<double> q_grid;               // bits
  std::vector<std::uint64_t> tail_counts;   // blocks with Q >= q_grid[k]
  double bin_width = 0.0;
  std::uint64_t samples = 0;
  double mean_queue = 0.0;                  // bits
  double drained_fraction = 0.0;            // blocks with Q == 0
  bool unstable = false;
  std::optional<DecayEstimate> theta_hat;
  double fit_q_lo = 0.0;  // window of the automatic fit, 0 when none ran
  double fit_q_hi = 0.0;
};

/// One block of service. VariableRate delivers m r(z) with probability
/// 1 - eps and zero otherwise (ARQ: an erroneous block carries nothing);
/// FixedRate delivers m r_f with probability 1 - eps(z); ParallelPair
/// delivers 0 / m r_p / 2 m r_p with the two-codeword Bernoulli law.
/// Negative per-block rates deliver zero bits on success.
inline ServiceOutcome sample_service(const StrategyModel& strategy,
                                     const ChannelParams& params, double z,
                                     CounterRng& rng) {
  const double m = double(params.blocklength_m);
  return std::visit(
      [&](const auto& s) -> ServiceOutcome {
        using T = std::decay_t<decltype(s)>;
        const double u = rng.next_unit_open();
        if constexpr (std::is_same_v<T, effective::VariableRate>) {
          if (s.eps >= 1.0) return {0.0, false};
          if (u < s.eps) return {0.0, false};
          const double r = s.eps == 0.0
                               ? std::log2(1.0 + params.snr * z)
                               : fbl::coding_rate(z, params, s.eps).bits_per_channel_use;
          return {std::max(m * r, 0.0), true};
        } else if constexpr (std::is_same_v<T, effective::FixedRate>) {
          const double eps_z = fbl::error_prob_fixed_rate(z, params, s.rate_fixed);
          if (u < eps_z) return {0.0, false};
          return {m * s.rate_fixed, true};
        } else if constexpr (std::is_same_v<T, effective::ParallelPair>) {
          if (s.eps >= 1.0) return {0.0, false};
          const double r =
              s.eps == 0.0 ? 0.5 * std::log2(1.0 + params.snr * z)
                           : fbl::coding_rate_parallel(z, params, s.eps).bits_per_channel_use;
          const double bits = std::max(m * r, 0.0);
          const double p_both_fail = s.eps * s.eps;
          const double p_one_fails = 2.0 * s.eps * (1.0 - s.eps);
          if (u < p_both_fail) return {0.0, false};
          if (u < p_both_fail + p_one_fails) return {bits, true};
          return {2.0 * bits, true};
        } else {
          throw std::domain_error("sample_service: unsupported strategy");
        }
      },
      strategy);
}

namespace detail {

inline constexpr std::size_t kMaxBins = std::size_t(1) << 22;
inline constexpr std::uint64_t kMinTailCount = 100;

// Mean service per block (bits), with the same clamping the simulator
// applies; used by the stability precheck.
inline double mean_service_bits(const StrategyModel& strategy, const ChannelParams& params) {
  const double m = double(params.blocklength_m);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, effective::VariableRate>) {
          if (s.eps >= 1.0) return 0.0;
          const double q_inv = s.eps == 0.0 ? 0.0 : numerics::gaussian_q_inv(s.eps);
          auto mean = effective::detail::mean_with_layer(params.fading, [&](double z) {
            const double r = s.eps == 0.0
                                 ? std::log2(1.0 + params.snr * z)
                                 : fbl::detail::rate_single(params.snr * z, m, q_inv,
                                                            params.clamp_nonnegative);
            return std::max(r, 0.0);
          });
          return (1.0 - s.eps) * m * mean.value;
        } else if constexpr (std::is_same_v<T, effective::FixedRate>) {
          auto mean_err = effective::detail::fixed_rate_error_mean(params, s.rate_fixed);
          return (1.0 - mean_err.value) * m * s.rate_fixed;
        } else if constexpr (std::is_same_v<T, effective::ParallelPair>) {
          if (s.eps >= 1.0) return 0.0;
          const double q_inv = s.eps == 0.0 ? 0.0 : numerics::gaussian_q_inv(s.eps);
          auto mean = effective::detail::mean_with_layer(params.fading, [&](double z) {
            const double r = s.eps == 0.0
                                 ? 0.5 * std::log2(1.0 + params.snr * z)
                                 : fbl::detail::rate_parallel(params.snr * z, m, q_inv,
                                                              params.clamp_nonnegative);
            return std::max(r, 0.0);
          });
          return 2.0 * (1.0 - s.eps) * m * mean.value;
        } else {
          throw std::domain_error("mean_service_bits: unsupported strategy");
        }
      },
      strategy);
}

struct ReplicaStats {
  std::vector<std::uint64_t> bin_counts;
  std::uint64_t zero_count = 0;
  std::uint64_t samples = 0;
  double sum_q = 0.0;
  double sum_first_half = 0.0;
  double sum_second_half = 0.0;
  std::uint64_t n_first_half = 0;
  std::uint64_t n_second_half = 0;
};

inline ReplicaStats run_replica(const SimConfig& config, int replica,
                                std::int64_t blocks, double bin_width) {
  ReplicaStats stats;
  CounterRng rng = CounterRng::substream(config.seed, std::uint64_t(replica));
  const double arrival = config.arrival_bits_per_block;
  const std::int64_t record_from = config.warmup_blocks;
  const std::int64_t recorded = blocks - record_from;
  const std::int64_t half_mark = record_from + recorded / 2;
  double queue = 0.0;
  for (std::int64_t t = 0; t < blocks; ++t) {
    const double z = channel::sample_gain(config.params.fading, rng);
    const ServiceOutcome service =
        sample_service(config.strategy, config.params, z, rng);
    queue = std::max(queue + arrival - service.bits_delivered, 0.0);
    if (t < record_from) continue;
    ++stats.samples;
    stats.sum_q += queue;
    if (t < half_mark) {
      stats.sum_first_half += queue;
      ++stats.n_first_half;
    } else {
      stats.sum_second_half += queue;
      ++stats.n_second_half;
    }
    if (queue == 0.0) ++stats.zero_count;
    std::size_t bin = std::size_t(queue / bin_width);
    bin = std::min(bin, kMaxBins - 1);
    if (bin >= stats.bin_counts.size()) stats.bin_counts.resize(bin + 1, 0);
    ++stats.bin_counts[bin];
  }
  return stats;
}

}  // namespace detail

/// Least-squares slope of ln P(Q >= q) versus q over [q_lo, q_hi],
/// negated; only grid points backed by at least 100 tail blocks enter the
/// fit, and at least 20 such points are required.
inline DecayEstimate estimate_decay_exponent(const QueueTrace& trace, double q_lo,
                                             double q_hi) {
  if (trace.samples == 0)
    throw EstimationError("estimate_decay_exponent: empty trace");
  std::vector<double> qs, ys;
  for (std::size_t k = 0; k < trace.q_grid.size(); ++k) {
    const double q = trace.q_grid[k];
    if (q < q_lo || q > q_hi) continue;
    if (trace.tail_counts[k] < detail::kMinTailCount) continue;
    qs.push_back(q);
    ys.push_back(std::log(double(trace.tail_counts[k]) / double(trace.samples)));
  }
  const int n = int(qs.size());
  if (n < 20)
    throw EstimationError(
        "estimate_decay_exponent: fewer than 20 usable histogram points in the window; "
        "raise num_blocks or widen the window");
  double mean_q = 0.0, mean_y = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_q += qs[i];
    mean_y += ys[i];
  }
  mean_q /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (qs[i] - mean_q) * (qs[i] - mean_q);
    sxy += (qs[i] - mean_q) * (ys[i] - mean_y);
  }
  if (!(sxx > 0.0)) throw EstimationError("estimate_decay_exponent: degenerate window");
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double resid = ys[i] - mean_y - slope * (qs[i] - mean_q);
    rss += resid * resid;
  }
  const double se = std::sqrt(rss / double(n - 2) / sxx);
  return {-slope, se, n};
}

/// Lindley recursion Q_{t+1} = max(Q_t + a - R_t, 0) from Q_0 = 0,
/// histogram collected after warmup, deterministic for a given seed.
/// Replicas run on disjoint substreams and fold in index order. When the
/// run is unstable the partial trace is returned with no exponent fitted.
inline QueueTrace simulate_queue(const SimConfig& config) {
  config.validate();

  const double mean_service = detail::mean_service_bits(config.strategy, config.params);
  const bool precheck_unstable =
      config.arrival_bits_per_block > 0.0 && config.arrival_bits_per_block >= mean_service;

  const double bin_width = std::max(config.arrival_bits_per_block / 32.0, 1e-9);
  const std::int64_t per_replica = config.num_blocks / config.replicas;

  std::vector<detail::ReplicaStats> stats(std::size_t(config.replicas));
  if (config.replicas == 1) {
    stats[0] = detail::run_replica(config, 0, config.num_blocks, bin_width);
  } else {
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<detail::ReplicaStats>> futures;
    futures.reserve(std::size_t(config.replicas));
    for (int r = 0; r < config.replicas; ++r) {
      const std::int64_t blocks =
          (r + 1 == config.replicas) ? config.num_blocks - per_replica * (config.replicas - 1)
                                     : per_replica;
      auto task = [&config, r, blocks, bin_width] {
        return detail::run_replica(config, r, blocks, bin_width);
      };
      if (futures.size() >= workers) {
        // keep at most `workers` replicas in flight
        stats[futures.size() - workers] = futures[futures.size() - workers].get();
      }
      futures.push_back(std::async(std::launch::async, task));
    }
    for (std::size_t i = 0; i < futures.size(); ++i)
      if (futures[i].valid()) stats[i] = futures[i].get();
  }

  QueueTrace trace;
  trace.bin_width = bin_width;
  std::vector<std::uint64_t> bins;
  std::uint64_t zeros = 0;
  double sum_q = 0.0, sum1 = 0.0, sum2 = 0.0;
  std::uint64_t n1 = 0, n2 = 0;
  for (const auto& s : stats) {
    if (s.bin_counts.size() > bins.size()) bins.resize(s.bin_counts.size(), 0);
    for (std::size_t k = 0; k < s.bin_counts.size(); ++k) bins[k] += s.bin_counts[k];
    zeros += s.zero_count;
    trace.samples += s.samples;
    sum_q += s.sum_q;
    sum1 += s.sum_first_half;
    sum2 += s.sum_second_half;
    n1 += s.n_first_half;
    n2 += s.n_second_half;
  }
  trace.mean_queue = trace.samples ? sum_q / double(trace.samples) : 0.0;
  trace.drained_fraction = trace.samples ? double(zeros) / double(trace.samples) : 0.0;

  const double mean1 = n1 ? sum1 / double(n1) : 0.0;
  const double mean2 = n2 ? sum2 / double(n2) : 0.0;
  const bool runtime_unstable = mean2 > 2.0 * mean1 + 16.0 * bin_width;
  trace.unstable = precheck_unstable || runtime_unstable;

  trace.q_grid.resize(bins.size());
  trace.tail_counts.resize(bins.size());
  std::uint64_t suffix = 0;
  for (std::size_t k = bins.size(); k-- > 0;) {
    suffix += bins[k];
    trace.q_grid[k] = double(k) * bin_width;
    trace.tail_counts[k] = suffix;
  }

  if (!trace.unstable && !trace.q_grid.empty()) {
    // default fit window: between the 90th and 99.9th percentile, clear of
    // the reflecting boundary at zero
    auto percentile = [&](double p) {
      const auto limit = std::uint64_t(double(trace.samples) * (1.0 - p));
      for (std::size_t k = 0; k < trace.tail_counts.size(); ++k)
        if (trace.tail_counts[k] <= limit) return trace.q_grid[k];
      return trace.q_grid.back();
    };
    trace.fit_q_lo = percentile(0.90);
    trace.fit_q_hi = percentile(0.999);
    try {
      trace.theta_hat = estimate_decay_exponent(trace, trace.fit_q_lo, trace.fit_q_hi);
    } catch (const EstimationError&) {
      trace.theta_hat.reset();  // e.g. empty tail at low arrival
    }
  }
  return trace;
}

/// CSV rows (q, blocks with Q >= q, empirical P(Q >= q)).
template <class Stream>
void write_trace_csv(const QueueTrace& trace, Stream& out) {
  out << "q_bits,blocks_q_ge,prob_q_ge\n";
  char line[96];
  for (std::size_t k = 0; k < trace.q_grid.size(); ++k) {
    const double p =
        trace.samples ? double(trace.tail_counts[k]) / double(trace.samples) : 0.0;
    std::snprintf(line, sizeof line, "%.10g,%llu,%.10g\n", trace.q_grid[k],
                  static_cast<unsigned long long>(trace.tail_counts[k]), p);
    out << line;
  }
}

}  // namespace fblrate::queuesim
