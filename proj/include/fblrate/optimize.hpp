// Optimal parameter searches per strategy (unique by the convexity /
// concavity results), crossover location between strategy curves, and
// parameter sweeps over theta, m, snr, eps, and the fixed rate.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fblrate/effective.hpp"

namespace fblrate::optimize {

using channel::ChannelParams;
using channel::QosSpec;
using effective::EffectiveRateResult;
using effective::StrategyModel;
using numerics::QuadratureSpec;

struct OptimizationResult {
  double arg = 0.0;    // eps* or r_f*
  double value = 0.0;  // optimal effective rate, bits per channel use
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

enum class EpsStrategyKind { variable_rate, power_adapted, parallel_pair };

namespace detail {

// eps search domain: endpoints keep Q^{-1} finite, checked explicitly below.
inline constexpr double kEpsLo = 1e-6;
inline constexpr double kEpsHi = 1.0 - 1e-6;

inline StrategyModel make_eps_strategy(EpsStrategyKind kind, double eps) {
  switch (kind) {
    case EpsStrategyKind::variable_rate: return effective::VariableRate{eps};
    case EpsStrategyKind::power_adapted: return effective::PowerAdapted{eps};
    case EpsStrategyKind::parallel_pair: return effective::ParallelPair{eps};
  }
  throw std::domain_error("optimal_eps: unknown strategy kind");
}

}  // namespace detail

/// Unique optimal error probability for the strategies parameterized by
/// eps. theta > 0 minimizes the strictly convex kernel mean; theta = 0
/// maximizes the strictly concave average throughput.
inline OptimizationResult optimal_eps(EpsStrategyKind kind, const ChannelParams& params,
                                      const QosSpec& qos, const QuadratureSpec& spec = {},
                                      double eps_tol = 1e-5) {
  params.validate();
  qos.validate();
  spec.validate();

  std::function<double(double)> objective;  // minimized
  std::optional<effective::PowerPolicy> policy;
  if (kind == EpsStrategyKind::power_adapted)
    policy = effective::solve_alpha(params, qos, spec);

  const double m = double(params.blocklength_m);
  const double theta_m = qos.theta * m;
  if (qos.theta > 0.0) {
    switch (kind) {
      case EpsStrategyKind::variable_rate:
        objective = [&](double eps) {
          return effective::detail::variable_rate_kernel_mean(eps, params, qos.theta, spec)
              .value;
        };
        break;
      case EpsStrategyKind::parallel_pair:
        objective = [&](double eps) {
          return effective::detail::parallel_pair_kernel_mean(eps, params, qos.theta, spec)
              .value;
        };
        break;
      case EpsStrategyKind::power_adapted:
        objective = [&](double eps) {
          const double q_inv = numerics::gaussian_q_inv(eps);
          auto kernel = [&](double z) {
            const double r = fbl::detail::rate_single(
                effective::power_policy_mu(z, *policy) * z, m, q_inv,
                params.clamp_nonnegative);
            return eps + (1.0 - eps) * std::exp(-theta_m * r);
          };
          return channel::gain_cdf(params.fading, policy->alpha) +
                 effective::detail::mean_above(params.fading, policy->alpha, kernel).value;
        };
        break;
    }
  } else {
    objective = [&](double eps) {
      const StrategyModel strategy = detail::make_eps_strategy(kind, eps);
      return -effective::effective_rate_zero_theta(strategy, params, spec).rate;
    };
  }

  auto found = numerics::golden_minimize(objective, detail::kEpsLo, detail::kEpsHi, eps_tol);
  double best_arg = found.argmin;
  double best_obj = found.min;
  for (double endpoint : {detail::kEpsLo, detail::kEpsHi}) {
    const double v = objective(endpoint);
    if (v < best_obj) {
      best_obj = v;
      best_arg = endpoint;
    }
  }

  const StrategyModel strategy = detail::make_eps_strategy(kind, best_arg);
  OptimizationResult result;
  result.arg = best_arg;
  result.value = effective::effective_rate(strategy, params, qos, spec).rate;
  result.iterations = found.iterations;
  result.bracket_lo = detail::kEpsLo;
  result.bracket_hi = detail::kEpsHi;
  return result;
}

/// Optimal fixed transmission rate. The objective is treated as unimodal
/// (an observation, not a theorem), so the golden-section result is always
/// cross-checked against a coarse grid and the better point wins.
inline OptimizationResult optimal_fixed_rate(const ChannelParams& params, const QosSpec& qos,
                                             const QuadratureSpec& spec = {},
                                             double rate_tol = 1e-5) {
  params.validate();
  qos.validate();
  spec.validate();

  // Above the 99.99th fading percentile the block fails almost surely and
  // the objective is negligible.
  const double z_hi = channel::gain_quantile(params.fading, 0.9999);
  const double r_hi = std::log2(1.0 + params.snr * z_hi);
  const double r_lo = 1e-6;
  if (!(r_hi > r_lo))
    throw numerics::SolverError("optimal_fixed_rate: degenerate search interval");

  auto objective = [&](double r) {
    return -effective::effective_rate(effective::FixedRate{r}, params, qos, spec).rate;
  };

  auto found = numerics::golden_minimize(objective, r_lo, r_hi, rate_tol);
  double best_arg = found.argmin;
  double best_obj = found.min;
  int iterations = found.iterations;

  constexpr int kGridPoints = 64;
  int grid_best = -1;
  for (int i = 0; i < kGridPoints; ++i) {
    const double r = r_lo + (r_hi - r_lo) * (i + 0.5) / kGridPoints;
    const double v = objective(r);
    if (v < best_obj) {
      best_obj = v;
      best_arg = r;
      grid_best = i;
    }
  }
  if (grid_best >= 0) {
    const double step = (r_hi - r_lo) / kGridPoints;
    const double lo = std::max(r_lo, best_arg - step);
    const double hi = std::min(r_hi, best_arg + step);
    auto refined = numerics::golden_minimize(objective, lo, hi, rate_tol);
    iterations += refined.iterations;
    if (refined.min < best_obj) {
      best_obj = refined.min;
      best_arg = refined.argmin;
    }
  }

  OptimizationResult result;
  result.arg = best_arg;
  result.value = effective::effective_rate(effective::FixedRate{best_arg}, params, qos, spec).rate;
  result.iterations = iterations;
  result.bracket_lo = r_lo;
  result.bracket_hi = r_hi;
  return result;
}

/// theta where curve_a - curve_b changes sign inside [lo, hi]; nullopt when
/// the endpoint values have the same sign ("no crossover in range").
inline std::optional<double> crossover_theta(const std::function<double(double)>& curve_a,
                                             const std::function<double(double)>& curve_b,
                                             double lo, double hi, double tol = 1e-4) {
  if (!(lo < hi)) throw std::domain_error("crossover_theta: need lo < hi");
  double d_lo = curve_a(lo) - curve_b(lo);
  double d_hi = curve_a(hi) - curve_b(hi);
  if (d_lo == 0.0 && d_hi == 0.0) return std::nullopt;  // coincident curves
  if (d_lo == 0.0) return lo;
  if (d_hi == 0.0) return hi;
  if ((d_lo < 0.0) == (d_hi < 0.0)) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double d_mid = curve_a(mid) - curve_b(mid);
    if (d_mid == 0.0) return mid;
    if ((d_mid < 0.0) == (d_lo < 0.0)) {
      lo = mid;
      d_lo = d_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

enum class SweepAxis { theta, m, snr, eps, rate_fixed };

struct SweepSpec {
  SweepAxis axis = SweepAxis::theta;
  std::vector<double> grid;  // strictly increasing, non-empty
  ChannelParams params;
  QosSpec qos;
  StrategyModel strategy;  // template; the axis overrides its free parameter
  QuadratureSpec quad;

  void validate() const {
    if (grid.empty()) throw std::domain_error("SweepSpec: grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw std::domain_error("SweepSpec: grid must be strictly increasing");
  }
};

struct SweepRow {
  double axis_value = 0.0;
  std::optional<OptimizationResult> optimum;       // for theta / m / snr axes
  std::optional<EffectiveRateResult> evaluation;   // for eps / rate_fixed axes
  std::string error;                               // non-empty when the row failed
};

namespace detail {

inline SweepRow sweep_row(const SweepSpec& spec, double value) {
  SweepRow row;
  row.axis_value = value;
  try {
    ChannelParams params = spec.params;
    QosSpec qos = spec.qos;
    switch (spec.axis) {
      case SweepAxis::eps: {
        StrategyModel strategy = spec.strategy;
        std::visit(
            [&](auto& s) {
              using T = std::decay_t<decltype(s)>;
              if constexpr (std::is_same_v<T, effective::FixedRate>)
                throw std::domain_error("sweep: eps axis needs an eps-parameterized strategy");
              else
                s.eps = value;
            },
            strategy);
        row.evaluation = effective::effective_rate(strategy, params, qos, spec.quad);
        return row;
      }
      case SweepAxis::rate_fixed: {
        if (!std::holds_alternative<effective::FixedRate>(spec.strategy))
          throw std::domain_error("sweep: rate_fixed axis needs the fixed-rate strategy");
        row.evaluation = effective::effective_rate(effective::FixedRate{value}, params, qos,
                                                   spec.quad);
        return row;
      }
      case SweepAxis::theta:
        qos.theta = value;
        break;
      case SweepAxis::m:
        params.blocklength_m = std::int64_t(std::llround(value));
        break;
      case SweepAxis::snr:
        params.snr = value;
        break;
    }
    if (std::holds_alternative<effective::FixedRate>(spec.strategy)) {
      row.optimum = optimal_fixed_rate(params, qos, spec.quad);
    } else if (std::holds_alternative<effective::VariableRate>(spec.strategy)) {
      row.optimum = optimal_eps(EpsStrategyKind::variable_rate, params, qos, spec.quad);
    } else if (std::holds_alternative<effective::PowerAdapted>(spec.strategy)) {
      row.optimum = optimal_eps(EpsStrategyKind::power_adapted, params, qos, spec.quad);
    } else {
      row.optimum = optimal_eps(EpsStrategyKind::parallel_pair, params, qos, spec.quad);
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace detail

/// One deterministic row per grid point. The free parameter is optimized
/// on theta / m / snr axes and evaluated directly on eps / rate_fixed
/// axes. Row failures are recorded and the sweep continues.
inline std::vector<SweepRow> sweep(const SweepSpec& spec) {
  spec.validate();
  spec.params.validate();
  spec.qos.validate();
  spec.quad.validate();
  std::vector<SweepRow> rows;
  rows.reserve(spec.grid.size());
  for (double value : spec.grid) rows.push_back(detail::sweep_row(spec, value));
  return rows;
}

}  // namespace fblrate::optimize
