// Strategy-level throughput: the kernel Psi(eps), the effective rate
// R_E(theta) for the four transmission strategies, the theta = 0
// specializations, the QoS-aware power policy with its cutoff solver, and
// the outage-capacity limit.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>

#include "fblrate/channel.hpp"
#include "fblrate/fbl.hpp"
#include "fblrate/numerics.hpp"

namespace fblrate::effective {

using channel::ChannelParams;
using channel::FadingModel;
using channel::QosSpec;
using numerics::QuadratureSpec;

struct VariableRate {
  double eps = 0.01;  // fixed block error probability; rate tracks fading
};
struct FixedRate {
  double rate_fixed = 1.0;  // bits per channel use; error probability tracks fading
};
struct PowerAdapted {
  double eps = 0.01;  // fixed error probability with the QoS-aware power policy
};
struct ParallelPair {
  double eps = 0.01;  // per-codeword error probability, two codewords per block
};

using StrategyModel = std::variant<VariableRate, FixedRate, PowerAdapted, ParallelPair>;

inline void validate(const StrategyModel& strategy) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedRate>) {
          if (!(s.rate_fixed > 0.0) || !std::isfinite(s.rate_fixed))
            throw std::domain_error("FixedRate: rate_fixed must be positive and finite");
        } else {
          if (!(s.eps > 0.0 && s.eps <= 1.0))
            throw std::domain_error("strategy: eps must lie in (0, 1]");
        }
      },
      strategy);
}

struct Diagnostics {
  int quadrature_nodes = 0;    // integrand evaluations behind the result
  int solver_iterations = 0;   // nonzero only when a cutoff solve was involved
};

struct EffectiveRateResult {
  double rate = 0.0;  // bits per channel use, clamped at zero
  StrategyModel strategy;
  double theta = 0.0;
  Diagnostics diagnostics;
};

/// QoS-aware power allocation of the ideal-service policy. beta = 0
/// collapses to classical water-filling 1/alpha - 1/z above the cutoff.
struct PowerPolicy {
  double alpha = 1.0;  // fading cutoff; no transmission below it
  double beta = 0.0;   // theta * m / ln 2
  int solver_iterations = 0;
};

/// mu*(z): zero below the cutoff, continuous at it. The max guards the
/// sign against pow rounding right at z = alpha.
inline double power_policy_mu(double z, const PowerPolicy& policy) {
  if (!(z >= policy.alpha)) return 0.0;
  const double inv_b1 = 1.0 / (policy.beta + 1.0);
  const double mu =
      1.0 / (std::pow(policy.alpha, inv_b1) * std::pow(z, policy.beta * inv_b1)) - 1.0 / z;
  return mu > 0.0 ? mu : 0.0;
}

namespace detail {

using numerics::detail::Integral;

// Dropping the gain mass below 1e-12 shifts any kernel mean by at most
// 1e-12, far below the adaptive tolerance.
inline constexpr double kLogLowerCut = 1e-12;

// Adaptive mean of f against the Rayleigh density on [z_lo, ~40 p], taken
// in t = ln z so boundary layers near the origin and threshold kinks both
// get resolved. z_lo > 0; mass below z_lo is dropped by the caller.
template <class F>
Integral rayleigh_mean_log(double mean_power, double z_lo, F&& f) {
  const double u_lo = std::max(z_lo / mean_power, kLogLowerCut);
  const double t_lo = std::log(u_lo);
  const double t_hi = std::log(numerics::detail::kExpTailCut);
  if (!(t_hi > t_lo)) return {0.0, 0};
  auto g = [&](double t) {
    const double u = std::exp(t);
    return f(mean_power * u) * std::exp(-u) * u;
  };
  const int panels = std::max(32, int(t_hi - t_lo) + 1);
  return numerics::detail::adaptive_simpson(g, t_lo, t_hi, panels,
                                              numerics::detail::kAdaptiveTol);
}

template <class F>
Integral mean_with_layer(const FadingModel& fading, F&& f) {
  return std::visit(
      [&](const auto& m) -> Integral {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, channel::Rayleigh>) {
          return rayleigh_mean_log(m.mean_power, m.mean_power * kLogLowerCut, f);
        } else {
          return {f(m.gain), 1};
        }
      },
      fading);
}

template <class F>
Integral mean_above(const FadingModel& fading, double cutoff, F&& f) {
  return std::visit(
      [&](const auto& m) -> Integral {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, channel::Rayleigh>) {
          return rayleigh_mean_log(m.mean_power, std::max(cutoff, 0.0), f);
        } else {
          if (m.gain >= cutoff) return {f(m.gain), 1};
          return {0.0, 0};
        }
      },
      fading);
}

template <class F>
Integral mean_gl(const FadingModel& fading, F&& f, const QuadratureSpec& spec) {
  const double value = channel::fading_expectation(fading, f, spec);
  const int evals =
      std::holds_alternative<channel::Deterministic>(fading) ? 1 : spec.node_count;
  return {value, evals};
}

// Strategy kernels follow the requested scheme: Gauss-Laguerre is the
// reference configuration, the adaptive scheme is the converged one.
template <class F>
Integral kernel_mean(const FadingModel& fading, F&& f, const QuadratureSpec& spec) {
  if (spec.scheme == numerics::QuadratureScheme::gauss_laguerre)
    return mean_gl(fading, f, spec);
  return mean_with_layer(fading, f);
}

inline Integral variable_rate_kernel_mean(double eps, const ChannelParams& params,
                                          double theta, const QuadratureSpec& spec) {
  const double m = double(params.blocklength_m);
  const double theta_m = theta * m;
  const double q_inv = numerics::gaussian_q_inv(eps);
  auto kernel = [&](double z) {
    const double r =
        fbl::detail::rate_single(params.snr * z, m, q_inv, params.clamp_nonnegative);
    return eps + (1.0 - eps) * std::exp(-theta_m * r);
  };
  return kernel_mean(params.fading, kernel, spec);
}

inline Integral parallel_pair_kernel_mean(double eps, const ChannelParams& params,
                                          double theta, const QuadratureSpec& spec) {
  const double m = double(params.blocklength_m);
  const double theta_m = theta * m;
  const double q_inv = numerics::gaussian_q_inv(eps);
  auto kernel = [&](double z) {
    const double r =
        fbl::detail::rate_parallel(params.snr * z, m, q_inv, params.clamp_nonnegative);
    const double base = eps + (1.0 - eps) * std::exp(-theta_m * r);
    return base * base;
  };
  return kernel_mean(params.fading, kernel, spec);
}

// Fixed-rate kernels carry a sigmoid switching near the outage gain whose
// width shrinks with 1/sqrt(m); always integrate with local refinement.
inline Integral fixed_rate_error_mean(const ChannelParams& params, double rate_fixed) {
  const double m = double(params.blocklength_m);
  auto err = [&](double z) {
    return fbl::detail::error_prob_raw(params.snr * z, m, rate_fixed);
  };
  return mean_with_layer(params.fading, err);
}

inline double clamp_rate(double rate) { return rate > 0.0 ? rate : 0.0; }

}  // namespace detail

/// Psi(eps) = E{ eps + (1-eps) e^{-theta m r(z)} }, the quantity whose
/// minimizer over eps maximizes the variable-rate effective rate. Strictly
/// convex in eps; Psi(1) = 1.
inline double psi(double eps, const ChannelParams& params, const QosSpec& qos,
                  const QuadratureSpec& spec = {}) {
  params.validate();
  qos.validate();
  spec.validate();
  if (!(qos.theta > 0.0)) throw std::domain_error("psi: theta must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::domain_error("psi: eps must lie in (0, 1]");
  if (eps == 1.0) return 1.0;
  return detail::variable_rate_kernel_mean(eps, params, qos.theta, spec).value;
}

/// Parallel-codeword counterpart Psi_p(eps) = E{(eps + (1-eps)e^{-theta m r_p})^2}.
inline double psi_parallel(double eps, const ChannelParams& params, const QosSpec& qos,
                           const QuadratureSpec& spec = {}) {
  params.validate();
  qos.validate();
  spec.validate();
  if (!(qos.theta > 0.0)) throw std::domain_error("psi_parallel: theta must be positive");
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::domain_error("psi_parallel: eps must lie in (0, 1]");
  if (eps == 1.0) return 1.0;
  return detail::parallel_pair_kernel_mean(eps, params, qos.theta, spec).value;
}

/// Solves the cutoff alpha so the long-term power constraint E{mu*} = snr
/// holds with equality (relative residual <= 1e-8). beta = theta m / ln 2.
inline PowerPolicy solve_alpha(const ChannelParams& params, const QosSpec& qos,
                               const QuadratureSpec& spec = {}) {
  params.validate();
  qos.validate();
  spec.validate();
  const double beta = qos.theta * double(params.blocklength_m) / std::numbers::ln2;

  int integrand_evals = 0;
  auto mean_mu = [&](double alpha) {
    PowerPolicy trial{alpha, beta, 0};
    auto integral = detail::mean_above(params.fading, alpha,
                                       [&](double z) { return power_policy_mu(z, trial); });
    integrand_evals += integral.evaluations;
    return integral.value;
  };

  // E{mu*} decreases in alpha: expand a bracket around the constraint.
  double lo = 1.0, hi = 1.0;
  int iterations = 0;
  while (mean_mu(lo) <= params.snr) {
    lo *= 0.5;
    if (++iterations > 2048 || lo < 1e-290)
      throw numerics::SolverError("solve_alpha: could not bracket the cutoff from below");
  }
  while (mean_mu(hi) >= params.snr) {
    hi *= 2.0;
    if (++iterations > 4096 || hi > 1e12)
      throw numerics::SolverError("solve_alpha: could not bracket the cutoff from above");
  }

  const double target = 1e-9 * params.snr;
  double alpha = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    alpha = 0.5 * (lo + hi);
    const double residual = mean_mu(alpha) - params.snr;
    ++iterations;
    if (std::abs(residual) <= target) break;
    if (residual > 0.0)
      lo = alpha;
    else
      hi = alpha;
    if (hi - lo <= 1e-16 * alpha) break;
  }
  return {alpha, beta, iterations};
}

/// Effective rate at theta = 0: the fading-averaged throughput of each
/// strategy (Cor. of the main result; no queueing constraint).
inline EffectiveRateResult effective_rate_zero_theta(const StrategyModel& strategy,
                                                     const ChannelParams& params,
                                                     const QuadratureSpec& spec = {}) {
  params.validate();
  spec.validate();
  validate(strategy);
  const double m = double(params.blocklength_m);
  EffectiveRateResult result;
  result.strategy = strategy;
  result.theta = 0.0;

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, VariableRate>) {
          if (s.eps == 1.0) return;
          const double q_inv = numerics::gaussian_q_inv(s.eps);
          const double mean_rate = channel::fading_expectation(
              params.fading,
              [&](double z) {
                return fbl::detail::rate_single(params.snr * z, m, q_inv,
                                                params.clamp_nonnegative);
              },
              spec);
          result.rate = detail::clamp_rate((1.0 - s.eps) * mean_rate);
          result.diagnostics.quadrature_nodes = spec.node_count;
        } else if constexpr (std::is_same_v<T, ParallelPair>) {
          if (s.eps == 1.0) return;
          const double q_inv = numerics::gaussian_q_inv(s.eps);
          const double mean_rate = channel::fading_expectation(
              params.fading,
              [&](double z) {
                return 2.0 * fbl::detail::rate_parallel(params.snr * z, m, q_inv,
                                                        params.clamp_nonnegative);
              },
              spec);
          result.rate = detail::clamp_rate((1.0 - s.eps) * mean_rate);
          result.diagnostics.quadrature_nodes = spec.node_count;
        } else if constexpr (std::is_same_v<T, FixedRate>) {
          auto mean_err = detail::fixed_rate_error_mean(params, s.rate_fixed);
          result.rate = detail::clamp_rate((1.0 - mean_err.value) * s.rate_fixed);
          result.diagnostics.quadrature_nodes = mean_err.evaluations;
        } else {  // PowerAdapted
          if (s.eps == 1.0) return;
          const PowerPolicy policy = solve_alpha(params, QosSpec{0.0}, spec);
          const double q_inv = numerics::gaussian_q_inv(s.eps);
          auto mean_rate = detail::mean_above(params.fading, policy.alpha, [&](double z) {
            return fbl::detail::rate_single(power_policy_mu(z, policy) * z, m, q_inv,
                                            params.clamp_nonnegative);
          });
          result.rate = detail::clamp_rate((1.0 - s.eps) * mean_rate.value);
          result.diagnostics.quadrature_nodes = mean_rate.evaluations;
          result.diagnostics.solver_iterations = policy.solver_iterations;
        }
      },
      strategy);
  return result;
}

/// Effective rate R_E(theta) = -(1/(m theta)) ln E{kernel} with the
/// strategy's own kernel; dispatches to the closed-form specializations at
/// theta = 0.
inline EffectiveRateResult effective_rate(const StrategyModel& strategy,
                                          const ChannelParams& params, const QosSpec& qos,
                                          const QuadratureSpec& spec = {}) {
  params.validate();
  qos.validate();
  spec.validate();
  validate(strategy);
  if (qos.theta == 0.0) return effective_rate_zero_theta(strategy, params, spec);

  const double m = double(params.blocklength_m);
  const double theta_m = qos.theta * m;
  EffectiveRateResult result;
  result.strategy = strategy;
  result.theta = qos.theta;

  detail::Integral mean{1.0, 0};
  int solver_iterations = 0;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, VariableRate>) {
          if (s.eps == 1.0) return;
          mean = detail::variable_rate_kernel_mean(s.eps, params, qos.theta, spec);
        } else if constexpr (std::is_same_v<T, ParallelPair>) {
          if (s.eps == 1.0) return;
          mean = detail::parallel_pair_kernel_mean(s.eps, params, qos.theta, spec);
        } else if constexpr (std::is_same_v<T, FixedRate>) {
          const double survive = std::exp(-theta_m * s.rate_fixed);
          auto mean_err = detail::fixed_rate_error_mean(params, s.rate_fixed);
          mean = {survive + (1.0 - survive) * mean_err.value, mean_err.evaluations};
        } else {  // PowerAdapted
          if (s.eps == 1.0) return;
          const PowerPolicy policy = solve_alpha(params, qos, spec);
          solver_iterations = policy.solver_iterations;
          const double q_inv = numerics::gaussian_q_inv(s.eps);
          auto kernel = [&](double z) {
            const double r = fbl::detail::rate_single(power_policy_mu(z, policy) * z, m,
                                                      q_inv, params.clamp_nonnegative);
            return s.eps + (1.0 - s.eps) * std::exp(-theta_m * r);
          };
          auto above = detail::mean_above(params.fading, policy.alpha, kernel);
          // below the cutoff nothing is sent, the kernel is identically 1
          mean = {channel::gain_cdf(params.fading, policy.alpha) + above.value,
                  above.evaluations};
        }
      },
      strategy);

  result.rate = detail::clamp_rate(-std::log(mean.value) / theta_m);
  result.diagnostics.quadrature_nodes = mean.evaluations;
  result.diagnostics.solver_iterations = solver_iterations;
  return result;
}

/// Reference model with the service rate equal to the instantaneous
/// capacity and zero decoding errors (the dashed curves of the blocklength
/// study). At theta = 0 this is the ergodic capacity.
inline double effective_rate_ideal(const ChannelParams& params, const QosSpec& qos,
                                   const QuadratureSpec& spec = {}) {
  params.validate();
  qos.validate();
  spec.validate();
  if (qos.theta == 0.0)
    return channel::fading_expectation(
        params.fading, [&](double z) { return std::log2(1.0 + params.snr * z); }, spec);
  const double theta_m = qos.theta * double(params.blocklength_m);
  const double beta = theta_m / std::numbers::ln2;
  // E{(1+snr z)^{-beta}} concentrates near z = 0 for large beta; integrate
  // with the locally refined pass unconditionally.
  auto mean = detail::mean_with_layer(params.fading, [&](double z) {
    return std::pow(1.0 + params.snr * z, -beta);
  });
  return detail::clamp_rate(-std::log(mean.value) / theta_m);
}

/// P(log2(1 + snr z) < r_f): the m -> infinity limit of the average block
/// error probability under fixed-rate transmission.
inline double outage_probability(double rate_fixed, const ChannelParams& params) {
  params.validate();
  if (!(rate_fixed > 0.0))
    throw std::domain_error("outage_probability: rate_fixed must be positive");
  const double z_out = (std::exp2(rate_fixed) - 1.0) / params.snr;
  return channel::gain_cdf(params.fading, z_out);
}

}  // namespace fblrate::effective
