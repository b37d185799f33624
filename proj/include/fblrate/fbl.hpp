// Per-coherence-block normal-approximation formulas: achievable rate at a
// target error probability, error probability at a fixed rate, and the
// power-adapted and parallel-codeword variants.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fblrate/channel.hpp"
#include "fblrate/numerics.hpp"

namespace fblrate::fbl {

using channel::ChannelParams;

struct BlockRate {
  double bits_per_channel_use = 0.0;  // may be negative unless clamped
};

struct ServiceOutcome {
  double bits_delivered = 0.0;  // per block of m channel uses
  bool success = false;
};

namespace detail {

inline void require_error_probability(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("error probability must lie strictly inside (0, 1)");
}

// Channel dispersion 1 - 1/(1+g)^2, written to keep precision for small g.
inline double dispersion(double gamma) {
  const double one_plus = 1.0 + gamma;
  return gamma * (gamma + 2.0) / (one_plus * one_plus);
}

// Single codeword of length 2m over the complex block:
//   log2(1+g) - sqrt(disp(g)/m) Q^{-1}(eps) log2(e)
inline double rate_single(double gamma, double m, double q_inv, bool clamp) {
  const double r = std::log2(1.0 + gamma) -
                   std::sqrt(dispersion(gamma) / m) * q_inv * std::numbers::log2e;
  return clamp ? std::max(r, 0.0) : r;
}

// One of two independent codewords of length m:
//   (1/2) log2(1+g) - sqrt(disp(g)/(2m)) Q^{-1}(eps) log2(e)
inline double rate_parallel(double gamma, double m, double q_inv, bool clamp) {
  const double r = 0.5 * std::log2(1.0 + gamma) -
                   std::sqrt(dispersion(gamma) / (2.0 * m)) * q_inv * std::numbers::log2e;
  return clamp ? std::max(r, 0.0) : r;
}

// error_prob_fixed_rate without the per-call parameter validation; the
// quadrature loops call this with gamma = snr * z.
inline double error_prob_raw(double gamma, double m, double rate_fixed) {
  if (gamma == 0.0) return 1.0;
  const double capacity = std::log2(1.0 + gamma);
  if (capacity == rate_fixed) return 0.5;
  const double denom = std::sqrt(dispersion(gamma) / m) * std::numbers::log2e;
  return numerics::gaussian_q((capacity - rate_fixed) / denom);
}

}  // namespace detail

/// Achievable rate (bits per channel use) in a block with power gain z and
/// block error probability eps. Zero received SNR gives rate zero for any
/// eps, since the dispersion vanishes with the log term.
inline BlockRate coding_rate(double z, const ChannelParams& params, double eps) {
  params.validate();
  detail::require_error_probability(eps);
  if (!(z >= 0.0)) throw std::domain_error("coding_rate: z must be nonnegative");
  const double q_inv = numerics::gaussian_q_inv(eps);
  return {detail::rate_single(params.snr * z, double(params.blocklength_m), q_inv,
                              params.clamp_nonnegative)};
}

/// Per-codeword rate when two independent messages share the block.
inline BlockRate coding_rate_parallel(double z, const ChannelParams& params, double eps) {
  params.validate();
  detail::require_error_probability(eps);
  if (!(z >= 0.0)) throw std::domain_error("coding_rate_parallel: z must be nonnegative");
  const double q_inv = numerics::gaussian_q_inv(eps);
  return {detail::rate_parallel(params.snr * z, double(params.blocklength_m), q_inv,
                                params.clamp_nonnegative)};
}

/// coding_rate with the average SNR replaced by the normalized power
/// allocation mu at this fading state.
inline BlockRate coding_rate_power_adapted(double z, double mu, const ChannelParams& params,
                                           double eps) {
  params.validate();
  detail::require_error_probability(eps);
  if (!(z >= 0.0))
    throw std::domain_error("coding_rate_power_adapted: z must be nonnegative");
  if (!(mu >= 0.0))
    throw std::domain_error("coding_rate_power_adapted: mu must be nonnegative");
  if (mu == 0.0) return {0.0};
  const double q_inv = numerics::gaussian_q_inv(eps);
  return {detail::rate_single(mu * z, double(params.blocklength_m), q_inv,
                              params.clamp_nonnegative)};
}

/// Block error probability when transmitting at the fixed rate r_f:
///   Q( (log2(1+g) - r_f) / (sqrt(disp(g)/m) log2 e) )
/// Total by limit continuation: at z = 0 the dispersion vanishes and the
/// numerator stays negative, so the limit is 1.
inline double error_prob_fixed_rate(double z, const ChannelParams& params,
                                    double rate_fixed) {
  params.validate();
  if (!(rate_fixed > 0.0))
    throw std::domain_error("error_prob_fixed_rate: rate_fixed must be positive");
  if (!(z >= 0.0)) throw std::domain_error("error_prob_fixed_rate: z must be nonnegative");
  return detail::error_prob_raw(params.snr * z, double(params.blocklength_m), rate_fixed);
}

}  // namespace fblrate::fbl
