// Fading model for the power gain z = |h|^2: distribution, sampling for
// the queue simulator, and the parameter bundles shared by every formula.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>

#include "fblrate/numerics.hpp"

namespace fblrate::channel {

struct Rayleigh {
  double mean_power = 1.0;  // E{|h|^2}
};

struct Deterministic {
  double gain = 1.0;  // fixed z = |h|^2
};

using FadingModel = std::variant<Rayleigh, Deterministic>;

inline void validate(const FadingModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          if (!(m.mean_power > 0.0) || !std::isfinite(m.mean_power))
            throw std::domain_error("Rayleigh: mean_power must be positive and finite");
        } else {
          if (!(m.gain >= 0.0) || !std::isfinite(m.gain))
            throw std::domain_error("Deterministic: gain must be nonnegative and finite");
        }
      },
      model);
}

struct ChannelParams {
  double snr = 1.0;                   // linear average SNR, P/N0
  std::int64_t blocklength_m = 1000;  // channel uses per coherence block
  FadingModel fading = Rayleigh{};
  bool clamp_nonnegative = false;     // clamp per-block rates at zero

  void validate() const {
    if (!(snr > 0.0) || !std::isfinite(snr))
      throw std::domain_error("ChannelParams: snr must be positive and finite");
    if (blocklength_m < 1)
      throw std::domain_error("ChannelParams: blocklength_m must be at least 1");
    channel::validate(fading);
  }
};

struct QosSpec {
  double theta = 0.0;  // queue-tail decay rate, 1/bit; 0 means unconstrained

  void validate() const {
    if (!(theta >= 0.0) || !std::isfinite(theta))
      throw std::domain_error("QosSpec: theta must be nonnegative and finite");
  }
};

/// Counter-based generator (splitmix64 finalizer over an affine counter).
/// State is two words, jumps are free, and substreams come from rekeying,
/// so parallel replicas stay reproducible.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x8f1f75d1c2a9d3b5ULL)) {}

  static CounterRng substream(std::uint64_t seed, std::uint64_t stream) {
    CounterRng rng(seed);
    rng.key_ = mix(rng.key_ ^ mix(stream + 0x3c6ef372fe94f82bULL));
    return rng;
  }

  std::uint64_t next_u64() { return mix(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform draw strictly inside (0, 1); safe to pass to log().
  double next_unit_open() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// One i.i.d. draw of the power gain. Rayleigh fading uses the inverse-CDF
/// transform, so a Rayleigh{1} draw is a unit-mean exponential.
inline double sample_gain(const FadingModel& model, CounterRng& rng) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          return -m.mean_power * std::log(rng.next_unit_open());
        } else {
          return m.gain;
        }
      },
      model);
}

/// E{f(Z)} under the fading model. Deterministic fading evaluates f at the
/// point mass; Rayleigh{p} reduces to the unit-exponential weight through
/// the substitution z = p u.
template <class F>
double fading_expectation(const FadingModel& model, F&& f,
                          const numerics::QuadratureSpec& spec = {}) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          const double p = m.mean_power;
          return numerics::expect_over_fading([&](double u) { return f(p * u); }, spec);
        } else {
          return f(m.gain);
        }
      },
      model);
}

/// E{f(Z) 1[Z >= cutoff]}.
template <class F>
double fading_expectation_above(const FadingModel& model, double cutoff, F&& f,
                                const numerics::QuadratureSpec& spec = {}) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          const double p = m.mean_power;
          return numerics::expect_over_fading_above([&](double u) { return f(p * u); },
                                                    cutoff / p, spec);
        } else {
          return m.gain >= cutoff ? f(m.gain) : 0.0;
        }
      },
      model);
}

/// P(Z < z).
inline double gain_cdf(const FadingModel& model, double z) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          if (z <= 0.0) return 0.0;
          return -std::expm1(-z / m.mean_power);
        } else {
          return m.gain < z ? 1.0 : 0.0;
        }
      },
      model);
}

/// Smallest z with P(Z <= z) >= q, for q in [0, 1).
inline double gain_quantile(const FadingModel& model, double q) {
  if (!(q >= 0.0 && q < 1.0))
    throw std::domain_error("gain_quantile: q must lie in [0, 1)");
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          return -m.mean_power * std::log1p(-q);
        } else {
          return m.gain;
        }
      },
      model);
}

}  // namespace fblrate::channel
