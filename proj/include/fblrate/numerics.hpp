// Special functions and scalar solvers shared by the whole library:
// the Gaussian Q-function and its inverse (with closed-form derivatives),
// expectations against the exp(-z) weight on [0, inf), bisection, and
// golden-section minimization.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fblrate::numerics {

/// Thrown when an iterative solver cannot make progress (bad bracket,
/// eigenvalue iteration stall, ...). Distinct from domain errors so the
/// CLI can map it to its own exit code.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double gaussian_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Upper tail of the standard normal, Q(x) = P(N(0,1) > x).
/// erfc keeps the extreme tails free of premature underflow.
inline double gaussian_q(double x) {
  if (!std::isfinite(x)) throw std::domain_error("gaussian_q: x must be finite");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

namespace detail {

// Acklam's rational approximation of the standard normal quantile,
// relative error < 1.2e-9 over (0, 1). Refined by Newton below.
inline double normal_quantile_estimate(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace detail

/// Inverse of gaussian_q on (0, 1). Rational initial guess plus Newton
/// steps driven by the exact density; round-trips through gaussian_q to
/// better than 1e-10 over [1e-9, 1 - 1e-9].
inline double gaussian_q_inv(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("gaussian_q_inv: p must lie strictly inside (0, 1)");
  // Q(x) = p  <=>  x = -Phi^{-1}(p)
  double x = -detail::normal_quantile_estimate(p);
  for (int i = 0; i < 3; ++i) {
    const double pdf = gaussian_pdf(x);
    if (!(pdf > std::numeric_limits<double>::min())) break;
    x += (gaussian_q(x) - p) / pdf;
  }
  return x;
}

struct QInvDerivatives {
  double first = 0.0;   // dQ^{-1}/dp, always negative
  double second = 0.0;  // d^2Q^{-1}/dp^2
};

/// Closed-form derivatives of the inverse Q-function:
///   d/dp  Q^{-1}(p) = -sqrt(2 pi) exp(Q^{-1}(p)^2 / 2)
///   d2/dp2 Q^{-1}(p) = 2 pi Q^{-1}(p) exp(Q^{-1}(p)^2)
inline QInvDerivatives q_inv_derivatives(double p) {
  const double x = gaussian_q_inv(p);
  QInvDerivatives out;
  out.first = -std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  out.second = 2.0 * std::numbers::pi * x * std::exp(x * x);
  return out;
}

enum class QuadratureScheme { gauss_laguerre, adaptive_trapezoid };

struct QuadratureSpec {
  // The 100-node default pins the study's reference results; the adaptive
  // scheme is the converged alternative (see README on quadrature).
  int node_count = 100;
  QuadratureScheme scheme = QuadratureScheme::gauss_laguerre;

  void validate() const {
    if (node_count < 8)
      throw std::domain_error("QuadratureSpec: node_count must be at least 8");
  }
};

struct GaussLaguerreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights for \int_0^inf f(z) e^{-z} dz via Golub-Welsch:
/// a QL sweep with implicit shifts over the Laguerre Jacobi matrix,
/// tracking only the first eigenvector component (which squares to the
/// weight, since mu_0 = 1).
inline GaussLaguerreRule make_gauss_laguerre(int n) {
  if (n < 1) throw std::domain_error("make_gauss_laguerre: need at least one node");
  std::vector<double> d(n), e(n, 0.0), z(n, 0.0);
  for (int i = 0; i < n; ++i) d[i] = 2.0 * i + 1.0;
  for (int i = 0; i + 1 < n; ++i) e[i] = double(i + 1);
  z[0] = 1.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    for (;;) {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++iter > 64) throw SolverError("make_gauss_laguerre: QL iteration failed");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      int i = m - 1;
      for (; i >= l; --i) {
        double f = s * e[i];
        const double bb = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * bb;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - bb;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (r == 0.0 && i >= l) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }

  std::vector<std::pair<double, double>> pairs(n);
  for (int i = 0; i < n; ++i) pairs[i] = {d[i], z[i] * z[i]};
  std::sort(pairs.begin(), pairs.end());
  GaussLaguerreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = pairs[i].first;
    rule.weights[i] = pairs[i].second;
  }
  return rule;
}

/// Process-wide cache of Gauss-Laguerre rules keyed by node count.
inline const GaussLaguerreRule& gauss_laguerre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLaguerreRule> cache;
  std::scoped_lock lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_laguerre(n)).first;
  return it->second;
}

namespace detail {

struct Integral {
  double value = 0.0;
  int evaluations = 0;
};

inline double checked_eval(double v) {
  if (!std::isfinite(v))
    throw std::domain_error("adaptive quadrature: integrand returned a non-finite value");
  return v;
}

// Locally refined Simpson panels: starts from a trapezoid-grid of panels
// and bisects wherever the |S2 - S1|/15 error estimate exceeds the panel's
// tolerance share. Monotone layers (outage sigmoids, policy cutoffs) leave
// a footprint on the samples, so refinement tracks them down.
template <class G>
double adaptive_simpson_step(G&& g, double a, double b, double fa, double fm, double fb,
                             double whole, double tol, int depth, int& evals) {
  const double mid = 0.5 * (a + b);
  const double lm = 0.5 * (a + mid);
  const double rm = 0.5 * (mid + b);
  const double flm = checked_eval(g(lm));
  const double frm = checked_eval(g(rm));
  evals += 2;
  const double h12 = (b - a) / 12.0;
  const double left = h12 * (fa + 4.0 * flm + fm);
  const double right = h12 * (fm + 4.0 * frm + fb);
  const double sum = left + right;
  const double noise =
      4.0 * std::numeric_limits<double>::epsilon() * (std::abs(sum) + std::abs(whole));
  if (depth <= 0 || std::abs(sum - whole) <= std::max(15.0 * tol, noise))
    return sum + (sum - whole) / 15.0;
  return adaptive_simpson_step(g, a, mid, fa, flm, fm, left, 0.5 * tol, depth - 1, evals) +
         adaptive_simpson_step(g, mid, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals);
}

template <class G>
Integral adaptive_simpson(G&& g, double a, double b, int initial_panels, double rel_tol) {
  Integral out;
  if (!(b > a)) return out;
  const int panels = std::max(initial_panels, 8);
  const double h = (b - a) / panels;
  std::vector<double> f_edge(panels + 1), f_mid(panels);
  for (int k = 0; k <= panels; ++k)
    f_edge[k] = checked_eval(g(a + k * h));
  for (int k = 0; k < panels; ++k)
    f_mid[k] = checked_eval(g(a + (k + 0.5) * h));
  out.evaluations = 2 * panels + 1;
  double coarse = 0.0;
  for (int k = 0; k < panels; ++k)
    coarse += (h / 6.0) * (f_edge[k] + 4.0 * f_mid[k] + f_edge[k + 1]);
  const double tol = rel_tol * std::max(1.0, std::abs(coarse)) / panels;
  for (int k = 0; k < panels; ++k) {
    const double x0 = a + k * h;
    const double x1 = a + (k + 1) * h;
    const double whole = (h / 6.0) * (f_edge[k] + 4.0 * f_mid[k] + f_edge[k + 1]);
    out.value += adaptive_simpson_step(g, x0, x1, f_edge[k], f_mid[k], f_edge[k + 1], whole,
                                       tol, 30, out.evaluations);
  }
  return out;
}

inline constexpr double kExpTailCut = 40.0;      // exp(-40) ~ 4e-18
inline constexpr double kAdaptiveTol = 1e-11;

}  // namespace detail

/// E{f(Z)} for Z ~ Exponential(1), i.e. \int_0^inf f(z) e^{-z} dz.
/// Gauss-Laguerre by default; the adaptive scheme integrates f(z)e^{-z}
/// over [0, 40] with local refinement.
template <class F>
double expect_over_fading(F&& f, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (spec.scheme == QuadratureScheme::gauss_laguerre) {
    const GaussLaguerreRule& rule = gauss_laguerre(spec.node_count);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = f(rule.nodes[i]);
      if (!std::isfinite(v))
        throw std::domain_error("expect_over_fading: integrand returned a non-finite value");
      acc += rule.weights[i] * v;
    }
    return acc;
  }
  auto weighted = [&](double z) { return f(z) * std::exp(-z); };
  return detail::adaptive_simpson(weighted, 0.0, detail::kExpTailCut, spec.node_count,
                                    detail::kAdaptiveTol)
      .value;
}

/// \int_lo^inf f(z) e^{-z} dz. Shifts the rule so nodes cluster just
/// above the cutoff, which is where the power-policy integrands live.
template <class F>
double expect_over_fading_above(F&& f, double lo, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(lo > 0.0)) return expect_over_fading(std::forward<F>(f), spec);
  const double scale = std::exp(-lo);
  if (scale == 0.0) return 0.0;
  auto shifted = [&](double u) { return f(lo + u); };
  if (spec.scheme == QuadratureScheme::gauss_laguerre) {
    const GaussLaguerreRule& rule = gauss_laguerre(spec.node_count);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = shifted(rule.nodes[i]);
      if (!std::isfinite(v))
        throw std::domain_error("expect_over_fading_above: integrand returned a non-finite value");
      acc += rule.weights[i] * v;
    }
    return scale * acc;
  }
  auto weighted = [&](double u) { return shifted(u) * std::exp(-u); };
  return scale * detail::adaptive_simpson(weighted, 0.0, detail::kExpTailCut,
                                            spec.node_count, detail::kAdaptiveTol)
                     .value;
}

struct RootResult {
  double root = 0.0;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Bisection on a sign change; the final bracket has width <= tol.
template <class F>
RootResult bisect_root(F&& g, double lo, double hi, double tol) {
  if (!(lo <= hi)) throw std::domain_error("bisect_root: bracket must satisfy lo <= hi");
  if (!(tol > 0.0)) throw std::domain_error("bisect_root: tol must be positive");
  double glo = g(lo);
  double ghi = g(hi);
  if (glo == 0.0) return {lo, 0, lo, lo};
  if (ghi == 0.0) return {hi, 0, hi, hi};
  if ((glo < 0.0) == (ghi < 0.0))
    throw SolverError("bisect_root: no sign change over the given bracket");
  int iterations = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;  // bracket at floating-point resolution
    const double gm = g(mid);
    ++iterations;
    if (gm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), iterations, lo, hi};
}

struct MinimizeResult {
  double argmin = 0.0;
  double min = 0.0;
  int iterations = 0;
};

/// Golden-section search for a strictly unimodal g on [lo, hi]; the
/// returned argmin is within tol of the true one. Boundary minima of
/// monotone functions converge to the matching endpoint.
template <class F>
MinimizeResult golden_minimize(F&& g, double lo, double hi, double tol) {
  if (!(lo <= hi)) throw std::domain_error("golden_minimize: need lo <= hi");
  if (!(tol > 0.0)) throw std::domain_error("golden_minimize: tol must be positive");
  if (lo == hi) return {lo, g(lo), 0};
  constexpr double invphi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = g(c);
  double fd = g(d);
  int iterations = 0;
  while (b - a > tol && iterations < 512) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = g(d);
    }
    ++iterations;
  }
  const double xm = 0.5 * (a + b);
  const double fm = g(xm);
  MinimizeResult best{xm, fm, iterations};
  if (fc < best.min) best = {c, fc, iterations};
  if (fd < best.min) best = {d, fd, iterations};
  return best;
}

}  // namespace fblrate::numerics
