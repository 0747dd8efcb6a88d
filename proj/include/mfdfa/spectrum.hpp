#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "mfdfa/core.hpp"
#include "mfdfa/detail/polyfit.hpp"
#include "mfdfa/errors.hpp"

namespace mfdfa {

// ============================================================================
// Renyi exponents and the singularity spectrum
// ============================================================================

struct RenyiFunction {
  QGrid q_grid;
  std::vector<double> tau;
  // tau should be concave; count of interior slope increases beyond 1e-9
  int concavity_violations = 0;
};

// tau(q) = q*h(q) - 1. tau(0) = -1 exactly whenever q=0 is on the grid.
inline RenyiFunction renyi_exponents(const HurstFunction& hurst) {
  RenyiFunction out;
  out.q_grid = hurst.q_grid;
  out.tau.resize(hurst.h.size());
  for (std::size_t i = 0; i < hurst.h.size(); ++i)
    out.tau[i] = hurst.q_grid.q_values[i] * hurst.h[i] - 1.0;
  for (std::size_t i = 0; i + 2 < out.tau.size(); ++i) {
    const auto& q = out.q_grid.q_values;
    const double s0 = (out.tau[i + 1] - out.tau[i]) / (q[i + 1] - q[i]);
    const double s1 = (out.tau[i + 2] - out.tau[i + 1]) / (q[i + 2] - q[i + 1]);
    if (s1 > s0 + 1e-9) ++out.concavity_violations;
  }
  return out;
}

// Discrete (alpha, f(alpha)) points; one per interior q (the two endpoint
// q values are dropped, so only central differences are emitted).
struct SingularitySpectrum {
  std::vector<double> alpha;
  std::vector<double> f_alpha;
  std::vector<double> source_q;

  double alpha_span() const {
    if (alpha.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(alpha.begin(), alpha.end());
    return *hi - *lo;
  }
};

inline SingularitySpectrum legendre_transform(const RenyiFunction& renyi) {
  const auto& q = renyi.q_grid.q_values;
  if (q.size() < 3)
    raise(errc::grid_too_small, "Legendre transform needs at least 3 q values");
  SingularitySpectrum s;
  s.alpha.reserve(q.size() - 2);
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    const double a = (renyi.tau[i + 1] - renyi.tau[i - 1]) / (q[i + 1] - q[i - 1]);
    s.alpha.push_back(a);
    s.f_alpha.push_back(q[i] * a - renyi.tau[i]);
    s.source_q.push_back(q[i]);
  }
  return s;
}

// ============================================================================
// Quartic spectrum model and complexity parameters
// ============================================================================

// f(alpha) = c0 + c1*d + c2*d^2 + c3*d^3 + c4*d^4 with d = alpha - alpha0,
// alpha0 placed at the fitted curve's apex.
struct QuarticFit {
  std::array<double, 5> coeffs{};  // ascending powers of (alpha - alpha0)
  double alpha0 = 0.0;

  double eval(double alpha) const {
    const double d = alpha - alpha0;
    return coeffs[0] + d * (coeffs[1] + d * (coeffs[2] + d * (coeffs[3] + d * coeffs[4])));
  }
  double derivative(double alpha) const {
    const double d = alpha - alpha0;
    return coeffs[1] + d * (2 * coeffs[2] + d * (3 * coeffs[3] + d * 4 * coeffs[4]));
  }
  double second_derivative(double alpha) const {
    const double d = alpha - alpha0;
    return 2 * coeffs[2] + d * (6 * coeffs[3] + d * 12 * coeffs[4]);
  }
};

namespace detail {

// Real roots of c0 + c1 x + c2 x^2 + c3 x^3, degenerating gracefully.
inline std::vector<double> real_cubic_roots(double c0, double c1, double c2, double c3) {
  std::vector<double> roots;
  const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2), std::abs(c3)});
  if (scale == 0.0) return roots;
  if (std::abs(c3) < 1e-14 * scale) {
    if (std::abs(c2) < 1e-14 * scale) {
      if (std::abs(c1) >= 1e-14 * scale) roots.push_back(-c0 / c1);
      return roots;
    }
    const double disc = c1 * c1 - 4 * c2 * c0;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      roots.push_back((-c1 + sq) / (2 * c2));
      roots.push_back((-c1 - sq) / (2 * c2));
    }
    return roots;
  }
  // depressed cubic t^3 + p t + q, x = t - b/3
  const double b = c2 / c3, c = c1 / c3, d = c0 / c3;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double off = -b / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0) {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + sq);
    const double v = std::cbrt(-q / 2.0 - sq);
    roots.push_back(u + v + off);
  } else if (disc == 0) {
    const double u = std::cbrt(-q / 2.0);
    roots.push_back(2 * u + off);
    roots.push_back(-u + off);
  } else {
    const double r = std::sqrt(-p * p * p / 27.0);
    const double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
    const double mag = 2.0 * std::sqrt(-p / 3.0);
    for (int k = 0; k < 3; ++k)
      roots.push_back(mag * std::cos((phi + 2.0 * M_PI * k) / 3.0) + off);
  }
  return roots;
}

}  // namespace detail

// Unweighted least-squares quartic. Two-stage apex location: alpha0 is seeded
// at the discrete argmax of f, the quartic is fitted, alpha0 moves to the
// fitted curve's nearest local maximum, and the model is refitted about it.
inline QuarticFit fit_quartic(const SingularitySpectrum& spectrum) {
  const std::size_t n = spectrum.alpha.size();
  if (n < 7) raise(errc::grid_too_small, "quartic fit needs at least 7 spectrum points");
  if (spectrum.alpha_span() <= 1e-3)
    raise(errc::degenerate_spectrum,
          "alpha range " + std::to_string(spectrum.alpha_span()) +
              " below 1e-3: monofractal collapse, report W=0 instead");

  std::size_t argmax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (spectrum.f_alpha[i] > spectrum.f_alpha[argmax]) argmax = i;
  double alpha0 = spectrum.alpha[argmax];

  std::vector<double> d(n);
  std::array<double, 5> coeffs{};
  for (int stage = 0; stage < 2; ++stage) {
    for (std::size_t i = 0; i < n; ++i) d[i] = spectrum.alpha[i] - alpha0;
    const auto c = detail::polyfit(d, spectrum.f_alpha, 4);
    std::copy(c.begin(), c.end(), coeffs.begin());
    if (stage == 1) break;

    // apex = real critical point with negative curvature, nearest the seed
    const auto crit = detail::real_cubic_roots(coeffs[1], 2 * coeffs[2], 3 * coeffs[3],
                                               4 * coeffs[4]);
    std::optional<double> best;
    for (double r : crit) {
      const double curvature = 2 * coeffs[2] + 6 * coeffs[3] * r + 12 * coeffs[4] * r * r;
      if (curvature < 0.0 && (!best || std::abs(r) < std::abs(*best))) best = r;
    }
    if (!best) break;  // keep the seeded fit; no interior maximum found
    alpha0 += *best;
  }

  QuarticFit fit;
  fit.coeffs = coeffs;
  fit.alpha0 = alpha0;
  return fit;
}

// (alpha0, W, r) with the spectrum endpoints taken as the real zeros of the
// fitted quartic nearest alpha0 on each side of it.
struct ComplexityParams {
  double alpha0 = 0.0;
  double width = 0.0;      // W = alpha_max - alpha_min
  double skew = 1.0;       // r = (alpha_max - alpha0) / (alpha0 - alpha_min)
  double alpha_min = 0.0;
  double alpha_max = 0.0;
};

inline constexpr double kRootSearchSpan = 2.0;

namespace detail {

// First zero crossing of the fitted quartic walking away from alpha0;
// scan step span/4000, then bisection polished to 1e-12.
inline std::optional<double> nearest_root(const QuarticFit& fit, int direction, double span) {
  const int steps = 4000;
  double prev_x = fit.alpha0;
  double prev_f = fit.eval(prev_x);
  if (prev_f <= 0.0) return std::nullopt;  // apex at or below zero: nothing to bracket
  for (int i = 1; i <= steps; ++i) {
    const double x = fit.alpha0 + direction * span * static_cast<double>(i) / steps;
    const double f = fit.eval(x);
    if (f <= 0.0) {
      double lo = prev_x, hi = x;  // f(lo) > 0 >= f(hi)
      while (std::abs(hi - lo) > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (fit.eval(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev_x = x;
    prev_f = f;
  }
  return std::nullopt;
}

}  // namespace detail

inline ComplexityParams complexity_params(const QuarticFit& fit) {
  const auto right = detail::nearest_root(fit, +1, kRootSearchSpan);
  if (!right)
    raise(errc::no_real_root_right,
          "fitted quartic does not cross zero in (alpha0, alpha0+2]; apex f=" +
              std::to_string(fit.coeffs[0]));
  const auto left = detail::nearest_root(fit, -1, kRootSearchSpan);
  if (!left)
    raise(errc::no_real_root_left,
          "fitted quartic does not cross zero in [alpha0-2, alpha0); apex f=" +
              std::to_string(fit.coeffs[0]));

  ComplexityParams p;
  p.alpha0 = fit.alpha0;
  p.alpha_min = *left;
  p.alpha_max = *right;
  p.width = p.alpha_max - p.alpha_min;
  p.skew = (p.alpha_max - p.alpha0) / (p.alpha0 - p.alpha_min);
  return p;
}

}  // namespace mfdfa
