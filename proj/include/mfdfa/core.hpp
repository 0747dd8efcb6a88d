#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mfdfa/detail/polyfit.hpp"
#include "mfdfa/errors.hpp"

namespace mfdfa {

// ============================================================================
// Grids and intermediate products of the fluctuation analysis
// ============================================================================

// Cumulative mean-subtracted sums of the input series. The final entry is the
// total deviation from the mean and is ~0 up to rounding.
struct Profile {
  std::vector<double> values;
  std::size_t source_length = 0;
};

inline Profile integrate_profile(std::span<const double> x) {
  if (x.size() < 4)
    raise(errc::series_too_short,
          "profile needs at least 4 points, got " + std::to_string(x.size()));
  for (double v : x)
    if (!std::isfinite(v)) raise(errc::non_finite_input, "series contains a non-finite value");

  // compensated mean, then running compensated cumsum of deviations
  double sum = 0.0, comp = 0.0;
  for (double v : x) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  const double mean = (sum + comp) / static_cast<double>(x.size());

  Profile p;
  p.source_length = x.size();
  p.values.resize(x.size());
  double run = 0.0, rcomp = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = x[k] - mean;
    const double t = run + v;
    rcomp += std::abs(run) >= std::abs(v) ? (run - t) + v : (v - t) + run;
    run = t;
    p.values[k] = run + rcomp;
  }
  return p;
}

// Strictly increasing integer box sizes, bounded by N / n_max_divisor.
struct ScaleGrid {
  std::vector<int> scales;
  int min_scale = 0;
  int max_scale = 0;

  // ~`count` scales, logarithmically spaced, deduplicated after rounding.
  static ScaleGrid logarithmic(std::size_t series_length, int n_min, int n_max_divisor,
                               int count = 30) {
    if (n_min < 2 || n_max_divisor < 1 || count < 2)
      raise(errc::invalid_config, "bad scale grid parameters");
    const long n_max = static_cast<long>(series_length) / n_max_divisor;
    if (n_max < n_min)
      raise(errc::series_too_short,
            "series of " + std::to_string(series_length) + " points too short for scales in [" +
                std::to_string(n_min) + ", N/" + std::to_string(n_max_divisor) + "]");
    ScaleGrid g;
    const double lo = std::log(static_cast<double>(n_min));
    const double hi = std::log(static_cast<double>(n_max));
    int prev = 0;
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      const int n = static_cast<int>(std::lround(std::exp(lo + f * (hi - lo))));
      if (n > prev) {
        g.scales.push_back(n);
        prev = n;
      }
    }
    g.min_scale = g.scales.front();
    g.max_scale = g.scales.back();
    return g;
  }
};

// Moment orders. q=0 is allowed; the fluctuation function switches to the
// logarithmic-average limit form there.
struct QGrid {
  std::vector<double> q_values;

  static QGrid uniform(double q_min, double q_max, double q_step) {
    if (!(q_step > 0.0) || !(q_max > q_min))
      raise(errc::invalid_config, "bad q grid parameters");
    QGrid g;
    const int steps = static_cast<int>(std::lround((q_max - q_min) / q_step));
    for (int i = 0; i <= steps; ++i) {
      double q = q_min + i * q_step;
      if (std::abs(q) < 1e-12) q = 0.0;
      g.q_values.push_back(q);
    }
    return g;
  }

  std::size_t size() const { return q_values.size(); }

  // index of q=2 if present (h(2) is the classical Hurst exponent)
  long index_of(double q) const {
    for (std::size_t i = 0; i < q_values.size(); ++i)
      if (std::abs(q_values[i] - q) < 1e-9) return static_cast<long>(i);
    return -1;
  }
};

// F_q(n) over the two grids; values[qi][si] > 0.
struct FluctuationSurface {
  ScaleGrid scale_grid;
  QGrid q_grid;
  std::vector<std::vector<double>> values;
  int detrend_order = 2;
  bool dual_pass = true;
  std::size_t floored_segments = 0;  // segments with F^2 < kVarianceFloor
};

inline constexpr double kVarianceFloor = 1e-30;

// Detrended variance of one forward segment: segment `segment_index` covers
// profile indices [v*n, (v+1)*n) and the order-m least-squares trend is
// removed before averaging the squared residuals (1/n normalization).
inline double detrended_variance(const Profile& profile, int scale, std::size_t segment_index,
                                 int detrend_order) {
  if (scale < detrend_order + 2)
    raise(errc::degenerate_fit, "scale " + std::to_string(scale) +
                                    " too small for detrend order " +
                                    std::to_string(detrend_order));
  const std::size_t n = static_cast<std::size_t>(scale);
  const std::size_t start = segment_index * n;
  if (start + n > profile.values.size())
    raise(errc::segment_out_of_range,
          "segment " + std::to_string(segment_index) + " at scale " + std::to_string(scale) +
              " exceeds profile of " + std::to_string(profile.values.size()));
  detail::PolyDetrender d(n, detrend_order);
  return d.variance(std::span<const double>(profile.values).subspan(start, n));
}

// q-order fluctuation functions. With dual_pass the profile is segmented both
// from the start and from the end (2*N_n segments), so the tail beyond the
// last full forward segment still contributes; single pass averages over the
// N_n forward segments only and discards the tail.
inline FluctuationSurface fluctuation_function(const Profile& profile,
                                               const ScaleGrid& scale_grid, const QGrid& q_grid,
                                               int detrend_order, bool dual_pass = true) {
  const std::size_t N = profile.values.size();
  if (scale_grid.scales.empty() || q_grid.q_values.empty())
    raise(errc::invalid_config, "empty grid");
  if (static_cast<std::size_t>(scale_grid.max_scale) > N)
    raise(errc::segment_out_of_range, "scale grid exceeds series length");
  if (scale_grid.min_scale < detrend_order + 2)
    raise(errc::invalid_config, "min scale must be >= detrend order + 2");

  FluctuationSurface surf;
  surf.scale_grid = scale_grid;
  surf.q_grid = q_grid;
  surf.detrend_order = detrend_order;
  surf.dual_pass = dual_pass;
  surf.values.assign(q_grid.size(), std::vector<double>(scale_grid.scales.size(), 0.0));

  std::vector<double> log_f2;
  const std::span<const double> vals(profile.values);

  for (std::size_t si = 0; si < scale_grid.scales.size(); ++si) {
    const std::size_t n = static_cast<std::size_t>(scale_grid.scales[si]);
    const std::size_t segments = N / n;
    detail::PolyDetrender detrender(n, detrend_order);

    log_f2.clear();
    log_f2.reserve(dual_pass ? 2 * segments : segments);
    for (std::size_t v = 0; v < segments; ++v) {
      double f2 = detrender.variance(vals.subspan(v * n, n));
      if (f2 < kVarianceFloor) {
        f2 = kVarianceFloor;
        ++surf.floored_segments;
      }
      log_f2.push_back(std::log(f2));
    }
    if (dual_pass) {
      for (std::size_t v = 0; v < segments; ++v) {
        double f2 = detrender.variance(vals.subspan(N - (v + 1) * n, n));
        if (f2 < kVarianceFloor) {
          f2 = kVarianceFloor;
          ++surf.floored_segments;
        }
        log_f2.push_back(std::log(f2));
      }
    }

    const double inv_count = 1.0 / static_cast<double>(log_f2.size());
    for (std::size_t qi = 0; qi < q_grid.size(); ++qi) {
      const double q = q_grid.q_values[qi];
      if (q == 0.0) {
        double s = 0.0, comp = 0.0;
        for (double lv : log_f2) {
          const double t = s + lv;
          comp += std::abs(s) >= std::abs(lv) ? (s - t) + lv : (lv - t) + s;
          s = t;
        }
        surf.values[qi][si] = std::exp(0.5 * (s + comp) * inv_count);
      } else {
        double s = 0.0, comp = 0.0;
        for (double lv : log_f2) {
          const double term = std::exp(0.5 * q * lv);
          const double t = s + term;
          comp += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
          s = t;
        }
        surf.values[qi][si] = std::exp(std::log((s + comp) * inv_count) / q);
      }
    }
  }
  return surf;
}

// ============================================================================
// Generalized Hurst exponents
// ============================================================================

// Inclusive scale bounds for the log-log regression.
struct FitRange {
  int n_lo = 0;
  int n_hi = 0;
};

struct HurstFunction {
  QGrid q_grid;
  std::vector<double> h;
  std::vector<double> fit_r2;
  FitRange fit_range;
  // h(q) should be non-increasing for well-behaved multifractal input; count
  // of grid steps violating that by more than 1e-6 (flagged, never rejected)
  int monotonicity_violations = 0;

  double h_at(double q) const {
    const long i = q_grid.index_of(q);
    if (i < 0) raise(errc::invalid_config, "q not on grid");
    return h[static_cast<std::size_t>(i)];
  }
};

inline HurstFunction hurst_exponents(const FluctuationSurface& surface, FitRange fit_range) {
  std::vector<std::size_t> idx;
  for (std::size_t si = 0; si < surface.scale_grid.scales.size(); ++si) {
    const int n = surface.scale_grid.scales[si];
    if (n >= fit_range.n_lo && n <= fit_range.n_hi) idx.push_back(si);
  }
  if (idx.size() < 5)
    raise(errc::insufficient_scales, "fit range [" + std::to_string(fit_range.n_lo) + ", " +
                                         std::to_string(fit_range.n_hi) + "] covers only " +
                                         std::to_string(idx.size()) + " scales (need 5)");

  HurstFunction out;
  out.q_grid = surface.q_grid;
  out.fit_range = fit_range;
  out.h.resize(surface.q_grid.size());
  out.fit_r2.resize(surface.q_grid.size());

  std::vector<double> lx(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    lx[i] = std::log(static_cast<double>(surface.scale_grid.scales[idx[i]]));

  const double nn = static_cast<double>(idx.size());
  for (std::size_t qi = 0; qi < surface.q_grid.size(); ++qi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double y = std::log(surface.values[qi][idx[i]]);
      sx += lx[i];
      sy += y;
      sxx += lx[i] * lx[i];
      sxy += lx[i] * y;
      syy += y * y;
    }
    const double cov = sxy - sx * sy / nn;
    const double varx = sxx - sx * sx / nn;
    const double vary = syy - sy * sy / nn;
    out.h[qi] = cov / varx;
    out.fit_r2[qi] = vary > 0.0 ? std::clamp(cov * cov / (varx * vary), 0.0, 1.0) : 1.0;
  }
  for (std::size_t qi = 0; qi + 1 < out.h.size(); ++qi)
    if (out.h[qi + 1] > out.h[qi] + 1e-6) ++out.monotonicity_violations;
  return out;
}

}  // namespace mfdfa
