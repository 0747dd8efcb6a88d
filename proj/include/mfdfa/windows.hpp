#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfdfa/series.hpp"

namespace mfdfa {

// ============================================================================
// Sliding-window (time-dependent) analysis
// ============================================================================

// Window t covers observations [t*step, t*step + window_size), t = 0..count-1,
// i.e. count = floor((N - w) / step) + 1.
struct WindowPlan {
  std::size_t window_size = 0;
  std::size_t step = 0;
  std::size_t series_length = 0;
  std::size_t count = 0;

  std::size_t begin_of(std::size_t t) const { return t * step; }
  std::size_t end_of(std::size_t t) const { return t * step + window_size; }
};

inline WindowPlan plan_windows(std::size_t series_length, std::size_t window_size,
                               std::size_t step) {
  if (window_size > series_length)
    raise(errc::window_larger_than_series,
          "window of " + std::to_string(window_size) + " exceeds series of " +
              std::to_string(series_length));
  if (step < 1 || step > window_size)
    raise(errc::invalid_config, "need 1 <= step <= window size");
  WindowPlan p;
  p.window_size = window_size;
  p.step = step;
  p.series_length = series_length;
  p.count = (series_length - window_size) / step + 1;
  return p;
}

// Complexity parameters per window. Failed windows stay as gaps (nullopt
// params / outcome recorded); window_times carry the last date in each window
// so events show up once they enter the window.
struct SpectrumTrace {
  std::string day;
  WindowPlan plan;
  std::vector<Date> window_times;
  std::vector<SpectrumOutcome> outcomes;
  std::vector<std::optional<double>> alpha0;  // apex; present unless failed
  std::vector<std::optional<ComplexityParams>> params;
  std::vector<std::optional<SingularitySpectrum>> spectra;  // only if requested
};

inline SpectrumTrace evolve_spectra(const ReturnSeries& series, const WindowPlan& plan,
                                    const AnalysisConfig& cfg, std::string day_label = "",
                                    bool store_spectra = false) {
  if (plan.series_length != series.size())
    raise(errc::invalid_config, "window plan does not match series length");
  SpectrumTrace trace;
  trace.day = std::move(day_label);
  trace.plan = plan;
  trace.window_times.reserve(plan.count);
  std::size_t failed = 0;

  for (std::size_t t = 0; t < plan.count; ++t) {
    trace.window_times.push_back(series.dates[plan.end_of(t) - 1]);
    try {
      const std::span<const double> window(series.returns.data() + plan.begin_of(t),
                                           plan.window_size);
      SeriesAnalysis an = analyze_series(window, cfg);
      trace.outcomes.push_back(an.outcome);
      trace.alpha0.push_back(an.alpha0());
      trace.params.push_back(an.params);
      trace.spectra.push_back(store_spectra ? std::optional(std::move(an.spectrum))
                                            : std::nullopt);
    } catch (const Error&) {
      ++failed;
      trace.outcomes.push_back(SpectrumOutcome::failed);
      trace.alpha0.push_back(std::nullopt);
      trace.params.push_back(std::nullopt);
      trace.spectra.push_back(std::nullopt);
    }
  }
  if (failed == plan.count && plan.count > 0)
    raise(errc::series_too_short, "every window failed to analyze");
  return trace;
}

// Pointwise baseline-minus-other differences, aligned by window index (the
// shorter trace truncates). Positive delta_alpha0 means the baseline (Monday)
// is the more persistent side. Rows where either side failed are skipped;
// delta_width additionally needs a width on both sides.
struct DifferenceTrace {
  std::string baseline_day;
  std::string other_day;
  std::vector<Date> window_times;  // from the baseline trace
  std::vector<double> delta_alpha0;
  std::vector<std::optional<double>> delta_width;
};

inline DifferenceTrace difference_trace(const SpectrumTrace& baseline,
                                        const SpectrumTrace& other) {
  if (baseline.plan.window_size != other.plan.window_size ||
      baseline.plan.step != other.plan.step)
    raise(errc::no_common_windows, "traces built from different window plans");
  const std::size_t count = std::min(baseline.plan.count, other.plan.count);
  DifferenceTrace out;
  out.baseline_day = baseline.day;
  out.other_day = other.day;
  for (std::size_t t = 0; t < count; ++t) {
    if (!baseline.alpha0[t] || !other.alpha0[t]) continue;
    out.window_times.push_back(baseline.window_times[t]);
    out.delta_alpha0.push_back(*baseline.alpha0[t] - *other.alpha0[t]);
    const bool widths = baseline.params[t] && other.params[t];
    out.delta_width.push_back(widths ? std::optional(baseline.params[t]->width -
                                                     other.params[t]->width)
                                     : std::nullopt);
  }
  if (out.window_times.empty())
    raise(errc::no_common_windows, "no aligned windows with results on both sides");
  return out;
}

}  // namespace mfdfa
