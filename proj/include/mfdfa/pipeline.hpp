#pragma once

#include <numeric>
#include <optional>
#include <span>
#include <string>

#include "mfdfa/config.hpp"
#include "mfdfa/core.hpp"
#include "mfdfa/spectrum.hpp"

namespace mfdfa {

// How the spectrum stage ended for one series.
enum class SpectrumOutcome {
  ok,             // complexity parameters extracted
  degenerate,     // monofractal collapse (alpha range < 1e-3): W=0, r=1
  no_root_left,   // fitted quartic never crosses zero left of alpha0
  no_root_right,  // ... right of alpha0
  failed,         // analysis did not reach the spectrum stage
};

inline std::string to_string(SpectrumOutcome o) {
  switch (o) {
    case SpectrumOutcome::ok:            return "ok";
    case SpectrumOutcome::degenerate:    return "degenerate";
    case SpectrumOutcome::no_root_left:  return "no-root-left";
    case SpectrumOutcome::no_root_right: return "no-root-right";
    case SpectrumOutcome::failed:        return "failed";
  }
  return "?";
}

// Full MF-DFA -> spectrum chain for one real-valued series.
struct SeriesAnalysis {
  std::size_t length = 0;
  HurstFunction hurst;
  RenyiFunction renyi;
  SingularitySpectrum spectrum;
  std::optional<QuarticFit> fit;       // absent when degenerate
  SpectrumOutcome outcome = SpectrumOutcome::failed;
  std::optional<ComplexityParams> params;  // present for ok and degenerate
  std::size_t floored_segments = 0;

  // apex abscissa; defined for every outcome short of `failed`
  double alpha0() const {
    if (fit) return fit->alpha0;
    if (params) return params->alpha0;
    raise(errc::degenerate_spectrum, "no alpha0 available");
  }
};

inline SeriesAnalysis analyze_series(std::span<const double> x, const AnalysisConfig& cfg) {
  cfg.validate();
  SeriesAnalysis out;
  out.length = x.size();

  const ScaleGrid scales = cfg.make_scales(x.size());
  const QGrid qs = cfg.make_qgrid();
  const Profile prof = integrate_profile(x);
  const FluctuationSurface surf =
      fluctuation_function(prof, scales, qs, cfg.detrend_order, cfg.dual_pass);
  out.floored_segments = surf.floored_segments;
  out.hurst = hurst_exponents(surf, cfg.full_fit_range(scales));
  out.renyi = renyi_exponents(out.hurst);
  out.spectrum = legendre_transform(out.renyi);

  try {
    out.fit = fit_quartic(out.spectrum);
  } catch (const Error& e) {
    if (e.code() != errc::degenerate_spectrum) throw;
    ComplexityParams p;
    p.alpha0 = std::accumulate(out.spectrum.alpha.begin(), out.spectrum.alpha.end(), 0.0) /
               static_cast<double>(out.spectrum.alpha.size());
    p.width = 0.0;
    p.skew = 1.0;
    p.alpha_min = p.alpha_max = p.alpha0;
    out.params = p;
    out.outcome = SpectrumOutcome::degenerate;
    return out;
  }

  try {
    out.params = complexity_params(*out.fit);
    out.outcome = SpectrumOutcome::ok;
  } catch (const Error& e) {
    if (e.code() == errc::no_real_root_left)
      out.outcome = SpectrumOutcome::no_root_left;
    else if (e.code() == errc::no_real_root_right)
      out.outcome = SpectrumOutcome::no_root_right;
    else
      throw;
  }
  return out;
}

}  // namespace mfdfa
