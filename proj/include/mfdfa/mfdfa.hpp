#pragma once

// Multifractal detrended fluctuation analysis for day-of-the-week resolved
// financial return series: fluctuation functions, generalized Hurst
// exponents, singularity spectra and their (alpha0, W, r) complexity
// parameters, shuffle-based source testing, and sliding-window evolution.

#include "mfdfa/config.hpp"
#include "mfdfa/core.hpp"
#include "mfdfa/errors.hpp"
#include "mfdfa/pipeline.hpp"
#include "mfdfa/report.hpp"
#include "mfdfa/series.hpp"
#include "mfdfa/spectrum.hpp"
#include "mfdfa/synth.hpp"
#include "mfdfa/windows.hpp"
