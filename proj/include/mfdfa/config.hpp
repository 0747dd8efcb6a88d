#pragma once

#include <cstdint>
#include <sstream>
#include <string>

#include "mfdfa/core.hpp"
#include "mfdfa/errors.hpp"

namespace mfdfa {

enum class PriceColumn { close, adj_close };

inline std::string to_string(PriceColumn c) {
  return c == PriceColumn::close ? "Close" : "Adj Close";
}

// Every knob of the analysis; echoed verbatim into report headers so a report
// is reproducible from its own header.
struct AnalysisConfig {
  int detrend_order = 2;
  double q_min = -5.0;
  double q_max = 5.0;
  double q_step = 0.25;
  int n_min = 10;
  int n_max_divisor = 4;
  bool dual_pass = true;
  bool stride5 = false;
  std::uint64_t seed = 42;
  int repetitions = 100;
  int transposition_factor = 1000;
  std::size_t window = 730;
  std::size_t step = 5;
  PriceColumn column = PriceColumn::close;

  void validate() const {
    if (detrend_order < 1) raise(errc::invalid_config, "detrend order must be >= 1");
    if (n_min < detrend_order + 2)
      raise(errc::invalid_config, "n_min must be >= detrend_order + 2");
    if (!(q_step > 0.0) || !(q_max > q_min)) raise(errc::invalid_config, "bad q grid");
    if (n_max_divisor < 1) raise(errc::invalid_config, "n_max_divisor must be >= 1");
    if (repetitions < 1) raise(errc::invalid_config, "repetitions must be >= 1");
    if (transposition_factor < 1)
      raise(errc::invalid_config, "transposition factor must be >= 1");
    if (window < 1 || step < 1 || step > window)
      raise(errc::invalid_config, "need 1 <= step <= window");
  }

  QGrid make_qgrid() const { return QGrid::uniform(q_min, q_max, q_step); }

  ScaleGrid make_scales(std::size_t series_length) const {
    return ScaleGrid::logarithmic(series_length, n_min, n_max_divisor);
  }

  FitRange full_fit_range(const ScaleGrid& g) const { return {g.min_scale, g.max_scale}; }

  // single deterministic key=value line, kebab-case keys matching the CLI flags
  std::string echo() const {
    std::ostringstream os;
    os << "detrend-order=" << detrend_order << " q-min=" << q_min << " q-max=" << q_max
       << " q-step=" << q_step << " n-min=" << n_min << " n-max-divisor=" << n_max_divisor
       << " dual-pass=" << (dual_pass ? 1 : 0) << " stride5=" << (stride5 ? 1 : 0)
       << " seed=" << seed << " repetitions=" << repetitions
       << " transposition-factor=" << transposition_factor << " window=" << window
       << " step=" << step << " column=" << (column == PriceColumn::close ? "Close" : "AdjClose");
    return os.str();
  }
};

}  // namespace mfdfa
