#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfdfa {

enum class errc {
  series_too_short,
  non_finite_input,
  segment_out_of_range,
  degenerate_fit,
  zero_variance_segment,
  insufficient_scales,
  grid_too_small,
  degenerate_spectrum,
  no_real_root_left,
  no_real_root_right,
  malformed_header,
  unparsable_date,
  non_positive_close,
  duplicate_date,
  window_larger_than_series,
  no_common_windows,
  synthesis_failure,
  invalid_config,
};

inline std::string_view to_string(errc c) {
  switch (c) {
    case errc::series_too_short:         return "SeriesTooShort";
    case errc::non_finite_input:         return "NonFiniteInput";
    case errc::segment_out_of_range:     return "SegmentOutOfRange";
    case errc::degenerate_fit:           return "DegenerateFit";
    case errc::zero_variance_segment:    return "ZeroVarianceSegment";
    case errc::insufficient_scales:      return "InsufficientScales";
    case errc::grid_too_small:           return "GridTooSmall";
    case errc::degenerate_spectrum:      return "DegenerateSpectrum";
    case errc::no_real_root_left:        return "NoRealRootLeft";
    case errc::no_real_root_right:       return "NoRealRootRight";
    case errc::malformed_header:         return "MalformedHeader";
    case errc::unparsable_date:          return "UnparsableDate";
    case errc::non_positive_close:       return "NonPositiveClose";
    case errc::duplicate_date:           return "DuplicateDate";
    case errc::window_larger_than_series: return "WindowLargerThanSeries";
    case errc::no_common_windows:        return "NoCommonWindows";
    case errc::synthesis_failure:        return "SynthesisFailure";
    case errc::invalid_config:           return "InvalidConfig";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mfdfa
