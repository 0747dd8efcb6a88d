#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "mfdfa/detail/rng.hpp"
#include "mfdfa/errors.hpp"

namespace mfdfa {

// ============================================================================
// Synthetic series with known multifractal properties (pipeline oracles)
// ============================================================================

// Binomial multiplicative cascade: k halving levels, each interval's mass
// split a : (1-a) with the orientation of every split drawn from `seed`.
// Closed form h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2).
struct CascadeSpec {
  double multiplier = 0.6;  // a in [0.5, 1)
  int levels = 13;          // series length 2^levels
  std::uint64_t seed = 0;
};

inline std::vector<double> gen_binomial_cascade(const CascadeSpec& spec) {
  if (!(spec.multiplier >= 0.5) || !(spec.multiplier < 1.0))
    raise(errc::invalid_config, "cascade multiplier must lie in [0.5, 1)");
  if (spec.levels < 1 || spec.levels > 26)
    raise(errc::invalid_config, "cascade levels must lie in [1, 26]");

  detail::Rng rng(spec.seed);
  std::vector<double> mass{1.0};
  std::vector<double> next;
  for (int level = 0; level < spec.levels; ++level) {
    next.resize(mass.size() * 2);
    for (std::size_t i = 0; i < mass.size(); ++i) {
      const double left = rng.coin() ? spec.multiplier : 1.0 - spec.multiplier;
      next[2 * i] = mass[i] * left;
      next[2 * i + 1] = mass[i] * (1.0 - left);
    }
    mass.swap(next);
  }
  return mass;
}

// Gaussian noise: iid standard normal for hurst=0.5, otherwise exact
// fractional Gaussian noise via circulant embedding (Davies-Harte). The
// output is standardized to sample mean 0 and variance 1.
struct NoiseSpec {
  std::size_t length = 8192;  // >= 256
  double hurst = 0.5;         // in (0, 1)
  std::uint64_t seed = 0;
};

namespace detail {

// in-place complex DFT, forward sign convention e^{-2 pi i jk / M}
inline void fft_forward(std::vector<std::complex<double>>& data) {
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(data.size()),
                                    reinterpret_cast<fftw_complex*>(data.data()),
                                    reinterpret_cast<fftw_complex*>(data.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

inline void standardize(std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  const double inv_sd = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
  for (double& v : x) v = (v - mean) * inv_sd;
}

}  // namespace detail

inline std::vector<double> gen_gaussian_noise(const NoiseSpec& spec) {
  if (spec.length < 256) raise(errc::invalid_config, "noise length must be >= 256");
  if (!(spec.hurst > 0.0) || !(spec.hurst < 1.0))
    raise(errc::invalid_config, "hurst must lie in (0, 1)");

  detail::Rng rng(spec.seed);
  std::vector<double> x(spec.length);

  if (spec.hurst == 0.5) {
    for (double& v : x) v = rng.gaussian();
    detail::standardize(x);
    return x;
  }

  // circulant embedding of the fGn autocovariance
  // gamma(k) = 0.5 (|k+1|^2H - 2|k|^2H + |k-1|^2H)
  std::size_t m = 1;
  while (m < 2 * spec.length) m *= 2;
  const double two_h = 2.0 * spec.hurst;
  std::vector<std::complex<double>> buf(m);
  for (std::size_t j = 0; j <= m / 2; ++j) {
    const double jd = static_cast<double>(j);
    const double g = 0.5 * (std::pow(jd + 1.0, two_h) - 2.0 * std::pow(jd, two_h) +
                            std::pow(std::abs(jd - 1.0), two_h));
    buf[j] = g;
    if (j > 0 && j < m / 2) buf[m - j] = g;
  }
  detail::fft_forward(buf);

  std::vector<double> lambda(m);
  double max_eig = 0.0, min_eig = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    lambda[k] = buf[k].real();
    max_eig = std::max(max_eig, lambda[k]);
    min_eig = std::min(min_eig, lambda[k]);
  }
  if (min_eig < -1e-8 * max_eig)
    raise(errc::synthesis_failure, "circulant embedding not positive semidefinite (min eig " +
                                       std::to_string(min_eig) + ")");
  for (double& l : lambda) l = std::max(l, 0.0);

  // conjugate-symmetric Gaussian spectrum -> one forward FFT -> real fGn
  const double md = static_cast<double>(m);
  buf[0] = std::sqrt(lambda[0] / md) * rng.gaussian();
  buf[m / 2] = std::sqrt(lambda[m / 2] / md) * rng.gaussian();
  for (std::size_t k = 1; k < m / 2; ++k) {
    const double scale = std::sqrt(lambda[k] / (2.0 * md));
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    buf[k] = {scale * re, scale * im};
    buf[m - k] = std::conj(buf[k]);
  }
  detail::fft_forward(buf);

  for (std::size_t i = 0; i < spec.length; ++i) x[i] = buf[i].real();
  detail::standardize(x);
  return x;
}

}  // namespace mfdfa
