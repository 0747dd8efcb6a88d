#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "mfdfa/errors.hpp"

namespace mfdfa::detail {

// Least-squares polynomial detrending of fixed-length segments.
//
// The abscissa is recentered to the segment midpoint and rescaled to [-1, 1],
// which keeps the normal equations well conditioned for low orders; the
// residuals are identical to fitting against the raw sample index. The Gram
// matrix depends only on (length, order), so its Cholesky factor is computed
// once and reused for every segment of a given scale.
class PolyDetrender {
 public:
  PolyDetrender(std::size_t length, int order)
      : n_(length), m_(order), dim_(static_cast<std::size_t>(order) + 1) {
    if (order < 0) raise(errc::invalid_config, "detrend order must be >= 0");
    if (n_ < dim_ + 1)
      raise(errc::degenerate_fit,
            "segment of " + std::to_string(n_) + " points cannot support order " +
                std::to_string(order) + " detrending");

    abscissa_.resize(n_);
    const double half = static_cast<double>(n_ - 1) / 2.0;
    for (std::size_t k = 0; k < n_; ++k)
      abscissa_[k] = (static_cast<double>(k) - half) / half;

    // Gram matrix from power sums of the shared abscissa.
    std::vector<double> moments(2 * dim_ - 1, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      double p = 1.0;
      for (std::size_t j = 0; j < moments.size(); ++j) {
        moments[j] += p;
        p *= abscissa_[k];
      }
    }
    chol_.assign(dim_ * dim_, 0.0);
    std::vector<double> gram(dim_ * dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) gram[i * dim_ + j] = moments[i + j];
    cholesky(gram);
  }

  std::size_t length() const { return n_; }

  // Mean squared residual of the order-m fit over one segment (1/n
  // normalization, not 1/(n-m-1)).
  double variance(std::span<const double> y) const {
    // rhs moments b_i = sum t^i y
    double b[kMaxDim];
    for (std::size_t i = 0; i < dim_; ++i) b[i] = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      double p = 1.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        b[i] += p * y[k];
        p *= abscissa_[k];
      }
    }
    double c[kMaxDim];
    solve(b, c);

    // explicit residual pass (avoids the cancellation in sum(y^2) - c.b)
    double ss = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      double fit = c[dim_ - 1];
      for (std::size_t i = dim_ - 1; i-- > 0;) fit = fit * abscissa_[k] + c[i];
      const double r = y[k] - fit;
      ss += r * r;
    }
    return ss / static_cast<double>(n_);
  }

  static constexpr std::size_t kMaxDim = 16;

 private:
  void cholesky(const std::vector<double>& a) {
    if (dim_ > kMaxDim) raise(errc::invalid_config, "detrend order too large");
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = a[i * dim_ + j];
        for (std::size_t k = 0; k < j; ++k)
          s -= chol_[i * dim_ + k] * chol_[j * dim_ + k];
        if (i == j) {
          if (s <= 0.0 || !std::isfinite(s))
            raise(errc::degenerate_fit, "singular normal equations at segment length " +
                                            std::to_string(n_));
          chol_[i * dim_ + i] = std::sqrt(s);
        } else {
          chol_[i * dim_ + j] = s / chol_[j * dim_ + j];
        }
      }
    }
  }

  void solve(const double* b, double* x) const {
    double z[kMaxDim];
    for (std::size_t i = 0; i < dim_; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= chol_[i * dim_ + k] * z[k];
      z[i] = s / chol_[i * dim_ + i];
    }
    for (std::size_t i = dim_; i-- > 0;) {
      double s = z[i];
      for (std::size_t k = i + 1; k < dim_; ++k) s -= chol_[k * dim_ + i] * x[k];
      x[i] = s / chol_[i * dim_ + i];
    }
  }

  std::size_t n_;
  int m_;
  std::size_t dim_;
  std::vector<double> abscissa_;
  std::vector<double> chol_;  // lower triangle, row-major
};

// Generic unweighted polynomial least squares on caller-supplied abscissa,
// used by the quartic spectrum fit. Degree+1 coefficients, ascending powers.
inline std::vector<double> polyfit(std::span<const double> x, std::span<const double> y,
                                   int degree) {
  const std::size_t dim = static_cast<std::size_t>(degree) + 1;
  if (x.size() != y.size() || x.size() < dim)
    raise(errc::grid_too_small, "not enough points for polynomial fit");

  // scale abscissa for conditioning; unscale coefficients afterwards
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;

  std::vector<double> moments(2 * dim - 1, 0.0), rhs(dim, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double t = x[k] / scale;
    double p = 1.0;
    for (std::size_t j = 0; j < moments.size(); ++j) {
      moments[j] += p;
      if (j < dim) rhs[j] += p * y[k];
      p *= t;
    }
  }
  std::vector<double> a(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) a[i * dim + j] = moments[i + j];

  // Gaussian elimination with partial pivoting; dim <= 5 in practice.
  std::vector<double> c = rhs;
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < dim; ++r)
      if (std::abs(a[r * dim + col]) > std::abs(a[piv * dim + col])) piv = r;
    if (std::abs(a[piv * dim + col]) < 1e-300)
      raise(errc::degenerate_fit, "singular polynomial fit");
    if (piv != col) {
      for (std::size_t j = 0; j < dim; ++j) std::swap(a[piv * dim + j], a[col * dim + j]);
      std::swap(c[piv], c[col]);
    }
    for (std::size_t r = col + 1; r < dim; ++r) {
      const double f = a[r * dim + col] / a[col * dim + col];
      for (std::size_t j = col; j < dim; ++j) a[r * dim + j] -= f * a[col * dim + j];
      c[r] -= f * c[col];
    }
  }
  for (std::size_t i = dim; i-- > 0;) {
    double s = c[i];
    for (std::size_t j = i + 1; j < dim; ++j) s -= a[i * dim + j] * c[j];
    c[i] = s / a[i * dim + i];
  }
  double p = 1.0;
  for (std::size_t i = 0; i < dim; ++i) {
    c[i] /= p;
    p *= scale;
  }
  return c;
}

}  // namespace mfdfa::detail
