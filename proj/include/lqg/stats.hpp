#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "error.hpp"

namespace lqg {

/// Welford accumulator for mean and sample variance.
class RunningStats {
 public:
  void add(double v) {
    ++n_;
    double d = v - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (v - mean_);
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double stderr_mean() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Sample covariance of two equally long series (mean estimated).
inline double sample_covariance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && a.size() > 1, ErrorCode::DimensionMismatch,
          "covariance needs two series of equal length >= 2");
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / (n - 1);
}

/// Standard error of the sample covariance, via the variance of the centered products.
inline double covariance_stderr(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  RunningStats prod;
  for (std::size_t i = 0; i < a.size(); ++i) prod.add((a[i] - ma) * (b[i] - mb));
  return prod.stderr_mean();
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
};

/// Weighted least squares y = intercept + slope * x with weights 1/sigma^2.
/// Slope error is the usual sqrt(1 / S_xx) of the weighted normal equations.
inline LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> sigma) {
  require(x.size() == y.size() && x.size() == sigma.size(), ErrorCode::DimensionMismatch,
          "fit inputs differ in length");
  require(x.size() >= 2, ErrorCode::InvalidArgument, "fit needs at least two points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(sigma[i] > 0 && std::isfinite(sigma[i]), ErrorCode::InvalidArgument,
            "fit weights must be positive and finite");
    double w = 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double w = 1.0 / (sigma[i] * sigma[i]);
    sxx += w * (x[i] - xm) * (x[i] - xm);
    sxy += w * (x[i] - xm) * (y[i] - ym);
    syy += w * (y[i] - ym) * (y[i] - ym);
  }
  require(sxx > 0, ErrorCode::InvalidArgument, "fit abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  f.slope_stderr = std::sqrt(1.0 / sxx);
  f.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

inline LineFit line_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> ones(x.size(), 1.0);
  LineFit f = weighted_line_fit(x, y, ones);
  // Unit weights: rescale the slope error by the residual variance.
  if (x.size() > 2) {
    double rss = 0, sxx = 0, xm = 0;
    for (double v : x) xm += v;
    xm /= static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
      sxx += (x[i] - xm) * (x[i] - xm);
    }
    f.slope_stderr = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  }
  return f;
}

}  // namespace lqg
