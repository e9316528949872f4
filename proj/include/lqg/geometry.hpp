#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "point.hpp"

namespace lqg {

enum class DomainKind { UnitSquare, UnitDisc };

/// Supported domains: the square [0,1]^2 and the disc |z| < 1.
struct DomainSpec {
  DomainKind kind = DomainKind::UnitSquare;
  // Fraction of the domain diameter kept clear by callers; operations here
  // only demand strict interiority.
  double boundary_margin = 0.0;

  static DomainSpec square() { return {DomainKind::UnitSquare, 0.0}; }
  static DomainSpec disc() { return {DomainKind::UnitDisc, 0.0}; }

  double distance_to_boundary(Point p) const {
    if (kind == DomainKind::UnitSquare)
      return std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y});
    return 1.0 - norm(p);
  }

  bool contains(Point p) const { return distance_to_boundary(p) > 0.0; }
};

inline void require_interior(const DomainSpec& d, Point p) {
  require(std::isfinite(p.x) && std::isfinite(p.y) && d.contains(p), ErrorCode::OutOfDomain,
          "point must lie strictly inside the domain");
}

struct PointPair {
  Point x;
  Point y;
};

enum class GreenMethod {
  Series,  // sine-eigenfunction series with cutoff `series_cutoff` (square)
  Images,  // reflection sum over strip Green's functions (square)
};

struct GreenOptions {
  int series_cutoff = 2000;
  GreenMethod method = GreenMethod::Series;
};

namespace detail {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

/// Square Green's function from the double sine series
///   sum_{j,k} 8/(pi (j^2+k^2)) sin(j pi x1) sin(j pi y1) sin(k pi x2) sin(k pi y2)
/// with the sum over one index done in closed form (1D Dirichlet resolvent of
/// -d^2/dx^2 + (k pi)^2), leaving a series in the other index truncated at `cutoff`.
/// The closed-form axis is the one with the larger separation, so the kept terms
/// decay like exp(-k pi s)/k with s = max(|x1-y1|, |x2-y2|). Truncation error is at most
/// 2 exp(-(M+1) pi s) / ((M+1)(1 - exp(-pi s))).
inline double square_green_series(Point x, Point y, int cutoff) {
  double a, b, u, v;
  if (std::abs(x.x - y.x) >= std::abs(x.y - y.y)) {
    a = std::min(x.x, y.x);
    b = std::max(x.x, y.x);
    u = x.y;
    v = y.y;
  } else {
    a = std::min(x.y, y.y);
    b = std::max(x.y, y.y);
    u = x.x;
    v = y.x;
  }
  const double q1 = std::exp(-pi * (b - a));
  const double q2 = std::exp(-pi * (b + a));
  const double q3 = std::exp(-pi * (2.0 - a - b));
  const double q4 = std::exp(-pi * (2.0 - (b - a)));
  const double q5 = std::exp(-2.0 * pi);
  const cplx ru = std::polar(1.0, pi * u), rv = std::polar(1.0, pi * v);
  cplx wu = ru, wv = rv;
  double p1 = q1, p2 = q2, p3 = q3, p4 = q4, p5 = q5;
  double sum = 0.0;
  for (int k = 1; k <= cutoff; ++k) {
    const double s = 0.5 * (p1 - p2 - p3 + p4) / (1.0 - p5);
    sum += 4.0 * wu.imag() * wv.imag() * s / k;
    if (p1 < 1e-18) break;
    p1 *= q1;
    p2 *= q2;
    p3 *= q3;
    p4 *= q4;
    p5 *= q5;
    wu *= ru;
    wv *= rv;
  }
  return sum;
}

/// Green's function of the strip 0 < Re z < 1 (Dirichlet on both lines) via
/// z -> exp(i pi z) onto the upper half-plane.
inline double strip_green(cplx z, cplx w) {
  const cplx u = std::exp(cplx(0, pi) * z);
  const cplx v = std::exp(cplx(0, pi) * w);
  return std::log(std::abs((u - std::conj(v)) / (u - v)));
}

inline constexpr int image_terms = 5;

inline cplx sinc(cplx w) {
  if (std::abs(w) < 1e-4) return 1.0 - w * w / 6.0;
  return std::sin(w) / w;
}

/// G_square(x,y) + log|x-y| from the odd reflection sum of strip Green's functions
/// across the lines Im = 0 and Im = 1 (period 2). Smooth at y = x. Image terms
/// decay like exp(-pi |n|); |n| <= 5 leaves an error below 1e-12.
inline double square_regular_part(Point x, Point y) {
  const cplx z = to_complex(x);
  const cplx w = to_complex(y);
  const cplx wr(y.x, -y.y);
  double sum = 0.0;
  for (int n = -image_terms; n <= image_terms; ++n) {
    const cplx shift(0.0, 2.0 * n);
    if (n != 0) sum += strip_green(z, w + shift);
    sum -= strip_green(z, wr + shift);
  }
  // Direct term with the logarithm removed analytically:
  // log|u - v| = log|v| + log 2 - pi Im(d)/2 + log|sin(pi d / 2)|, d = z - w.
  const cplx d = z - w;
  const cplx u = std::exp(cplx(0, pi) * z);
  const cplx v = std::exp(cplx(0, pi) * w);
  sum += std::log(std::abs(u - std::conj(v))) + pi * y.y - std::log(2.0) + pi * d.imag() / 2.0 -
         std::log(pi / 2.0) - std::log(std::abs(sinc(pi * d / 2.0)));
  return sum;
}

inline double square_green_images(Point x, Point y) {
  return square_regular_part(x, y) - std::log(distance(x, y));
}

/// Neville extrapolation of samples f(t_i) to t = 0.
inline double extrapolate_to_zero(std::vector<double> t, std::vector<double> f) {
  const std::size_t n = t.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      f[i] = (t[i + m] * f[i] - t[i] * f[i + 1]) / (t[i + m] - t[i]);
  return f[0];
}

}  // namespace detail

/// G_D(x, y), normalized so that -(1/2pi) Laplacian G = delta and G ~ log 1/|x-y|.
inline double green(const DomainSpec& d, Point x, Point y, const GreenOptions& opts = {}) {
  require_interior(d, x);
  require_interior(d, y);
  require(!(x == y), ErrorCode::CoincidentPoints, "green(x, y) is singular at x = y");
  if (d.kind == DomainKind::UnitDisc) {
    const auto zx = to_complex(x), zy = to_complex(y);
    return std::log(std::abs(1.0 - std::conj(zx) * zy)) - std::log(std::abs(zx - zy));
  }
  if (opts.method == GreenMethod::Images) return detail::square_green_images(x, y);
  require(opts.series_cutoff >= 1, ErrorCode::InvalidCutoff, "series cutoff must be >= 1");
  return detail::square_green_series(x, y, opts.series_cutoff);
}

inline double green(const DomainSpec& d, const PointPair& p, const GreenOptions& opts = {}) {
  return green(d, p.x, p.y, opts);
}

/// Harmonic correction G~^x(y) = G(x,y) - log 1/|x-y|, continuous at y = x.
inline double harmonic_correction(const DomainSpec& d, Point x, Point y) {
  require_interior(d, x);
  require_interior(d, y);
  if (d.kind == DomainKind::UnitDisc)
    return std::log(std::abs(1.0 - std::conj(to_complex(x)) * to_complex(y)));
  return detail::square_regular_part(x, y);
}

struct ConformalRadiusOptions {
  GreenMethod method = GreenMethod::Series;
  int series_cutoff = 2000;
  int offsets = 6;  // geometric offsets h0 2^-i, i < offsets
};

/// C(z, D) = exp(G~^z(z)). Disc: 1 - |z|^2. Square, series method: the
/// four-point axis average of G(z, z + h e) + log h is G~^z(z) + O(h^4) for the
/// harmonic G~, so the samples are extrapolated to h = 0 in the variable h^4.
inline double conformal_radius(const DomainSpec& d, Point z, const ConformalRadiusOptions& opts = {}) {
  require_interior(d, z);
  if (d.kind == DomainKind::UnitDisc) return 1.0 - (z.x * z.x + z.y * z.y);
  if (opts.method == GreenMethod::Images) return std::exp(detail::square_regular_part(z, z));
  require(opts.offsets >= 2, ErrorCode::InvalidArgument, "need at least two offsets");
  const double h0 = std::min(1.0 / 16.0, d.distance_to_boundary(z) / 2.0);
  const GreenOptions gopts{opts.series_cutoff, GreenMethod::Series};
  const std::array<Point, 4> dirs{Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}};
  std::vector<double> t, f;
  for (int i = 0; i < opts.offsets; ++i) {
    const double h = std::ldexp(h0, -i);
    double mean = 0.0;
    for (auto e : dirs) mean += green(d, z, z + h * e, gopts) + std::log(h);
    t.push_back(std::pow(h, 4));
    f.push_back(mean / 4.0);
  }
  return std::exp(detail::extrapolate_to_zero(std::move(t), std::move(f)));
}

/// G^x_eps(y) = log 1/(eps v |x-y|) + G~^x(y). Equal to green() whenever |x-y| >= eps.
inline double green_regularized(const DomainSpec& d, Point x, Point y, double eps,
                                const GreenOptions& opts = {}) {
  require(eps > 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "eps must be positive");
  require_interior(d, x);
  require_interior(d, y);
  require(d.distance_to_boundary(x) >= eps, ErrorCode::BoundaryTooClose,
          "regularization circle leaves the domain");
  if (distance(x, y) >= eps) return green(d, x, y, opts);
  return std::log(1.0 / eps) + harmonic_correction(d, x, y);
}

/// Green's function of the sphere as a function of the angle between the points.
inline double sphere_green(double theta) {
  require(theta > 0.0 && theta < std::numbers::pi, ErrorCode::DegenerateAngle,
          "sphere Green's function needs 0 < theta < pi");
  return -std::log(std::tan(theta / 2.0));
}

}  // namespace lqg
