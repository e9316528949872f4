#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "gff.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace lqg {

inline const double sqrt2 = std::sqrt(2.0);

struct LiouvilleParams {
  double gamma = 0.0;
  std::optional<double> Q;  // 2/gamma + gamma/2
  std::optional<double> a;  // 2/gamma - gamma/2

  static LiouvilleParams make(double gamma) {
    require(gamma >= 0.0 && gamma < 2.0, ErrorCode::GammaOutOfRange, "gamma must lie in [0, 2)");
    LiouvilleParams p{gamma, std::nullopt, std::nullopt};
    if (gamma > 0.0) {
      p.Q = 2.0 / gamma + gamma / 2.0;
      p.a = 2.0 / gamma - gamma / 2.0;
    }
    return p;
  }
};

inline void check_gamma(double gamma, Warnings* warnings) {
  require(gamma >= 0.0 && gamma < 2.0, ErrorCode::GammaOutOfRange, "gamma must lie in [0, 2)");
  if (gamma >= sqrt2)
    warn(warnings, "gamma=" + std::to_string(gamma) + " >= sqrt(2): L2 diagnostics out of range");
}

/// Per-cell masses (1/n^2) eps^{gamma^2/2} exp(gamma h_eps(c)) on an n x n grid.
struct GridMeasure {
  int resolution = 0;
  double eps = 0.0;
  double gamma = 0.0;
  std::vector<double> masses;         // masses[i*n + j], i indexes x
  std::vector<unsigned char> boundary;  // 1 when the cell center is within eps of the boundary
  double total = 0.0;
  SeedRecord seed;

  double mass(int i, int j) const { return masses[static_cast<std::size_t>(i) * resolution + j]; }
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Masses from a precomputed grid of circle averages at radius eps.
inline GridMeasure measure_from_circle_averages(const Grid& h_eps, double gamma, double eps,
                                                Warnings* warnings = nullptr) {
  check_gamma(gamma, warnings);
  const int n = h_eps.n;
  GridMeasure m{n, eps, gamma, std::vector<double>(h_eps.values.size()),
                std::vector<unsigned char>(h_eps.values.size()), 0.0, {}};
  const double scale = std::pow(eps, gamma * gamma / 2.0) / (double(n) * n);
  const auto sq = DomainSpec::square();
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      m.masses[idx] = gamma == 0.0 ? 1.0 / (double(n) * n) : scale * std::exp(gamma * h_eps.values[idx]);
      m.boundary[idx] = sq.distance_to_boundary(cell_center(i, j, n)) < eps;
      total += m.masses[idx];
    }
  m.total = total;
  return m;
}

/// Reusable builder for ensembles: one Bessel weight table per (M, n).
class MeasureBuilder {
 public:
  MeasureBuilder(int M, int n) : plan_(M, (require_resolution(n), n), 1.0 / n) {}

  Grid circle_averages(const SpectralField& field) const { return plan_.apply(field); }

  GridMeasure build(const SpectralField& field, double gamma, Warnings* warnings = nullptr) const {
    GridMeasure m = measure_from_circle_averages(plan_.apply(field), gamma, plan_.radius(), warnings);
    m.seed = field.seed;
    return m;
  }

  int resolution() const { return plan_.resolution(); }
  int cutoff() const { return plan_.cutoff(); }

 private:
  static void require_resolution(int n) {
    require(is_power_of_two(n) && n >= 2, ErrorCode::InvalidArgument, "resolution must be a power of two >= 2");
  }
  CircleGridPlan plan_;
};

inline GridMeasure build_measure(const SpectralField& field, double gamma, int n, Warnings* warnings = nullptr) {
  check_gamma(gamma, warnings);
  if (!cutoff_adequate(field.cutoff, 1.0 / n))
    warn(warnings, "cutoff M=" + std::to_string(field.cutoff) + " below rule pi*M*eps >= 50");
  return MeasureBuilder(field.cutoff, n).build(field, gamma);
}

/// Sum of phi(c) * mass(c) over cells.
inline double measure_apply(const GridMeasure& m, const std::vector<double>& phi) {
  require(phi.size() == m.masses.size(), ErrorCode::DimensionMismatch, "test function grid size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    require(std::isfinite(phi[i]), ErrorCode::InvalidArgument, "test function must be finite");
    sum += phi[i] * m.masses[i];
  }
  return sum;
}

struct Box {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

/// Test function on the square; vanishes outside `support`.
struct TestFunction {
  std::function<double(Point)> f;
  Box support;

  double operator()(Point p) const { return f(p); }

  std::vector<double> on_cells(int n) const {
    std::vector<double> v(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i) * n + j] = f(cell_center(i, j, n));
    return v;
  }
};

inline TestFunction constant_one() {
  return {[](Point) { return 1.0; }, Box{}};
}

/// b(x) b(y) with b(t) = sin^2(2 pi (t - 1/4)) on [1/4, 3/4]; integral 1/16.
inline TestFunction interior_bump() {
  auto b = [](double t) {
    if (t <= 0.25 || t >= 0.75) return 0.0;
    const double s = std::sin(2.0 * std::numbers::pi * (t - 0.25));
    return s * s;
  };
  return {[b](Point p) { return b(p.x) * b(p.y); }, Box{0.25, 0.75, 0.25, 0.75}};
}

struct QuadratureEstimate {
  double value = 0.0;
  double error = 0.0;  // difference between the last two refinements
};

namespace detail {

template <int N, class F>
double gauss_integrate(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

// Distance from x to the boundary of box S along direction theta (x inside S).
inline double ray_exit(const Box& s, Point x, double c, double sn) {
  double t = std::numeric_limits<double>::infinity();
  if (c > 0) t = std::min(t, (s.x1 - x.x) / c);
  if (c < 0) t = std::min(t, (s.x0 - x.x) / c);
  if (sn > 0) t = std::min(t, (s.y1 - x.y) / sn);
  if (sn < 0) t = std::min(t, (s.y0 - x.y) / sn);
  return t;
}

// log C at interior points from the reflection sum; -inf on the boundary.
inline double log_conformal_radius_fast(Point p) {
  if (DomainSpec::square().distance_to_boundary(p) <= 0.0) return -std::numeric_limits<double>::infinity();
  return square_regular_part(p, p);
}

template <int N>
double first_moment_at(const TestFunction& phi, double g2) {
  const Box& s = phi.support;
  return gauss_integrate<N>(
      [&](double x) {
        return gauss_integrate<N>(
            [&](double y) {
              const Point p{x, y};
              const double v = phi(p);
              return v == 0.0 ? 0.0 : v * std::exp(0.5 * g2 * log_conformal_radius_fast(p));
            },
            s.y0, s.y1);
      },
      s.x0, s.x1);
}

// Inner integral over y around a fixed x in polar coordinates: angular panels split
// at the box corners, radius r = R t^q so that |x-y|^{-g2} r dr becomes a smooth
// power of t.
template <int N>
double second_moment_inner(const TestFunction& phi, double g2, Point x, double phix, double logcx) {
  const Box& s = phi.support;
  const double pi = std::numbers::pi;
  std::array<double, 4> corners{std::atan2(s.y0 - x.y, s.x0 - x.x), std::atan2(s.y0 - x.y, s.x1 - x.x),
                                std::atan2(s.y1 - x.y, s.x1 - x.x), std::atan2(s.y1 - x.y, s.x0 - x.x)};
  std::sort(corners.begin(), corners.end());
  const int q = static_cast<int>(std::ceil(6.0 / (2.0 - g2)));
  const double pw = q * (2.0 - g2) - 1.0;
  double total = 0.0;
  for (int c = 0; c < 4; ++c) {
    const double a = corners[c];
    const double b = c == 3 ? corners[0] + 2.0 * pi : corners[c + 1];
    total += gauss_integrate<N>(
        [&](double th) {
          const double co = std::cos(th), sn = std::sin(th);
          const double R = ray_exit(s, x, co, sn);
          if (!(R > 0.0)) return 0.0;
          return q * std::pow(R, 2.0 - g2) *
                 gauss_integrate<N>(
                     [&](double t) {
                       const double r = R * std::pow(t, q);
                       const Point y{x.x + r * co, x.y + r * sn};
                       const double phiy = phi(y);
                       if (phiy == 0.0) return 0.0;
                       const double e = 0.5 * g2 * (logcx + log_conformal_radius_fast(y)) +
                                        g2 * square_regular_part(x, y);
                       return std::pow(t, pw) * phix * phiy * std::exp(e);
                     },
                     0.0, 1.0);
        },
        a, b);
  }
  return total;
}

template <int N>
double second_moment_at(const TestFunction& phi, double g2) {
  const Box& s = phi.support;
  return gauss_integrate<N>(
      [&](double x1) {
        return gauss_integrate<N>(
            [&](double x2) {
              const Point x{x1, x2};
              const double phix = phi(x);
              if (phix == 0.0) return 0.0;
              return second_moment_inner<N>(phi, g2, x, phix, log_conformal_radius_fast(x));
            },
            s.y0, s.y1);
      },
      s.x0, s.x1);
}

}  // namespace detail

/// Limit of E[mu_eps(phi)]: int phi C^{gamma^2/2}.
inline QuadratureEstimate first_moment_limit(const TestFunction& phi, double gamma) {
  require(gamma >= 0.0 && gamma < 2.0, ErrorCode::GammaOutOfRange, "gamma must lie in [0, 2)");
  const double g2 = gamma * gamma;
  const double coarse = detail::first_moment_at<30>(phi, g2);
  const double fine = detail::first_moment_at<50>(phi, g2);
  return {fine, std::abs(fine - coarse)};
}

/// Limit of E[mu_eps(phi)^2]:
///   int int phi(x) phi(y) [C(x) C(y)]^{gamma^2/2} exp(gamma^2 G(x, y)) dx dy.
/// Conformal radii and the regular part of G come from the reflection sum.
inline QuadratureEstimate second_moment_limit(const TestFunction& phi, double gamma) {
  require(gamma >= 0.0 && gamma < sqrt2, ErrorCode::GammaOutOfRange,
          "second moment is finite only for gamma < sqrt(2)");
  const double g2 = gamma * gamma;
  if (g2 == 0.0) {
    const auto m = first_moment_limit(phi, 0.0);
    return {m.value * m.value, 2.0 * std::abs(m.value) * m.error};
  }
  const double coarse = detail::second_moment_at<16>(phi, g2);
  const double fine = detail::second_moment_at<24>(phi, g2);
  return {fine, std::abs(fine - coarse)};
}

struct CauchyRow {
  int k = 0;          // difference between eps = 2^-k and 2^-(k+1)
  double mean = 0.0;  // estimate of E[(mu_{2^-k}(phi) - mu_{2^-k-1}(phi))^2]
  double stderr_mean = 0.0;
};

struct CauchyReport {
  std::vector<CauchyRow> rows;
  std::vector<std::vector<double>> samples;  // samples[k - k_min][replicate]
  bool out_of_range = false;
};

struct CauchyConfig {
  double gamma = 1.0;
  int k_min = 3;
  int k_max = 7;
  int replicates = 1000;
  int cutoff = 4096;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Coupled L2 differences of mu_{2^-k}(phi) along dyadic eps, every level built from
/// the same field sample per replicate.
inline CauchyReport cauchy_diagnostic(const CauchyConfig& cfg, const TestFunction& phi,
                                      Warnings* warnings = nullptr) {
  check_gamma(cfg.gamma, warnings);
  require(cfg.k_min >= 1 && cfg.k_max >= cfg.k_min, ErrorCode::InvalidArgument, "need 1 <= k_min <= k_max");
  require(cfg.replicates >= 2, ErrorCode::InvalidArgument, "need at least two replicates");
  CauchyReport report;
  report.out_of_range = cfg.gamma >= sqrt2;
  const int levels = cfg.k_max - cfg.k_min + 2;
  std::vector<MeasureBuilder> builders;
  std::vector<std::vector<double>> phis;
  for (int l = 0; l < levels; ++l) {
    const int n = 1 << (cfg.k_min + l);
    builders.emplace_back(cfg.cutoff, n);
    phis.push_back(phi.on_cells(n));
  }
  if (!cutoff_adequate(cfg.cutoff, std::ldexp(1.0, -(cfg.k_max + 1))))
    warn(warnings, "cutoff below rule pi*M*eps >= 50 at the finest level");
  std::vector<std::vector<double>> values(cfg.replicates, std::vector<double>(levels));
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
    const auto field = sample_spectral_gff(cfg.cutoff, SeedRecord{cfg.seed, r, streams::spectral_field});
    for (int l = 0; l < levels; ++l) values[r][l] = measure_apply(builders[l].build(field, cfg.gamma), phis[l]);
  });
  for (int l = 0; l + 1 < levels; ++l) {
    RunningStats st;
    std::vector<double> s(cfg.replicates);
    for (int r = 0; r < cfg.replicates; ++r) {
      const double d = values[r][l] - values[r][l + 1];
      s[r] = d * d;
      st.add(s[r]);
    }
    report.rows.push_back({cfg.k_min + l, st.mean(), st.stderr_mean()});
    report.samples.push_back(std::move(s));
  }
  return report;
}

/// Tensor Chebyshev grid functions T_a(2x-1) T_b(2y-1) at cell centers, ordered by
/// total degree a + b; each has sup norm <= 1.
inline std::vector<std::vector<double>> chebyshev_basis(int n, int count) {
  std::vector<std::vector<double>> basis;
  for (int deg = 0; static_cast<int>(basis.size()) < count; ++deg)
    for (int a = deg; a >= 0 && static_cast<int>(basis.size()) < count; --a) {
      const int b = deg - a;
      std::vector<double> v(static_cast<std::size_t>(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Point p = cell_center(i, j, n);
          v[static_cast<std::size_t>(i) * n + j] =
              std::cos(a * std::acos(2.0 * p.x - 1.0)) * std::cos(b * std::acos(2.0 * p.y - 1.0));
        }
      basis.push_back(std::move(v));
    }
  return basis;
}

struct WeakStarDistance {
  double distance = 0.0;    // sum_{j <= J} |m1(phi_j) - m2(phi_j)| / 2^j
  double tail_bound = 0.0;  // (total1 + total2) 2^-J
};

inline WeakStarDistance weak_star_distance(const GridMeasure& m1, const GridMeasure& m2,
                                           const std::vector<std::vector<double>>& basis) {
  require(m1.resolution == m2.resolution, ErrorCode::DimensionMismatch, "measures must share a resolution");
  WeakStarDistance d;
  double w = 1.0;
  for (const auto& phi : basis) {
    w *= 0.5;
    d.distance += w * std::abs(measure_apply(m1, phi) - measure_apply(m2, phi));
  }
  d.tail_bound = (m1.total + m2.total) * w;
  return d;
}

/// Mean of G^z over the circle of radius eps about c: log 1/max(eps, |z - c|) + G~^z(c).
inline double circle_mean_green(Point z, Point c, double eps) {
  return std::log(1.0 / std::max(eps, distance(z, c))) + detail::square_regular_part(z, c);
}

/// Field h^z = h + gamma G^z, read through circle averages.
struct RootedField {
  std::shared_ptr<const SpectralField> base;
  Point root;
  double gamma = 0.0;

  double shift(Point c, double eps) const { return gamma * circle_mean_green(root, c, eps); }

  double circle_average(Point c, double eps) const { return lqg::circle_average(*base, c, eps) + shift(c, eps); }
};

inline RootedField root_shift(std::shared_ptr<const SpectralField> field, Point z, double gamma) {
  require_interior(DomainSpec::square(), z);
  require(gamma >= 0.0 && gamma < 2.0, ErrorCode::GammaOutOfRange, "gamma must lie in [0, 2)");
  return RootedField{std::move(field), z, gamma};
}

inline RootedField root_shift(const SpectralField& field, Point z, double gamma) {
  return root_shift(std::make_shared<const SpectralField>(field), z, gamma);
}

/// Cell masses of the measure built from h^z: base masses times exp(gamma^2 G^z_eps(c)).
inline GridMeasure rooted_measure(const Grid& h_eps, double eps, Point z, double gamma) {
  GridMeasure m = measure_from_circle_averages(h_eps, gamma, eps);
  if (gamma == 0.0) return m;
  const int n = h_eps.n;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      m.masses[idx] *= std::exp(gamma * gamma * circle_mean_green(z, cell_center(i, j, n), eps));
      total += m.masses[idx];
    }
  m.total = total;
  return m;
}

/// Mass of cells whose centers lie in the open ball B_r(z).
inline double ball_mass(const GridMeasure& m, Point z, double r) {
  const int n = m.resolution;
  const int i0 = std::max(0, static_cast<int>(std::floor((z.x - r) * n)));
  const int i1 = std::min(n - 1, static_cast<int>(std::floor((z.x + r) * n)));
  const int j0 = std::max(0, static_cast<int>(std::floor((z.y - r) * n)));
  const int j1 = std::min(n - 1, static_cast<int>(std::floor((z.y + r) * n)));
  double sum = 0.0;
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j)
      if (distance(cell_center(i, j, n), z) < r) sum += m.mass(i, j);
  return sum;
}

inline void check_ball(Point z, double r, int n) {
  require(r >= 2.0 / n, ErrorCode::ResolutionTooCoarse, "ball radius must span at least two cells");
  require(DomainSpec::square().distance_to_boundary(z) >= r, ErrorCode::BoundaryTooClose,
          "ball leaves the domain");
}

inline double rooted_ball_mass(const RootedField& rooted, double r, int n) {
  require(is_power_of_two(n), ErrorCode::InvalidArgument, "resolution must be a power of two");
  check_ball(rooted.root, r, n);
  const Grid h = circle_average_grid(*rooted.base, n, 1.0 / n);
  return ball_mass(rooted_measure(h, 1.0 / n, rooted.root, rooted.gamma), rooted.root, r);
}

/// Roots drawn with density proportional to C(z)^{gamma^2/2} on the cells of an n x n
/// grid inside [margin, 1 - margin]^2, uniformly within the chosen cell.
class RootDensity {
 public:
  RootDensity(int n, double gamma, double margin) : n_(n) {
    require(n >= 2, ErrorCode::InvalidArgument, "resolution must be >= 2");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Point c = cell_center(i, j, n);
        if (c.x < margin || c.x > 1.0 - margin || c.y < margin || c.y > 1.0 - margin) continue;
        const double w = std::exp(0.5 * gamma * gamma * detail::square_regular_part(c, c)) / (double(n) * n);
        cells_.push_back(i * n + j);
        cumulative_.push_back((cumulative_.empty() ? 0.0 : cumulative_.back()) + w);
      }
    require(!cells_.empty(), ErrorCode::InvalidArgument, "margin leaves no cells");
  }

  /// Sum over admissible cells of (1/n^2) C^{gamma^2/2}.
  double normalizer() const { return cumulative_.back(); }

  Point sample(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const int cell = cells_[std::min<std::size_t>(it - cumulative_.begin(), cells_.size() - 1)];
    const int i = cell / n_, j = cell % n_;
    return {(i + rng.uniform()) / n_, (j + rng.uniform()) / n_};
  }

  /// Cell index (i*n + j) of every admissible cell, and its unnormalized weight.
  const std::vector<int>& cells() const { return cells_; }
  double weight(std::size_t k) const { return cumulative_[k] - (k == 0 ? 0.0 : cumulative_[k - 1]); }

 private:
  int n_;
  std::vector<int> cells_;
  std::vector<double> cumulative_;
};

}  // namespace lqg
