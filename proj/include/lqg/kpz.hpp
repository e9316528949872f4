#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "gff.hpp"
#include "liouville.hpp"
#include "parallel.hpp"
#include "point.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace lqg {

namespace presets {
inline const double pure_gravity = std::sqrt(8.0 / 3.0);
inline const double ising = std::sqrt(3.0);
}  // namespace presets

inline void require_gamma_kpz(double gamma) {
  require(gamma >= 0.0 && gamma < 2.0, ErrorCode::GammaOutOfRange, "gamma must lie in [0, 2)");
}

/// x = (gamma^2/4) Delta^2 + (1 - gamma^2/4) Delta, evaluated as Delta + (gamma^2/4) Delta (Delta - 1)
/// so the fixed points Delta = 0, 1 come out exact.
inline double kpz_formula(double gamma, double delta) {
  require_gamma_kpz(gamma);
  require(delta >= 0.0, ErrorCode::InvalidArgument, "Delta must be nonnegative");
  return delta + gamma * gamma / 4.0 * delta * (delta - 1.0);
}

/// Nonnegative root of the KPZ quadratic, in a form free of cancellation at small gamma.
inline double kpz_inverse(double gamma, double x) {
  require_gamma_kpz(gamma);
  require(x >= 0.0, ErrorCode::InvalidArgument, "x must be nonnegative");
  const double b = 1.0 - gamma * gamma / 4.0;
  return 2.0 * x / (b + std::sqrt(b * b + gamma * gamma * x));
}

/// Nonnegative root of 2x = beta a + beta^2/2 with a = 2/gamma - gamma/2.
inline double beta_of_x(double gamma, double x) {
  require(gamma > 0.0 && gamma < 2.0, ErrorCode::GammaOutOfRange, "gamma must lie in (0, 2)");
  require(x >= 0.0, ErrorCode::InvalidArgument, "x must be nonnegative");
  const double a = 2.0 / gamma - gamma / 2.0;
  return 4.0 * x / (a + std::sqrt(a * a + 4.0 * x));
}

/// Number of rooted planar quadrangulations with n faces: 2 3^n C(2n, n) / ((n+1)(n+2)).
inline boost::multiprecision::cpp_int count_quadrangulations(int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  using boost::multiprecision::cpp_int;
  cpp_int binom = 1;
  for (int i = 1; i <= n; ++i) binom = binom * (n + i) / i;
  cpp_int pow3 = boost::multiprecision::pow(cpp_int(3), static_cast<unsigned>(n));
  return 2 * pow3 * binom / ((n + 1) * (n + 2));
}

enum class SetKind { Segment, Point, BoxFractal, FullSquare };

/// Deterministic test set K in the unit square with an exact distance function.
struct FractalSet {
  SetKind kind = SetKind::FullSquare;
  lqg::Point a;  // segment start or point location
  lqg::Point b;  // segment end
  int side = 3;                 // box fractal: subdivision factor
  std::vector<bool> keep;       // box fractal: side*side mask, keep[i*side + j], i indexes x
  int depth = 1;

  static FractalSet segment(lqg::Point p, lqg::Point q) { return {SetKind::Segment, p, q, 0, {}, 0}; }
  static FractalSet point(lqg::Point p) { return {SetKind::Point, p, p, 0, {}, 0}; }
  static FractalSet full_square() { return {SetKind::FullSquare, {}, {}, 0, {}, 0}; }
  static FractalSet box_fractal(int side, std::vector<bool> keep, int depth) {
    require(side >= 2 && keep.size() == static_cast<std::size_t>(side) * side, ErrorCode::InvalidArgument,
            "box fractal mask must be side x side");
    require(depth >= 1, ErrorCode::InvalidArgument, "box fractal depth must be >= 1");
    require(std::count(keep.begin(), keep.end(), true) >= 1, ErrorCode::InvalidArgument,
            "box fractal must keep at least one square");
    return {SetKind::BoxFractal, {}, {}, side, std::move(keep), depth};
  }

  /// Euclidean exponent x = (2 - dim)/2 of the idealized set.
  double expected_exponent() const {
    switch (kind) {
      case SetKind::Segment: return 0.5;
      case SetKind::Point: return 1.0;
      case SetKind::FullSquare: return 0.0;
      case SetKind::BoxFractal: {
        const double kept = static_cast<double>(std::count(keep.begin(), keep.end(), true));
        return (2.0 - std::log(kept) / std::log(double(side))) / 2.0;
      }
    }
    return 0.0;
  }

  double distance(lqg::Point z) const {
    switch (kind) {
      case SetKind::FullSquare: {
        const double dx = std::max({0.0, -z.x, z.x - 1.0});
        const double dy = std::max({0.0, -z.y, z.y - 1.0});
        return std::hypot(dx, dy);
      }
      case SetKind::Point: return lqg::distance(z, a);
      case SetKind::Segment: {
        const lqg::Point d = b - a;
        const double len2 = d.x * d.x + d.y * d.y;
        double t = len2 > 0 ? ((z.x - a.x) * d.x + (z.y - a.y) * d.y) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return lqg::distance(z, a + t * d);
      }
      case SetKind::BoxFractal: {
        double best = std::numeric_limits<double>::infinity();
        box_distance(z, 0.0, 0.0, 1.0, 0, best);
        return best;
      }
    }
    return 0.0;
  }

 private:
  static double square_distance(lqg::Point z, double x0, double y0, double w) {
    const double dx = std::max({0.0, x0 - z.x, z.x - (x0 + w)});
    const double dy = std::max({0.0, y0 - z.y, z.y - (y0 + w)});
    return std::hypot(dx, dy);
  }

  void box_distance(lqg::Point z, double x0, double y0, double w, int level, double& best) const {
    const double d = square_distance(z, x0, y0, w);
    if (d >= best) return;
    if (level == depth) {
      best = d;
      return;
    }
    const double c = w / side;
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j)
        if (keep[static_cast<std::size_t>(i) * side + j]) box_distance(z, x0 + i * c, y0 + j * c, c, level + 1, best);
  }
};

/// One abscissa of a log-log fit.
struct ScalePoint {
  double scale = 0.0;         // eps or delta
  double log_abscissa = 0.0;  // log eps^2 or log delta
  double estimate = 0.0;
  double estimate_stderr = 0.0;
  double log_estimate = 0.0;
  double log_stderr = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_discarded = 0;
};

struct ExponentFit {
  std::vector<ScalePoint> scales;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Weighted least squares of log estimate against the log abscissa.
inline ExponentFit fit_exponent(std::vector<ScalePoint> points) {
  require(points.size() >= 3, ErrorCode::InvalidArgument, "an exponent fit needs at least 3 scales");
  std::vector<double> x, y, s;
  for (const auto& p : points) {
    x.push_back(p.log_abscissa);
    y.push_back(p.log_estimate);
    s.push_back(p.log_stderr);
  }
  const LineFit f = weighted_line_fit(x, y, s);
  return ExponentFit{std::move(points), f.slope, f.intercept, f.slope_stderr};
}

struct EuclideanConfig {
  std::vector<double> scales;  // eps values
  std::size_t samples = 1'000'000;
  std::size_t max_samples = 64'000'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// x from P[dist(z, K) <= eps] ~ (eps^2)^x with z uniform on [margin, 1 - margin]^2,
/// margin = largest eps. Samples are added in batches until every scale has 100 hits.
inline ExponentFit euclidean_exponent(const FractalSet& K, const EuclideanConfig& cfg) {
  require(cfg.scales.size() >= 3, ErrorCode::InvalidArgument, "need at least 3 scales");
  for (double e : cfg.scales) require(e > 0.0 && e < 0.5, ErrorCode::InvalidArgument, "scales must lie in (0, 1/2)");
  const double margin = *std::max_element(cfg.scales.begin(), cfg.scales.end());
  const std::size_t batch = std::max<std::size_t>(cfg.samples, 1);
  const std::size_t chunk = 1 << 16;
  std::vector<std::size_t> hits(cfg.scales.size(), 0);
  std::size_t drawn = 0, batch_index = 0;
  for (;;) {
    const std::size_t chunks = (batch + chunk - 1) / chunk;
    std::vector<std::vector<std::size_t>> part(chunks, std::vector<std::size_t>(cfg.scales.size(), 0));
    parallel_for(chunks, cfg.threads, [&](std::size_t c) {
      Rng rng(SeedRecord{cfg.seed, batch_index * chunks + c, streams::euclidean});
      const std::size_t count = std::min(chunk, batch - c * chunk);
      for (std::size_t i = 0; i < count; ++i) {
        const Point z{margin + (1.0 - 2.0 * margin) * rng.uniform(), margin + (1.0 - 2.0 * margin) * rng.uniform()};
        const double d = K.distance(z);
        for (std::size_t s = 0; s < cfg.scales.size(); ++s)
          if (d <= cfg.scales[s]) ++part[c][s];
      }
    });
    for (const auto& p : part)
      for (std::size_t s = 0; s < hits.size(); ++s) hits[s] += p[s];
    drawn += batch;
    ++batch_index;
    if (*std::min_element(hits.begin(), hits.end()) >= 100) break;
    require(drawn + batch <= cfg.max_samples, ErrorCode::InsufficientHits,
            "fewer than 100 hits at some scale within the sample cap");
  }
  std::vector<ScalePoint> pts;
  for (std::size_t s = 0; s < cfg.scales.size(); ++s) {
    const double n = static_cast<double>(drawn);
    const double p = hits[s] / n;
    ScalePoint sp;
    sp.scale = cfg.scales[s];
    sp.log_abscissa = std::log(cfg.scales[s] * cfg.scales[s]);
    sp.estimate = p;
    sp.estimate_stderr = std::sqrt(p * (1.0 - p) / n);
    sp.log_estimate = std::log(p);
    // At p = 1 the binomial error vanishes; keep a floor so the fit stays weighted.
    sp.log_stderr = std::max(std::sqrt((1.0 - p) / (n * p)), 1.0 / n);
    sp.n_samples = drawn;
    pts.push_back(sp);
  }
  return fit_exponent(std::move(pts));
}

struct QuantumBall {
  double tau = 0.0;
  bool clipped = false;  // the ball reached the boundary before its mass exceeded delta
};

namespace detail {

struct CellDistance {
  double d;
  int i;
  int j;
};

// Cells whose centers lie within rho of z, sorted by distance.
inline std::vector<CellDistance> cells_near(Point z, double rho, int n) {
  std::vector<CellDistance> out;
  const int i0 = std::max(0, static_cast<int>(std::floor((z.x - rho) * n)));
  const int i1 = std::min(n - 1, static_cast<int>(std::floor((z.x + rho) * n)));
  const int j0 = std::max(0, static_cast<int>(std::floor((z.y - rho) * n)));
  const int j1 = std::min(n - 1, static_cast<int>(std::floor((z.y + rho) * n)));
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j) {
      const double d = distance(cell_center(i, j, n), z);
      if (d < rho) out.push_back({d, i, j});
    }
  std::sort(out.begin(), out.end(), [](const CellDistance& a, const CellDistance& b) {
    return a.d < b.d || (a.d == b.d && (a.i < b.i || (a.i == b.i && a.j < b.j)));
  });
  return out;
}

/// tau = sup{r : mass(B_r(z)) <= delta} over open balls, where mass_of(i, j) gives the
/// cell masses. The search radius grows geometrically so only nearby cells are touched.
template <class MassOf>
QuantumBall quantum_ball_radius(Point z, double delta, int n, MassOf&& mass_of) {
  const double reach = DomainSpec::square().distance_to_boundary(z);
  double rho = 4.0 / n;
  for (;;) {
    const bool whole = rho >= std::sqrt(2.0);
    const auto cells = cells_near(z, whole ? 2.0 : rho, n);
    double cum = 0.0;
    for (std::size_t k = 0; k < cells.size();) {
      // Cells at equal distance enter the open ball together.
      std::size_t e = k;
      double group = 0.0;
      while (e < cells.size() && cells[e].d == cells[k].d) group += mass_of(cells[e].i, cells[e].j), ++e;
      if (cum + group > delta) {
        const double tau = cells[k].d;
        if (tau > reach) return {reach, true};
        return {tau, false};
      }
      cum += group;
      k = e;
    }
    if (whole) return {reach, true};
    if (rho > reach) return {reach, true};
    rho *= 2.0;
  }
}

}  // namespace detail

/// Quantum ball radius about z for mass delta. mu(B_tau) <= delta <= mu(B_{tau + diag})
/// holds for unclipped balls; balls reaching the boundary come back clipped at dist(z, boundary).
inline QuantumBall quantum_ball(const GridMeasure& m, Point z, double delta) {
  require_interior(DomainSpec::square(), z);
  require(delta > 0.0 && delta < m.total, ErrorCode::DeltaOutOfRange, "delta must lie in (0, total mass)");
  return detail::quantum_ball_radius(z, delta, m.resolution, [&](int i, int j) { return m.mass(i, j); });
}

enum class RootMode { SampleFromMeasure, RootedDensity };

inline std::string to_string(RootMode m) {
  return m == RootMode::SampleFromMeasure ? "measure" : "rooted";
}

struct QuantumConfig {
  double gamma = 1.0;
  std::vector<double> deltas;
  int replicates = 200;           // independent fields
  int roots_per_field = 500;      // sampled centers per field and mode
  int resolution = 512;
  int cutoff = 8192;
  double margin = 0.125;
  RootMode mode = RootMode::SampleFromMeasure;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct QuantumResult {
  RootMode mode = RootMode::SampleFromMeasure;
  ExponentFit fit;
  std::size_t discarded = 0;
  std::size_t attempted = 0;
};

namespace detail {

// Open-ball mass about z up to radius r, stopping once it exceeds cap; clipped when the
// ball leaves the square before either happens.
template <class MassOf>
double capped_ball_mass(Point z, double r, double cap, int n, bool& clipped, MassOf&& mass_of) {
  const double reach = DomainSpec::square().distance_to_boundary(z);
  double rho = std::min(r, 4.0 / n);
  clipped = false;
  for (;;) {
    double sum = 0.0;
    for (const auto& c : cells_near(z, rho, n)) {
      sum += mass_of(c.i, c.j);
      if (sum > cap) return sum;
    }
    if (rho >= r) {
      if (r > reach) clipped = true;
      return sum;
    }
    if (rho > reach) {
      clipped = true;
      return sum;
    }
    rho = std::min(r, 2.0 * rho);
  }
}

struct ModeTally {
  std::vector<double> estimate;
  std::size_t discarded = 0;
};

}  // namespace detail

/// Delta from E mu{z : B^delta(z) meets K} ~ delta^Delta. B^delta(z) meets K exactly when
/// mu(B_d(z)) <= delta for d = dist(z, K), so each center needs one capped ball mass.
///
/// SampleFromMeasure: centers drawn from mu restricted to [margin, 1-margin]^2; the per-field
/// estimate is mu(region) times the hit fraction.
/// RootedDensity: centers drawn with density C^{gamma^2/2}, the field tilted by gamma G^z;
/// the per-field estimate is the density normalizer times the hit fraction.
///
/// All requested modes run on the same field samples.
inline std::vector<QuantumResult> quantum_exponents(const FractalSet& K, const QuantumConfig& cfg,
                                                    const std::vector<RootMode>& modes,
                                                    Warnings* warnings = nullptr) {
  check_gamma(cfg.gamma, warnings);
  require(cfg.deltas.size() >= 3, ErrorCode::InvalidArgument, "need at least 3 delta scales");
  require(cfg.replicates >= 2 && cfg.roots_per_field >= 1, ErrorCode::InvalidArgument, "need >= 2 replicates");
  require(is_power_of_two(cfg.resolution), ErrorCode::InvalidArgument, "resolution must be a power of two");
  require(!modes.empty(), ErrorCode::InvalidArgument, "no root mode selected");
  for (double d : cfg.deltas) require(d > 0.0, ErrorCode::DeltaOutOfRange, "delta must be positive");
  const int n = cfg.resolution;
  const double eps = 1.0 / n;
  const double g2 = cfg.gamma * cfg.gamma;
  const double dmax = *std::max_element(cfg.deltas.begin(), cfg.deltas.end());
  const MeasureBuilder builder(cfg.cutoff, n);
  if (!cutoff_adequate(cfg.cutoff, eps)) warn(warnings, "cutoff below rule pi*M*eps >= 50");
  const RootDensity density(n, cfg.gamma, cfg.margin);
  const std::size_t S = cfg.deltas.size();

  std::vector<std::vector<detail::ModeTally>> per(cfg.replicates, std::vector<detail::ModeTally>(modes.size()));
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
    const auto field = sample_spectral_gff(cfg.cutoff, SeedRecord{cfg.seed, r, streams::spectral_field});
    const GridMeasure m = measure_from_circle_averages(builder.circle_averages(field), cfg.gamma, eps);
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      const bool from_measure = modes[mi] == RootMode::SampleFromMeasure;
      Rng rng(SeedRecord{cfg.seed, r, from_measure ? streams::measure_roots : streams::roots});
      double weight_total = 0.0;
      std::vector<double> cum;
      std::vector<int> cells;
      if (from_measure) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const Point c = cell_center(i, j, n);
            if (c.x < cfg.margin || c.x > 1.0 - cfg.margin || c.y < cfg.margin || c.y > 1.0 - cfg.margin) continue;
            weight_total += m.mass(i, j);
            cells.push_back(i * n + j);
            cum.push_back(weight_total);
          }
      } else {
        weight_total = density.normalizer();
      }
      std::vector<std::size_t> hit(S, 0);
      std::size_t used = 0;
      detail::ModeTally out;
      for (int s = 0; s < cfg.roots_per_field; ++s) {
        Point z;
        if (from_measure) {
          const double u = rng.uniform() * weight_total;
          const auto it = std::upper_bound(cum.begin(), cum.end(), u);
          const int cell = cells[std::min<std::size_t>(it - cum.begin(), cells.size() - 1)];
          z = {(cell / n + rng.uniform()) / n, (cell % n + rng.uniform()) / n};
        } else {
          z = density.sample(rng);
        }
        const double d = K.distance(z);
        bool clipped = false;
        const double mass =
            from_measure
                ? detail::capped_ball_mass(z, d, dmax, n, clipped, [&](int i, int j) { return m.mass(i, j); })
                : detail::capped_ball_mass(z, d, dmax, n, clipped, [&](int i, int j) {
                    return m.mass(i, j) * std::exp(g2 * circle_mean_green(z, cell_center(i, j, n), eps));
                  });
        if (clipped) {
          ++out.discarded;
          continue;
        }
        ++used;
        for (std::size_t k = 0; k < S; ++k)
          if (mass <= cfg.deltas[k]) ++hit[k];
      }
      out.estimate.resize(S);
      for (std::size_t k = 0; k < S; ++k) out.estimate[k] = used ? weight_total * hit[k] / double(used) : 0.0;
      per[r][mi] = std::move(out);
    }
  });

  std::vector<QuantumResult> results;
  for (std::size_t mi = 0; mi < modes.size(); ++mi) {
    QuantumResult res;
    res.mode = modes[mi];
    for (const auto& p : per) res.discarded += p[mi].discarded;
    res.attempted = static_cast<std::size_t>(cfg.replicates) * cfg.roots_per_field;
    std::vector<ScalePoint> pts;
    for (std::size_t k = 0; k < S; ++k) {
      RunningStats st;
      for (const auto& p : per) st.add(p[mi].estimate[k]);
      require(st.mean() > 0.0, ErrorCode::InsufficientHits, "no hits at delta = " + std::to_string(cfg.deltas[k]));
      ScalePoint sp;
      sp.scale = cfg.deltas[k];
      sp.log_abscissa = std::log(cfg.deltas[k]);
      sp.estimate = st.mean();
      sp.estimate_stderr = st.stderr_mean();
      sp.log_estimate = std::log(st.mean());
      sp.log_stderr = std::max(st.stderr_mean() / st.mean(), 1e-12);
      sp.n_samples = res.attempted;
      sp.n_discarded = res.discarded;
      pts.push_back(sp);
    }
    if (res.attempted > 0 && res.discarded * 100 > res.attempted)
      warn(warnings, to_string(modes[mi]) + " quantum-ball discard rate " +
                         std::to_string(double(res.discarded) / res.attempted));
    res.fit = fit_exponent(std::move(pts));
    results.push_back(std::move(res));
  }
  return results;
}

inline QuantumResult quantum_exponent(const FractalSet& K, const QuantumConfig& cfg, Warnings* warnings = nullptr) {
  return quantum_exponents(K, cfg, {cfg.mode}, warnings).front();
}

struct FirstPassageResult {
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
  double analytic = 0.0;
  std::size_t paths = 0;
};

struct FirstPassageConfig {
  double gamma = 1.0;
  double x = 0.5;
  double delta = 0.01;
  std::size_t paths = 100'000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Monte Carlo of E[exp(-2x T)] where T is the first time B_t + a t reaches
/// log(1/delta)/gamma, next to the closed form delta^{beta/gamma}. Paths advance by
/// exact Gaussian increments; between lattice times a crossing is detected through
/// the Brownian-bridge probability exp(-2 (L - X)(L - X') / dt).
inline FirstPassageResult first_passage_oracle(const FirstPassageConfig& cfg) {
  require(cfg.gamma > 0.0 && cfg.gamma < 2.0, ErrorCode::GammaOutOfRange, "gamma must lie in (0, 2)");
  require(cfg.delta > 0.0 && cfg.delta < 1.0, ErrorCode::DeltaOutOfRange, "delta must lie in (0, 1)");
  require(cfg.x >= 0.0, ErrorCode::InvalidArgument, "x must be nonnegative");
  require(cfg.dt > 0.0 && cfg.dt <= 1e-3, ErrorCode::InvalidArgument, "dt must lie in (0, 1e-3]");
  require(cfg.paths >= 2, ErrorCode::InvalidArgument, "need at least two paths");
  const double a = 2.0 / cfg.gamma - cfg.gamma / 2.0;
  const double level = std::log(1.0 / cfg.delta) / cfg.gamma;
  const double beta = beta_of_x(cfg.gamma, cfg.x);
  FirstPassageResult res;
  res.analytic = std::pow(cfg.delta, beta / cfg.gamma);
  res.paths = cfg.paths;
  if (cfg.x == 0.0) {
    res.mc_estimate = 1.0;
    return res;
  }
  // Beyond t_stop the discount is below 1e-16.
  const double t_stop = std::log(1e16) / (2.0 * cfg.x);
  const double sdt = std::sqrt(cfg.dt);
  const double bridge_zone = 6.0 * sdt;
  const std::size_t chunk = 4096;
  const std::size_t chunks = (cfg.paths + chunk - 1) / chunk;
  std::vector<std::vector<double>> values(chunks);
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    Rng rng(SeedRecord{cfg.seed, c, streams::first_passage});
    const std::size_t count = std::min(chunk, cfg.paths - c * chunk);
    auto& out = values[c];
    out.reserve(count);
    for (std::size_t p = 0; p < count; ++p) {
      double X = 0.0, t = 0.0, T = -1.0;
      while (t < t_stop) {
        const double Xn = X + a * cfg.dt + sdt * rng.normal();
        if (Xn >= level) {
          T = t + cfg.dt * (level - X) / (Xn - X);
          break;
        }
        if (level - std::max(X, Xn) < bridge_zone &&
            rng.uniform() < std::exp(-2.0 * (level - X) * (level - Xn) / cfg.dt)) {
          T = t + 0.5 * cfg.dt;
          break;
        }
        X = Xn;
        t += cfg.dt;
      }
      out.push_back(T < 0.0 ? 0.0 : std::exp(-2.0 * cfg.x * T));
    }
  });
  RunningStats st;
  for (const auto& v : values)
    for (double e : v) st.add(e);
  res.mc_estimate = st.mean();
  res.mc_stderr = st.stderr_mean();
  return res;
}

}  // namespace lqg
