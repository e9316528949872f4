#pragma once

#include <boost/math/special_functions/bessel.hpp>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "point.hpp"
#include "rng.hpp"
#include "sine_transform.hpp"

namespace lqg {

using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink) sink->push_back(std::move(message));
}

/// Dense table indexed by modes (j, k), 1 <= j <= nj, 1 <= k <= nk.
struct ModeTable {
  int nj = 0;
  int nk = 0;
  std::vector<double> values;  // values[(j-1)*nk + (k-1)]

  ModeTable() = default;
  ModeTable(int j_modes, int k_modes)
      : nj(j_modes), nk(k_modes), values(static_cast<std::size_t>(j_modes) * k_modes, 0.0) {}

  double& operator()(int j, int k) { return values[static_cast<std::size_t>(j - 1) * nk + (k - 1)]; }
  double operator()(int j, int k) const {
    return values[static_cast<std::size_t>(j - 1) * nk + (k - 1)];
  }
};

/// Normalization of the square eigenfunction e_{jk} = c_{jk} sin(j pi x) sin(k pi y),
/// unit in the Dirichlet norm (1/2pi) int |grad f|^2.
inline double basis_constant(int j, int k) {
  return 2.0 * std::sqrt(2.0 / std::numbers::pi) / std::sqrt(double(j) * j + double(k) * k);
}

inline double bessel_j0(double x) { return boost::math::detail::bessel_j0(x); }

/// Truncated series h = sum_{j,k <= M} a_{jk} e_{jk} on the unit square.
struct SpectralField {
  int cutoff = 0;
  ModeTable coeffs;
  DomainSpec domain = DomainSpec::square();
  SeedRecord seed;

  double a(int j, int k) const { return coeffs(j, k); }
};

/// A field with all coefficients zero; handy for single-mode and deterministic tests.
inline SpectralField zero_field(int M) {
  require(M >= 1, ErrorCode::InvalidCutoff, "cutoff must be >= 1");
  return SpectralField{M, ModeTable(M, M), DomainSpec::square(), {}};
}

inline SpectralField sample_spectral_gff(int M, Rng& rng) {
  require(M >= 1, ErrorCode::InvalidCutoff, "cutoff must be >= 1");
  SpectralField f{M, ModeTable(M, M), DomainSpec::square(), rng.key()};
  for (double& v : f.coeffs.values) v = rng.normal();
  return f;
}

inline SpectralField sample_spectral_gff(int M, const SeedRecord& seed) {
  Rng rng(seed);
  return sample_spectral_gff(M, rng);
}

/// Values at the centers of an n x n cell grid; (i, j) indexes (x, y).
struct Grid {
  int n = 0;
  std::vector<double> values;  // values[i*n + j]

  double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  double& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
};

namespace detail {

// sin(m pi (2a+1)/(2n)) as a function of m has period 4n, is symmetric about
// m = n and odd about m = 2n; each mode m maps to a base index in 1..n and a sign.
struct FoldedMode {
  int base;  // 0 when the mode vanishes at every cell center
  double sign;
};

inline FoldedMode fold_mode(int m, int n) {
  const int r = m % (4 * n);
  if (r == 0 || r == 2 * n) return {0, 0.0};
  if (r < 2 * n) return {r <= n ? r : 2 * n - r, 1.0};
  const int s = r - 2 * n;
  return {s <= n ? s : 2 * n - s, -1.0};
}

/// Grid of sum_{j,k} a_{jk} w_{jk} sin(j pi x) sin(k pi y) at cell centers, through
/// mode folding onto n x n frequencies and one 2D DST-III.
inline Grid synthesize(const ModeTable& amplitude, const ModeTable& weight, int n) {
  require(amplitude.nj == weight.nj && amplitude.nk == weight.nk, ErrorCode::DimensionMismatch,
          "weights must match the field cutoff");
  std::vector<FoldedMode> fj(amplitude.nj + 1), fk(amplitude.nk + 1);
  for (int j = 1; j <= amplitude.nj; ++j) fj[j] = fold_mode(j, n);
  for (int k = 1; k <= amplitude.nk; ++k) fk[k] = fold_mode(k, n);
  std::vector<double> buf(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 1; j <= amplitude.nj; ++j) {
    if (fj[j].base == 0) continue;
    double* row = buf.data() + static_cast<std::size_t>(fj[j].base - 1) * n;
    const double* a = amplitude.values.data() + static_cast<std::size_t>(j - 1) * amplitude.nk;
    const double* w = weight.values.data() + static_cast<std::size_t>(j - 1) * weight.nk;
    const double sj = fj[j].sign;
    for (int k = 1; k <= amplitude.nk; ++k) {
      if (fk[k].base == 0) continue;
      row[fk[k].base - 1] += sj * fk[k].sign * a[k - 1] * w[k - 1];
    }
  }
  // RODFT01 doubles every input except the last index.
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      buf[static_cast<std::size_t>(p) * n + q] *= (p < n - 1 ? 0.5 : 1.0) * (q < n - 1 ? 0.5 : 1.0);
  dst3_2d(buf, n);
  return Grid{n, std::move(buf)};
}

inline ModeTable basis_weights(int M) {
  ModeTable w(M, M);
  for (int j = 1; j <= M; ++j)
    for (int k = 1; k <= M; ++k) w(j, k) = basis_constant(j, k);
  return w;
}

/// c_{jk} J0(pi eps sqrt(j^2+k^2)): mean-value multiplier of e_{jk} on circles of radius eps.
inline ModeTable circle_weights(int M, double eps) {
  ModeTable w(M, M);
  for (int j = 1; j <= M; ++j)
    for (int k = j; k <= M; ++k) {
      const double v =
          basis_constant(j, k) * bessel_j0(std::numbers::pi * eps * std::sqrt(double(j) * j + double(k) * k));
      w(j, k) = v;
      w(k, j) = v;
    }
  return w;
}

}  // namespace detail

inline Grid evaluate_field(const SpectralField& field, int n) {
  require(n >= 2, ErrorCode::InvalidArgument, "grid resolution must be >= 2");
  return detail::synthesize(field.coeffs, detail::basis_weights(field.cutoff), n);
}

/// Direct summation of the truncated series at one point.
inline double evaluate_point(const SpectralField& field, Point z) {
  const int M = field.cutoff;
  std::vector<double> sx(M + 1), sy(M + 1);
  for (int j = 1; j <= M; ++j) {
    sx[j] = std::sin(j * std::numbers::pi * z.x);
    sy[j] = std::sin(j * std::numbers::pi * z.y);
  }
  double sum = 0.0;
  for (int j = 1; j <= M; ++j)
    for (int k = 1; k <= M; ++k) sum += field.a(j, k) * basis_constant(j, k) * sx[j] * sy[k];
  return sum;
}

/// Dirichlet inner product <h, f> = sum a_{jk} alpha_{jk}.
inline double pair_h_f(const SpectralField& field, const ModeTable& alpha) {
  require(alpha.nj <= field.cutoff && alpha.nk <= field.cutoff, ErrorCode::DimensionMismatch,
          "test-function table exceeds the field cutoff");
  double sum = 0.0;
  for (int j = 1; j <= alpha.nj; ++j)
    for (int k = 1; k <= alpha.nk; ++k) sum += field.a(j, k) * alpha(j, k);
  return sum;
}

/// Cutoff rule: modes beyond M are negligible for circle averages at radius eps
/// once pi M eps >= 50.
inline bool cutoff_adequate(int M, double eps) { return std::numbers::pi * M * eps >= 50.0; }

inline int cutoff_for_radius(double eps) {
  return static_cast<int>(std::ceil(50.0 / (std::numbers::pi * eps)));
}

/// Precomputed weights w_{jk} with h_eps(z) = sum a_{jk} w_{jk}, for reuse across an ensemble.
class CircleStencil {
 public:
  CircleStencil(int M, Point z, double eps) : M_(M), z_(z), eps_(eps), w_(M, M) {
    require(M >= 1, ErrorCode::InvalidCutoff, "cutoff must be >= 1");
    require(eps > 0.0, ErrorCode::InvalidArgument, "radius must be positive");
    const auto sq = DomainSpec::square();
    require_interior(sq, z);
    require(sq.distance_to_boundary(z) >= eps, ErrorCode::BoundaryTooClose,
            "circle leaves the domain");
    std::vector<double> sx(M + 1), sy(M + 1);
    for (int j = 1; j <= M; ++j) {
      sx[j] = std::sin(j * std::numbers::pi * z.x);
      sy[j] = std::sin(j * std::numbers::pi * z.y);
    }
    const ModeTable cw = detail::circle_weights(M, eps);
    for (int j = 1; j <= M; ++j)
      for (int k = 1; k <= M; ++k) w_(j, k) = cw(j, k) * sx[j] * sy[k];
  }

  double apply(const SpectralField& field) const {
    require(field.cutoff == M_, ErrorCode::DimensionMismatch, "stencil built for another cutoff");
    double sum = 0.0;
    const auto& a = field.coeffs.values;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * w_.values[i];
    return sum;
  }

  // Exact variance of apply() over fields with iid standard normal coefficients.
  double variance() const {
    double sum = 0.0;
    for (double w : w_.values) sum += w * w;
    return sum;
  }

  int cutoff() const { return M_; }
  Point center() const { return z_; }
  double radius() const { return eps_; }

 private:
  int M_;
  Point z_;
  double eps_;
  ModeTable w_;
};

/// Average of the truncated field over the circle of radius eps about z, via the
/// Bessel mean-value identity for Laplace eigenfunctions.
inline double circle_average(const SpectralField& field, Point z, double eps, Warnings* warnings = nullptr) {
  if (!cutoff_adequate(field.cutoff, eps))
    warn(warnings, "cutoff M=" + std::to_string(field.cutoff) + " below rule pi*M*eps >= 50");
  return CircleStencil(field.cutoff, z, eps).apply(field);
}

/// Circle averages at radius eps about every cell center of an n x n grid, for one
/// cutoff. Cells whose circle leaves the square get the average of the odd periodic
/// extension of the series; callers flag them.
class CircleGridPlan {
 public:
  CircleGridPlan(int M, int n, double eps)
      : M_(M), n_(n), eps_(eps), w_(detail::circle_weights(M, eps)) {
    require(n >= 2, ErrorCode::InvalidArgument, "grid resolution must be >= 2");
    require(eps > 0.0, ErrorCode::InvalidArgument, "radius must be positive");
  }

  Grid apply(const SpectralField& field) const {
    require(field.cutoff == M_, ErrorCode::DimensionMismatch, "plan built for another cutoff");
    return detail::synthesize(field.coeffs, w_, n_);
  }

  int cutoff() const { return M_; }
  int resolution() const { return n_; }
  double radius() const { return eps_; }

 private:
  int M_;
  int n_;
  double eps_;
  ModeTable w_;
};

inline Grid circle_average_grid(const SpectralField& field, int n, double eps) {
  return CircleGridPlan(field.cutoff, n, eps).apply(field);
}

/// Y_t = h_{exp(-t)}(z) on t = t0, t0 + dt, ..., with t0 = log(1/dist(z, boundary)).
struct CirclePath {
  Point center;
  double t0 = 0.0;
  std::vector<double> times;
  std::vector<double> values;

  /// B_{t_i - t0} = Y_{t_i} - Y_{t0}.
  std::vector<double> increments() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] - values.front();
    return out;
  }
};

class CircleProcessPlan {
 public:
  CircleProcessPlan(int M, Point z, double t_max, double dt) : z_(z) {
    require(dt > 0.0, ErrorCode::InvalidArgument, "dt must be positive");
    const auto sq = DomainSpec::square();
    require_interior(sq, z);
    t0_ = std::log(1.0 / sq.distance_to_boundary(z));
    require(t_max > t0_, ErrorCode::BoundaryTooClose, "t_max must exceed t0 = log(1/dist(z, boundary))");
    for (int i = 0;; ++i) {
      const double t = t0_ + i * dt;
      if (t > t_max + 1e-12) break;
      times_.push_back(t);
      // Guard the first radius against rounding past the boundary distance.
      const double r = i == 0 ? sq.distance_to_boundary(z) : std::exp(-t);
      stencils_.emplace_back(M, z, r);
    }
  }

  CirclePath apply(const SpectralField& field) const {
    CirclePath p{z_, t0_, times_, {}};
    p.values.reserve(stencils_.size());
    for (const auto& s : stencils_) p.values.push_back(s.apply(field));
    return p;
  }

 private:
  Point z_;
  double t0_ = 0.0;
  std::vector<double> times_;
  std::vector<CircleStencil> stencils_;
};

inline CirclePath circle_process(const SpectralField& field, Point z, double t_max, double dt) {
  return CircleProcessPlan(field.cutoff, z, t_max, dt).apply(field);
}

/// DGFF sample on the lattice (1/N)Z^2 in [0,1]^2 with zero boundary values.
struct DiscreteField {
  int n = 0;
  std::vector<double> values;  // (N+1) x (N+1), values[a*(N+1) + b] at (a/N, b/N)
  SeedRecord seed;

  double operator()(int a, int b) const { return values[static_cast<std::size_t>(a) * (n + 1) + b]; }
};

/// Exact sample with density proportional to exp(-1/2 sum_{x~y} (h(x)-h(y))^2): the
/// precision matrix is the interior graph Laplacian 4I - A, diagonalized by discrete
/// sine modes with eigenvalues 4 - 2cos(j pi/N) - 2cos(k pi/N).
inline DiscreteField sample_dgff(int N, Rng& rng) {
  require(N >= 2, ErrorCode::InvalidArgument, "grid side must be >= 2");
  const int m = N - 1;
  std::vector<double> modes(static_cast<std::size_t>(m) * m);
  const double pi = std::numbers::pi;
  // Orthonormal eigenvectors are (2/N) sin sin; RODFT00 contributes a factor 4.
  const double scale = (2.0 / N) / 4.0;
  for (int j = 1; j <= m; ++j)
    for (int k = 1; k <= m; ++k) {
      const double lambda = 4.0 - 2.0 * std::cos(j * pi / N) - 2.0 * std::cos(k * pi / N);
      modes[static_cast<std::size_t>(j - 1) * m + (k - 1)] = rng.normal() * scale / std::sqrt(lambda);
    }
  detail::dst1_2d(modes, m);
  DiscreteField f{N, std::vector<double>(static_cast<std::size_t>(N + 1) * (N + 1), 0.0), rng.key()};
  for (int a = 1; a < N; ++a)
    for (int b = 1; b < N; ++b)
      f.values[static_cast<std::size_t>(a) * (N + 1) + b] = modes[static_cast<std::size_t>(a - 1) * m + (b - 1)];
  return f;
}

inline DiscreteField sample_dgff(int N, const SeedRecord& seed) {
  Rng rng(seed);
  return sample_dgff(N, rng);
}

struct LatticePoint {
  int a = 0;
  int b = 0;
};

namespace detail {

inline Eigen::SparseMatrix<double> interior_laplacian(int N) {
  const int m = N - 1;
  auto idx = [m](int a, int b) { return (a - 1) * m + (b - 1); };
  std::vector<Eigen::Triplet<double>> t;
  for (int a = 1; a < N; ++a)
    for (int b = 1; b < N; ++b) {
      t.emplace_back(idx(a, b), idx(a, b), 4.0);
      if (a > 1) t.emplace_back(idx(a, b), idx(a - 1, b), -1.0);
      if (a < N - 1) t.emplace_back(idx(a, b), idx(a + 1, b), -1.0);
      if (b > 1) t.emplace_back(idx(a, b), idx(a, b - 1), -1.0);
      if (b < N - 1) t.emplace_back(idx(a, b), idx(a, b + 1), -1.0);
    }
  Eigen::SparseMatrix<double> L(m * m, m * m);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

}  // namespace detail

/// Columns of the discrete Green's function G_N = (4I - A)^{-1} for the given sources,
/// from a sparse Cholesky solve. Entry [s][a*(N+1)+b] is G_N(source s, (a, b)).
inline std::vector<std::vector<double>> dgff_covariance_columns(int N, const std::vector<LatticePoint>& sources) {
  require(N >= 2, ErrorCode::InvalidArgument, "grid side must be >= 2");
  const int m = N - 1;
  for (auto s : sources)
    require(s.a >= 1 && s.a < N && s.b >= 1 && s.b < N, ErrorCode::OutOfDomain,
            "lattice point must be interior");
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(detail::interior_laplacian(N));
  require(solver.info() == Eigen::Success, ErrorCode::InvalidArgument, "Laplacian factorization failed");
  std::vector<std::vector<double>> out;
  for (auto s : sources) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m * m);
    rhs((s.a - 1) * m + (s.b - 1)) = 1.0;
    Eigen::VectorXd g = solver.solve(rhs);
    std::vector<double> col(static_cast<std::size_t>(N + 1) * (N + 1), 0.0);
    for (int a = 1; a < N; ++a)
      for (int b = 1; b < N; ++b)
        col[static_cast<std::size_t>(a) * (N + 1) + b] = g((a - 1) * m + (b - 1));
    out.push_back(std::move(col));
  }
  return out;
}

inline double dgff_covariance(int N, LatticePoint x, LatticePoint y) {
  require(y.a >= 1 && y.a < N && y.b >= 1 && y.b < N, ErrorCode::OutOfDomain,
          "lattice point must be interior");
  return dgff_covariance_columns(N, {x})[0][static_cast<std::size_t>(y.a) * (N + 1) + y.b];
}

}  // namespace lqg
