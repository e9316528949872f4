#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lqg/geometry.hpp"
#include "lqg/gff.hpp"
#include "lqg/stats.hpp"

using namespace lqg;

namespace {

SeedRecord key(std::uint64_t replicate, std::uint64_t stream = streams::spectral_field) {
  return SeedRecord{424242, replicate, stream};
}

// Brute-force discrete Green's function: dense inverse of the interior Laplacian by
// Gauss-Jordan elimination.
std::vector<double> dense_dgff_covariance(int N) {
  const int m = N - 1, P = m * m;
  std::vector<double> A(static_cast<std::size_t>(P) * 2 * P, 0.0);
  auto at = [&](int r, int c) -> double& { return A[static_cast<std::size_t>(r) * 2 * P + c]; };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const int r = a * m + b;
      at(r, r) = 4.0;
      if (a > 0) at(r, r - m) = -1.0;
      if (a + 1 < m) at(r, r + m) = -1.0;
      if (b > 0) at(r, r - 1) = -1.0;
      if (b + 1 < m) at(r, r + 1) = -1.0;
      at(r, P + r) = 1.0;
    }
  for (int c = 0; c < P; ++c) {
    const double piv = at(c, c);
    for (int k = 0; k < 2 * P; ++k) at(c, k) /= piv;
    for (int r = 0; r < P; ++r)
      if (r != c && at(r, c) != 0.0) {
        const double f = at(r, c);
        for (int k = 0; k < 2 * P; ++k) at(r, k) -= f * at(c, k);
      }
  }
  std::vector<double> inv(static_cast<std::size_t>(P) * P);
  for (int r = 0; r < P; ++r)
    for (int c = 0; c < P; ++c) inv[static_cast<std::size_t>(r) * P + c] = at(r, P + c);
  return inv;
}

}  // namespace

TEST(SpectralGff, RejectsZeroCutoff) {
  try {
    sample_spectral_gff(0, key(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidCutoff);
  }
}

TEST(SpectralGff, SeedDeterminism) {
  const auto a = sample_spectral_gff(32, key(3));
  const auto b = sample_spectral_gff(32, key(3));
  const auto c = sample_spectral_gff(32, key(4));
  EXPECT_EQ(a.coeffs.values, b.coeffs.values);
  EXPECT_NE(a.coeffs.values, c.coeffs.values);
}

TEST(SpectralGff, CoefficientVariance) {
  RunningStats st;
  for (int r = 0; r < 10000; ++r) st.add(sample_spectral_gff(64, key(r)).a(1, 1));
  EXPECT_GE(st.variance(), 0.97);
  EXPECT_LE(st.variance(), 1.03);
}

TEST(EvaluateField, ZeroAndSingleMode) {
  auto f = zero_field(8);
  const Grid g0 = evaluate_field(f, 16);
  for (double v : g0.values) EXPECT_EQ(v, 0.0);
  f.coeffs(1, 1) = 1.0;
  const Grid g = evaluate_field(f, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const Point c = cell_center(i, j, 16);
      EXPECT_NEAR(g(i, j), basis_constant(1, 1) * std::sin(std::numbers::pi * c.x) * std::sin(std::numbers::pi * c.y),
                  1e-14);
    }
}

TEST(EvaluateField, MatchesDirectSummation) {
  const auto f = sample_spectral_gff(128, key(1));
  const Grid g = evaluate_field(f, 256);
  std::mt19937_64 eng(5);
  std::uniform_int_distribution<int> cell(0, 255);
  for (int t = 0; t < 5; ++t) {
    const int i = cell(eng), j = cell(eng);
    EXPECT_NEAR(g(i, j), evaluate_point(f, cell_center(i, j, 256)), 1e-9);
  }
}

TEST(EvaluateField, CutoffAboveResolutionFolds) {
  const auto f = sample_spectral_gff(40, key(2));
  const Grid g = evaluate_field(f, 16);
  for (int i = 0; i < 16; i += 5)
    for (int j = 0; j < 16; j += 3) EXPECT_NEAR(g(i, j), evaluate_point(f, cell_center(i, j, 16)), 1e-11);
}

TEST(PairHF, Basics) {
  const auto f = sample_spectral_gff(8, key(6));
  ModeTable alpha(8, 8);
  EXPECT_EQ(pair_h_f(f, alpha), 0.0);
  alpha(1, 1) = 1.0;
  EXPECT_EQ(pair_h_f(f, alpha), f.a(1, 1));
  ModeTable too_big(9, 9);
  try {
    pair_h_f(f, too_big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(PairHF, CovarianceIsInnerProduct) {
  ModeTable alpha(4, 4), beta(4, 4);
  alpha(1, 1) = 1.0;
  alpha(2, 3) = 0.5;
  beta(1, 1) = -0.7;
  beta(2, 3) = 2.0;
  beta(4, 4) = 1.0;
  const double exact = 1.0 * -0.7 + 0.5 * 2.0;
  std::vector<double> x, y;
  for (int r = 0; r < 10000; ++r) {
    const auto f = sample_spectral_gff(4, key(r));
    x.push_back(pair_h_f(f, alpha));
    y.push_back(pair_h_f(f, beta));
  }
  EXPECT_NEAR(sample_covariance(x, y), exact, 3.0 * covariance_stderr(x, y));
}

TEST(Basis, DirichletOrthonormality) {
  // (1/2pi) int grad e_a . grad e_b by tensor Gauss-Legendre on cos/sin products.
  const int Q = 64;
  std::vector<double> nodes(Q), weights(Q);
  for (int i = 0; i < Q; ++i) {  // midpoint rule is exact for trigonometric products of degree < 2Q
    nodes[i] = (i + 0.5) / Q;
    weights[i] = 1.0 / Q;
  }
  const double pi = std::numbers::pi;
  auto inner = [&](int j, int k, int jp, int kp) {
    double s = 0.0;
    for (int a = 0; a < Q; ++a)
      for (int b = 0; b < Q; ++b) {
        const double x = nodes[a], y = nodes[b];
        const double gx = j * pi * std::cos(j * pi * x) * std::sin(k * pi * y) * jp * pi * std::cos(jp * pi * x) *
                          std::sin(kp * pi * y);
        const double gy = k * pi * std::sin(j * pi * x) * std::cos(k * pi * y) * kp * pi * std::sin(jp * pi * x) *
                          std::cos(kp * pi * y);
        s += weights[a] * weights[b] * (gx + gy);
      }
    return basis_constant(j, k) * basis_constant(jp, kp) * s / (2.0 * pi);
  };
  for (int j = 1; j <= 8; j += 3)
    for (int k = 1; k <= 8; k += 2)
      for (int jp = 1; jp <= 8; jp += 3)
        for (int kp = 1; kp <= 8; kp += 2)
          EXPECT_NEAR(inner(j, k, jp, kp), (j == jp && k == kp) ? 1.0 : 0.0, 1e-6);
}

TEST(CircleAverage, ZeroFieldAndSmallRadius) {
  EXPECT_EQ(circle_average(zero_field(16), {0.5, 0.5}, 0.1), 0.0);
  const auto f = sample_spectral_gff(64, key(8));
  const Point z{0.37, 0.61};
  const double h = evaluate_point(f, z);
  // 1 - J0(x) ~ x^2/4, so the gap to the point value shrinks like eps^2.
  const double d4 = circle_average(f, z, 1e-4) - h, d5 = circle_average(f, z, 1e-5) - h;
  EXPECT_NEAR(d4 / d5, 100.0, 1.0);
  Warnings w;
  EXPECT_NEAR(circle_average(f, z, 1e-6, &w), h, 1e-6);
  EXPECT_FALSE(w.empty());  // cutoff rule is violated at this radius and M
}

TEST(CircleAverage, MatchesQuadratureOverCircle) {
  const auto f = sample_spectral_gff(24, key(9));
  const Point z{0.4, 0.55};
  const double eps = 0.07;
  const int K = 400;
  double q = 0.0;
  for (int i = 0; i < K; ++i) {
    const double t = 2.0 * std::numbers::pi * i / K;
    q += evaluate_point(f, {z.x + eps * std::cos(t), z.y + eps * std::sin(t)});
  }
  EXPECT_NEAR(circle_average(f, z, eps), q / K, 1e-10);
}

TEST(CircleAverage, BoundaryTooClose) {
  try {
    circle_average(zero_field(4), {0.05, 0.5}, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundaryTooClose);
  }
}

TEST(CircleAverage, GridPlanMatchesStencil) {
  const auto f = sample_spectral_gff(256, key(10));
  const Grid g = circle_average_grid(f, 32, 1.0 / 32);
  for (int i = 1; i < 31; i += 7)
    for (int j = 1; j < 31; j += 5)
      EXPECT_NEAR(g(i, j), circle_average(f, cell_center(i, j, 32), 1.0 / 32), 1e-11);
}

TEST(CircleAverage, CovarianceMatchesGreen) {
  const int M = 512;
  const Point x{0.4, 0.5}, y{0.6, 0.55};
  const double eps = 0.05;
  const CircleStencil sx(M, x, eps), sy(M, y, eps);
  std::vector<double> a, b;
  for (int r = 0; r < 10000; ++r) {
    const auto f = sample_spectral_gff(M, key(r));
    a.push_back(sx.apply(f));
    b.push_back(sy.apply(f));
  }
  EXPECT_NEAR(sample_covariance(a, b), green(DomainSpec::square(), x, y), 3.0 * covariance_stderr(a, b));
}

TEST(CircleAverage, ExactVarianceFollowsConformalRadius) {
  const Point z{0.5, 0.5};
  const double logc = std::log(conformal_radius(DomainSpec::square(), z));
  for (int k = 3; k <= 6; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const double v = CircleStencil(cutoff_for_radius(eps), z, eps).variance();
    EXPECT_NEAR(v, std::log(1.0 / eps) + logc, 0.02 * (std::log(1.0 / eps) + logc));
  }
}

TEST(CircleProcess, ZeroFieldAndTimes) {
  const auto p = circle_process(zero_field(16), {0.5, 0.5}, 3.0, 0.25);
  EXPECT_NEAR(p.t0, std::log(2.0), 1e-15);
  for (double v : p.values) EXPECT_EQ(v, 0.0);
  for (std::size_t i = 1; i < p.times.size(); ++i) EXPECT_GT(p.times[i], p.times[i - 1]);
  try {
    circle_process(zero_field(4), {0.5, 0.5}, 0.5, 0.25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundaryTooClose);
  }
}

TEST(Dgff, BoundaryIsZeroAndDeterministic) {
  const auto f = sample_dgff(16, key(1, streams::dgff));
  for (int a = 0; a <= 16; ++a) {
    EXPECT_EQ(f(a, 0), 0.0);
    EXPECT_EQ(f(a, 16), 0.0);
    EXPECT_EQ(f(0, a), 0.0);
    EXPECT_EQ(f(16, a), 0.0);
  }
  EXPECT_EQ(f.values, sample_dgff(16, key(1, streams::dgff)).values);
}

TEST(Dgff, SingleInteriorPoint) {
  EXPECT_DOUBLE_EQ(dgff_covariance(2, {1, 1}, {1, 1}), 0.25);
  RunningStats st, sq;
  std::vector<double> v;
  for (int r = 0; r < 20000; ++r) v.push_back(sample_dgff(2, key(r, streams::dgff))(1, 1));
  for (double x : v) st.add(x * x);
  EXPECT_NEAR(st.mean(), 0.25, 3.0 * st.stderr_mean());
}

TEST(Dgff, CovarianceMatchesDenseInverse) {
  for (int N : {3, 5, 8}) {
    const auto inv = dense_dgff_covariance(N);
    const int m = N - 1;
    for (int p = 0; p < m * m; p += 3)
      for (int q = 0; q < m * m; q += 2) {
        const LatticePoint x{p / m + 1, p % m + 1}, y{q / m + 1, q % m + 1};
        EXPECT_NEAR(dgff_covariance(N, x, y), inv[static_cast<std::size_t>(p) * m * m + q], 1e-12);
      }
  }
}

TEST(Dgff, CovarianceSymmetricAndRejectsBoundary) {
  EXPECT_NEAR(dgff_covariance(12, {3, 4}, {7, 9}), dgff_covariance(12, {7, 9}, {3, 4}), 1e-14);
  try {
    dgff_covariance(8, {0, 3}, {3, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
  }
}

TEST(Dgff, SampleCovarianceSmallGrid) {
  // N = 4: nine interior vertices, 2e4 samples; compare every entry at 4 sigma.
  const int N = 4, R = 20000;
  std::vector<std::vector<double>> v(9, std::vector<double>(R));
  for (int r = 0; r < R; ++r) {
    const auto f = sample_dgff(N, key(r, streams::dgff));
    for (int p = 0; p < 9; ++p) v[p][r] = f(p / 3 + 1, p % 3 + 1);
  }
  for (int p = 0; p < 9; ++p)
    for (int q = p; q < 9; ++q)
      EXPECT_NEAR(sample_covariance(v[p], v[q]), dgff_covariance(N, {p / 3 + 1, p % 3 + 1}, {q / 3 + 1, q % 3 + 1}),
                  4.0 * covariance_stderr(v[p], v[q]));
}

TEST(Dgff, CenterVarianceGrowsLikeLogN) {
  std::vector<double> x, y;
  for (int N : {16, 32, 64, 128}) {
    x.push_back(std::log(double(N)));
    y.push_back(dgff_covariance(N, {N / 2, N / 2}, {N / 2, N / 2}));
  }
  const LineFit fit = line_fit(x, y);
  EXPECT_GT(fit.r_squared, 0.99);
  EXPECT_NEAR(fit.slope, 1.0 / (2.0 * std::numbers::pi), 0.02);
}
