#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "lqg/geometry.hpp"

using namespace lqg;

namespace {

const DomainSpec sq = DomainSpec::square();
const DomainSpec disc = DomainSpec::disc();

// Plain truncated double sine series, used only as a slow independent reference.
double double_sine_series(Point x, Point y, int M) {
  const double pi = std::numbers::pi;
  double sum = 0.0;
  for (int j = 1; j <= M; ++j) {
    const double sj = std::sin(j * pi * x.x) * std::sin(j * pi * y.x);
    for (int k = 1; k <= M; ++k)
      sum += 8.0 / (pi * (j * j + k * k)) * sj * std::sin(k * pi * x.y) * std::sin(k * pi * y.y);
  }
  return sum;
}

Point random_interior(std::mt19937_64& eng, const DomainSpec& d, double margin) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Point p = d.kind == DomainKind::UnitSquare ? Point{0.5 + 0.5 * u(eng), 0.5 + 0.5 * u(eng)} : Point{u(eng), u(eng)};
    if (d.contains(p) && d.distance_to_boundary(p) >= margin) return p;
  }
}

}  // namespace

TEST(Green, DiscOriginIsLogInverseRadius) {
  EXPECT_NEAR(green(disc, {0, 0}, {0.5, 0}), std::log(2.0), 1e-14);
}

TEST(Green, RejectsBadPoints) {
  EXPECT_THROW(green(sq, {0.3, 0.3}, {0.3, 0.3}), Error);
  EXPECT_THROW(green(sq, {0.0, 0.3}, {0.3, 0.3}), Error);
  EXPECT_THROW(green(disc, {1.0, 0.0}, {0.3, 0.3}), Error);
  try {
    green(sq, {0.3, 0.3}, {0.3, 0.3});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CoincidentPoints);
  }
  try {
    green(sq, {1.2, 0.3}, {0.3, 0.3});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
  }
}

TEST(Green, SquareSeriesMatchesReflectionSum) {
  std::mt19937_64 eng(7);
  for (int i = 0; i < 50; ++i) {
    const Point x = random_interior(eng, sq, 0.02), y = random_interior(eng, sq, 0.02);
    EXPECT_NEAR(green(sq, x, y), green(sq, x, y, {2000, GreenMethod::Images}), 1e-10);
  }
}

TEST(Green, SquareCenterReferenceValue) {
  // Plain double series at two cutoffs and their 1/M extrapolation against the fast evaluator.
  const Point x{0.5, 0.5}, y{0.5, 0.55};
  const double g1 = double_sine_series(x, y, 1000), g2 = double_sine_series(x, y, 2000);
  const double richardson = 2.0 * g2 - g1;
  EXPECT_NEAR(green(sq, x, y), 2.378339142531114, 1e-12);
  EXPECT_NEAR(richardson, green(sq, x, y), 1e-4);
  EXPECT_NEAR(g2, green(sq, x, y), 1e-4);
}

TEST(Green, Symmetry) {
  std::mt19937_64 eng(11);
  for (int i = 0; i < 100; ++i) {
    const Point x = random_interior(eng, sq, 0.01), y = random_interior(eng, sq, 0.01);
    EXPECT_NEAR(green(sq, x, y), green(sq, y, x), 1e-12);
    const Point a = random_interior(eng, disc, 0.01), b = random_interior(eng, disc, 0.01);
    EXPECT_NEAR(green(disc, a, b), green(disc, b, a), 1e-10);
  }
}

TEST(Green, Positivity) {
  std::mt19937_64 eng(13);
  int tested = 0;
  while (tested < 200) {
    const Point x = random_interior(eng, sq, 0.05), y = random_interior(eng, sq, 0.05);
    if (distance(x, y) > 0.5) continue;
    EXPECT_GT(green(sq, x, y), 0.0);
    ++tested;
  }
}

TEST(Green, DiscConformalInvariance) {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 100; ++i) {
    const Point x = random_interior(eng, disc, 0.05), y = random_interior(eng, disc, 0.05);
    const std::complex<double> a = to_complex(random_interior(eng, disc, 0.2));
    const std::complex<double> rot = std::polar(1.0, angle(eng));
    auto phi = [&](Point p) {
      const auto z = to_complex(p);
      return from_complex(rot * (z - a) / (1.0 - std::conj(a) * z));
    };
    EXPECT_NEAR(green(disc, x, y), green(disc, phi(x), phi(y)), 1e-10);
  }
}

TEST(ConformalRadius, Disc) {
  EXPECT_DOUBLE_EQ(conformal_radius(disc, {0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(conformal_radius(disc, {0.5, 0}), 0.75);
}

TEST(ConformalRadius, SquareCenterAgainstClosedForm) {
  // Schwarz-Christoffel value 4 sqrt(pi) / Gamma(1/4)^2.
  const double exact = 4.0 * std::sqrt(std::numbers::pi) / std::pow(std::tgamma(0.25), 2);
  EXPECT_NEAR(conformal_radius(sq, {0.5, 0.5}), exact, 1e-6);
  EXPECT_NEAR(conformal_radius(sq, {0.5, 0.5}, {GreenMethod::Images}), exact, 1e-12);
}

TEST(ConformalRadius, SquareDiagonalLimit) {
  for (Point x : {Point{0.5, 0.5}, Point{0.45, 0.55}, Point{0.3, 0.6}}) {
    const double lc = std::log(conformal_radius(sq, x));
    double mean = 0.0;
    const double h = std::ldexp(1.0, -9);
    for (Point e : {Point{1, 0}, Point{0, 1}, Point{-1, 0}, Point{0, -1}}) mean += green(sq, x, x + h * e) + std::log(h);
    EXPECT_NEAR(mean / 4.0, lc, 1e-3);
  }
}

TEST(ConformalRadius, SquareSymmetries) {
  const double c = conformal_radius(sq, {0.3, 0.2});
  EXPECT_NEAR(conformal_radius(sq, {0.2, 0.3}), c, 1e-9);
  EXPECT_NEAR(conformal_radius(sq, {0.7, 0.8}), c, 1e-9);
  EXPECT_NEAR(conformal_radius(sq, {0.3, 0.8}), c, 1e-9);
}

TEST(GreenRegularized, DiscCases) {
  EXPECT_NEAR(green_regularized(disc, {0, 0}, {0.4, 0.3}, 0.1), std::log(2.0), 1e-14);
  EXPECT_NEAR(green_regularized(disc, {0, 0}, {0, 0}, 0.1), std::log(10.0), 1e-14);
}

TEST(GreenRegularized, SquareCenterAtItself) {
  const double eps = std::ldexp(1.0, -5);
  const Point c{0.5, 0.5};
  EXPECT_NEAR(green_regularized(sq, c, c, eps), std::log(32.0) + std::log(conformal_radius(sq, c)), 1e-6);
}

TEST(GreenRegularized, AgreesWithGreenOutsideEps) {
  std::mt19937_64 eng(19);
  for (int i = 0; i < 50; ++i) {
    const Point x = random_interior(eng, sq, 0.1), y = random_interior(eng, sq, 0.01);
    const double eps = 0.05;
    if (distance(x, y) < eps) continue;
    EXPECT_EQ(green_regularized(sq, x, y, eps), green(sq, x, y));
  }
}

TEST(GreenRegularized, ContinuousAcrossEps) {
  const Point x{0.4, 0.45};
  const double eps = 0.03;
  const double inside = green_regularized(sq, x, x + (eps * (1 - 1e-9)) * Point{1, 0}, eps);
  const double outside = green_regularized(sq, x, x + (eps * (1 + 1e-9)) * Point{1, 0}, eps);
  EXPECT_NEAR(inside, outside, 1e-7);
}

TEST(GreenRegularized, BoundaryTooClose) {
  try {
    green_regularized(sq, {0.02, 0.5}, {0.5, 0.5}, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundaryTooClose);
  }
}

TEST(SphereGreen, Values) {
  EXPECT_NEAR(sphere_green(std::numbers::pi / 2), 0.0, 1e-15);
  EXPECT_NEAR(sphere_green(2.0 * std::atan(std::exp(-1.0))), 1.0, 1e-14);
  const double t = 1e-3;
  EXPECT_NEAR(sphere_green(t), std::log(2.0 / t), 1e-5);
  EXPECT_THROW(sphere_green(0.0), Error);
  EXPECT_THROW(sphere_green(std::numbers::pi), Error);
}
