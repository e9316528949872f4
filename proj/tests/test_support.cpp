#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "lqg/io.hpp"
#include "lqg/parallel.hpp"
#include "lqg/rng.hpp"
#include "lqg/sine_transform.hpp"
#include "lqg/stats.hpp"

using namespace lqg;

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a(SeedRecord{1, 2, 3}), b(SeedRecord{1, 2, 3}), c(SeedRecord{1, 3, 2});
  for (int i = 0; i < 10; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    EXPECT_NE(x, c.normal());
  }
}

TEST(Stats, RunningStatsAndFits) {
  RunningStats st;
  for (double v : {1.0, 2.0, 3.0, 4.0}) st.add(v);
  EXPECT_DOUBLE_EQ(st.mean(), 2.5);
  EXPECT_DOUBLE_EQ(st.variance(), 5.0 / 3.0);
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = line_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8};
  EXPECT_NEAR(sample_covariance(a, b), 2.0 * st.variance(), 1e-14);
}

TEST(Parallel, ResultsIndependentOfThreads) {
  std::vector<double> one(1000), four(1000);
  parallel_for(1000, 1, [&](std::size_t i) { one[i] = Rng(SeedRecord{5, i, 1}).normal(); });
  parallel_for(1000, 4, [&](std::size_t i) { four[i] = Rng(SeedRecord{5, i, 1}).normal(); });
  EXPECT_EQ(one, four);
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) { if (i == 7) fail(ErrorCode::InvalidArgument, "x"); }), Error);
}

TEST(SineTransform, Dst3MatchesDirectSum) {
  const int n = 8;
  std::vector<double> c(n * n);
  for (int i = 0; i < n * n; ++i) c[i] = std::sin(1.7 * i + 0.3);
  auto data = c;
  detail::dst3_2d(data, n);
  // FFTW RODFT01: Y_k = (-1)^k X_{n-1} + 2 sum_{j<n-1} X_j sin(pi (j+1)(k+1/2)/n), per axis.
  auto one_d = [&](int j, int k) {
    return j == n - 1 ? ((k % 2) ? -1.0 : 1.0) : 2.0 * std::sin(std::numbers::pi * (j + 1) * (k + 0.5) / n);
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s += c[j * n + k] * one_d(j, a) * one_d(k, b);
      EXPECT_NEAR(data[a * n + b], s, 1e-11);
    }
}

TEST(Io, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, AtomicWriteAndBinaryRoundTrip) {
  const fs::path dir = fs::temp_directory_path() / "lqg-io-test";
  fs::create_directories(dir);
  const std::vector<double> v{1.5, -2.25, 3e-300};
  write_binary_grid(dir / "g.bin", v);
  EXPECT_EQ(read_binary_grid(dir / "g.bin"), v);
  EXPECT_FALSE(fs::exists(dir / "g.bin.tmp"));
  EXPECT_EQ(fs::file_size(dir / "g.bin"), 24u);
  fs::remove_all(dir);
}

TEST(Io, GrayscaleMapping) {
  EXPECT_EQ(gray_level(128.0), 128);
  EXPECT_EQ(gray_level(-5.0), 0);
  EXPECT_EQ(gray_level(400.0), 255);
  // 2 x 2 field: top image row is the largest y.
  const std::vector<double> f{0.0, 1.0, -1.0, 4.0};  // (i,j): (0,0)=0 (0,1)=1 (1,0)=-1 (1,1)=4
  const std::string pgm = field_pgm(f, 2);
  const std::string header = "P5\n2 2\n255\n";
  ASSERT_EQ(pgm.substr(0, header.size()), header);
  const auto* px = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  EXPECT_EQ(px[0], 160);  // (0,1)
  EXPECT_EQ(px[1], 255);  // (1,1) saturates
  EXPECT_EQ(px[2], 128);  // (0,0)
  EXPECT_EQ(px[3], 96);   // (1,0)
}

TEST(Io, EqualMassSquaresOnLebesgue) {
  GridMeasure m;
  m.resolution = 16;
  m.masses.assign(256, 1.0 / 256);
  m.total = 1.0;
  const auto sq = equal_mass_squares(m, 1.0 / 64);
  EXPECT_EQ(sq.size(), 64u);
  EXPECT_EQ(square_size_variance(sq), 0.0);
  double mass = 0.0;
  for (const auto& s : sq) mass += s.mass;
  EXPECT_NEAR(mass, 1.0, 1e-14);
}

TEST(Io, ExponentCsvHasHeaderAndRows) {
  ExponentFit fit;
  fit.scales.resize(3);
  const auto csv = exponent_csv(fit);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scale,estimate,stderr,n_samples,n_discarded");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
