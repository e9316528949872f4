#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "kpz.hpp"
#include "liouville.hpp"

#ifndef LQG_VERSION
#define LQG_VERSION "0.0.0"
#endif

namespace lqg {

using json = nlohmann::json;

inline constexpr const char* code_version = LQG_VERSION;

namespace fs = std::filesystem;

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  require(ctx != nullptr, ErrorCode::IoError, "cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  require(ok, ErrorCode::IoError, "SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

/// Writes through a temporary file and a rename, so readers never see a partial file.
inline void write_file_atomic(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(bool(out), ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    require(bool(out), ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  require(!ec, ErrorCode::IoError, "cannot rename onto " + path.string());
}

inline void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

/// Raw float64 little-endian values, row-major.
inline void write_binary_grid(const fs::path& path, const std::vector<double>& values) {
  static_assert(std::endian::native == std::endian::little, "binary grids assume a little-endian host");
  std::string bytes(values.size() * sizeof(double), '\0');
  std::memcpy(bytes.data(), values.data(), bytes.size());
  write_file_atomic(path, bytes);
}

inline std::vector<double> read_binary_grid(const fs::path& path) {
  const std::string bytes = read_file(path);
  require(bytes.size() % sizeof(double) == 0, ErrorCode::IoError, "binary grid size is not a multiple of 8");
  std::vector<double> v(bytes.size() / sizeof(double));
  std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

inline json seed_json(const SeedRecord& s) {
  return {{"seed", s.seed}, {"replicate", s.replicate}, {"stream", s.stream}};
}

// Pixel rows run from top (largest y) to bottom, columns along x.
inline std::string pgm_bytes(int width, int height, const std::vector<unsigned char>& gray) {
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(gray.data()), gray.size());
  return out;
}

inline unsigned char gray_level(double v) {
  return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
}

/// Field values: gray = 128 + 32 v, clamped, so 0 is mid-gray and +-4 saturate.
/// `values[i*side + j]` is the value at x-index i, y-index j.
inline std::string field_pgm(const std::vector<double>& values, int side) {
  std::vector<unsigned char> g(static_cast<std::size_t>(side) * side);
  for (int row = 0; row < side; ++row)
    for (int i = 0; i < side; ++i)
      g[static_cast<std::size_t>(row) * side + i] =
          gray_level(128.0 + 32.0 * values[static_cast<std::size_t>(i) * side + (side - 1 - row)]);
  return pgm_bytes(side, side, g);
}

/// Cell masses: gray = 128 + 32 log2(mass * n^2), clamped; Lebesgue cells are mid-gray.
inline std::string log_mass_pgm(const GridMeasure& m) {
  const int n = m.resolution;
  std::vector<double> v(m.masses.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::log2(m.masses[k] * double(n) * n);
  return field_pgm(v, n);
}

struct DyadicSquare {
  double x0, y0, side;
  double mass;
};

/// Dyadic squares split until each carries mass <= delta (or is a single cell).
inline std::vector<DyadicSquare> equal_mass_squares(const GridMeasure& m, double delta) {
  const int n = m.resolution;
  require(delta > 0.0, ErrorCode::DeltaOutOfRange, "delta must be positive");
  std::vector<double> prefix(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  auto P = [&](int i, int j) -> double& { return prefix[static_cast<std::size_t>(i) * (n + 1) + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i + 1, j + 1) = m.mass(i, j) + P(i, j + 1) + P(i + 1, j) - P(i, j);
  std::vector<DyadicSquare> out;
  std::vector<std::array<int, 3>> stack{{0, 0, n}};
  while (!stack.empty()) {
    auto [i, j, s] = stack.back();
    stack.pop_back();
    const double mass = P(i + s, j + s) - P(i, j + s) - P(i + s, j) + P(i, j);
    if (mass <= delta || s == 1) {
      out.push_back({double(i) / n, double(j) / n, double(s) / n, mass});
      continue;
    }
    const int h = s / 2;
    stack.push_back({i + h, j + h, h});
    stack.push_back({i, j + h, h});
    stack.push_back({i + h, j, h});
    stack.push_back({i, j, h});
  }
  return out;
}

/// Variance of log2(side) over the squares: how uneven the decomposition is.
inline double square_size_variance(const std::vector<DyadicSquare>& squares) {
  RunningStats st;
  for (const auto& s : squares) st.add(std::log2(s.side));
  return st.variance();
}

inline std::string squares_svg(const std::vector<DyadicSquare>& squares, int pixels) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels
      << "\" viewBox=\"0 0 1 1\">\n";
  out << "<g fill=\"none\" stroke=\"red\" stroke-width=\"0.001\">\n";
  char buf[160];
  for (const auto& s : squares) {
    std::snprintf(buf, sizeof buf, "<rect x=\"%.9g\" y=\"%.9g\" width=\"%.9g\" height=\"%.9g\"/>\n", s.x0,
                  1.0 - s.y0 - s.side, s.side, s.side);
    out << buf;
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string exponent_csv(const ExponentFit& fit) {
  std::string out = "scale,estimate,stderr,n_samples,n_discarded\n";
  for (const auto& s : fit.scales)
    out += format_double(s.scale) + "," + format_double(s.estimate) + "," + format_double(s.estimate_stderr) + "," +
           std::to_string(s.n_samples) + "," + std::to_string(s.n_discarded) + "\n";
  return out;
}

inline json exponent_summary(const ExponentFit& fit, const json& config) {
  return {{"slope", fit.slope},
          {"stderr", fit.slope_stderr},
          {"intercept", fit.intercept},
          {"scales", fit.scales.size()},
          {"config_hash", sha256_hex(config.dump())}};
}

}  // namespace lqg
