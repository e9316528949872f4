#pragma once

#include <cmath>
#include <complex>

namespace lqg {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline std::complex<double> to_complex(Point p) { return {p.x, p.y}; }
inline Point from_complex(std::complex<double> z) { return {z.real(), z.imag()}; }

/// Center of cell (i, j) of an n x n partition of the unit square; i indexes x.
inline Point cell_center(int i, int j, int n) {
  return {(i + 0.5) / n, (j + 0.5) / n};
}

}  // namespace lqg
