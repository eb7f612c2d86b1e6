#pragma once

#include <array>
#include <cstddef>
#include <numbers>

#include "contlab/errors.hpp"

namespace contlab {

inline constexpr int kMaxComplexDim = 2;
inline constexpr int kMaxAxes = 2 * kMaxComplexDim;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic grid on the real torus underlying a complex torus of
/// dimension n. Axis order is (x1, y1[, x2, y2]) with z_j = x_j + i y_j;
/// storage is row major with the last axis fastest.
struct GridSpec {
  int n = 1;
  int points_per_axis = 0;
  double period = kTwoPi;

  int axes() const { return 2 * n; }
  double spacing() const { return period / points_per_axis; }

  std::size_t total_nodes() const {
    std::size_t t = 1;
    for (int a = 0; a < axes(); ++a) t *= static_cast<std::size_t>(points_per_axis);
    return t;
  }

  void validate() const {
    if (n < 1 || n > kMaxComplexDim)
      throw Error("grid: complex dimension must be 1 or 2");
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
      throw Error("grid: points_per_axis must be even and >= 8");
    if (!(period > 0)) throw Error("grid: period must be positive");
  }

  bool operator==(const GridSpec&) const = default;
};

/// Default resolutions used by the CLI and fixtures.
inline GridSpec default_grid(int n) {
  GridSpec g;
  g.n = n;
  g.points_per_axis = (n == 1) ? 128 : 16;
  return g;
}

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw Error(std::string(what) + ": grid mismatch");
}

/// Visits nodes in storage order, maintaining the per-axis index vector.
template <class F>
void for_each_node_indexed(const GridSpec& g, F&& fn) {
  const int ax = g.axes();
  const int N = g.points_per_axis;
  std::array<int, kMaxAxes> c{};
  const std::size_t total = g.total_nodes();
  for (std::size_t idx = 0; idx < total; ++idx) {
    fn(idx, c);
    for (int a = ax - 1; a >= 0; --a) {
      if (++c[a] < N) break;
      c[a] = 0;
    }
  }
}

/// Coordinates of a node given its per-axis indices.
inline std::array<double, kMaxAxes> node_coords(const GridSpec& g,
                                                const std::array<int, kMaxAxes>& c) {
  std::array<double, kMaxAxes> x{};
  for (int a = 0; a < g.axes(); ++a) x[a] = c[a] * g.spacing();
  return x;
}

}  // namespace contlab
