#include "critlab/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace critlab {

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(points_per_axis);
  return n;
}

double GridSpec::cell_volume() const {
  return std::pow(2.0 * std::numbers::pi / points_per_axis, dim);
}

double GridSpec::domain_volume() const {
  return std::pow(2.0 * std::numbers::pi, dim);
}

double GridSpec::retained_radius() const {
  return 0.75 * std::ldexp(1.0, q_max + 1);
}

GridSpec make_grid(int dim, int points_per_axis) {
  if (dim != 2 && dim != 3) {
    throw GridError("grid dimension must be 2 or 3, got " + std::to_string(dim));
  }
  const int m = points_per_axis;
  if (m < 16 || (m & (m - 1)) != 0) {
    throw GridError("points per axis must be a power of two >= 16, got " +
                    std::to_string(m));
  }
  GridSpec g;
  g.dim = dim;
  g.points_per_axis = m;
  g.q_min = 0;
  // Largest q with 8/3 * 2^q <= M/3, i.e. 2^q <= M/8.
  int q = 0;
  while ((8 << (q + 1)) <= m) ++q;
  g.q_max = q;
  return g;
}

namespace {

ModeTable build_table(const GridSpec& g) {
  ModeTable t;
  const std::size_t n = g.size();
  const int m = g.points_per_axis;
  t.k.resize(n);
  t.norm.resize(n);
  t.norm_sq.resize(n);
  t.has_nyquist.resize(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    Wavevector k{0, 0, 0};
    std::size_t rem = idx;
    bool nyq = false;
    for (int d = g.dim - 1; d >= 0; --d) {
      const int j = static_cast<int>(rem % m);
      rem /= m;
      k[d] = j < m / 2 ? j : j - m;
      nyq = nyq || (k[d] == -m / 2);
    }
    double s = 0.0;
    for (int d = 0; d < g.dim; ++d) s += double(k[d]) * k[d];
    t.k[idx] = k;
    t.norm_sq[idx] = s;
    t.norm[idx] = std::sqrt(s);
    t.has_nyquist[idx] = nyq;
  }
  return t;
}

}  // namespace

const ModeTable& modes(const GridSpec& grid) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<ModeTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{grid.dim, grid.points_per_axis}];
  if (!slot) slot = std::make_unique<ModeTable>(build_table(grid));
  return *slot;
}

std::size_t mode_index(const GridSpec& grid, const Wavevector& k) {
  const int m = grid.points_per_axis;
  std::size_t idx = 0;
  for (int d = 0; d < grid.dim; ++d) {
    const int j = ((k[d] % m) + m) % m;
    idx = idx * m + static_cast<std::size_t>(j);
  }
  return idx;
}

std::array<double, 3> sample_point(const GridSpec& grid, std::size_t n) {
  const int m = grid.points_per_axis;
  const double h = 2.0 * std::numbers::pi / m;
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int d = grid.dim - 1; d >= 0; --d) {
    x[d] = h * static_cast<double>(n % m);
    n /= m;
  }
  return x;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw GridError("fields live on different grids");
}

}  // namespace critlab
