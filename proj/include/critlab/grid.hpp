#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

namespace critlab {

/// Uniform grid on the 2pi-periodic torus of dimension 2 or 3.
///
/// Coefficient and sample arrays are row-major over (axis 0, axis 1[, axis 2]),
/// the last axis varying fastest. Frequency index j along an axis maps to the
/// integer wavenumber j for j < M/2 and j - M otherwise, so each axis covers
/// [-M/2, M/2).
struct GridSpec {
  int dim = 2;
  int points_per_axis = 16;
  int q_min = 0;
  int q_max = 0;

  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] double cell_volume() const;
  [[nodiscard]] double domain_volume() const;
  [[nodiscard]] int nyquist() const { return points_per_axis / 2; }
  /// Largest per-axis wavenumber kept by the two-thirds rule.
  [[nodiscard]] int dealias_cutoff() const { return points_per_axis / 3; }
  /// Largest |k| fully partitioned by the blocks [q_min, q_max].
  [[nodiscard]] double retained_radius() const;
  [[nodiscard]] int block_count() const { return q_max - q_min + 1; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

GridSpec make_grid(int dim, int points_per_axis);

/// Integer wavevector (unused trailing entries are 0 in 2D).
using Wavevector = std::array<int, 3>;

/// Cached per-grid table of wavevectors and their norms, indexed like the
/// coefficient arrays.
struct ModeTable {
  std::vector<Wavevector> k;
  std::vector<double> norm;
  std::vector<double> norm_sq;
  /// True when some axis sits at the unmatched Nyquist index -M/2.
  std::vector<bool> has_nyquist;
};

const ModeTable& modes(const GridSpec& grid);

/// Flat index of the mode with wavevector k (entries taken modulo M).
std::size_t mode_index(const GridSpec& grid, const Wavevector& k);

/// Physical coordinates of sample n along every axis.
std::array<double, 3> sample_point(const GridSpec& grid, std::size_t n);

void require_same_grid(const GridSpec& a, const GridSpec& b);

}  // namespace critlab
