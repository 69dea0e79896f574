#pragma once

#include <vector>

#include "critlab/spectral_field.hpp"

namespace critlab {

/// Smooth radial bump for the homogeneous dyadic partition of unity.
///
/// The raw bump is chi(r/2) - chi(r), where chi is a mollified step equal to 1
/// on [0, 3/4] and 0 on [1, inf). It is supported in [3/4, 2], inside the
/// shell [3/4, 8/3], and equals 1 at r = 1 so each power-of-two radius lives in
/// a single block. The profile is the raw bump divided by its dyadic sum.
class PartitionProfile {
 public:
  static constexpr double shell_lo = 3.0 / 4.0;
  static constexpr double shell_hi = 8.0 / 3.0;

  /// phi(rho); zero outside [3/4, 8/3].
  [[nodiscard]] double operator()(double rho) const;

  /// Sum over q in Z of phi(2^{-q} rho), evaluated over the finitely many
  /// nonzero terms.
  [[nodiscard]] double dyadic_sum(double rho) const;

 private:
  [[nodiscard]] static double raw(double rho);
  [[nodiscard]] static double raw_dyadic_sum(double rho);
};

/// Delta_q f for q in [q_min, q_max], plus the separately tracked mean.
struct DyadicBlocks {
  int q_min = 0;
  int q_max = -1;
  double mean = 0.0;
  std::vector<SpectralField> blocks;

  SpectralField& at(int q) { return blocks.at(static_cast<std::size_t>(q - q_min)); }
  [[nodiscard]] const SpectralField& at(int q) const {
    return blocks.at(static_cast<std::size_t>(q - q_min));
  }
  /// Sum of blocks plus mean.
  [[nodiscard]] SpectralField reconstruct() const;
};

/// Multiplier phi(2^{-q}|k|) for every mode, cached per grid.
const std::vector<double>& block_weights(const GridSpec& grid, int q);

SpectralField dyadic_block(const SpectralField& f, int q);

DyadicBlocks dyadic_decompose(const SpectralField& f, const PartitionProfile& profile = {});

/// S_q f: mean plus the blocks strictly below q.
SpectralField low_freq_cutoff(const SpectralField& f, int q);

/// Fraction of the non-mean energy of f not covered by blocks [q_min, q_max].
double out_of_band_fraction(const SpectralField& f);

}  // namespace critlab
