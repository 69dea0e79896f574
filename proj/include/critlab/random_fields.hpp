#pragma once

#include <random>

#include "critlab/spectral_field.hpp"

namespace critlab {

/// Radial band and power-law decay for random field generation.
struct RandomSpectrum {
  double k_min = 1.0;
  double k_max = 4.0;
  /// Coefficient magnitude scales as |k|^{-decay}.
  double decay = 1.0;
};

using Rng = std::mt19937_64;

/// Mean-zero real field with complex Gaussian coefficients on
/// k_min <= |k| <= k_max, kept below the dealiasing cutoff and off the Nyquist
/// index. The draw order is the mode order, so a seed fixes the field.
SpectralField random_field(const GridSpec& grid, const RandomSpectrum& spectrum, Rng& rng);

VectorField random_vector_field(const GridSpec& grid, const RandomSpectrum& spectrum, Rng& rng);

/// Leray-projected random vector field.
VectorField random_solenoidal_field(const GridSpec& grid, const RandomSpectrum& spectrum, Rng& rng);

/// Rescales so the largest pointwise magnitude equals amplitude (no-op on zero).
void scale_to_sup(SpectralField& f, double amplitude);
void scale_to_sup(VectorField& v, double amplitude);

}  // namespace critlab
