#pragma once

#include "critlab/spectral_field.hpp"

namespace critlab {

/// Forward transform normalized so that e^{i k.x} maps to coefficient 1 at k.
SpectralField forward_transform(const PhysicalField& samples);

/// Inverse transform; returns the real part of the synthesized samples.
PhysicalField inverse_transform(const SpectralField& field);

}  // namespace critlab
