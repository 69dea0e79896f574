#pragma once

#include "critlab/spectral_field.hpp"

namespace critlab {

/// d/dx_axis. Modes at the unmatched Nyquist index of that axis are zeroed.
SpectralField derivative(const SpectralField& f, int axis);

/// Lambda^exponent with Lambda = (-Laplacian)^{1/2}. Exponent 0 is the
/// identity; otherwise the zero mode maps to 0.
SpectralField lambda_power(const SpectralField& f, double exponent);

SpectralField laplacian(const SpectralField& f);

/// Solves Laplacian u = f for mean-zero u; the mean of f is ignored.
SpectralField inverse_laplacian(const SpectralField& f);

VectorField gradient(const SpectralField& f);
SpectralField divergence(const VectorField& v);

/// Row divergence (div A)^i = d_j A^{ij}.
VectorField row_divergence(const TensorField& a);
/// Column divergence (A^T div)^i = d_j A^{ji}.
VectorField column_divergence(const TensorField& a);

/// Leray projection onto divergence-free fields. The zero mode passes through
/// unchanged; modes touching the Nyquist index are dropped since their
/// divergence is not representable consistently.
VectorField leray_project(const VectorField& v);

/// Two-thirds rule: zero every mode with some |k_axis| > M/3.
SpectralField dealias(const SpectralField& f);
void dealias_in_place(SpectralField& f);

/// Pointwise product followed by dealiasing.
SpectralField multiply(const SpectralField& a, const SpectralField& b);

/// v . grad u with the velocity given as samples, dealiased.
SpectralField advect(const std::vector<PhysicalField>& v, const SpectralField& u);

/// Largest |k| carrying a coefficient with magnitude above tol.
double max_wavenumber(const SpectralField& f, double tol = 0.0);
/// Largest per-axis |k_axis| carrying a coefficient above tol.
int max_axis_wavenumber(const SpectralField& f, double tol = 0.0);

class RescaleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Spatial dilation x -> 2^m x: the coefficient at k moves to 2^m k. For m < 0
/// every nonzero coefficient must sit on the 2^{|m|} sublattice. Coefficients
/// below 1e-13 of the largest one are dropped. Amplitude prefactors are the
/// caller's business.
SpectralField rescale(const SpectralField& f, int m);

}  // namespace critlab
