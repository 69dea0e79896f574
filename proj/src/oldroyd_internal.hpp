#pragma once

#include <optional>
#include <span>

#include "critlab/oldroyd.hpp"

namespace critlab::detail {

SpectralField to_spectral(const PhysicalField& p);
std::vector<PhysicalField> to_physical(std::span<const SpectralField> fields);
/// Samples of sigma + 1.
PhysicalField density_factor(const SpectralField& sigma);
/// rho = 1 / (sigma + 1), dealiased.
SpectralField density(const SpectralField& sigma);

/// Everything in the right side that depends only on the coefficient state:
/// the transporting velocity, G - (sigma + 1) grad P, and d_k v^i (H^{kj} + delta^{kj}).
struct FrozenTerms {
  std::vector<PhysicalField> velocity;
  VectorField velocity_forcing;
  VectorField pressure_grad;
  TensorField H_forcing;
};

FrozenTerms frozen_terms(const FluidState& c, const PhysicalParams& params, double dt,
                         std::optional<SpectralField>& warm);

/// Right side for the packed unknowns u advected by the frozen velocity.
FieldBundle transport_rhs(const FrozenTerms& f, const FieldBundle& u, const GridSpec& g);

/// Leray projection of the velocity slots and the density floor check.
void finish_step(FieldBundle& u, const GridSpec& g, const PhysicalParams& params);

std::vector<double> diffusivities(const GridSpec& g, double mu);

class Recorder {
 public:
  Recorder(const GridSpec& g, const RunMonitors& m);
  void save(double t, const FluidState& s);
  RunRecord finish(FluidState final);

 private:
  RunMonitors monitors_;
  RunRecord record_;
};

}  // namespace critlab::detail
