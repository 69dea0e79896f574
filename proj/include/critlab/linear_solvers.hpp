#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "critlab/norms.hpp"
#include "critlab/stepping.hpp"

namespace critlab {

/// Time-dependent fields supplied as callbacks evaluated at stage times. An
/// empty callback stands for zero.
using VelocityFn = std::function<VectorField(double)>;
using ForcingFn = std::function<SpectralField(double)>;
using BundleForcingFn = std::function<FieldBundle(double)>;

struct RunOptions {
  /// Integrability of the recorded block norms.
  Exponent series_p = 2.0;
  bool keep_snapshots = true;
};

struct ScalarRun {
  SpectralField final;
  NormSeries series;
  std::vector<double> times;
  std::vector<SpectralField> saved;
};

/// u_t + v.grad u = g. Throws CflError, NonSolenoidalError, or
/// std::invalid_argument when u0 has content past the dealiasing cutoff.
ScalarRun solve_transport(const SpectralField& u0, const VelocityFn& velocity, const ForcingFn& forcing,
                          const TimeGrid& tg, const RunOptions& opts = {});

/// u_t - mu Laplacian u = f, with the heat multiplier applied exactly per mode.
ScalarRun solve_heat(const SpectralField& u0, const ForcingFn& forcing, double mu, const TimeGrid& tg,
                     const RunOptions& opts = {});

struct PoissonOptions {
  double tol = 1e-12;
  int max_iter = 200;
  std::optional<SpectralField> initial_guess;
};

struct PoissonResult {
  SpectralField u;
  VectorField grad;
  int iterations = 0;
  /// ||f + div(a grad u)||_2 / ||f||_2 before each update and after the last.
  std::vector<double> residuals;
  /// residuals[n] / residuals[n - 1].
  std::vector<double> contraction;
  /// max |a - mean(a)| / mean(a) on the grid samples.
  double relative_oscillation = 0.0;
};

/// -div(a grad u) = f by mean-preconditioned Richardson iteration. Throws
/// std::invalid_argument when a is not bounded below by a positive constant or
/// f has nonzero mean, ConvergenceError when tol is not met in max_iter steps.
PoissonResult solve_variable_poisson(const SpectralField& a, const SpectralField& f, const PoissonOptions& opts = {});

/// Component-wise pairs (c_k, d_k) of
///   c_t + v.grad c + Lambda d = f,  d_t + v.grad d - mu Laplacian d - Lambda c = g.
struct CoupledState {
  FieldBundle c;
  FieldBundle d;
};

struct CoupledRun {
  CoupledState final;
  NormSeries c_series;
  NormSeries d_series;
  std::vector<double> times;
  std::vector<CoupledState> saved;
};

CoupledRun solve_coupled(const CoupledState& s0, const VelocityFn& velocity, const BundleForcingFn& f,
                         const BundleForcingFn& g, double mu, const TimeGrid& tg, const RunOptions& opts = {});

}  // namespace critlab
