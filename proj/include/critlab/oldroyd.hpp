#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "critlab/linear_solvers.hpp"
#include "critlab/norms.hpp"
#include "critlab/random_fields.hpp"

namespace critlab {

/// sigma = 1/rho - 1, velocity v (divergence-free), H = U - I, and the
/// diagnostic pressure gradient.
struct FluidState {
  SpectralField sigma;
  VectorField velocity;
  TensorField H;
  VectorField pressure_grad;

  [[nodiscard]] const GridSpec& grid() const { return sigma.grid(); }
  static FluidState zeros(const GridSpec& grid);
};

struct PhysicalParams {
  double mu = 1.0;
  /// Lower bound enforced on sigma + 1 = 1/rho.
  double sigma_floor = 0.1;

  void validate() const;
};

class DensityFloorError : public SolverError {
 public:
  using SolverError::SolverError;
};

class InitialDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// L^2 norms of the constraint residuals. All products are dealiased.
struct ConstraintResiduals {
  double divergence = 0.0;
  /// d_j(rho U^{ji}), the row-divergence reading of div(rho U^T).
  double density_flux = 0.0;
  /// d_j(rho U^{ij}), the column-divergence reading, reported alongside.
  double density_flux_column = 0.0;
  /// U^{lk} d_l U^{ij} - U^{lj} d_l U^{ik} with U = I + H.
  double deformation_gradient = 0.0;
  /// d_k H^{ij} - d_j H^{ik} - (H^{lj} d_l H^{ik} - H^{lk} d_l H^{ij}).
  double perturbation_identity = 0.0;
};

ConstraintResiduals constraint_residuals(const FluidState& s);

/// Fields of the compatibility defects behind the last two residuals,
/// entry [(i * N + j) * N + k].
std::vector<SpectralField> deformation_defect(const TensorField& H);
std::vector<SpectralField> perturbation_defect(const TensorField& H);

enum class InitialFamily { exact_gradient, general };

InitialFamily parse_family(const std::string& name);
std::string to_string(InitialFamily f);

struct InitialDataReport {
  ConstraintResiduals residuals;
};

/// Random compatible data. exact_gradient: sigma = 0, v Leray-projected,
/// H = grad w with w divergence-free. general: sigma random as well, and the
/// density-flux constraint restored by a Poisson correction
///   H^{ji} = d_i w^j + (sigma + 1) d_j psi_i,  Laplacian psi_i = -d_i rho - d_j(rho d_i w^j).
/// Amplitude is the critical norm of each random field: B^{N/2}_{2,1} for sigma
/// and H (the gradient part in the general family), B^{N/2-1}_{2,1} for v. The
/// band is [1, spectrum_k_max], default M/8.
std::pair<FluidState, InitialDataReport> make_initial_data(InitialFamily family, double amplitude, std::uint64_t seed,
                                                           const GridSpec& grid,
                                                           std::optional<double> spectrum_k_max = std::nullopt);

/// Checks user-supplied data: v solenoidal and the density-flux residual within
/// tol (relative to max(1, ||H||_2)); throws InitialDataError otherwise.
std::pair<FluidState, InitialDataReport> assemble_initial_data(SpectralField sigma, VectorField velocity,
                                                               TensorField H, double tol = 1e-10);

/// G^i = -v.grad v^i + mu sigma Laplacian v^i + d_k H^{ik} + H^{jk} d_j H^{ik}.
VectorField momentum_forcing(const FluidState& s, const PhysicalParams& params);

/// grad P from div((sigma + 1) grad P) = div G, G the momentum forcing.
VectorField compute_pressure(const FluidState& s, const PhysicalParams& params,
                             const std::optional<SpectralField>& warm_start = std::nullopt);

/// One integrating-factor RK4 step of the full system with the pressure solved
/// at every stage and a final Leray projection. The returned state carries its
/// pressure gradient.
FluidState step(const FluidState& s, const PhysicalParams& params, double dt);

/// Per-run norm request; field is one of sigma, v, H, grad_p.
struct NormRequest {
  std::string name;
  std::string field;
  BesovSpec spec;
  /// When set, the hybrid norm with this weight and (s, r) replaces the Besov norm.
  std::optional<double> hybrid_weight;
};

struct RunRecord;

struct RunMonitors {
  std::vector<NormRequest> norms;
  bool keep_states = false;
  /// Called after every save with the record so far and the saved state.
  std::function<void(const RunRecord&, const FluidState&)> on_save;
};

struct RunRecord {
  std::vector<double> times;
  std::vector<FluidState> states;
  /// Block L^2 norms per saved time.
  NormSeries sigma_series;
  NormSeries velocity_series;
  NormSeries H_series;
  NormSeries pressure_series;
  /// values[request][sample]
  std::vector<std::vector<double>> norm_values;
  std::vector<ConstraintResiduals> residuals;
  std::vector<double> min_density_factor;
  FluidState final;
};

RunRecord run(const FluidState& s0, const PhysicalParams& params, const TimeGrid& tg, const RunMonitors& monitors = {});

/// d^{ij} = -Lambda^{-1} d_j v^i, carried with sigma and H.
struct CoupledForm {
  SpectralField sigma;
  TensorField d;
  TensorField H;
};

/// Throws std::invalid_argument when v has a nonzero mean.
CoupledForm to_coupled(const FluidState& s);
/// v^i = Lambda^{-1} d_j d^{ij}.
FluidState from_coupled(const CoupledForm& c);

/// Right side G of the d equation in the coupled form.
TensorField coupled_forcing(const FluidState& s, const PhysicalParams& params);

/// Evolves (sigma, d, H) in the coupled form and maps back at every save.
RunRecord run_coupled(const FluidState& s0, const PhysicalParams& params, const TimeGrid& tg,
                      const RunMonitors& monitors = {});

/// Thresholds of the admissible set monitored along the Phi iteration.
struct AdmissibleSetSpec {
  double R = 0.5;
  double eta = 0.5;
  double C0E0 = 1.0;
  double T = 1.0;

  void validate() const;
};

struct AdmissibleReport {
  double sigma_sup = 0.0;      // ||sigma||_{L~inf(B^{s})}
  double velocity_decay = 0.0;  // ||v||_{L~1(B^{s+1})} + ||v||_{L~2(B^{s})}
  double energy = 0.0;         // ||v||_{L~inf(B^{s-1})} + ||H||_{L~inf(B^{s})}
  bool sigma_ok = false;
  bool velocity_ok = false;
  bool energy_ok = false;
};

struct PhiResult {
  /// Fixed-point trajectory at every step.
  std::vector<double> times;
  std::vector<FluidState> trajectory;
  /// distances[n]: sampled-sup Chemin-Lerner distance between iterates n and n + 1.
  std::vector<double> distances;
  std::vector<AdmissibleReport> admissible;
  int iterations = 0;
  std::vector<std::string> warnings;
};

class PhiConvergenceError : public ConvergenceError {
 public:
  PhiConvergenceError(const std::string& what, std::vector<double> distances)
      : ConvergenceError(what, distances.empty() ? 0.0 : distances.back()), distances_(std::move(distances)) {}
  [[nodiscard]] const std::vector<double>& distances() const { return distances_; }

 private:
  std::vector<double> distances_;
};

/// Outer fixed-point iteration of the linearization map, started from the free
/// evolution of the data (sigma, H constant, v under the heat semigroup). Frozen coefficients are interpolated at
/// half steps with cubic Lagrange polynomials.
PhiResult phi_iteration(const FluidState& s0, const PhysicalParams& params, const TimeGrid& tg, int max_outer,
                        double tol, const AdmissibleSetSpec& admissible = {});

/// Bundle layout used by the steppers: [sigma, v_0..v_{N-1}, H_00..H_{N-1,N-1}].
FieldBundle pack(const FluidState& s);
FluidState unpack(const FieldBundle& b, const GridSpec& grid);

/// Sum over fields of L^2 norms of the differences (sigma, v, H).
double l2_distance(const FluidState& a, const FluidState& b);
double l2_size(const FluidState& a);

}  // namespace critlab
