#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "critlab/spectral_field.hpp"

namespace critlab {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CflError : public SolverError {
 public:
  using SolverError::SolverError;
};

class NonSolenoidalError : public SolverError {
 public:
  using SolverError::SolverError;
};

class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, double residual) : SolverError(what), residual_(residual) {}
  [[nodiscard]] double residual() const { return residual_; }

 private:
  double residual_;
};

class TimeGridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform time stepping on [0, t_end]. Step n sits at n * dt exactly, never an
/// accumulated sum.
struct TimeGrid {
  double t_end = 1.0;
  double dt = 1e-3;
  int save_stride = 1;

  /// Throws unless dt > 0, save_stride >= 1 and t_end / dt is an integer to
  /// within one ulp of the quotient.
  void validate() const;
  [[nodiscard]] int steps() const;
  [[nodiscard]] double time(int n) const;
  [[nodiscard]] bool saves(int n) const { return n % save_stride == 0 || n == steps(); }
  /// Same grid with the step halved (stride doubled so saves stay aligned).
  [[nodiscard]] TimeGrid refined() const;

  /// Largest dt <= dt_max that divides t_end evenly.
  static TimeGrid fitted(double t_end, double dt_max, int save_stride = 1);
};

/// Flat list of scalar components advanced together (same type as
/// VectorField, so its axpy applies).
using FieldBundle = std::vector<SpectralField>;

/// Integrating-factor (Lawson) 4-stage Runge-Kutta. Component c carries the
/// stiff part diffusivity[c] * Laplacian, applied exactly per mode; the rest of
/// the right side is explicit.
class IfRk4 {
 public:
  using Rhs = std::function<FieldBundle(const FieldBundle&, double)>;

  IfRk4(const GridSpec& grid, std::vector<double> diffusivity, double dt);

  [[nodiscard]] FieldBundle step(const FieldBundle& u, double t, const Rhs& rhs) const;
  [[nodiscard]] double dt() const { return dt_; }

 private:
  /// u -> e^{mu Laplacian fraction dt} u on every diffusive component.
  void apply_factor(FieldBundle& u, bool half) const;

  GridSpec grid_;
  std::vector<double> diffusivity_;
  double dt_;
  // Multiplier tables keyed by diffusivity, full and half step.
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> factors_;
};

/// Velocity as samples; magnitudes are pointwise Euclidean.
std::vector<PhysicalField> to_physical(const VectorField& v);
double max_speed(const std::vector<PhysicalField>& v);

/// dt * max|v| * M/3 <= 1, else CflError.
void check_cfl(const std::vector<PhysicalField>& v, double dt);

/// L^2 coefficient norm of div v relative to max(1, |k|_max ||v||); throws
/// NonSolenoidalError above tol.
double divergence_residual(const VectorField& v);
void check_solenoidal(const VectorField& v, double tol = 1e-10);

}  // namespace critlab
