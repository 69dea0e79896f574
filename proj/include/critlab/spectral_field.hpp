#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "critlab/grid.hpp"

namespace critlab {

using Complex = std::complex<double>;

/// Real-valued samples of a scalar field on the grid.
class PhysicalField {
 public:
  PhysicalField() = default;
  explicit PhysicalField(GridSpec grid);
  PhysicalField(GridSpec grid, std::vector<double> values);

  /// Samples f(x) at every grid point.
  static PhysicalField from_function(const GridSpec& grid,
                                     const std::function<double(const std::array<double, 3>&)>& f);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::span<double> values() { return values_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

  [[nodiscard]] double max_abs() const;
  [[nodiscard]] double min() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Fourier coefficients of a real scalar field; coefficient of mode k is the
/// weight of e^{i k.x}.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(GridSpec grid);
  SpectralField(GridSpec grid, std::vector<Complex> coeffs);

  static SpectralField zeros(const GridSpec& grid) { return SpectralField(grid); }
  static SpectralField constant(const GridSpec& grid, double c);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::span<Complex> coeffs() { return coeffs_; }
  [[nodiscard]] std::span<const Complex> coeffs() const { return coeffs_; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
  [[nodiscard]] std::size_t size() const { return coeffs_.size(); }

  Complex& at(const Wavevector& k) { return coeffs_[mode_index(grid_, k)]; }
  [[nodiscard]] const Complex& at(const Wavevector& k) const {
    return coeffs_[mode_index(grid_, k)];
  }

  [[nodiscard]] double mean() const { return coeffs_.empty() ? 0.0 : coeffs_[0].real(); }
  [[nodiscard]] bool is_zero() const;
  /// Max over modes of |c(k) - conj(c(-k))|.
  [[nodiscard]] double hermitian_defect() const;
  /// Sum of |c(k)|^2 over all modes (Parseval: mean square of the samples).
  [[nodiscard]] double energy() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double c);
  SpectralField& operator*=(Complex c);
  /// this += c * o
  SpectralField& axpy(double c, const SpectralField& o);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double c, SpectralField a) { return a *= c; }
  friend SpectralField operator-(SpectralField a) { return a *= -1.0; }

 private:
  GridSpec grid_;
  std::vector<Complex> coeffs_;
};

/// Components of a vector field, one per axis.
using VectorField = std::vector<SpectralField>;

/// N x N matrix of scalar fields, entry (i, j) stored at i * N + j.
class TensorField {
 public:
  TensorField() = default;
  explicit TensorField(const GridSpec& grid);

  [[nodiscard]] int n() const { return n_; }
  SpectralField& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i * n_ + j)]; }
  [[nodiscard]] const SpectralField& operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i * n_ + j)];
  }
  [[nodiscard]] std::span<SpectralField> entries() { return entries_; }
  [[nodiscard]] std::span<const SpectralField> entries() const { return entries_; }

 private:
  int n_ = 0;
  std::vector<SpectralField> entries_;
};

VectorField zero_vector(const GridSpec& grid);

VectorField& axpy(VectorField& y, double c, const VectorField& x);
TensorField& axpy(TensorField& y, double c, const TensorField& x);

}  // namespace critlab
