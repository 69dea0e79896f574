#include "critlab/spectral_field.hpp"

#include <algorithm>
#include <cmath>

namespace critlab {

PhysicalField::PhysicalField(GridSpec grid) : grid_(grid), values_(grid.size(), 0.0) {}

PhysicalField::PhysicalField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw GridError("sample array does not match grid shape");
}

PhysicalField PhysicalField::from_function(
    const GridSpec& grid, const std::function<double(const std::array<double, 3>&)>& f) {
  PhysicalField out(grid);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = f(sample_point(grid, n));
  return out;
}

double PhysicalField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double PhysicalField::min() const {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

SpectralField::SpectralField(GridSpec grid) : grid_(grid), coeffs_(grid.size(), Complex{}) {}

SpectralField::SpectralField(GridSpec grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) throw GridError("coefficient array does not match grid shape");
}

SpectralField SpectralField::constant(const GridSpec& grid, double c) {
  SpectralField f(grid);
  f.coeffs_[0] = c;
  return f;
}

bool SpectralField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) { return c == Complex{}; });
}

double SpectralField::hermitian_defect() const {
  const auto& tab = modes(grid_);
  double worst = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const auto& k = tab.k[i];
    const std::size_t j = mode_index(grid_, {-k[0], -k[1], -k[2]});
    worst = std::max(worst, std::abs(coeffs_[i] - std::conj(coeffs_[j])));
  }
  return worst;
}

double SpectralField::energy() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return s;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double c) {
  for (auto& v : coeffs_) v *= c;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex c) {
  for (auto& v : coeffs_) v *= c;
  return *this;
}

SpectralField& SpectralField::axpy(double c, const SpectralField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += c * o.coeffs_[i];
  return *this;
}

TensorField::TensorField(const GridSpec& grid)
    : n_(grid.dim), entries_(static_cast<std::size_t>(grid.dim * grid.dim), SpectralField(grid)) {}

VectorField zero_vector(const GridSpec& grid) {
  return VectorField(static_cast<std::size_t>(grid.dim), SpectralField(grid));
}

VectorField& axpy(VectorField& y, double c, const VectorField& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i].axpy(c, x[i]);
  return y;
}

TensorField& axpy(TensorField& y, double c, const TensorField& x) {
  auto ye = y.entries();
  auto xe = x.entries();
  for (std::size_t i = 0; i < ye.size(); ++i) ye[i].axpy(c, xe[i]);
  return y;
}

}  // namespace critlab
