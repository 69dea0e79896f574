#include "critlab/random_fields.hpp"

#include <cmath>

#include "critlab/norms.hpp"
#include "critlab/operators.hpp"

namespace critlab {

SpectralField random_field(const GridSpec& grid, const RandomSpectrum& spectrum, Rng& rng) {
  const auto& tab = modes(grid);
  const int cut = grid.dealias_cutoff();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Complex> raw(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    const double kn = tab.norm[i];
    if (i == 0 || kn < spectrum.k_min || kn > spectrum.k_max || tab.has_nyquist[i]) continue;
    bool inside = true;
    for (int d = 0; d < grid.dim; ++d) inside = inside && std::abs(tab.k[i][d]) <= cut;
    if (!inside) continue;
    raw[i] = Complex(re, im) * std::pow(kn, -spectrum.decay);
  }
  SpectralField out(grid);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto& k = tab.k[i];
    const std::size_t j = mode_index(grid, {-k[0], -k[1], -k[2]});
    out[i] = 0.5 * (raw[i] + std::conj(raw[j]));
  }
  return out;
}

VectorField random_vector_field(const GridSpec& grid, const RandomSpectrum& spectrum, Rng& rng) {
  VectorField v;
  for (int d = 0; d < grid.dim; ++d) v.push_back(random_field(grid, spectrum, rng));
  return v;
}

VectorField random_solenoidal_field(const GridSpec& grid, const RandomSpectrum& spectrum, Rng& rng) {
  return leray_project(random_vector_field(grid, spectrum, rng));
}

void scale_to_sup(SpectralField& f, double amplitude) {
  const double m = lp_norm(f, Exponent::infinity());
  if (m > 0.0) f *= amplitude / m;
}

void scale_to_sup(VectorField& v, double amplitude) {
  const double m = lp_norm(v, Exponent::infinity());
  if (m == 0.0) return;
  for (auto& c : v) c *= amplitude / m;
}

}  // namespace critlab
