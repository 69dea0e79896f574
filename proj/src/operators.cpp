#include "critlab/operators.hpp"

#include <cmath>
#include <string>

#include "critlab/fft.hpp"

namespace critlab {

SpectralField derivative(const SpectralField& f, int axis) {
  const GridSpec& g = f.grid();
  if (axis < 0 || axis >= g.dim) throw std::out_of_range("derivative axis out of range");
  const auto& tab = modes(g);
  SpectralField out(g);
  const int nyq = -g.nyquist();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const int k = tab.k[i][axis];
    if (k == nyq) continue;
    out[i] = Complex(0.0, k) * f[i];
  }
  return out;
}

SpectralField lambda_power(const SpectralField& f, double exponent) {
  if (exponent == 0.0) return f;
  const auto& tab = modes(f.grid());
  SpectralField out(f.grid());
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = std::pow(tab.norm[i], exponent) * f[i];
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const auto& tab = modes(f.grid());
  SpectralField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = -tab.norm_sq[i] * f[i];
  return out;
}

SpectralField inverse_laplacian(const SpectralField& f) {
  const auto& tab = modes(f.grid());
  SpectralField out(f.grid());
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = -f[i] / tab.norm_sq[i];
  return out;
}

VectorField gradient(const SpectralField& f) {
  VectorField out;
  out.reserve(static_cast<std::size_t>(f.grid().dim));
  for (int d = 0; d < f.grid().dim; ++d) out.push_back(derivative(f, d));
  return out;
}

SpectralField divergence(const VectorField& v) {
  if (v.empty()) throw std::invalid_argument("divergence of an empty vector field");
  const GridSpec& g = v.front().grid();
  if (static_cast<int>(v.size()) != g.dim) throw GridError("vector field has wrong component count");
  SpectralField out(g);
  for (int d = 0; d < g.dim; ++d) {
    require_same_grid(g, v[d].grid());
    out += derivative(v[d], d);
  }
  return out;
}

VectorField row_divergence(const TensorField& a) {
  const int n = a.n();
  VectorField out;
  for (int i = 0; i < n; ++i) {
    SpectralField s(a(i, 0).grid());
    for (int j = 0; j < n; ++j) s += derivative(a(i, j), j);
    out.push_back(std::move(s));
  }
  return out;
}

VectorField column_divergence(const TensorField& a) {
  const int n = a.n();
  VectorField out;
  for (int i = 0; i < n; ++i) {
    SpectralField s(a(0, i).grid());
    for (int j = 0; j < n; ++j) s += derivative(a(j, i), j);
    out.push_back(std::move(s));
  }
  return out;
}

VectorField leray_project(const VectorField& v) {
  if (v.empty()) throw std::invalid_argument("projection of an empty vector field");
  const GridSpec& g = v.front().grid();
  const int n = g.dim;
  if (static_cast<int>(v.size()) != n) throw GridError("vector field has wrong component count");
  for (const auto& c : v) require_same_grid(g, c.grid());
  const auto& tab = modes(g);
  VectorField out = zero_vector(g);
  for (int d = 0; d < n; ++d) out[d][0] = v[d][0];
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (tab.has_nyquist[i]) continue;
    const auto& k = tab.k[i];
    Complex kdotv{};
    for (int d = 0; d < n; ++d) kdotv += double(k[d]) * v[d][i];
    kdotv /= tab.norm_sq[i];
    for (int d = 0; d < n; ++d) out[d][i] = v[d][i] - double(k[d]) * kdotv;
  }
  return out;
}

void dealias_in_place(SpectralField& f) {
  const GridSpec& g = f.grid();
  const int cut = g.dealias_cutoff();
  const auto& tab = modes(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (int d = 0; d < g.dim; ++d) {
      if (std::abs(tab.k[i][d]) > cut) {
        f[i] = Complex{};
        break;
      }
    }
  }
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  dealias_in_place(out);
  return out;
}

SpectralField multiply(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid());
  PhysicalField pa = inverse_transform(a);
  const PhysicalField pb = inverse_transform(b);
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  SpectralField out = forward_transform(pa);
  dealias_in_place(out);
  return out;
}

SpectralField advect(const std::vector<PhysicalField>& v, const SpectralField& u) {
  const GridSpec& g = u.grid();
  if (static_cast<int>(v.size()) != g.dim) throw GridError("velocity has wrong component count");
  PhysicalField acc(g);
  for (int d = 0; d < g.dim; ++d) {
    require_same_grid(g, v[d].grid());
    const PhysicalField du = inverse_transform(derivative(u, d));
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[d][i] * du[i];
  }
  SpectralField out = forward_transform(acc);
  dealias_in_place(out);
  return out;
}

double max_wavenumber(const SpectralField& f, double tol) {
  const auto& tab = modes(f.grid());
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f[i]) > tol) m = std::max(m, tab.norm[i]);
  return m;
}

int max_axis_wavenumber(const SpectralField& f, double tol) {
  const GridSpec& g = f.grid();
  const auto& tab = modes(g);
  int m = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) <= tol) continue;
    for (int d = 0; d < g.dim; ++d) m = std::max(m, std::abs(tab.k[i][d]));
  }
  return m;
}

SpectralField rescale(const SpectralField& f, int m) {
  if (m == 0) return f;
  const GridSpec& g = f.grid();
  const auto& tab = modes(g);
  SpectralField out(g);
  const int limit = g.nyquist();
  double biggest = 0.0;
  for (const auto& c : f.coeffs()) biggest = std::max(biggest, std::abs(c));
  // Transform roundoff below this level is dropped rather than treated as content.
  const double floor = 1e-13 * biggest;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) <= floor) continue;
    Wavevector k = tab.k[i];
    for (int d = 0; d < g.dim; ++d) {
      if (m > 0) {
        const long scaled = static_cast<long>(k[d]) << m;
        if (std::abs(scaled) >= limit) {
          throw RescaleError("dilation by 2^" + std::to_string(m) +
                             " pushes a frequency past the grid limit");
        }
        k[d] = static_cast<int>(scaled);
      } else {
        const int step = 1 << (-m);
        if (k[d] % step != 0) {
          throw RescaleError("contraction by 2^" + std::to_string(-m) +
                             " needs coefficients on the coarse sublattice");
        }
        k[d] /= step;
      }
    }
    out.at(k) = f[i];
  }
  return out;
}

}  // namespace critlab
