#include <cmath>
#include <stdexcept>

#include "critlab/fft.hpp"
#include "critlab/oldroyd.hpp"
#include "critlab/operators.hpp"
#include "oldroyd_internal.hpp"

namespace critlab {

using namespace detail;

CoupledForm to_coupled(const FluidState& s) {
  const GridSpec& g = s.grid();
  const int n = g.dim;
  for (const auto& c : s.velocity)
    if (std::abs(c[0]) > 1e-14 * std::max(1.0, std::sqrt(c.energy())))
      throw std::invalid_argument("velocity has a nonzero mean; the coupled form cannot carry it");
  CoupledForm out{s.sigma, TensorField(g), s.H};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.d(i, j) = -1.0 * lambda_power(derivative(s.velocity[i], j), -1.0);
  return out;
}

namespace {

VectorField velocity_from(const TensorField& d) {
  const int n = d.n();
  VectorField v;
  for (int i = 0; i < n; ++i) {
    SpectralField s(d(i, 0).grid());
    for (int j = 0; j < n; ++j) s += derivative(d(i, j), j);
    v.push_back(lambda_power(s, -1.0));
  }
  return v;
}

SpectralField inv_lambda_d(const SpectralField& f, int axis) { return lambda_power(derivative(f, axis), -1.0); }

// G of the d equation given (sigma, v, H, d) and the velocity samples vp.
TensorField forcing(const FluidState& s, const TensorField& d, const PhysicalParams& params,
                    const std::vector<PhysicalField>& vp, std::optional<SpectralField>& warm) {
  const GridSpec& g = s.grid();
  const int n = g.dim;
  const std::size_t pts = g.size();

  const VectorField G = momentum_forcing(s, params);
  PoissonOptions po;
  po.initial_guess = warm;
  const PoissonResult pr =
      solve_variable_poisson(s.sigma + SpectralField::constant(g, 1.0), -1.0 * divergence(G), po);
  warm = pr.u;

  const PhysicalField factor = density_factor(s.sigma);
  const PhysicalField sigma = inverse_transform(s.sigma);
  const auto H = to_physical(s.H.entries());
  std::vector<PhysicalField> dH(static_cast<std::size_t>(n * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) dH[(i * n + j) * n + l] = inverse_transform(derivative(s.H(i, j), l));

  // A^i = v.grad v^i + (sigma + 1) d_i P - mu sigma Laplacian v^i - H^{lm} d_l H^{im}
  VectorField A;
  for (int i = 0; i < n; ++i) {
    PhysicalField acc = inverse_transform(pr.grad[i]);
    for (std::size_t p = 0; p < pts; ++p) acc[p] *= factor[p];
    const PhysicalField lap = inverse_transform(laplacian(s.velocity[i]));
    for (std::size_t p = 0; p < pts; ++p) acc[p] -= params.mu * sigma[p] * lap[p];
    for (int k = 0; k < n; ++k) {
      const PhysicalField dv = inverse_transform(derivative(s.velocity[i], k));
      for (std::size_t p = 0; p < pts; ++p) acc[p] += vp[k][p] * dv[p];
    }
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) {
        const auto& Hlm = H[l * n + m];
        const auto& dHim = dH[(i * n + m) * n + l];
        for (std::size_t p = 0; p < pts; ++p) acc[p] -= Hlm[p] * dHim[p];
      }
    A.push_back(to_spectral(acc));
  }

  TensorField out(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      SpectralField gij = advect(vp, d(i, j)) + inv_lambda_d(A[i], j);
      for (int k = 0; k < n; ++k) {
        // Q^{ijk} = H^{lj} d_l H^{ik} - H^{lk} d_l H^{ij}
        PhysicalField q(g);
        for (int l = 0; l < n; ++l) {
          const auto& Hlj = H[l * n + j];
          const auto& Hlk = H[l * n + k];
          const auto& dHik = dH[(i * n + k) * n + l];
          const auto& dHij = dH[(i * n + j) * n + l];
          for (std::size_t p = 0; p < pts; ++p) q[p] += Hlj[p] * dHik[p] - Hlk[p] * dHij[p];
        }
        gij += inv_lambda_d(to_spectral(q), k);
      }
      out(i, j) = std::move(gij);
    }
  return out;
}

// Bundle layout: [sigma, d_00..d_{N-1,N-1}, H_00..H_{N-1,N-1}].
FieldBundle pack_coupled(const CoupledForm& c) {
  FieldBundle b{c.sigma};
  for (const auto& e : c.d.entries()) b.push_back(e);
  for (const auto& e : c.H.entries()) b.push_back(e);
  return b;
}

CoupledForm unpack_coupled(const FieldBundle& b, const GridSpec& g) {
  const int n = g.dim;
  CoupledForm c{b[0], TensorField(g), TensorField(g)};
  for (int e = 0; e < n * n; ++e) {
    c.d.entries()[e] = b[1 + e];
    c.H.entries()[e] = b[1 + n * n + e];
  }
  return c;
}

class CoupledStepper {
 public:
  CoupledStepper(const GridSpec& g, const PhysicalParams& params, double dt)
      : grid_(g), params_(params), stepper_(g, coupled_diffusivities(g, params.mu), dt) {
    params.validate();
  }

  FieldBundle advance(const FieldBundle& u, double t) {
    const int n = grid_.dim;
    const IfRk4::Rhs rhs = [this, n](const FieldBundle& x, double) {
      const CoupledForm c = unpack_coupled(x, grid_);
      const FluidState s = from_coupled(c);
      const auto vp = critlab::to_physical(s.velocity);
      check_cfl(vp, stepper_.dt());
      const TensorField G = forcing(s, c.d, params_, vp, warm_);
      FieldBundle k{-1.0 * advect(vp, c.sigma)};
      std::vector<PhysicalField> dv(static_cast<std::size_t>(n * n));
      for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) dv[i * n + m] = inverse_transform(derivative(s.velocity[i], m));
      const auto H = to_physical(c.H.entries());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k.push_back(lambda_power(c.H(i, j), 1.0) + G(i, j) - advect(vp, c.d(i, j)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          // F^{ij} = d_k v^i H^{kj}
          PhysicalField f(grid_);
          for (int m = 0; m < n; ++m)
            for (std::size_t p = 0; p < f.size(); ++p) f[p] += dv[i * n + m][p] * H[m * n + j][p];
          k.push_back(to_spectral(f) - lambda_power(c.d(i, j), 1.0) - advect(vp, c.H(i, j)));
        }
      return k;
    };
    FieldBundle out = stepper_.step(u, t, rhs);
    const double floor = density_factor(out[0]).min();
    if (floor < params_.sigma_floor)
      throw DensityFloorError("sigma + 1 fell to " + std::to_string(floor) + " below the floor " +
                              std::to_string(params_.sigma_floor));
    return out;
  }

  VectorField pressure(const FluidState& s) {
    PoissonOptions po;
    po.initial_guess = warm_;
    const VectorField G = momentum_forcing(s, params_);
    return solve_variable_poisson(s.sigma + SpectralField::constant(grid_, 1.0), -1.0 * divergence(G), po).grad;
  }

 private:
  static std::vector<double> coupled_diffusivities(const GridSpec& g, double mu) {
    const int n = g.dim;
    std::vector<double> d(static_cast<std::size_t>(1 + 2 * n * n), 0.0);
    for (int e = 0; e < n * n; ++e) d[1 + e] = mu;
    return d;
  }

  GridSpec grid_;
  PhysicalParams params_;
  IfRk4 stepper_;
  std::optional<SpectralField> warm_;
};

}  // namespace

FluidState from_coupled(const CoupledForm& c) {
  const GridSpec& g = c.sigma.grid();
  FluidState s = FluidState::zeros(g);
  s.sigma = c.sigma;
  s.velocity = leray_project(velocity_from(c.d));
  s.H = c.H;
  return s;
}

TensorField coupled_forcing(const FluidState& s, const PhysicalParams& params) {
  const CoupledForm c = to_coupled(s);
  std::optional<SpectralField> warm;
  return forcing(s, c.d, params, critlab::to_physical(s.velocity), warm);
}

RunRecord run_coupled(const FluidState& s0, const PhysicalParams& params, const TimeGrid& tg,
                      const RunMonitors& monitors) {
  tg.validate();
  const GridSpec g = s0.grid();
  CoupledStepper st(g, params, tg.dt);
  Recorder rec(g, monitors);
  FluidState cur = s0;
  cur.pressure_grad = st.pressure(cur);
  rec.save(0.0, cur);
  FieldBundle u = pack_coupled(to_coupled(s0));
  const int steps = tg.steps();
  for (int n = 0; n < steps; ++n) {
    u = st.advance(u, tg.time(n));
    if (tg.saves(n + 1)) {
      cur = from_coupled(unpack_coupled(u, g));
      cur.pressure_grad = st.pressure(cur);
      rec.save(tg.time(n + 1), cur);
    }
  }
  return rec.finish(std::move(cur));
}

}  // namespace critlab
