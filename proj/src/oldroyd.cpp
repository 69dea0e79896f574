#include "critlab/oldroyd.hpp"

#include <cmath>
#include <stdexcept>

#include "critlab/fft.hpp"
#include "critlab/operators.hpp"
#include "oldroyd_internal.hpp"

namespace critlab {

namespace detail {

SpectralField to_spectral(const PhysicalField& p) {
  SpectralField s = forward_transform(p);
  dealias_in_place(s);
  return s;
}

std::vector<PhysicalField> to_physical(std::span<const SpectralField> fields) {
  std::vector<PhysicalField> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(inverse_transform(f));
  return out;
}

PhysicalField density_factor(const SpectralField& sigma) {
  PhysicalField p = inverse_transform(sigma);
  for (auto& x : p.values()) x += 1.0;
  return p;
}

SpectralField density(const SpectralField& sigma) {
  PhysicalField p = density_factor(sigma);
  for (auto& x : p.values()) x = 1.0 / x;
  return to_spectral(p);
}

FrozenTerms frozen_terms(const FluidState& c, const PhysicalParams& params, double dt,
                         std::optional<SpectralField>& warm) {
  const GridSpec& g = c.grid();
  const int n = g.dim;
  const std::size_t pts = g.size();
  FrozenTerms out;
  out.velocity = critlab::to_physical(c.velocity);
  check_cfl(out.velocity, dt);

  const VectorField G = momentum_forcing(c, params);
  const SpectralField a = c.sigma + SpectralField::constant(g, 1.0);
  PoissonOptions po;
  po.initial_guess = warm;
  const PoissonResult pr = solve_variable_poisson(a, -1.0 * divergence(G), po);
  warm = pr.u;
  out.pressure_grad = pr.grad;

  const PhysicalField factor = density_factor(c.sigma);
  for (int i = 0; i < n; ++i) {
    PhysicalField gp = inverse_transform(pr.grad[i]);
    for (std::size_t p = 0; p < pts; ++p) gp[p] *= factor[p];
    out.velocity_forcing.push_back(G[i] - to_spectral(gp));
  }

  // H source d_k v^i (xi^{kj} + delta^{kj}).
  std::vector<PhysicalField> dv(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) dv[i * n + k] = inverse_transform(derivative(c.velocity[i], k));
  const auto H = to_physical(c.H.entries());
  out.H_forcing = TensorField(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      PhysicalField acc(g);
      for (int k = 0; k < n; ++k) {
        const auto& dvik = dv[i * n + k];
        const auto& Hkj = H[k * n + j];
        for (std::size_t p = 0; p < pts; ++p) acc[p] += dvik[p] * Hkj[p];
      }
      out.H_forcing(i, j) = to_spectral(acc) + derivative(c.velocity[i], j);
    }
  }
  return out;
}

FieldBundle transport_rhs(const FrozenTerms& f, const FieldBundle& u, const GridSpec& g) {
  const int n = g.dim;
  FieldBundle k;
  k.reserve(u.size());
  k.push_back(-1.0 * advect(f.velocity, u[0]));
  for (int i = 0; i < n; ++i) k.push_back(f.velocity_forcing[i]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      SpectralField h = f.H_forcing(i, j);
      h.axpy(-1.0, advect(f.velocity, u[1 + n + i * n + j]));
      k.push_back(std::move(h));
    }
  return k;
}

void finish_step(FieldBundle& u, const GridSpec& g, const PhysicalParams& params) {
  const int n = g.dim;
  VectorField v(u.begin() + 1, u.begin() + 1 + n);
  v = leray_project(v);
  for (int i = 0; i < n; ++i) u[1 + i] = std::move(v[i]);
  const double floor = density_factor(u[0]).min();
  if (floor < params.sigma_floor)
    throw DensityFloorError("sigma + 1 fell to " + std::to_string(floor) + " below the floor " +
                            std::to_string(params.sigma_floor));
}

std::vector<double> diffusivities(const GridSpec& g, double mu) {
  const int n = g.dim;
  std::vector<double> d(static_cast<std::size_t>(1 + n + n * n), 0.0);
  for (int i = 0; i < n; ++i) d[1 + i] = mu;
  return d;
}

}  // namespace detail

using namespace detail;

FluidState FluidState::zeros(const GridSpec& grid) {
  return {SpectralField(grid), zero_vector(grid), TensorField(grid), zero_vector(grid)};
}

void PhysicalParams::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (!(sigma_floor > 0.0)) throw std::invalid_argument("sigma floor must be positive");
}

FieldBundle pack(const FluidState& s) {
  FieldBundle b;
  b.push_back(s.sigma);
  b.insert(b.end(), s.velocity.begin(), s.velocity.end());
  for (const auto& e : s.H.entries()) b.push_back(e);
  return b;
}

FluidState unpack(const FieldBundle& b, const GridSpec& grid) {
  const int n = grid.dim;
  if (b.size() != static_cast<std::size_t>(1 + n + n * n)) throw std::invalid_argument("bundle has wrong size");
  FluidState s = FluidState::zeros(grid);
  s.sigma = b[0];
  for (int i = 0; i < n; ++i) s.velocity[i] = b[1 + i];
  for (int e = 0; e < n * n; ++e) s.H.entries()[e] = b[1 + n + e];
  return s;
}

double l2_distance(const FluidState& a, const FluidState& b) {
  const FieldBundle x = pack(a), y = pack(b);
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sq += (x[i] - y[i]).energy();
  return std::sqrt(sq * a.grid().domain_volume());
}

double l2_size(const FluidState& a) { return l2_distance(a, FluidState::zeros(a.grid())); }

std::vector<SpectralField> deformation_defect(const TensorField& H) {
  const GridSpec& g = H(0, 0).grid();
  const int n = g.dim;
  const std::size_t pts = g.size();
  // U = I + H as samples.
  auto U = to_physical(H.entries());
  for (int i = 0; i < n; ++i)
    for (auto& x : U[i * n + i].values()) x += 1.0;
  std::vector<PhysicalField> dU(static_cast<std::size_t>(n * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) dU[(i * n + j) * n + l] = inverse_transform(derivative(H(i, j), l));
  std::vector<SpectralField> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        PhysicalField acc(g);
        for (int l = 0; l < n; ++l) {
          const auto& Ulk = U[l * n + k];
          const auto& Ulj = U[l * n + j];
          const auto& dUij = dU[(i * n + j) * n + l];
          const auto& dUik = dU[(i * n + k) * n + l];
          for (std::size_t p = 0; p < pts; ++p) acc[p] += Ulk[p] * dUij[p] - Ulj[p] * dUik[p];
        }
        out.push_back(to_spectral(acc));
      }
  return out;
}

std::vector<SpectralField> perturbation_defect(const TensorField& H) {
  const GridSpec& g = H(0, 0).grid();
  const int n = g.dim;
  const std::size_t pts = g.size();
  const auto Hp = to_physical(H.entries());
  std::vector<SpectralField> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        PhysicalField rhs(g);
        for (int l = 0; l < n; ++l) {
          const PhysicalField dHik = inverse_transform(derivative(H(i, k), l));
          const PhysicalField dHij = inverse_transform(derivative(H(i, j), l));
          const auto& Hlj = Hp[l * n + j];
          const auto& Hlk = Hp[l * n + k];
          for (std::size_t p = 0; p < pts; ++p) rhs[p] += Hlj[p] * dHik[p] - Hlk[p] * dHij[p];
        }
        out.push_back(derivative(H(i, j), k) - derivative(H(i, k), j) - to_spectral(rhs));
      }
  return out;
}

ConstraintResiduals constraint_residuals(const FluidState& s) {
  const GridSpec& g = s.grid();
  const int n = g.dim;
  ConstraintResiduals r;
  r.divergence = lp_norm(divergence(s.velocity), 2.0);

  const SpectralField rho = density(s.sigma);
  TensorField rhoU(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rhoU(i, j) = multiply(rho, s.H(i, j)) + (i == j ? rho : SpectralField(g));
  r.density_flux = lp_norm(column_divergence(rhoU), 2.0);
  r.density_flux_column = lp_norm(row_divergence(rhoU), 2.0);

  const double volume = g.domain_volume();
  auto stacked = [volume](const std::vector<SpectralField>& fs) {
    double sq = 0.0;
    for (const auto& f : fs) sq += f.energy();
    return std::sqrt(sq * volume);
  };
  r.deformation_gradient = stacked(deformation_defect(s.H));
  r.perturbation_identity = stacked(perturbation_defect(s.H));
  return r;
}

InitialFamily parse_family(const std::string& name) {
  if (name == "exact_gradient") return InitialFamily::exact_gradient;
  if (name == "general") return InitialFamily::general;
  throw std::invalid_argument("unknown initial family '" + name + "'");
}

std::string to_string(InitialFamily f) { return f == InitialFamily::exact_gradient ? "exact_gradient" : "general"; }

std::pair<FluidState, InitialDataReport> make_initial_data(InitialFamily family, double amplitude, std::uint64_t seed,
                                                           const GridSpec& g, std::optional<double> spectrum_k_max) {
  if (amplitude < 0.0 || !std::isfinite(amplitude)) throw std::invalid_argument("amplitude must be non-negative");
  const int n = g.dim;
  FluidState s = FluidState::zeros(g);
  if (amplitude > 0.0) {
    Rng rng(seed);
    const RandomSpectrum spec{1.0, spectrum_k_max.value_or(g.points_per_axis / 8.0), 1.0};
    const double crit = g.dim / 2.0;
    s.velocity = random_solenoidal_field(g, spec, rng);
    const double v_norm = besov_norm(s.velocity, {crit - 1, 2.0, 1.0}).value;
    for (auto& c : s.velocity) c *= amplitude / v_norm;
    VectorField w = random_solenoidal_field(g, spec, rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.H(i, j) = derivative(w[i], j);
    const double h_norm = besov_norm(s.H, {crit, 2.0, 1.0}).value;
    for (auto& e : s.H.entries()) e *= amplitude / h_norm;
    for (auto& c : w) c *= amplitude / h_norm;

    if (family == InitialFamily::general) {
      s.sigma = random_field(g, spec, rng);
      s.sigma *= amplitude / besov_norm(s.sigma, {crit, 2.0, 1.0}).value;
      const SpectralField rho = density(s.sigma);
      const SpectralField a = s.sigma + SpectralField::constant(g, 1.0);
      for (int i = 0; i < n; ++i) {
        // Laplacian psi_i = -d_i rho - d_j(rho d_i w^j)
        SpectralField rhs = -1.0 * derivative(rho, i);
        for (int j = 0; j < n; ++j) rhs.axpy(-1.0, derivative(multiply(rho, derivative(w[j], i)), j));
        const SpectralField psi = inverse_laplacian(rhs);
        // H^{ji} = d_i w^j + (sigma + 1) d_j psi_i
        for (int j = 0; j < n; ++j) s.H(j, i) = derivative(w[j], i) + multiply(a, derivative(psi, j));
      }
    }
  }
  s.pressure_grad = zero_vector(g);
  InitialDataReport rep{constraint_residuals(s)};
  return {std::move(s), rep};
}

std::pair<FluidState, InitialDataReport> assemble_initial_data(SpectralField sigma, VectorField velocity,
                                                               TensorField H, double tol) {
  const GridSpec g = sigma.grid();
  const int n = g.dim;
  if (static_cast<int>(velocity.size()) != n || H.n() != n) throw InitialDataError("field shapes do not match the grid");
  for (const auto& c : velocity) require_same_grid(g, c.grid());
  for (const auto& e : H.entries()) require_same_grid(g, e.grid());
  FluidState s{std::move(sigma), std::move(velocity), std::move(H), zero_vector(g)};
  if (density_factor(s.sigma).min() <= 0.0) throw InitialDataError("sigma + 1 must be positive");
  InitialDataReport rep{constraint_residuals(s)};
  if (divergence_residual(s.velocity) > 1e-10) throw InitialDataError("initial velocity is not divergence-free");
  const double scale = std::max(1.0, lp_norm(s.H, 2.0));
  if (rep.residuals.density_flux > tol * scale)
    throw InitialDataError("initial data violate div(rho U^T) = 0: residual " +
                           std::to_string(rep.residuals.density_flux));
  return {std::move(s), rep};
}

VectorField momentum_forcing(const FluidState& s, const PhysicalParams& params) {
  const GridSpec& g = s.grid();
  const int n = g.dim;
  const std::size_t pts = g.size();
  const auto v = critlab::to_physical(s.velocity);
  const auto H = to_physical(s.H.entries());
  const PhysicalField sigma = inverse_transform(s.sigma);
  VectorField G;
  for (int i = 0; i < n; ++i) {
    PhysicalField acc(g);
    const PhysicalField lap = inverse_transform(laplacian(s.velocity[i]));
    for (int k = 0; k < n; ++k) {
      const PhysicalField d = inverse_transform(derivative(s.velocity[i], k));
      for (std::size_t p = 0; p < pts; ++p) acc[p] -= v[k][p] * d[p];
    }
    for (std::size_t p = 0; p < pts; ++p) acc[p] += params.mu * sigma[p] * lap[p];
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const PhysicalField d = inverse_transform(derivative(s.H(i, k), j));
        for (std::size_t p = 0; p < pts; ++p) acc[p] += H[j * n + k][p] * d[p];
      }
    SpectralField gi = to_spectral(acc);
    for (int k = 0; k < n; ++k) gi += derivative(s.H(i, k), k);
    G.push_back(std::move(gi));
  }
  return G;
}

VectorField compute_pressure(const FluidState& s, const PhysicalParams& params,
                             const std::optional<SpectralField>& warm_start) {
  const VectorField G = momentum_forcing(s, params);
  const SpectralField a = s.sigma + SpectralField::constant(s.grid(), 1.0);
  PoissonOptions po;
  po.initial_guess = warm_start;
  return solve_variable_poisson(a, -1.0 * divergence(G), po).grad;
}

namespace {

class DirectStepper {
 public:
  DirectStepper(const GridSpec& g, const PhysicalParams& params, double dt)
      : grid_(g), params_(params), stepper_(g, diffusivities(g, params.mu), dt) {
    params.validate();
  }

  FieldBundle advance(const FieldBundle& u, double t) {
    const IfRk4::Rhs rhs = [this](const FieldBundle& x, double) {
      const FluidState c = unpack(x, grid_);
      const FrozenTerms f = frozen_terms(c, params_, stepper_.dt(), warm_);
      return transport_rhs(f, x, grid_);
    };
    FieldBundle out = stepper_.step(u, t, rhs);
    finish_step(out, grid_, params_);
    return out;
  }

  VectorField pressure(const FluidState& s) {
    PoissonOptions po;
    po.initial_guess = warm_;
    const VectorField G = momentum_forcing(s, params_);
    const PoissonResult pr =
        solve_variable_poisson(s.sigma + SpectralField::constant(grid_, 1.0), -1.0 * divergence(G), po);
    warm_ = pr.u;
    return pr.grad;
  }

 private:
  GridSpec grid_;
  PhysicalParams params_;
  IfRk4 stepper_;
  std::optional<SpectralField> warm_;
};

}  // namespace

FluidState step(const FluidState& s, const PhysicalParams& params, double dt) {
  DirectStepper st(s.grid(), params, dt);
  FluidState out = unpack(st.advance(pack(s), 0.0), s.grid());
  out.pressure_grad = st.pressure(out);
  return out;
}

namespace detail {

Recorder::Recorder(const GridSpec& g, const RunMonitors& m) : monitors_(m) {
  record_.sigma_series.q_min = record_.velocity_series.q_min = g.q_min;
  record_.H_series.q_min = record_.pressure_series.q_min = g.q_min;
  record_.norm_values.resize(m.norms.size());
  for (const auto& req : m.norms) {
    if (req.field != "sigma" && req.field != "v" && req.field != "H" && req.field != "grad_p")
      throw std::invalid_argument("unknown norm field '" + req.field + "'");
  }
}

void Recorder::save(double t, const FluidState& s) {
  record_.times.push_back(t);
  record_.sigma_series.append(t, block_lp_norms(s.sigma, 2.0));
  record_.velocity_series.append(t, block_lp_norms(s.velocity, 2.0));
  record_.H_series.append(t, block_lp_norms(s.H, 2.0));
  record_.pressure_series.append(t, block_lp_norms(s.pressure_grad, 2.0));
  for (std::size_t r = 0; r < monitors_.norms.size(); ++r) {
    const auto& req = monitors_.norms[r];
    std::span<const SpectralField> comps;
    if (req.field == "sigma") comps = std::span<const SpectralField>(&s.sigma, 1);
    else if (req.field == "v") comps = s.velocity;
    else if (req.field == "H") comps = s.H.entries();
    else comps = s.pressure_grad;
    double value;
    if (req.hybrid_weight) {
      if (!(req.spec.p == Exponent(2.0))) throw std::invalid_argument("hybrid norms are L^2 based");
      value = hybrid_from_blocks(block_lp_norms(comps, 2.0), s.grid().q_min,
                                 {req.spec.s, req.spec.r, *req.hybrid_weight});
    } else {
      value = combine_blocks(block_lp_norms(comps, req.spec.p), s.grid().q_min, req.spec.s, req.spec.r);
    }
    record_.norm_values[r].push_back(value);
  }
  record_.residuals.push_back(constraint_residuals(s));
  record_.min_density_factor.push_back(density_factor(s.sigma).min());
  if (monitors_.keep_states) record_.states.push_back(s);
  if (monitors_.on_save) monitors_.on_save(record_, s);
}

RunRecord Recorder::finish(FluidState final) {
  record_.final = std::move(final);
  return std::move(record_);
}

}  // namespace detail

RunRecord run(const FluidState& s0, const PhysicalParams& params, const TimeGrid& tg, const RunMonitors& monitors) {
  tg.validate();
  const GridSpec g = s0.grid();
  DirectStepper st(g, params, tg.dt);
  Recorder rec(g, monitors);
  FluidState first = s0;
  first.pressure_grad = st.pressure(first);
  rec.save(0.0, first);
  FieldBundle u = pack(s0);
  FluidState cur = first;
  const int steps = tg.steps();
  for (int n = 0; n < steps; ++n) {
    u = st.advance(u, tg.time(n));
    if (tg.saves(n + 1)) {
      cur = unpack(u, g);
      cur.pressure_grad = st.pressure(cur);
      rec.save(tg.time(n + 1), cur);
    }
  }
  return rec.finish(std::move(cur));
}

}  // namespace critlab
