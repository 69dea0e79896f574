#include "critlab/linear_solvers.hpp"

#include <cmath>
#include <string>

#include "critlab/fft.hpp"
#include "critlab/operators.hpp"

namespace critlab {

namespace {

void require_band_limited(const SpectralField& u) {
  double biggest = 0.0;
  for (const auto& c : u.coeffs()) biggest = std::max(biggest, std::abs(c));
  if (max_axis_wavenumber(u, 1e-13 * biggest) > u.grid().dealias_cutoff())
    throw std::invalid_argument("initial data has content past the dealiasing cutoff");
}

// Drives the stepper over tg, calling on_save(n, t, state) at saved steps.
template <class OnSave>
FieldBundle march(FieldBundle u, const IfRk4& stepper, const IfRk4::Rhs& rhs, const TimeGrid& tg, OnSave on_save) {
  tg.validate();
  const int n_steps = tg.steps();
  on_save(0.0, u);
  for (int n = 0; n < n_steps; ++n) {
    u = stepper.step(u, tg.time(n), rhs);
    if (tg.saves(n + 1)) on_save(tg.time(n + 1), u);
  }
  return u;
}

ScalarRun run_scalar(const SpectralField& u0, const IfRk4& stepper, const IfRk4::Rhs& rhs, const TimeGrid& tg,
                     const RunOptions& opts) {
  ScalarRun out;
  out.series.q_min = u0.grid().q_min;
  FieldBundle fin = march({u0}, stepper, rhs, tg, [&](double t, const FieldBundle& u) {
    out.times.push_back(t);
    out.series.append(t, block_lp_norms(u[0], opts.series_p));
    if (opts.keep_snapshots) out.saved.push_back(u[0]);
  });
  out.final = std::move(fin[0]);
  return out;
}

}  // namespace

ScalarRun solve_transport(const SpectralField& u0, const VelocityFn& velocity, const ForcingFn& forcing,
                          const TimeGrid& tg, const RunOptions& opts) {
  tg.validate();
  require_band_limited(u0);
  const GridSpec g = u0.grid();
  const double dt = tg.dt;
  const IfRk4 stepper(g, {0.0}, dt);
  const IfRk4::Rhs rhs = [&](const FieldBundle& u, double t) {
    FieldBundle k{SpectralField(g)};
    if (velocity) {
      const VectorField v = velocity(t);
      check_solenoidal(v);
      const auto vp = to_physical(v);
      check_cfl(vp, dt);
      k[0].axpy(-1.0, advect(vp, u[0]));
    }
    if (forcing) k[0] += forcing(t);
    return k;
  };
  return run_scalar(u0, stepper, rhs, tg, opts);
}

ScalarRun solve_heat(const SpectralField& u0, const ForcingFn& forcing, double mu, const TimeGrid& tg,
                     const RunOptions& opts) {
  if (!(mu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  tg.validate();
  const GridSpec g = u0.grid();
  const IfRk4 stepper(g, {mu}, tg.dt);
  const IfRk4::Rhs rhs = [&](const FieldBundle&, double t) {
    return FieldBundle{forcing ? forcing(t) : SpectralField(g)};
  };
  return run_scalar(u0, stepper, rhs, tg, opts);
}

PoissonResult solve_variable_poisson(const SpectralField& a, const SpectralField& f, const PoissonOptions& opts) {
  require_same_grid(a.grid(), f.grid());
  const GridSpec& g = a.grid();
  if (a.hermitian_defect() > 1e-12 * std::max(1.0, std::abs(a.mean())))
    throw std::invalid_argument("coefficient is not real");
  const PhysicalField ap = inverse_transform(a);
  const double a_min = ap.min();
  if (!(a_min > 0.0)) throw std::invalid_argument("coefficient is not bounded below by a positive constant");
  const double f_norm = std::sqrt(f.energy());
  if (std::abs(f[0]) > 1e-12 * std::max(f_norm, 1e-300) && std::abs(f[0]) > 1e-300)
    throw std::invalid_argument("right side has nonzero mean; no periodic solution exists");

  PoissonResult out;
  const double a_bar = a.mean();
  double osc = 0.0;
  for (double x : ap.values()) osc = std::max(osc, std::abs(x - a_bar));
  out.relative_oscillation = osc / a_bar;

  SpectralField u = opts.initial_guess ? *opts.initial_guess : SpectralField(g);
  u[0] = 0.0;
  auto residual_of = [&](const SpectralField& w) {
    VectorField flux = gradient(w);
    for (auto& c : flux) c = multiply(a, c);
    SpectralField r = f + divergence(flux);
    r[0] = 0.0;
    return r;
  };
  if (f_norm == 0.0) {
    out.u = SpectralField(g);
    out.grad = zero_vector(g);
    out.residuals.push_back(0.0);
    return out;
  }
  SpectralField r = residual_of(u);
  out.residuals.push_back(std::sqrt(r.energy()) / f_norm);
  while (out.residuals.back() > opts.tol) {
    if (out.iterations >= opts.max_iter) {
      throw ConvergenceError("Richardson iteration stalled after " + std::to_string(out.iterations) +
                                 " iterations at relative residual " + std::to_string(out.residuals.back()),
                             out.residuals.back());
    }
    // (-a_bar Laplacian)^{-1} r = -inverse_laplacian(r) / a_bar
    u.axpy(-1.0 / a_bar, inverse_laplacian(r));
    ++out.iterations;
    r = residual_of(u);
    out.residuals.push_back(std::sqrt(r.energy()) / f_norm);
    out.contraction.push_back(out.residuals.back() / out.residuals[out.residuals.size() - 2]);
  }
  out.grad = gradient(u);
  out.u = std::move(u);
  return out;
}

CoupledRun solve_coupled(const CoupledState& s0, const VelocityFn& velocity, const BundleForcingFn& f,
                         const BundleForcingFn& g, double mu, const TimeGrid& tg, const RunOptions& opts) {
  if (s0.c.empty() || s0.c.size() != s0.d.size()) throw std::invalid_argument("coupled state needs matching c and d");
  if (mu < 0.0) throw std::invalid_argument("viscosity must be non-negative");
  tg.validate();
  const GridSpec grid = s0.c.front().grid();
  const std::size_t n = s0.c.size();
  for (std::size_t i = 0; i < n; ++i) {
    require_same_grid(grid, s0.c[i].grid());
    require_same_grid(grid, s0.d[i].grid());
    require_band_limited(s0.c[i]);
    require_band_limited(s0.d[i]);
  }
  std::vector<double> diff(2 * n, 0.0);
  for (std::size_t i = n; i < 2 * n; ++i) diff[i] = mu;
  const double dt = tg.dt;
  const IfRk4 stepper(grid, diff, dt);
  const IfRk4::Rhs rhs = [&](const FieldBundle& u, double t) {
    FieldBundle k(2 * n, SpectralField(grid));
    std::vector<PhysicalField> vp;
    if (velocity) {
      const VectorField v = velocity(t);
      check_solenoidal(v);
      vp = to_physical(v);
      check_cfl(vp, dt);
    }
    const FieldBundle fv = f ? f(t) : FieldBundle{};
    const FieldBundle gv = g ? g(t) : FieldBundle{};
    for (std::size_t i = 0; i < n; ++i) {
      const SpectralField& c = u[i];
      const SpectralField& d = u[n + i];
      k[i] = -lambda_power(d, 1.0);
      k[n + i] = lambda_power(c, 1.0);
      if (!vp.empty()) {
        k[i].axpy(-1.0, advect(vp, c));
        k[n + i].axpy(-1.0, advect(vp, d));
      }
      if (!fv.empty()) k[i] += fv.at(i);
      if (!gv.empty()) k[n + i] += gv.at(i);
    }
    return k;
  };

  CoupledRun out;
  out.c_series.q_min = out.d_series.q_min = grid.q_min;
  auto split = [n](const FieldBundle& u) {
    return CoupledState{FieldBundle(u.begin(), u.begin() + static_cast<long>(n)),
                        FieldBundle(u.begin() + static_cast<long>(n), u.end())};
  };
  FieldBundle u0 = s0.c;
  u0.insert(u0.end(), s0.d.begin(), s0.d.end());
  const FieldBundle fin = march(std::move(u0), stepper, rhs, tg, [&](double t, const FieldBundle& u) {
    CoupledState s = split(u);
    out.times.push_back(t);
    out.c_series.append(t, block_lp_norms(std::span<const SpectralField>(s.c), opts.series_p));
    out.d_series.append(t, block_lp_norms(std::span<const SpectralField>(s.d), opts.series_p));
    if (opts.keep_snapshots) out.saved.push_back(std::move(s));
  });
  out.final = split(fin);
  return out;
}

}  // namespace critlab
