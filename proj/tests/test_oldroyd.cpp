#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "critlab/fft.hpp"
#include "critlab/oldroyd.hpp"
#include "critlab/operators.hpp"
#include "test_support.hpp"

using namespace critlab;
using critlab::testing::coeff_norm;
using critlab::testing::max_diff;
using critlab::testing::sampled;
using std::numbers::pi;

namespace {

const GridSpec g32 = make_grid(2, 32);

FluidState gradient_data(double amplitude, std::uint64_t seed = 7, const GridSpec& g = g32) {
  return make_initial_data(InitialFamily::exact_gradient, amplitude, seed, g).first;
}

double stacked_l2(const std::vector<SpectralField>& fs) {
  double sq = 0.0;
  for (const auto& f : fs) sq += f.energy();
  return std::sqrt(sq * fs.front().grid().domain_volume());
}

double defect_distance(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b) {
  std::vector<SpectralField> d;
  for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i] - b[i]);
  return stacked_l2(d);
}

// Leray pressure gradient for constant density: grad Laplacian^{-1} div G.
VectorField leray_pressure(const FluidState& s, const PhysicalParams& p) {
  return gradient(inverse_laplacian(divergence(momentum_forcing(s, p))));
}

FluidState taylor_green(const GridSpec& g, double amp) {
  FluidState s = FluidState::zeros(g);
  s.velocity[0] = sampled(g, [amp](double x, double y, double) { return amp * std::sin(x) * std::cos(y); });
  s.velocity[1] = sampled(g, [amp](double x, double y, double) { return -amp * std::cos(x) * std::sin(y); });
  return s;
}

}  // namespace

TEST_CASE("zero state stays zero") {
  const FluidState z = FluidState::zeros(g32);
  const ConstraintResiduals r = constraint_residuals(z);
  CHECK(r.divergence == 0.0);
  CHECK(r.density_flux == 0.0);
  CHECK(r.deformation_gradient == 0.0);
  CHECK(r.perturbation_identity == 0.0);

  const PhysicalParams p;
  const FluidState next = step(z, p, 0.01);
  CHECK(l2_size(next) == 0.0);
  CHECK(max_diff(next.pressure_grad, zero_vector(g32)) == 0.0);

  const RunRecord rec = run(z, p, {0.1, 0.02, 1});
  CHECK(rec.times.size() == 6);
  for (std::size_t n = 0; n < rec.times.size(); ++n) {
    for (double b : rec.sigma_series.per_block_lp[n]) CHECK(b == 0.0);
    for (double b : rec.velocity_series.per_block_lp[n]) CHECK(b == 0.0);
    for (double b : rec.H_series.per_block_lp[n]) CHECK(b == 0.0);
  }
}

TEST_CASE("initial data: amplitude zero and normalization") {
  const auto [z, rep] = make_initial_data(InitialFamily::general, 0.0, 3, g32);
  CHECK(l2_size(z) == 0.0);
  CHECK(rep.residuals.density_flux == 0.0);
  CHECK(rep.residuals.perturbation_identity == 0.0);
  CHECK_THROWS_AS(make_initial_data(InitialFamily::general, -1.0, 3, g32), std::invalid_argument);

  const FluidState s = make_initial_data(InitialFamily::general, 1e-2, 3, g32).first;
  CHECK(besov_norm(s.velocity, {0.0, 2.0, 1.0}).value == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(besov_norm(s.sigma, {1.0, 2.0, 1.0}).value == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(parse_family("general") == InitialFamily::general);
  CHECK(to_string(parse_family("exact_gradient")) == "exact_gradient");
  CHECK_THROWS_AS(parse_family("other"), std::invalid_argument);
}

TEST_CASE("initial data: gradient family constraints and quadratic defect") {
  const auto [s1, r1] = make_initial_data(InitialFamily::exact_gradient, 1e-2, 11, g32);
  CHECK(s1.sigma.is_zero());
  CHECK(r1.residuals.divergence <= 1e-12);
  CHECK(r1.residuals.density_flux <= 1e-12);
  CHECK(r1.residuals.perturbation_identity > 0.0);

  const auto r2 = make_initial_data(InitialFamily::exact_gradient, 5e-3, 11, g32).second;
  CHECK(r1.residuals.perturbation_identity / r2.residuals.perturbation_identity == doctest::Approx(4.0).epsilon(0.2));
  CHECK(r1.residuals.deformation_gradient / r2.residuals.deformation_gradient == doctest::Approx(4.0).epsilon(0.2));

  // Same defect written in U and in H.
  CHECK(defect_distance(deformation_defect(s1.H), perturbation_defect(s1.H)) <= 1e-16);
}

TEST_CASE("initial data: general family restores the density flux") {
  const auto [s, rep] = make_initial_data(InitialFamily::general, 1e-2, 5, g32);
  CHECK_FALSE(s.sigma.is_zero());
  CHECK(rep.residuals.divergence <= 1e-12);
  CHECK(rep.residuals.density_flux <= 1e-9);
  CHECK(rep.residuals.density_flux_column > 1e3 * rep.residuals.density_flux);
  CHECK_NOTHROW(assemble_initial_data(s.sigma, s.velocity, s.H));
}

TEST_CASE("assemble_initial_data checks") {
  const FluidState s = gradient_data(1e-2);
  const SpectralField bump = sampled(g32, [](double x, double, double) { return 0.1 * std::cos(x); });

  // U = I with non-constant density: d_j(rho delta^{ji}) = d_i rho != 0.
  CHECK_THROWS_AS(assemble_initial_data(bump, s.velocity, TensorField(g32)), InitialDataError);
  const auto [ok, rep] = assemble_initial_data(SpectralField::constant(g32, 0.3), s.velocity, TensorField(g32));
  CHECK(rep.residuals.density_flux <= 1e-13);
  CHECK(rep.residuals.deformation_gradient == 0.0);

  VectorField bad = s.velocity;
  bad[0] += sampled(g32, [](double x, double, double) { return std::sin(x); });
  CHECK_THROWS_AS(assemble_initial_data(s.sigma, bad, s.H), InitialDataError);
  CHECK_THROWS_AS(assemble_initial_data(SpectralField::constant(g32, -1.5), s.velocity, s.H), InitialDataError);
}

TEST_CASE("constraint residuals vanish for constant density and U = I") {
  FluidState s = gradient_data(0.1);
  s.H = TensorField(g32);
  const ConstraintResiduals r = constraint_residuals(s);
  CHECK(r.divergence <= 1e-12);
  CHECK(r.density_flux <= 1e-12);
  CHECK(r.deformation_gradient <= 1e-12);
  CHECK(r.perturbation_identity <= 1e-12);
}

TEST_CASE("pressure") {
  const PhysicalParams p;
  FluidState s = FluidState::zeros(g32);
  s.sigma = sampled(g32, [](double x, double y, double) { return 0.2 * std::sin(x + y); });
  CHECK(max_diff(compute_pressure(s, p), zero_vector(g32)) == 0.0);

  // Constant density reduces to the Leray pressure.
  FluidState c = gradient_data(0.05);
  CHECK(max_diff(compute_pressure(c, p), leray_pressure(c, p)) <= 1e-12);

  // Variable density: residual of div((sigma + 1) grad P) = div G.
  FluidState v = make_initial_data(InitialFamily::general, 0.05, 9, g32).first;
  const VectorField gp = compute_pressure(v, p);
  const SpectralField a = v.sigma + SpectralField::constant(g32, 1.0);
  SpectralField lhs(g32);
  for (int i = 0; i < 2; ++i) lhs += derivative(multiply(a, gp[i]), i);
  const SpectralField divG = divergence(momentum_forcing(v, p));
  CHECK(lp_norm(lhs - divG, 2.0) <= 1e-10 * lp_norm(divG, 2.0));
  CHECK(lp_norm(divG, 2.0) > 0.0);
}

TEST_CASE("constant tensor H is a fixed point") {
  FluidState s = FluidState::zeros(g32);
  s.sigma = sampled(g32, [](double x, double y, double) { return 0.3 * std::cos(x) * std::sin(2 * y); });
  for (int i = 0; i < 2; ++i) s.H(i, i) = SpectralField::constant(g32, 0.4);
  s.H(0, 1) = SpectralField::constant(g32, -0.1);
  const RunRecord rec = run(s, PhysicalParams{}, {0.2, 0.02, 10});
  CHECK(l2_distance(rec.final, s) <= 1e-13);
  CHECK(max_diff(rec.final.pressure_grad, zero_vector(g32)) <= 1e-13);
}

TEST_CASE("Taylor-Green vortex") {
  const PhysicalParams p{0.5, 0.1};
  const double amp = 0.5, T = 0.5;
  const GridSpec g64 = make_grid(2, 64);
  const RunRecord coarse = run(taylor_green(g32, amp), p, {T, 0.05, 10});
  const RunRecord fine = run(taylor_green(g64, amp), p, {T, 0.0125, 40});
  const double size = coeff_norm(coarse.final.velocity);

  // Reference run at doubled resolution, compared on the shared modes.
  double sq = 0.0;
  for (const auto& k : modes(g32).k)
    for (int i = 0; i < 2; ++i) sq += std::norm(coarse.final.velocity[i].at(k) - fine.final.velocity[i].at(k));
  CHECK(std::sqrt(sq) <= 1e-6 * size);
  CHECK(coarse.final.sigma.is_zero());
}

TEST_CASE("run invariants on general data") {
  const PhysicalParams p;
  const FluidState s0 = make_initial_data(InitialFamily::general, 0.05, 21, g32).first;
  RunMonitors mon;
  mon.keep_states = true;
  mon.norms.push_back({"v_crit", "v", {0.0, 2.0, 1.0}, std::nullopt});
  mon.norms.push_back({"H_hybrid", "H", {1.0, 2.0, 1.0}, 1.0});
  const double dt = 0.02;
  const RunRecord rec = run(s0, p, {1.0, dt, 5}, mon);
  REQUIRE(rec.times.size() == 11);
  REQUIRE(rec.states.size() == 11);
  CHECK(rec.norm_values.size() == 2);
  CHECK(rec.norm_values[0].size() == 11);

  const double min0 = rec.min_density_factor.front();
  for (std::size_t n = 0; n < rec.times.size(); ++n) {
    const FluidState& s = rec.states[n];
    CHECK(std::abs(s.sigma.mean() - s0.sigma.mean()) <= 1e-10);
    CHECK(rec.residuals[n].divergence <= 1e-10 * std::max(1.0, lp_norm(s.velocity, 2.0)));
    CHECK(rec.min_density_factor[n] >= min0 - 10.0 * dt * dt);
    CHECK(std::isfinite(rec.norm_values[1][n]));
  }

  CHECK_THROWS_AS(run(s0, p, {1.0, dt, 1}, RunMonitors{{{"x", "rho", {0.0, 2.0, 1.0}, std::nullopt}}, false}),
                  std::invalid_argument);
}

TEST_CASE("constant density stays constant with Leray pressure") {
  const PhysicalParams p;
  RunMonitors mon;
  mon.keep_states = true;
  const RunRecord rec = run(gradient_data(0.05), p, {0.4, 0.02, 5}, mon);
  for (const FluidState& s : rec.states) {
    CHECK(coeff_norm(s.sigma) <= 1e-15);
    CHECK(max_diff(s.pressure_grad, leray_pressure(s, p)) <= 1e-10);
  }
}

TEST_CASE("twin runs and constraint propagation converge at second order") {
  const PhysicalParams p;
  const FluidState s0 = gradient_data(1e-2);
  std::vector<FluidState> finals;
  for (double dt : {0.02, 0.01, 0.005}) {
    const RunRecord rec = run(s0, p, {1.0, dt, static_cast<int>(std::lround(1.0 / dt))});
    for (const auto& r : rec.residuals) CHECK(r.divergence <= 1e-10);
    finals.push_back(rec.final);
  }
  const double e1 = l2_distance(finals[0], finals[1]), e2 = l2_distance(finals[1], finals[2]);
  CHECK(e1 / e2 >= 3.0);

  const double d1 = defect_distance(deformation_defect(finals[0].H), deformation_defect(finals[1].H));
  const double d2 = defect_distance(deformation_defect(finals[1].H), deformation_defect(finals[2].H));
  CHECK(d1 / d2 >= 3.0);
  const double q1 = defect_distance(perturbation_defect(finals[0].H), perturbation_defect(finals[1].H));
  const double q2 = defect_distance(perturbation_defect(finals[1].H), perturbation_defect(finals[2].H));
  CHECK(q1 / q2 >= 3.0);
}

TEST_CASE("guards: viscosity, CFL and density floor") {
  const FluidState s = gradient_data(1e-2);
  CHECK_THROWS_AS(step(s, PhysicalParams{0.0, 0.1}, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(step(taylor_green(g32, 10.0), PhysicalParams{}, 0.05), CflError);
  FluidState thin = FluidState::zeros(g32);
  thin.sigma = sampled(g32, [](double x, double, double) { return -0.95 * std::cos(x); });
  CHECK_THROWS_AS(step(thin, PhysicalParams{}, 0.01), DensityFloorError);
}

TEST_CASE("coupled variables") {
  const FluidState z = FluidState::zeros(g32);
  const CoupledForm cz = to_coupled(z);
  for (const auto& e : cz.d.entries()) CHECK(e.is_zero());

  const FluidState s = make_initial_data(InitialFamily::general, 0.1, 4, g32).first;
  const FluidState back = from_coupled(to_coupled(s));
  CHECK(max_diff(back.velocity, s.velocity) <= 1e-12);
  CHECK(max_diff(back.sigma, s.sigma) == 0.0);

  // k = (1, 0), v = (0, cos x1): d^{ij} has symbol -i k_j / |k| acting on v^i.
  FluidState m = FluidState::zeros(g32);
  m.velocity[1] = sampled(g32, [](double x, double, double) { return std::cos(x); });
  const CoupledForm cm = to_coupled(m);
  CHECK(std::abs(cm.d(1, 0).at({1, 0, 0}) - Complex(0.0, -0.5)) <= 1e-14);
  CHECK(std::abs(cm.d(1, 0).at({-1, 0, 0}) - Complex(0.0, 0.5)) <= 1e-14);
  CHECK(cm.d(1, 1).is_zero());
  CHECK(cm.d(0, 0).is_zero());

  m.velocity[0] = SpectralField::constant(g32, 0.2);
  CHECK_THROWS_AS(to_coupled(m), std::invalid_argument);
}

TEST_CASE("coupled form differs from the direct form at second order in amplitude") {
  const PhysicalParams p;
  const TimeGrid tg{0.2, 0.01, 20};
  std::vector<double> diffs;
  for (double amp : {2e-2, 1e-2}) {
    const FluidState s0 = gradient_data(amp, 13);
    const RunRecord direct = run(s0, p, tg);
    const RunRecord coupled = run_coupled(s0, p, tg);
    CHECK(coupled.residuals.back().divergence <= 1e-10);
    diffs.push_back(l2_distance(direct.final, coupled.final));
  }
  CHECK(diffs[0] / diffs[1] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("Phi iteration") {
  const PhysicalParams p;
  const PhiResult z = phi_iteration(FluidState::zeros(g32), p, {0.2, 0.02, 1}, 5, 1e-8);
  CHECK(z.iterations == 1);
  CHECK(z.distances.front() == 0.0);
  CHECK(z.trajectory.size() == 11);
  for (const auto& s : z.trajectory) CHECK(l2_size(s) == 0.0);

  const FluidState s0 = gradient_data(1e-3, 8);
  const TimeGrid tg{0.5, 0.01, 1};
  const PhiResult r = phi_iteration(s0, p, tg, 12, 1e-8);
  CHECK(r.warnings.empty());
  for (std::size_t i = 1; i < r.distances.size(); ++i) CHECK(r.distances[i] < r.distances[i - 1]);
  CHECK(r.distances.back() < 1e-8);
  CHECK(r.admissible.size() == r.distances.size());
  CHECK(r.admissible.back().sigma_ok);
  CHECK(r.admissible.back().velocity_ok);
  CHECK(r.admissible.back().energy_ok);
  CHECK(r.admissible.back().sigma_sup == 0.0);
  CHECK(r.admissible.back().energy > 0.0);
  CHECK(l2_distance(r.trajectory.back(), run(s0, p, tg).final) <= 1e-6);

  try {
    (void)phi_iteration(s0, p, tg, 2, 1e-8);
    FAIL("expected non-convergence");
  } catch (const PhiConvergenceError& e) {
    CHECK(e.distances().size() == 2);
    CHECK(e.residual() == e.distances().back());
  }

  FluidState big = make_initial_data(InitialFamily::general, 0.2, 8, g32).first;
  const PhiResult w = phi_iteration(big, p, {0.04, 0.02, 1}, 30, 1e-6);
  CHECK(w.warnings.size() == 1);
  CHECK_THROWS_AS(phi_iteration(s0, p, tg, 0, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(phi_iteration(s0, p, tg, 5, 1e-8, AdmissibleSetSpec{1.5}), std::invalid_argument);
}
