#include "critlab/stepping.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "critlab/fft.hpp"
#include "critlab/operators.hpp"

namespace critlab {

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw TimeGridError("time step must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw TimeGridError("final time must be positive");
  if (save_stride < 1) throw TimeGridError("save stride must be at least 1");
  const double q = t_end / dt;
  const double n = std::round(q);
  if (n < 1.0 || std::abs(q - n) > n * std::numeric_limits<double>::epsilon())
    throw TimeGridError("final time " + std::to_string(t_end) + " is not a whole number of steps of " +
                        std::to_string(dt));
}

int TimeGrid::steps() const { return static_cast<int>(std::round(t_end / dt)); }

double TimeGrid::time(int n) const { return n == steps() ? t_end : n * dt; }

TimeGrid TimeGrid::refined() const { return {t_end, dt / 2, save_stride * 2}; }

TimeGrid TimeGrid::fitted(double t_end, double dt_max, int save_stride) {
  if (!(dt_max > 0.0) || !(t_end > 0.0)) throw TimeGridError("time step and final time must be positive");
  const double n = std::ceil(t_end / dt_max * (1 - 4 * std::numeric_limits<double>::epsilon()));
  TimeGrid tg{t_end, t_end / n, save_stride};
  tg.validate();
  return tg;
}

IfRk4::IfRk4(const GridSpec& grid, std::vector<double> diffusivity, double dt)
    : grid_(grid), diffusivity_(std::move(diffusivity)), dt_(dt) {
  if (!(dt > 0.0)) throw TimeGridError("time step must be positive");
  const auto& tab = modes(grid);
  for (double mu : diffusivity_) {
    if (mu < 0.0) throw std::invalid_argument("negative diffusivity");
    if (mu == 0.0 || factors_.count(mu)) continue;
    std::vector<double> full(grid.size()), half(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      full[i] = std::exp(-mu * tab.norm_sq[i] * dt);
      half[i] = std::exp(-mu * tab.norm_sq[i] * dt / 2);
    }
    factors_.emplace(mu, std::make_pair(std::move(full), std::move(half)));
  }
}

void IfRk4::apply_factor(FieldBundle& u, bool half) const {
  for (std::size_t c = 0; c < u.size(); ++c) {
    const double mu = diffusivity_[c];
    if (mu == 0.0) continue;
    const auto& pair = factors_.at(mu);
    const auto& e = half ? pair.second : pair.first;
    auto coeffs = u[c].coeffs();
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= e[i];
  }
}

FieldBundle IfRk4::step(const FieldBundle& u, double t, const Rhs& rhs) const {
  if (u.size() != diffusivity_.size()) throw std::invalid_argument("bundle size does not match the stepper");
  const double h = dt_;
  const FieldBundle k1 = rhs(u, t);

  FieldBundle a = u;
  axpy(a, h / 2, k1);
  apply_factor(a, true);
  const FieldBundle k2 = rhs(a, t + h / 2);

  FieldBundle eu_half = u;
  apply_factor(eu_half, true);
  FieldBundle b = eu_half;
  axpy(b, h / 2, k2);
  const FieldBundle k3 = rhs(b, t + h / 2);

  FieldBundle ek3 = k3;
  apply_factor(ek3, true);
  FieldBundle c = eu_half;
  apply_factor(c, true);
  axpy(c, h, ek3);
  const FieldBundle k4 = rhs(c, t + h);

  // u_{n+1} = E u + h/6 (E k1 + 2 E2 (k2 + k3) + k4)
  FieldBundle mid = k2;
  axpy(mid, 1.0, k3);
  apply_factor(mid, true);
  FieldBundle out = u;
  axpy(out, h / 6, k1);
  apply_factor(out, false);
  axpy(out, h / 3, mid);
  axpy(out, h / 6, k4);
  return out;
}

std::vector<PhysicalField> to_physical(const VectorField& v) {
  std::vector<PhysicalField> out;
  out.reserve(v.size());
  for (const auto& c : v) out.push_back(inverse_transform(c));
  return out;
}

double max_speed(const std::vector<PhysicalField>& v) {
  if (v.empty()) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < v.front().size(); ++i) {
    double s = 0.0;
    for (const auto& c : v) s += c[i] * c[i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

void check_cfl(const std::vector<PhysicalField>& v, double dt) {
  if (v.empty()) return;
  const double number = dt * max_speed(v) * v.front().grid().dealias_cutoff();
  if (number > 1.0) throw CflError("CFL number " + std::to_string(number) + " exceeds 1");
}

double divergence_residual(const VectorField& v) {
  const GridSpec& g = v.front().grid();
  double energy = 0.0;
  for (const auto& c : v) energy += c.energy();
  const double scale = std::max(1.0, std::sqrt(energy) * g.nyquist());
  return std::sqrt(divergence(v).energy()) / scale;
}

void check_solenoidal(const VectorField& v, double tol) {
  const double r = divergence_residual(v);
  if (r > tol) throw NonSolenoidalError("velocity divergence residual " + std::to_string(r) + " exceeds tolerance");
}

}  // namespace critlab
