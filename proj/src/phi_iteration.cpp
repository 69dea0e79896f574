#include <algorithm>
#include <cmath>
#include <sstream>

#include "critlab/oldroyd.hpp"
#include "critlab/operators.hpp"
#include "oldroyd_internal.hpp"

namespace critlab {

using namespace detail;

void AdmissibleSetSpec::validate() const {
  if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("R must lie in (0, 1)");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  if (!(C0E0 > 0.0)) throw std::invalid_argument("C0E0 must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
}

namespace {

// Trajectory stored at every step; values between steps come from the cubic
// through the four nearest nodes.
class FrozenTrajectory {
 public:
  FrozenTrajectory(const std::vector<FieldBundle>& nodes, double dt) : nodes_(nodes), dt_(dt) {}

  [[nodiscard]] FieldBundle at(double t) const {
    const double r = t / dt_;
    const long last = static_cast<long>(nodes_.size()) - 1;
    const long nearest = std::lround(r);
    if (std::abs(r - static_cast<double>(nearest)) < 1e-9) return nodes_[std::clamp(nearest, 0L, last)];
    const long count = std::min(4L, last + 1);
    const long first = std::clamp(static_cast<long>(std::floor(r)) - 1, 0L, last + 1 - count);
    FieldBundle out(nodes_[0].size(), SpectralField(nodes_[0][0].grid()));
    for (long i = 0; i < count; ++i) {
      double w = 1.0;
      for (long j = 0; j < count; ++j)
        if (j != i) w *= (r - static_cast<double>(first + j)) / static_cast<double>(i - j);
      axpy(out, w, nodes_[first + i]);
    }
    return out;
  }

 private:
  const std::vector<FieldBundle>& nodes_;
  double dt_;
};

std::vector<FieldBundle> solve_linearized(const std::vector<FieldBundle>& frozen, const FieldBundle& u0,
                                          const GridSpec& g, const PhysicalParams& params, const TimeGrid& tg,
                                          std::optional<SpectralField>& warm) {
  const FrozenTrajectory fr(frozen, tg.dt);
  const IfRk4 stepper(g, diffusivities(g, params.mu), tg.dt);
  double cached_t = -1.0;
  FrozenTerms terms;
  const IfRk4::Rhs rhs = [&](const FieldBundle& x, double t) {
    if (t != cached_t) {
      terms = frozen_terms(unpack(fr.at(t), g), params, tg.dt, warm);
      cached_t = t;
    }
    return transport_rhs(terms, x, g);
  };
  std::vector<FieldBundle> out{u0};
  out.reserve(frozen.size());
  const int steps = tg.steps();
  for (int n = 0; n < steps; ++n) {
    FieldBundle next = stepper.step(out.back(), tg.time(n), rhs);
    finish_step(next, g, params);
    out.push_back(std::move(next));
  }
  return out;
}

struct Slots {
  std::size_t first, count;
  double s;
};

std::vector<Slots> field_slots(const GridSpec& g) {
  const auto n = static_cast<std::size_t>(g.dim);
  const double s = g.dim / 2.0;
  return {{0, 1, s}, {1, n, s - 1}, {1 + n, n * n, s}};
}

// Sampled-sup Chemin-Lerner distance summed over (sigma, v, H).
double trajectory_distance(const std::vector<FieldBundle>& a, const std::vector<FieldBundle>& b, const GridSpec& g) {
  double total = 0.0;
  for (const Slots& f : field_slots(g)) {
    std::vector<double> sup(static_cast<std::size_t>(g.block_count()), 0.0);
    for (std::size_t n = 0; n < a.size(); ++n) {
      std::vector<SpectralField> diff;
      for (std::size_t c = f.first; c < f.first + f.count; ++c) diff.push_back(a[n][c] - b[n][c]);
      const auto blocks = block_lp_norms(std::span<const SpectralField>(diff), 2.0);
      for (std::size_t q = 0; q < sup.size(); ++q) sup[q] = std::max(sup[q], blocks[q]);
    }
    total += combine_blocks(sup, g.q_min, f.s, 1.0);
  }
  return total;
}

AdmissibleReport admissible_report(const std::vector<FieldBundle>& traj, const GridSpec& g, const TimeGrid& tg,
                                   const AdmissibleSetSpec& spec) {
  const auto slots = field_slots(g);
  std::vector<NormSeries> series(slots.size());
  for (std::size_t f = 0; f < slots.size(); ++f) {
    series[f].q_min = g.q_min;
    for (std::size_t n = 0; n < traj.size(); ++n) {
      const std::span<const SpectralField> comps(traj[n].data() + slots[f].first, slots[f].count);
      series[f].append(tg.time(static_cast<int>(n)), block_lp_norms(comps, 2.0));
    }
  }
  const double s = g.dim / 2.0;
  const double t_end = tg.t_end;
  const Exponent inf = Exponent::infinity();
  AdmissibleReport r;
  r.sigma_sup = chemin_lerner_norm(series[0], inf, s, 1.0, t_end);
  r.velocity_decay =
      chemin_lerner_norm(series[1], 1.0, s + 1, 1.0, t_end) + chemin_lerner_norm(series[1], 2.0, s, 1.0, t_end);
  r.energy = chemin_lerner_norm(series[1], inf, s - 1, 1.0, t_end) + chemin_lerner_norm(series[2], inf, s, 1.0, t_end);
  r.sigma_ok = r.sigma_sup <= spec.R;
  r.velocity_ok = r.velocity_decay <= spec.eta;
  r.energy_ok = r.energy <= spec.C0E0;
  return r;
}

// Starting iterate: sigma and H held at the data, v under the heat semigroup.
std::vector<FieldBundle> free_evolution(const FieldBundle& u0, const GridSpec& g, const PhysicalParams& params,
                                        const TimeGrid& tg) {
  SpectralField ones(g);
  for (auto& c : ones.coeffs()) c = 1.0;
  const SpectralField k2 = -1.0 * laplacian(ones);
  std::vector<FieldBundle> out;
  for (int n = 0; n <= tg.steps(); ++n) {
    const double t = params.mu * tg.time(n);
    FieldBundle b = u0;
    for (int i = 0; i < g.dim; ++i)
      for (std::size_t m = 0; m < k2.size(); ++m) b[1 + i][m] *= std::exp(-t * k2[m].real());
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

PhiResult phi_iteration(const FluidState& s0, const PhysicalParams& params, const TimeGrid& tg, int max_outer,
                        double tol, const AdmissibleSetSpec& admissible) {
  params.validate();
  tg.validate();
  admissible.validate();
  if (max_outer < 1) throw std::invalid_argument("max_outer must be at least 1");
  const GridSpec g = s0.grid();
  PhiResult out;
  const double sigma0 = besov_norm(s0.sigma, {g.dim / 2.0, 2.0, 1.0}).value;
  if (sigma0 > 0.1) {
    std::ostringstream msg;
    msg << "initial sigma has critical norm " << sigma0 << " > 0.1; the fixed point may not exist";
    out.warnings.push_back(msg.str());
  }

  const FieldBundle u0 = pack(s0);
  std::vector<FieldBundle> current = free_evolution(u0, g, params, tg);
  std::optional<SpectralField> warm;
  for (int it = 1; it <= max_outer; ++it) {
    std::vector<FieldBundle> next = solve_linearized(current, u0, g, params, tg, warm);
    out.distances.push_back(trajectory_distance(current, next, g));
    out.admissible.push_back(admissible_report(next, g, tg, admissible));
    current = std::move(next);
    out.iterations = it;
    if (out.distances.back() < tol) {
      for (std::size_t n = 0; n < current.size(); ++n) {
        out.times.push_back(tg.time(static_cast<int>(n)));
        out.trajectory.push_back(unpack(current[n], g));
      }
      return out;
    }
  }
  std::ostringstream msg;
  msg << "fixed-point iteration did not reach " << tol << " in " << max_outer << " iterations (last distance "
      << out.distances.back() << ")";
  throw PhiConvergenceError(msg.str(), out.distances);
}

}  // namespace critlab
