#include "critlab/estimate_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "critlab/littlewood_paley.hpp"
#include "critlab/operators.hpp"

namespace critlab {

void EnsembleSpec::validate() const {
  if (count < 1) throw std::invalid_argument("ensemble count must be at least 1");
  if (threads < 1) throw std::invalid_argument("thread count must be at least 1");
  if (!(spectrum.k_min > 0.0 && spectrum.k_max >= spectrum.k_min))
    throw std::invalid_argument("spectrum band must satisfy 0 < k_min <= k_max");
}

std::vector<std::optional<double>> run_ensemble(int count, std::uint64_t seed, int threads,
                                                const std::function<std::optional<double>(int, Rng&)>& fn) {
  std::vector<std::optional<double>> out(static_cast<std::size_t>(count));
  const int workers = std::max(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto work = [&](int w) {
    try {
      for (int i = w; i < count; i += workers) {
        Rng rng(seed + static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = fn(i, rng);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

RatioReport ratio_report(std::string name, std::vector<std::pair<std::string, double>> params,
                         const EnsembleSpec& ens, const std::function<std::optional<double>(int, Rng&)>& fn) {
  ens.validate();
  const auto all = run_ensemble(2 * ens.count, ens.seed, ens.threads, fn);
  RatioReport r;
  r.name = std::move(name);
  r.params = std::move(params);
  r.count = ens.count;
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2 * ens.count; ++i) {
    const auto& x = all[static_cast<std::size_t>(i)];
    if (i < ens.count) {
      if (!x) {
        ++r.skipped;
        continue;
      }
      r.ratios.push_back(*x);
      r.max_ratio = std::max(r.max_ratio, *x);
      r.min_ratio = std::min(r.min_ratio, *x);
    }
    if (x) r.doubled_max_ratio = std::max(r.doubled_max_ratio, *x);
  }
  if (r.ratios.empty()) r.min_ratio = 0.0;
  r.stable = ens.count >= kMinStableCount && !r.ratios.empty() &&
             std::abs(r.doubled_max_ratio - r.max_ratio) <= 0.2 * r.max_ratio;
  return r;
}

namespace {

std::optional<double> guarded(double num, double den) {
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

double besov(const SpectralField& f, double s, double p, Exponent r) { return besov_norm(f, {s, p, r}).value; }
double besov(const VectorField& f, double s, double p, Exponent r) { return besov_norm(f, {s, p, r}).value; }

NormSeries series_of(const std::vector<SpectralField>& orbit, double t_end, double p) {
  NormSeries ns;
  ns.q_min = orbit.front().grid().q_min;
  const double dt = orbit.size() > 1 ? t_end / static_cast<double>(orbit.size() - 1) : 0.0;
  for (std::size_t n = 0; n < orbit.size(); ++n)
    ns.append(dt * static_cast<double>(n), block_lp_norms(orbit[n], p));
  return ns;
}

constexpr double kOrbitTime = 0.05;
constexpr int kOrbitSamples = 11;

}  // namespace

std::optional<double> bernstein_ratio(const SpectralField& u, const BesovSpec& spec) {
  const double den = besov_norm(u, spec).value;
  const double num = besov_norm(gradient(u), {spec.s - 1.0, spec.p, spec.r}).value;
  return guarded(num, den);
}

RatioReport verify_bernstein(const BesovSpec& spec, const EnsembleSpec& ens, const GridSpec& grid) {
  RatioReport r = ratio_report("bernstein", {{"s", spec.s}, {"dim", grid.dim}}, ens,
                               [&](int, Rng& rng) { return bernstein_ratio(random_field(grid, ens.spectrum, rng), spec); });
  if (!spec.p.is_infinite()) r.params.emplace_back("p", spec.p.value());
  if (!spec.r.is_infinite()) r.params.emplace_back("r", spec.r.value());
  if (!spec.p.is_infinite() && spec.p.value() == 2.0) {
    r.bracket = {PartitionProfile::shell_lo, PartitionProfile::shell_hi};
    for (double x : r.ratios)
      if (x < r.bracket->first || x > r.bracket->second) r.bracket_ok = false;
  }
  return r;
}

std::string to_string(ProductLaw law) {
  switch (law) {
    case ProductLaw::besov: return "besov";
    case ProductLaw::besov_weak: return "besov_weak";
    case ProductLaw::chemin_lerner: return "chemin_lerner";
    case ProductLaw::chemin_lerner_weak: return "chemin_lerner_weak";
  }
  return "unknown";
}

std::string to_string(ProductPairing pairing) {
  switch (pairing) {
    case ProductPairing::independent: return "independent";
    case ProductPairing::self: return "self";
    case ProductPairing::disjoint_shells: return "disjoint_shells";
  }
  return "unknown";
}

void check_product_indices(ProductLaw law, double s1, double s2, double p, int dim) {
  if (!(p >= 1.0)) throw IndexConditionError("p must be at least 1");
  const double crit = dim / p;
  const double floor = dim * std::max(0.0, 2.0 / p - 1.0);
  const bool weak = law == ProductLaw::besov_weak || law == ProductLaw::chemin_lerner_weak;
  const bool ok = weak ? (s1 <= crit && s2 < crit && s1 + s2 >= floor) : (s1 <= crit && s2 <= crit && s1 + s2 > floor);
  if (!ok) throw IndexConditionError("product law indices outside the admissible range");
}

std::optional<double> product_ratio(ProductLaw law, const SpectralField& u, const SpectralField& v, double s1,
                                    double s2, double p) {
  const GridSpec& g = u.grid();
  check_product_indices(law, s1, s2, p, g.dim);
  const double s = s1 + s2 - g.dim / p;
  const Exponent inf = Exponent::infinity();
  switch (law) {
    case ProductLaw::besov:
      return guarded(besov(multiply(u, v), s, p, 1.0), besov(u, s1, p, 1.0) * besov(v, s2, p, 1.0));
    case ProductLaw::besov_weak:
      return guarded(besov(multiply(u, v), s, p, inf), besov(u, s1, p, 1.0) * besov(v, s2, p, inf));
    case ProductLaw::chemin_lerner:
    case ProductLaw::chemin_lerner_weak: {
      const Exponent r2 = law == ProductLaw::chemin_lerner ? Exponent(1.0) : inf;
      const auto uo = heat_orbit(u, kOrbitTime, kOrbitSamples);
      const auto vo = heat_orbit(v, kOrbitTime, kOrbitSamples);
      std::vector<SpectralField> prod;
      for (std::size_t n = 0; n < uo.size(); ++n) prod.push_back(multiply(uo[n], vo[n]));
      const double num = chemin_lerner_norm(series_of(prod, kOrbitTime, p), 1.0, s, r2, kOrbitTime);
      const double den = chemin_lerner_norm(series_of(uo, kOrbitTime, p), 2.0, s1, 1.0, kOrbitTime) *
                         chemin_lerner_norm(series_of(vo, kOrbitTime, p), 2.0, s2, r2, kOrbitTime);
      return guarded(num, den);
    }
  }
  return std::nullopt;
}

RatioReport verify_product_laws(ProductLaw law, double s1, double s2, double p, const EnsembleSpec& ens,
                                const GridSpec& grid, ProductPairing pairing) {
  check_product_indices(law, s1, s2, p, grid.dim);
  const RandomSpectrum& sp = ens.spectrum;
  const RandomSpectrum low{sp.k_min, std::max(sp.k_min, 2.0 * sp.k_min), sp.decay};
  const RandomSpectrum high{std::max(sp.k_min, sp.k_max / 2.0), sp.k_max, sp.decay};
  auto member = [&](int, Rng& rng) -> std::optional<double> {
    switch (pairing) {
      case ProductPairing::independent: {
        const SpectralField u = random_field(grid, sp, rng);
        return product_ratio(law, u, random_field(grid, sp, rng), s1, s2, p);
      }
      case ProductPairing::self: {
        const SpectralField u = random_field(grid, sp, rng);
        return product_ratio(law, u, u, s1, s2, p);
      }
      case ProductPairing::disjoint_shells: {
        const SpectralField u = random_field(grid, low, rng);
        return product_ratio(law, u, random_field(grid, high, rng), s1, s2, p);
      }
    }
    return std::nullopt;
  };
  return ratio_report("product_" + to_string(law) + "_" + to_string(pairing), {{"s1", s1}, {"s2", s2}, {"p", p}},
                      ens, member);
}

std::vector<SpectralField> heat_orbit(const SpectralField& u, double t_end, int samples) {
  if (samples < 1) throw std::invalid_argument("orbit needs at least one sample");
  const auto& tab = modes(u.grid());
  std::vector<SpectralField> out;
  for (int n = 0; n < samples; ++n) {
    const double t = samples > 1 ? t_end * n / (samples - 1) : 0.0;
    SpectralField f = u;
    for (std::size_t m = 0; m < f.size(); ++m) f[m] *= std::exp(-t * tab.norm_sq[m]);
    out.push_back(std::move(f));
  }
  return out;
}

std::optional<double> log_interpolation_ratio(const std::vector<SpectralField>& orbit, double t_end, double s,
                                              double eps, Exponent k) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  const NormSeries ns = series_of(orbit, t_end, 2.0);
  const Exponent inf = Exponent::infinity();
  const double lhs = chemin_lerner_norm(ns, k, s, 1.0, t_end);
  const double mid = chemin_lerner_norm(ns, k, s, inf, t_end);
  if (!(mid > 0.0)) return std::nullopt;
  const double lo = chemin_lerner_norm(ns, k, s - eps, inf, t_end);
  const double hi = chemin_lerner_norm(ns, k, s + eps, inf, t_end);
  return lhs * eps / (mid * std::log(std::exp(1.0) + (lo + hi) / mid));
}

RatioReport verify_log_interpolation(const EnsembleSpec& ens, double s, double eps, const GridSpec& grid,
                                     Exponent k) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  RatioReport r = ratio_report("log_interpolation", {{"s", s}, {"eps", eps}}, ens, [&](int, Rng& rng) {
    return log_interpolation_ratio(heat_orbit(random_field(grid, ens.spectrum, rng), kOrbitTime, kOrbitSamples),
                                   kOrbitTime, s, eps, k);
  });
  if (!k.is_infinite()) r.params.emplace_back("k", k.value());
  return r;
}

void check_commutator_indices(double s, double t, double p, int dim) {
  if (!(p >= 1.0)) throw IndexConditionError("p must be at least 1");
  const double crit = dim / p;
  if (!(t <= crit + 1.0 && s >= 1.0 && s <= crit + 1.0 && s + t > 1.0))
    throw IndexConditionError("commutator indices outside t <= N/p + 1, 1 <= s <= N/p + 1, s + t > 1");
}

std::vector<double> commutator_blocks(const SpectralField& A, const SpectralField& B, double s, double t, double p) {
  const GridSpec& g = A.grid();
  check_commutator_indices(s, t, p, g.dim);
  const VectorField gradB = gradient(B);
  SpectralField full(g);
  for (int j = 0; j < g.dim; ++j) full += derivative(multiply(A, gradB[j]), j);
  std::vector<double> out;
  for (int q = g.q_min; q <= g.q_max; ++q) {
    SpectralField c = -1.0 * dyadic_block(full, q);
    for (int j = 0; j < g.dim; ++j) c += derivative(multiply(A, dyadic_block(gradB[j], q)), j);
    out.push_back(lp_norm(c, p) * std::pow(2.0, q * (s + t - 2.0 - g.dim / p)));
  }
  return out;
}

std::optional<double> commutator_ratio(const SpectralField& A, const SpectralField& B, double s, double t,
                                       double p) {
  const auto blocks = commutator_blocks(A, B, s, t, p);
  double num = 0.0;
  for (double b : blocks) num += b;
  return guarded(num, besov(gradient(A), s - 1.0, p, 1.0) * besov(gradient(B), t - 1.0, p, 1.0));
}

RatioReport verify_commutator(const EnsembleSpec& ens, double s, double t, double p, const GridSpec& grid) {
  check_commutator_indices(s, t, p, grid.dim);
  return ratio_report("commutator", {{"s", s}, {"t", t}, {"p", p}}, ens, [&](int, Rng& rng) {
    const SpectralField A = random_field(grid, ens.spectrum, rng);
    return commutator_ratio(A, random_field(grid, ens.spectrum, rng), s, t, p);
  });
}

bool ScalingReport::passed() const {
  return std::all_of(entries.begin(), entries.end(),
                     [this](const ScalingEntry& e) { return e.relative_error <= tolerance; });
}

ScalingReport verify_scaling(const FluidState& st, int m, double p, double tolerance) {
  const GridSpec& g = st.grid();
  const double l = std::ldexp(1.0, m);
  const double crit = g.dim / p;
  const double cell = std::pow(l, -crit);
  ScalingReport rep{m, p, {}, tolerance};
  // The dilated field must stay inside the blocks the norms see.
  const double band = 0.75 * std::ldexp(1.0, g.q_max + 1);
  auto dilate = [m, band](const std::vector<SpectralField>& comps, double factor) {
    std::vector<SpectralField> out;
    for (const auto& c : comps) {
      out.push_back(factor * rescale(c, m));
      if (max_wavenumber(out.back(), 1e-13 * std::max(1e-300, std::sqrt(out.back().energy()))) > band)
        throw RescaleError("dilated field leaves the retained band |k| <= " + std::to_string(band));
    }
    return out;
  };
  auto add = [&](const std::string& name, const std::vector<SpectralField>& comps, double s, double amp,
                 double time_factor) {
    const double a = besov_norm(VectorField(comps), {s, p, 1.0}).value;
    const double b = besov_norm(VectorField(dilate(comps, amp)), {s, p, 1.0}).value * cell * time_factor;
    const double err = a > 0.0 ? std::abs(b - a) / a : std::abs(b);
    rep.entries.push_back({name, a, b, err});
  };
  add("sigma", {st.sigma}, crit, 1.0, 1.0);
  add("v", st.velocity, crit - 1.0, l, 1.0);
  add("H", {st.H.entries().begin(), st.H.entries().end()}, crit, 1.0, 1.0);
  add("grad_p", st.pressure_grad, crit - 1.0, l * l * l, 1.0 / (l * l));
  return rep;
}

double smallness_alpha(const FluidState& s, double mu) {
  const double crit = s.grid().dim / 2.0;
  const HybridSpec hyb{crit, Exponent::infinity(), mu};
  return hybrid_norm(s.sigma, hyb) + besov_norm(s.velocity, {crit - 1.0, 2.0, 1.0}).value + hybrid_norm(s.H, hyb);
}

double h_norm(const RunRecord& rec, double mu, double t_end) {
  const double crit = rec.final.grid().dim / 2.0;
  const HybridSpec hinf{crit, Exponent::infinity(), mu};
  const HybridSpec h1{crit, 1.0, mu};
  const int q_min = rec.sigma_series.q_min;
  std::vector<double> sh_inf, sh_one;
  double v_sup = 0.0;
  double sup_sh = 0.0;
  for (std::size_t n = 0; n < rec.times.size(); ++n) {
    const auto& sb = rec.sigma_series.per_block_lp[n];
    const auto& hb = rec.H_series.per_block_lp[n];
    const double a = hybrid_from_blocks(sb, q_min, hinf) + hybrid_from_blocks(hb, q_min, hinf);
    sup_sh = std::max(sup_sh, a);
    sh_one.push_back(hybrid_from_blocks(sb, q_min, h1) + hybrid_from_blocks(hb, q_min, h1));
    v_sup = std::max(v_sup, combine_blocks(rec.velocity_series.per_block_lp[n], q_min, crit - 1.0, 1.0));
  }
  const double sh_int = trapezoid(rec.times, sh_one, t_end);
  const double v_int = lebesgue_time_norm(rec.velocity_series, 1.0, crit + 1.0, 1.0, t_end);
  return sup_sh + v_sup + mu * (sh_int + v_int);
}

SmallnessTable smallness_experiment(const std::vector<double>& alphas, double T, const GridSpec& grid,
                                    const PhysicalParams& params, const SmallnessOptions& opts) {
  params.validate();
  const double crit = grid.dim / 2.0;
  auto data = [&](double amp) { return make_initial_data(opts.family, amp, opts.seed, grid).first; };
  const double unit = smallness_alpha(data(1.0), params.mu);
  SmallnessTable table;
  for (double alpha : alphas) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
    SmallnessRow row;
    row.alpha = alpha;
    try {
      FluidState s0 = FluidState::zeros(grid);
      if (alpha > 0.0) {
        // Bisection in log amplitude on a bracket around the linear guess.
        double lo = alpha / unit / 4.0, hi = alpha / unit * 4.0;
        while (smallness_alpha(data(lo), params.mu) > alpha) lo /= 4.0;
        while (smallness_alpha(data(hi), params.mu) < alpha) hi *= 4.0;
        double amp = alpha / unit;
        double achieved = smallness_alpha(data(amp), params.mu);
        for (int it = 0; it < 200 && std::abs(achieved - alpha) > opts.bisection_tol * alpha; ++it) {
          (achieved < alpha ? lo : hi) = amp;
          amp = std::sqrt(lo * hi);
          achieved = smallness_alpha(data(amp), params.mu);
        }
        row.amplitude = amp;
        row.achieved_alpha = achieved;
        s0 = data(amp);
      }
      const RunRecord rec = run(s0, params, {T, opts.dt, opts.save_stride});
      row.h_norm = h_norm(rec, params.mu, T);
      row.grad_p_l1 = lebesgue_time_norm(rec.pressure_series, 1.0, crit - 1.0, 1.0, T);
      if (alpha > 0.0) {
        row.h_ratio = row.h_norm / alpha;
        row.pressure_ratio = row.grad_p_l1 / (alpha * alpha);
      }
      row.completed = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    if (!r.completed || r.alpha <= 0.0) continue;
    lo = std::min(lo, r.h_ratio);
    hi = std::max(hi, r.h_ratio);
    if (r.grad_p_l1 > 0.0) {
      xs.push_back(std::log(r.alpha));
      ys.push_back(std::log(r.grad_p_l1));
    }
  }
  table.h_ratio_spread = hi > 0.0 ? hi / lo : 0.0;
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    table.pressure_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return table;
}

double RefinementStudy::min_ratio(const std::vector<double>& gaps) {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) r = std::min(r, gaps[i] / gaps[i + 1]);
  return r;
}

namespace {

double defect_gap(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]).energy();
  return std::sqrt(sq * a.front().grid().domain_volume());
}

}  // namespace

RefinementStudy refinement_study(const FluidState& s0, const PhysicalParams& params, double T, double dt,
                                 int levels) {
  if (levels < 2) throw std::invalid_argument("a refinement study needs at least two levels");
  RefinementStudy out;
  std::vector<FluidState> finals;
  TimeGrid tg{T, dt, 1};
  tg.validate();
  tg.save_stride = std::max(1, tg.steps() / 10);
  for (int l = 0; l < levels; ++l) {
    const RunRecord rec = run(s0, params, tg);
    for (const auto& r : rec.residuals) out.max_divergence = std::max(out.max_divergence, r.divergence);
    out.dts.push_back(tg.dt);
    finals.push_back(rec.final);
    tg = tg.refined();
  }
  for (int l = 0; l + 1 < levels; ++l) {
    const FluidState& a = finals[static_cast<std::size_t>(l)];
    const FluidState& b = finals[static_cast<std::size_t>(l + 1)];
    out.state_gaps.push_back(l2_distance(a, b));
    out.deformation_gaps.push_back(defect_gap(deformation_defect(a.H), deformation_defect(b.H)));
    out.perturbation_gaps.push_back(defect_gap(perturbation_defect(a.H), perturbation_defect(b.H)));
  }
  return out;
}

namespace {

std::string params_text(const RatioReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < r.params.size(); ++i) os << (i ? ";" : "") << r.params[i].first << "=" << r.params[i].second;
  return os.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << std::setprecision(17);
  return f;
}

}  // namespace

const std::vector<std::string>& ratio_suite_names() {
  static const std::vector<std::string> names{"bernstein", "products", "loginterp", "commutator"};
  return names;
}

std::vector<RatioReport> default_ratio_suite(const std::string& suite, const EnsembleSpec& ens,
                                             const GridSpec& grid) {
  const double n = grid.dim;
  std::vector<RatioReport> out;
  if (suite == "bernstein") {
    std::vector<double> ss{0.0, 1.0};
    if (n / 2.0 != 1.0) ss.push_back(n / 2.0);
    for (double s : ss) out.push_back(verify_bernstein({s, 2.0, 1.0}, ens, grid));
  } else if (suite == "products") {
    const double c = n / 2.0;
    out.push_back(verify_product_laws(ProductLaw::besov, c, c, 2.0, ens, grid));
    out.push_back(verify_product_laws(ProductLaw::besov, c, c / 2.0, 2.0, ens, grid));
    out.push_back(verify_product_laws(ProductLaw::besov, c, c, 2.0, ens, grid, ProductPairing::self));
    out.push_back(verify_product_laws(ProductLaw::besov, c, c, 2.0, ens, grid, ProductPairing::disjoint_shells));
    out.push_back(verify_product_laws(ProductLaw::besov_weak, c, c / 2.0, 2.0, ens, grid));
    out.push_back(verify_product_laws(ProductLaw::chemin_lerner, c, c, 2.0, ens, grid));
    out.push_back(verify_product_laws(ProductLaw::chemin_lerner_weak, c, c / 2.0, 2.0, ens, grid));
  } else if (suite == "loginterp") {
    for (double eps : {0.5, 1.0}) out.push_back(verify_log_interpolation(ens, n / 2.0, eps, grid));
  } else if (suite == "commutator") {
    const double top = n / 2.0 + 1.0;
    out.push_back(verify_commutator(ens, 1.0, 1.0, 2.0, grid));
    out.push_back(verify_commutator(ens, top, 1.0, 2.0, grid));
    out.push_back(verify_commutator(ens, 1.0, top, 2.0, grid));
  } else {
    throw std::invalid_argument("unknown verifier suite '" + suite + "'");
  }
  return out;
}

FluidState band_safe_state(const GridSpec& grid, std::uint64_t seed) {
  const double band = std::floor(grid.retained_radius() / 2.0) - 1.0;
  if (band < 1.0) throw std::invalid_argument("grid too coarse for band-safe data");
  FluidState s = make_initial_data(InitialFamily::exact_gradient, 0.1, seed, grid, band).first;
  Rng rng(seed + 1);
  s.sigma = random_field(grid, {1.0, band, 1.0}, rng);
  s.pressure_grad = gradient(random_field(grid, {1.0, band, 1.0}, rng));
  return s;
}

void write_reports_csv(const std::filesystem::path& path, const std::vector<RatioReport>& reports) {
  std::ofstream f = open_out(path);
  f << "experiment,params,count,skipped,min_ratio,max_ratio,doubled_max_ratio,stable,bracket_lo,bracket_hi,bracket_ok\n";
  for (const auto& r : reports) {
    f << r.name << "," << params_text(r) << "," << r.count << "," << r.skipped << "," << r.min_ratio << ","
      << r.max_ratio << "," << r.doubled_max_ratio << "," << (r.stable ? "true" : "false") << ",";
    if (r.bracket) f << r.bracket->first << "," << r.bracket->second;
    else f << ",";
    f << "," << (r.bracket_ok ? "true" : "false") << "\n";
  }
}

void write_reports_json(const std::filesystem::path& path, const std::vector<RatioReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    arr.push_back({{"experiment", r.name}, {"params", params}, {"max_ratio", r.max_ratio}, {"stable", r.stable}});
  }
  std::ofstream f = open_out(path);
  f << arr.dump(2) << "\n";
}

void write_smallness_csv(const std::filesystem::path& path, const SmallnessTable& table) {
  std::ofstream f = open_out(path);
  f << "alpha,amplitude,achieved_alpha,h_norm,grad_p_l1,h_ratio,pressure_ratio,completed,error\n";
  for (const auto& r : table.rows)
    f << r.alpha << "," << r.amplitude << "," << r.achieved_alpha << "," << r.h_norm << "," << r.grad_p_l1 << ","
      << r.h_ratio << "," << r.pressure_ratio << "," << (r.completed ? "true" : "false") << ",\"" << r.error
      << "\"\n";
}

}  // namespace critlab
