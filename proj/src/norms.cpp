#include "critlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "critlab/fft.hpp"
#include "critlab/littlewood_paley.hpp"

namespace critlab {

Exponent::Exponent(double value) : kind_(Kind::finite), value_(value) {
  if (!(value >= 1.0) || std::isinf(value)) {
    throw std::invalid_argument("exponent must be a finite value >= 1 (use Exponent::infinity())");
  }
}

double Exponent::value() const {
  if (is_infinite()) throw std::logic_error("infinite exponent has no finite value");
  return value_;
}

std::string Exponent::to_string() const {
  if (is_infinite()) return "inf";
  std::ostringstream os;
  os << value_;
  return os.str();
}

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad exponent '" + text + "'");
  return Exponent(v);
}

namespace {

double lp_of_samples(std::span<const double> values, double cell, Exponent p) {
  if (p.is_infinite()) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  const double pv = p.value();
  double s = 0.0;
  if (pv == 2.0) {
    for (double v : values) s += v * v;
    return std::sqrt(cell * s);
  }
  if (pv == 1.0) {
    for (double v : values) s += std::abs(v);
    return cell * s;
  }
  for (double v : values) s += std::pow(std::abs(v), pv);
  return std::pow(cell * s, 1.0 / pv);
}

std::vector<double> magnitude(std::span<const SpectralField> comps) {
  if (comps.empty()) throw std::invalid_argument("field has no components");
  if (comps.size() == 1) {
    auto p = inverse_transform(comps.front());
    return {p.values().begin(), p.values().end()};
  }
  std::vector<double> mag(comps.front().size(), 0.0);
  for (const auto& c : comps) {
    const auto p = inverse_transform(c);
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += p[i] * p[i];
  }
  for (auto& m : mag) m = std::sqrt(m);
  return mag;
}

double lp_components(std::span<const SpectralField> comps, Exponent p) {
  const GridSpec& g = comps.front().grid();
  return lp_of_samples(magnitude(comps), g.cell_volume(), p);
}

}  // namespace

double lp_norm(const PhysicalField& f, Exponent p) {
  return lp_of_samples(f.values(), f.grid().cell_volume(), p);
}

double lp_norm(const SpectralField& f, Exponent p) { return lp_components({&f, 1}, p); }
double lp_norm(const VectorField& v, Exponent p) { return lp_components(v, p); }
double lp_norm(const TensorField& t, Exponent p) { return lp_components(t.entries(), p); }

std::vector<double> block_lp_norms(std::span<const SpectralField> components, Exponent p) {
  if (components.empty()) throw std::invalid_argument("field has no components");
  const GridSpec& g = components.front().grid();
  for (const auto& c : components) require_same_grid(g, c.grid());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(g.block_count()));
  const bool parseval = !p.is_infinite() && p.value() == 2.0;
  for (int q = g.q_min; q <= g.q_max; ++q) {
    if (parseval) {
      // Rectangle-rule L^2 of a grid trigonometric polynomial, exactly.
      const auto& w = block_weights(g, q);
      double s = 0.0;
      for (const auto& c : components)
        for (std::size_t i = 0; i < g.size(); ++i)
          if (w[i] != 0.0) s += w[i] * w[i] * std::norm(c[i]);
      out.push_back(std::sqrt(g.domain_volume() * s));
      continue;
    }
    std::vector<SpectralField> blocks;
    blocks.reserve(components.size());
    for (const auto& c : components) blocks.push_back(dyadic_block(c, q));
    out.push_back(lp_components(blocks, p));
  }
  return out;
}

std::vector<double> block_lp_norms(const SpectralField& f, Exponent p) {
  return block_lp_norms(std::span<const SpectralField>(&f, 1), p);
}
std::vector<double> block_lp_norms(const VectorField& v, Exponent p) { return block_lp_norms(std::span(v), p); }
std::vector<double> block_lp_norms(const TensorField& t, Exponent p) { return block_lp_norms(t.entries(), p); }

double combine_blocks(std::span<const double> block_lp, int q_min, double s, Exponent r,
                      std::vector<double>* weighted) {
  if (weighted) weighted->clear();
  double acc = 0.0;
  for (std::size_t i = 0; i < block_lp.size(); ++i) {
    const int q = q_min + static_cast<int>(i);
    const double term = std::exp2(q * s) * block_lp[i];
    if (weighted) weighted->push_back(term);
    if (r.is_infinite()) {
      acc = std::max(acc, term);
    } else if (r.value() == 1.0) {
      acc += term;
    } else {
      acc += std::pow(term, r.value());
    }
  }
  if (!r.is_infinite() && r.value() != 1.0) acc = std::pow(acc, 1.0 / r.value());
  return acc;
}

namespace {

BesovResult besov_components(std::span<const SpectralField> comps, const BesovSpec& spec) {
  BesovResult res;
  const GridSpec& g = comps.front().grid();
  res.q_min = g.q_min;
  res.block_lp = block_lp_norms(comps, spec.p);
  res.value = combine_blocks(res.block_lp, g.q_min, spec.s, spec.r, &res.weighted);
  double total = 0.0;
  double missing = 0.0;
  for (const auto& c : comps) {
    const double e = c.energy() - std::norm(c[0]);
    total += e;
    missing += e * out_of_band_fraction(c);
  }
  res.out_of_band = total > 0.0 ? missing / total : 0.0;
  return res;
}

}  // namespace

BesovResult besov_norm(const SpectralField& f, const BesovSpec& spec) {
  return besov_components({&f, 1}, spec);
}
BesovResult besov_norm(const VectorField& v, const BesovSpec& spec) { return besov_components(v, spec); }
BesovResult besov_norm(const TensorField& t, const BesovSpec& spec) {
  return besov_components(t.entries(), spec);
}

double hybrid_from_blocks(std::span<const double> block_l2, int q_min, const HybridSpec& spec) {
  if (!(spec.weight > 0.0)) throw std::invalid_argument("hybrid weight must be positive");
  const double expo = 1.0 - 2.0 * spec.r.reciprocal();
  double acc = 0.0;
  for (std::size_t i = 0; i < block_l2.size(); ++i) {
    const int q = q_min + static_cast<int>(i);
    const double thresh = std::max(spec.weight, std::ldexp(1.0, -q));
    acc += std::exp2(q * spec.s) * std::pow(thresh, expo) * block_l2[i];
  }
  return acc;
}

double hybrid_norm(const SpectralField& f, const HybridSpec& spec) {
  return hybrid_from_blocks(block_lp_norms(f, 2.0), f.grid().q_min, spec);
}
double hybrid_norm(const VectorField& v, const HybridSpec& spec) {
  return hybrid_from_blocks(block_lp_norms(v, 2.0), v.front().grid().q_min, spec);
}
double hybrid_norm(const TensorField& t, const HybridSpec& spec) {
  return hybrid_from_blocks(block_lp_norms(t, 2.0), t(0, 0).grid().q_min, spec);
}

void NormSeries::append(double t, std::vector<double> block_lp) {
  if (!times.empty() && !(t > times.back()))
    throw NormSeriesError("norm series times must be strictly increasing");
  if (!per_block_lp.empty() && block_lp.size() != per_block_lp.front().size())
    throw NormSeriesError("norm series block count changed");
  for (double v : block_lp)
    if (!(v >= 0.0)) throw NormSeriesError("norm series entries must be non-negative");
  times.push_back(t);
  per_block_lp.push_back(std::move(block_lp));
}

double trapezoid(std::span<const double> t, std::span<const double> y, double t_end) {
  if (t.size() != y.size() || t.empty()) throw NormSeriesError("trapezoid needs matching samples");
  if (t_end > t.back() * (1.0 + 1e-12) + 1e-14) throw NormSeriesError("integration horizon beyond last sample");
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i - 1] >= t_end) break;
    if (t[i] <= t_end) {
      acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    } else {
      const double frac = (t_end - t[i - 1]) / (t[i] - t[i - 1]);
      const double y_end = y[i - 1] + frac * (y[i] - y[i - 1]);
      acc += 0.5 * (t_end - t[i - 1]) * (y_end + y[i - 1]);
    }
  }
  return acc;
}

namespace {

void check_series(const NormSeries& series, double t_end) {
  if (series.times.empty()) throw NormSeriesError("empty norm series");
  if (series.times.front() > 1e-12) throw NormSeriesError("norm series must start at t = 0");
  if (t_end > series.times.back() * (1.0 + 1e-12) + 1e-14)
    throw NormSeriesError("horizon T lies beyond the last sample");
  if (t_end < 0.0) throw NormSeriesError("negative horizon");
}

// Samples with t <= T, plus the first sample past T for interpolation.
std::size_t used_samples(const NormSeries& series, double t_end) {
  std::size_t n = 0;
  while (n < series.times.size() && series.times[n] <= t_end) ++n;
  if (n < series.times.size()) ++n;
  return n;
}

}  // namespace

double chemin_lerner_norm(const NormSeries& series, Exponent k, double s, Exponent r, double t_end) {
  check_series(series, t_end);
  const std::size_t n = used_samples(series, t_end);
  const std::size_t nb = series.blocks();
  std::vector<double> per_block(nb, 0.0);
  std::vector<double> y(n);
  for (std::size_t b = 0; b < nb; ++b) {
    if (k.is_infinite()) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (series.times[i] <= t_end) m = std::max(m, series.per_block_lp[i][b]);
      per_block[b] = m;
      continue;
    }
    const double kv = k.value();
    for (std::size_t i = 0; i < n; ++i) y[i] = std::pow(series.per_block_lp[i][b], kv);
    const double integral = trapezoid(std::span(series.times).first(n), y, t_end);
    per_block[b] = std::pow(integral, 1.0 / kv);
  }
  return combine_blocks(per_block, series.q_min, s, r);
}

double lebesgue_time_norm(const NormSeries& series, Exponent k, double s, Exponent r, double t_end) {
  check_series(series, t_end);
  const std::size_t n = used_samples(series, t_end);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = combine_blocks(series.per_block_lp[i], series.q_min, s, r);
  if (k.is_infinite()) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (series.times[i] <= t_end) m = std::max(m, y[i]);
    return m;
  }
  const double kv = k.value();
  for (auto& v : y) v = std::pow(v, kv);
  return std::pow(trapezoid(std::span(series.times).first(n), y, t_end), 1.0 / kv);
}

}  // namespace critlab
