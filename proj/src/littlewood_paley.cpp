#include "critlab/littlewood_paley.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace critlab {

namespace {

double mollifier_tail(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// 0 for t <= 0, 1 for t >= 1, smooth in between.
double smooth_step(double t) {
  const double a = mollifier_tail(t);
  const double b = mollifier_tail(1.0 - t);
  return a / (a + b);
}

// 1 on [0, 3/4], 0 on [1, inf).
double cutoff(double rho) { return 1.0 - smooth_step((rho - 0.75) / 0.25); }

}  // namespace

double PartitionProfile::raw(double rho) {
  if (rho <= shell_lo || rho >= 2.0) return 0.0;
  return cutoff(0.5 * rho) - cutoff(rho);
}

double PartitionProfile::raw_dyadic_sum(double rho) {
  if (rho <= 0.0) return 0.0;
  // Terms with 2^{-q} rho in (3/4, 2): q in (log2(rho/2), log2(4 rho/3)).
  const int lo = static_cast<int>(std::floor(std::log2(rho / 2.0))) - 1;
  const int hi = static_cast<int>(std::ceil(std::log2(rho / shell_lo))) + 1;
  double s = 0.0;
  for (int q = lo; q <= hi; ++q) s += raw(std::ldexp(rho, -q));
  return s;
}

double PartitionProfile::operator()(double rho) const {
  const double r = raw(rho);
  if (r == 0.0) return 0.0;
  return r / raw_dyadic_sum(rho);
}

double PartitionProfile::dyadic_sum(double rho) const {
  if (rho <= 0.0) return 0.0;
  const int lo = static_cast<int>(std::floor(std::log2(rho / 2.0))) - 1;
  const int hi = static_cast<int>(std::ceil(std::log2(rho / shell_lo))) + 1;
  double s = 0.0;
  for (int q = lo; q <= hi; ++q) s += (*this)(std::ldexp(rho, -q));
  return s;
}

SpectralField DyadicBlocks::reconstruct() const {
  if (blocks.empty()) throw std::logic_error("empty dyadic decomposition");
  SpectralField out = SpectralField::constant(blocks.front().grid(), mean);
  for (const auto& b : blocks) out += b;
  return out;
}

const std::vector<double>& block_weights(const GridSpec& grid, int q) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<std::vector<double>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{grid.dim, grid.points_per_axis, q}];
  if (!slot) {
    const auto& tab = modes(grid);
    const PartitionProfile profile;
    slot = std::make_unique<std::vector<double>>(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) (*slot)[i] = profile(std::ldexp(tab.norm[i], -q));
  }
  return *slot;
}

SpectralField dyadic_block(const SpectralField& f, int q) {
  const auto& w = block_weights(f.grid(), q);
  SpectralField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i)
    if (w[i] != 0.0) out[i] = w[i] * f[i];
  return out;
}

DyadicBlocks dyadic_decompose(const SpectralField& f, const PartitionProfile& /*profile*/) {
  const GridSpec& g = f.grid();
  DyadicBlocks out;
  out.q_min = g.q_min;
  out.q_max = g.q_max;
  out.mean = f.mean();
  for (int q = g.q_min; q <= g.q_max; ++q) out.blocks.push_back(dyadic_block(f, q));
  return out;
}

SpectralField low_freq_cutoff(const SpectralField& f, int q) {
  const GridSpec& g = f.grid();
  SpectralField out = SpectralField::constant(g, f.mean());
  for (int j = g.q_min; j < q; ++j) out += dyadic_block(f, j);
  return out;
}

double out_of_band_fraction(const SpectralField& f) {
  const GridSpec& g = f.grid();
  std::vector<double> covered(g.size(), 0.0);
  for (int q = g.q_min; q <= g.q_max; ++q) {
    const auto& w = block_weights(g, q);
    for (std::size_t i = 0; i < g.size(); ++i) covered[i] += w[i];
  }
  double total = 0.0;
  double missing = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double e = std::norm(f[i]);
    total += e;
    missing += e * std::max(0.0, 1.0 - covered[i]);
  }
  return total > 0.0 ? missing / total : 0.0;
}

}  // namespace critlab
