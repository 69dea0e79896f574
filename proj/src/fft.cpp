#include "critlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace critlab {

namespace {

// FFTW plans are created under a lock (the planner is not thread-safe) and
// executed through the new-array interface, which is.
struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  Plans() = default;
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

const Plans& plans_for(const GridSpec& g) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{g.dim, g.points_per_axis}];
  if (!slot) {
    slot = std::make_unique<Plans>();
    int n[3] = {g.points_per_axis, g.points_per_axis, g.points_per_axis};
    const std::size_t sz = g.size();
    auto* in = fftw_alloc_complex(sz);
    auto* out = fftw_alloc_complex(sz);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot->forward = fftw_plan_dft(g.dim, n, in, out, FFTW_FORWARD, flags);
    slot->backward = fftw_plan_dft(g.dim, n, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
  }
  return *slot;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

SpectralField forward_transform(const PhysicalField& samples) {
  const GridSpec& g = samples.grid();
  const std::size_t n = g.size();
  if (samples.size() != n) throw GridError("sample array does not match grid shape");
  std::vector<Complex> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = samples[i];
  std::vector<Complex> out(n);
  fftw_execute_dft(plans_for(g).forward, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= scale;
  return SpectralField(g, std::move(out));
}

PhysicalField inverse_transform(const SpectralField& field) {
  const GridSpec& g = field.grid();
  const std::size_t n = g.size();
  std::vector<Complex> in(field.coeffs().begin(), field.coeffs().end());
  std::vector<Complex> out(n);
  fftw_execute_dft(plans_for(g).backward, as_fftw(in.data()), as_fftw(out.data()));
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = out[i].real();
  return PhysicalField(g, std::move(values));
}

}  // namespace critlab
