#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace cardiosync::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> in,
                                      bool inverse) {
  const int n = static_cast<int>(in.size());
  std::vector<std::complex<double>> out(in.size());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()),
        inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
  }
  return out;
}

std::vector<std::complex<double>> analytic_signal(
    const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = {x[i], 0.0};
  auto spec = fft(std::move(buf), false);

  // One-sided weighting: keep DC (and Nyquist for even n), double the
  // positive frequencies, zero the negative ones.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (n % 2 == 0 && k == half) continue;  // Nyquist stays as-is
    if (k < half || (n % 2 == 1 && k <= half)) {
      spec[k] *= 2.0;
    } else {
      spec[k] = 0.0;
    }
  }
  return fft(std::move(spec), true);
}

}  // namespace cardiosync::detail
