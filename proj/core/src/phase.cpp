#include "cardiosync/phase.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cardiosync/errors.hpp"
#include "fft.hpp"

namespace cardiosync {

std::size_t PhaseSeries::interior_begin() const {
  return static_cast<std::size_t>(
      std::ceil(edge_frac * static_cast<double>(phase_rad.size())));
}

std::size_t PhaseSeries::interior_end() const {
  return phase_rad.size() - interior_begin();
}

PhaseSeries analytic_phase(const Waveform& w, double edge_frac) {
  validate_waveform(w, "analytic_phase");
  if (!(edge_frac >= 0.0 && edge_frac < 0.5)) {
    throw Error(ErrorKind::InvalidConfig, "edge_frac must be in [0, 0.5)");
  }
  const std::size_t n = w.samples.size();
  if (n < 16) {
    throw Error(ErrorKind::InvalidInput,
                "analytic_phase needs at least 16 samples");
  }

  double mean = 0.0, max_abs = 0.0;
  for (double v : w.samples) {
    mean += v;
    max_abs = std::max(max_abs, std::abs(v));
  }
  mean /= static_cast<double>(n);
  double rms = 0.0;
  for (double v : w.samples) rms += (v - mean) * (v - mean);
  rms = std::sqrt(rms / static_cast<double>(n));
  if (max_abs == 0.0 || rms < 1e-12 * max_abs) {
    throw Error(ErrorKind::InvalidInput,
                "(near-)constant signal: phase undefined");
  }

  const auto z = detail::analytic_signal(w.samples);

  PhaseSeries out;
  out.rate_hz = w.rate_hz;
  out.start_s = w.start_s;
  out.edge_frac = edge_frac;
  out.phase_rad.resize(n);

  // Wrap-aware unwrap: map each successive difference into (-pi, pi].
  double prev_wrapped = std::atan2(z[0].imag(), z[0].real());
  double offset = 0.0;
  out.phase_rad[0] = prev_wrapped;
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = std::atan2(z[i].imag(), z[i].real());
    double d = cur - prev_wrapped;
    while (d <= -M_PI) d += 2.0 * M_PI;
    while (d > M_PI) d -= 2.0 * M_PI;
    offset += d - (cur - prev_wrapped);
    out.phase_rad[i] = cur + offset;
    prev_wrapped = cur;
  }
  return out;
}

double phase_at(const PhaseSeries& p, double t_s) {
  const double pos = (t_s - p.start_s) * p.rate_hz;
  const double last = static_cast<double>(p.phase_rad.size() - 1);
  if (pos < -1e-9 || pos > last + 1e-9) {
    throw Error(ErrorKind::OutOfRange,
                "time " + std::to_string(t_s) + " s outside phase span");
  }
  std::size_t i0 = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
  if (i0 >= p.phase_rad.size() - 1) i0 = p.phase_rad.size() - 2;
  const double frac = pos - static_cast<double>(i0);
  return p.phase_rad[i0] + frac * (p.phase_rad[i0 + 1] - p.phase_rad[i0]);
}

double resp_rate(const PhaseSeries& p) {
  const std::size_t b = p.interior_begin();
  const std::size_t e = p.interior_end();
  if (e <= b + 1) {
    throw Error(ErrorKind::InvalidInput, "phase series interior is empty");
  }
  const double advance = p.phase_rad[e - 1] - p.phase_rad[b];
  if (advance < 2.0 * M_PI) {
    throw Error(ErrorKind::InvalidInput,
                "phase advance below one full cycle");
  }
  const double duration =
      static_cast<double>(e - 1 - b) / p.rate_hz;
  return advance / (2.0 * M_PI * duration);
}

}  // namespace cardiosync
