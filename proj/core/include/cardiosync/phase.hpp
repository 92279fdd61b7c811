#pragma once

#include <cstddef>
#include <vector>

#include "cardiosync/waveform.hpp"

namespace cardiosync {

/// Unwrapped instantaneous phase on the same grid as the source waveform.
/// The leading/trailing edge_frac of samples are flagged edge-unreliable
/// (boundary ringing of the discrete analytic signal); consumers that need
/// clean phase should restrict themselves to [interior_begin, interior_end).
struct PhaseSeries {
  std::vector<double> phase_rad;
  double rate_hz = 0.0;
  double start_s = 0.0;
  double edge_frac = 0.02;

  std::size_t size() const { return phase_rad.size(); }
  double time_of(std::size_t i) const {
    return start_s + static_cast<double>(i) / rate_hz;
  }
  double end_s() const {
    return start_s + static_cast<double>(phase_rad.size() - 1) / rate_hz;
  }
  std::size_t interior_begin() const;
  std::size_t interior_end() const;  // one past the last reliable index
};

/// Phase of the analytic signal (frequency-domain Hilbert transform),
/// unwrapped so the series grows across cycles. The input should be
/// detrended/band-passed (mean ~ 0) and at least 16 samples long.
/// Throws InvalidInput on a (near-)constant signal.
PhaseSeries analytic_phase(const Waveform& w, double edge_frac = 0.02);

/// Linear interpolation of the unwrapped phase at t_s.
/// Throws OutOfRange outside the series span.
double phase_at(const PhaseSeries& p, double t_s);

/// Mean cycle rate from the interior phase advance:
/// (phase advance) / (2*pi * interior duration). Requires at least one
/// full cycle of advance.
double resp_rate(const PhaseSeries& p);

}  // namespace cardiosync
