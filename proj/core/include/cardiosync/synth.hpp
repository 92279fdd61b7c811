#pragma once

#include <cstdint>
#include <vector>

#include "cardiosync/waveform.hpp"

namespace cardiosync {

/// Coupled cardiorespiratory phase-oscillator model. Respiration advances at
/// a constant rate and unidirectionally drives the cardiac phase through an
/// n:m coupling term plus respiratory sinus arrhythmia (rate modulation).
/// Everything downstream of a seed is deterministic.
struct SynthConfig {
  double duration_s = 180.0;
  double resp_hz = 0.25;   // breaths per second
  double heart_hz = 1.2;   // mean beats per second
  int couple_n = 4;
  int couple_m = 1;
  double epsilon = 0.0;    // coupling strength, rad/s
  double rsa_gain = 0.0;   // fractional heart-rate modulation by resp phase
  double phase_noise = 0.0;  // cardiac phase diffusion, rad/sqrt(s)
  double resp_leak = 0.5;  // respiratory baseline in the pulse, x rsa_gain
  double pulse_noise = 0.02;  // additive white noise std on pulse samples
  std::uint64_t seed = 1;
  double pulse_rate_hz = 20.0;
  double resp_rate_hz = 50.0;
  double sim_rate_hz = 200.0;  // fixed-step integration rate
};

void validate_synth_config(const SynthConfig& cfg);

/// Ground truth kept alongside the rendered waveforms: exact beat times,
/// the exact (unwrapped) respiratory phase at each beat, and whether the
/// configured coupling exceeds the analytic locking threshold
/// |2 pi (heart_hz - n/m resp_hz)| for the noise-free baseline.
struct SynthTruth {
  std::vector<double> beat_times_s;
  std::vector<double> resp_phase_truth;
  bool locked = false;
};

struct SynthSession {
  Waveform resp;   // sin of the respiratory phase, at resp_rate_hz
  Waveform pulse;  // pulse-template train plus baseline and noise, at pulse_rate_hz
  SynthTruth truth;
};

SynthSession generate(const SynthConfig& cfg);

/// Renders a second pulse waveform from the true beats jittered by
/// N(0, jitter_ms) — a stand-in for an independently acquired pulse source.
/// jitter_ms = 0 reproduces the beat times exactly (noise still differs).
Waveform render_jittered_pulse(const SynthConfig& cfg, const SynthTruth& truth,
                               double jitter_ms,
                               std::uint64_t seed_offset = 0x9e3779b97f4a7c15ULL);

}  // namespace cardiosync
