#pragma once

#include "cardiosync/waveform.hpp"

namespace cardiosync {

struct PeakConfig {
  double min_interval_s = 0.27;  // refractory floor, ~220 bpm ceiling
  double prominence_frac = 0.3;  // fraction of the 5th..95th percentile range
};

/// Local-maxima heartbeat detector: candidate peaks must clear a prominence
/// threshold of prominence_frac * (95th - 5th percentile of the samples) and
/// stand >= min_interval_s apart (taller peaks win). Peak times are refined
/// by parabolic interpolation over the three samples around each maximum.
///
/// Throws InvalidConfig on a bad config, InvalidInput when the waveform is
/// not a pulse signal or is shorter than 2*min_interval_s, and EmptyResult
/// when fewer than two peaks survive.
EventSeries detect_peaks(const Waveform& w, const PeakConfig& cfg = {});

/// Linear-interpolation resampling onto a uniform grid at target_hz spanning
/// the same time range; label and start_s are preserved.
Waveform resample(const Waveform& w, double target_hz);

/// Zero-phase band-pass via frequency-domain masking with raised-cosine
/// transition edges outside [lo_hz, hi_hz]. Requires 0 < lo_hz < hi_hz <
/// rate/2. The DC bin is always zeroed, so the output mean is ~0.
Waveform bandpass(const Waveform& w, double lo_hz, double hi_hz);

/// (count - 1) / (last - first), events per second.
double mean_rate(const EventSeries& events);

/// (x - mean) / std. Throws InvalidInput on a constant signal.
Waveform zscore(const Waveform& w);

}  // namespace cardiosync
