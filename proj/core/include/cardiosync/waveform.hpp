#pragma once

#include <cstddef>
#include <vector>

namespace cardiosync {

enum class SignalLabel { Bvp, Rppg, Resp };

const char* to_string(SignalLabel label);

/// Uniformly sampled scalar time series. Sample i sits at start_s + i / rate_hz.
struct Waveform {
  std::vector<double> samples;
  double rate_hz = 0.0;
  double start_s = 0.0;
  SignalLabel label = SignalLabel::Bvp;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size() - 1) / rate_hz;
  }
  double end_s() const { return start_s + duration_s(); }
  double time_of(std::size_t i) const {
    return start_s + static_cast<double>(i) / rate_hz;
  }

  /// Linear interpolation at a time inside [start_s, end_s].
  /// Throws OutOfRange otherwise.
  double value_at(double t_s) const;
};

/// Checks the Waveform invariants: >= 2 samples, positive finite rate,
/// all samples finite. Throws InvalidInput naming `context`.
void validate_waveform(const Waveform& w, const char* context);

/// Strictly increasing event times in seconds (heartbeat peaks, anchors).
struct EventSeries {
  std::vector<double> times_s;

  std::size_t size() const { return times_s.size(); }
  bool empty() const { return times_s.empty(); }
  double front() const { return times_s.front(); }
  double back() const { return times_s.back(); }
};

}  // namespace cardiosync
