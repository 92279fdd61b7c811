#include "cardiosync/waveform.hpp"

#include <cmath>
#include <string>

#include "cardiosync/errors.hpp"

namespace cardiosync {

const char* to_string(SignalLabel label) {
  switch (label) {
    case SignalLabel::Bvp: return "bvp";
    case SignalLabel::Rppg: return "rppg";
    case SignalLabel::Resp: return "resp";
  }
  return "?";
}

double Waveform::value_at(double t_s) const {
  const double pos = (t_s - start_s) * rate_hz;
  if (pos < -1e-9 || pos > static_cast<double>(samples.size() - 1) + 1e-9) {
    throw Error(ErrorKind::OutOfRange,
                "time " + std::to_string(t_s) + " s outside waveform span");
  }
  const auto n = samples.size();
  std::size_t i0 = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
  if (i0 >= n - 1) i0 = n - 2;
  const double frac = pos - static_cast<double>(i0);
  return samples[i0] + frac * (samples[i0 + 1] - samples[i0]);
}

void validate_waveform(const Waveform& w, const char* context) {
  if (w.samples.size() < 2) {
    throw Error(ErrorKind::InvalidInput,
                std::string(context) + ": waveform needs at least 2 samples");
  }
  if (!std::isfinite(w.rate_hz) || w.rate_hz <= 0.0) {
    throw Error(ErrorKind::InvalidInput,
                std::string(context) + ": sample rate must be finite and > 0");
  }
  if (!std::isfinite(w.start_s)) {
    throw Error(ErrorKind::InvalidInput,
                std::string(context) + ": start time must be finite");
  }
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (!std::isfinite(w.samples[i])) {
      throw Error(ErrorKind::InvalidInput,
                  std::string(context) + ": non-finite sample at index " +
                      std::to_string(i));
    }
  }
}

}  // namespace cardiosync
