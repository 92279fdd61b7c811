#include "cardiosync/signal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "cardiosync/errors.hpp"
#include "fft.hpp"

namespace cardiosync {

namespace {

// Linear-interpolated percentile, p in [0, 100].
double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double idx = p / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = idx - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

struct Candidate {
  double time_s;
  double height;
};

// Prominence of the peak at index `p` (plateau end `pe`): walk outward on
// each side until a strictly higher sample, take the minimum of the two
// intervening valleys' depths below the peak.
double prominence_at(const std::vector<double>& s, std::size_t p,
                     std::size_t pe) {
  const double h = s[p];
  double left_min = h;
  for (std::size_t i = p; i-- > 0;) {
    if (s[i] > h) break;
    left_min = std::min(left_min, s[i]);
  }
  double right_min = h;
  for (std::size_t i = pe + 1; i < s.size(); ++i) {
    if (s[i] > h) break;
    right_min = std::min(right_min, s[i]);
  }
  return h - std::max(left_min, right_min);
}

}  // namespace

EventSeries detect_peaks(const Waveform& w, const PeakConfig& cfg) {
  if (!(cfg.min_interval_s > 0.0) || !std::isfinite(cfg.min_interval_s)) {
    throw Error(ErrorKind::InvalidConfig, "min_interval_s must be > 0");
  }
  if (!(cfg.prominence_frac > 0.0 && cfg.prominence_frac < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "prominence_frac must be in (0,1)");
  }
  validate_waveform(w, "detect_peaks");
  if (w.label == SignalLabel::Resp) {
    throw Error(ErrorKind::InvalidInput,
                "detect_peaks expects a pulse signal (bvp or rppg)");
  }
  if (w.duration_s() < 2.0 * cfg.min_interval_s) {
    throw Error(ErrorKind::InvalidInput,
                "record shorter than 2*min_interval_s");
  }

  const auto& s = w.samples;
  const std::size_t n = s.size();
  const double prom_min =
      cfg.prominence_frac * (percentile(s, 95.0) - percentile(s, 5.0));

  std::vector<Candidate> cands;
  std::size_t i = 1;
  while (i + 1 <= n - 1) {
    if (s[i] > s[i - 1]) {
      // Plateau-tolerant local maximum: [i, j] holds equal samples.
      std::size_t j = i;
      while (j + 1 < n && s[j + 1] == s[i]) ++j;
      if (j + 1 < n && s[j + 1] < s[i]) {
        if (prominence_at(s, i, j) >= prom_min) {
          double pos;
          if (j > i) {
            pos = 0.5 * static_cast<double>(i + j);  // flat top: midpoint
          } else {
            // Parabolic refinement around the maximum sample.
            const double denom = s[i - 1] - 2.0 * s[i] + s[i + 1];
            double off = 0.0;
            if (std::abs(denom) > 1e-300) {
              off = 0.5 * (s[i - 1] - s[i + 1]) / denom;
              off = std::clamp(off, -0.5, 0.5);
            }
            pos = static_cast<double>(i) + off;
          }
          cands.push_back({w.start_s + pos / w.rate_hz, s[i]});
        }
        i = j + 1;
      } else {
        i = j + 1;
      }
    } else {
      ++i;
    }
  }

  // Enforce the minimum spacing on refined times, taller peaks first.
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cands[a].height > cands[b].height;
  });
  std::vector<double> accepted;
  for (std::size_t k : order) {
    const double t = cands[k].time_s;
    bool ok = true;
    for (double a : accepted) {
      if (std::abs(t - a) < cfg.min_interval_s) {
        ok = false;
        break;
      }
    }
    if (ok) accepted.push_back(t);
  }
  std::sort(accepted.begin(), accepted.end());

  if (accepted.size() < 2) {
    throw Error(ErrorKind::EmptyResult,
                "fewer than 2 peaks found; input unusable");
  }
  return EventSeries{std::move(accepted)};
}

Waveform resample(const Waveform& w, double target_hz) {
  if (!(target_hz > 0.0) || !std::isfinite(target_hz)) {
    throw Error(ErrorKind::InvalidConfig, "target_hz must be > 0");
  }
  validate_waveform(w, "resample");

  const double duration = w.duration_s();
  const std::size_t n_out =
      static_cast<std::size_t>(std::floor(duration * target_hz + 1e-9)) + 1;
  Waveform out;
  out.rate_hz = target_hz;
  out.start_s = w.start_s;
  out.label = w.label;
  out.samples.resize(n_out);
  const std::size_t n = w.samples.size();
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) / target_hz * w.rate_hz;
    std::size_t i0 = static_cast<std::size_t>(std::floor(pos));
    if (i0 >= n - 1) i0 = n - 2;
    const double frac = pos - static_cast<double>(i0);
    out.samples[i] = w.samples[i0] + frac * (w.samples[i0 + 1] - w.samples[i0]);
  }
  return out;
}

Waveform bandpass(const Waveform& w, double lo_hz, double hi_hz) {
  validate_waveform(w, "bandpass");
  const double nyquist = w.rate_hz / 2.0;
  if (!(lo_hz > 0.0 && lo_hz < hi_hz && hi_hz < nyquist)) {
    throw Error(ErrorKind::InvalidConfig,
                "band must satisfy 0 < lo < hi < rate/2");
  }

  const std::size_t n = w.samples.size();
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = {w.samples[i], 0.0};
  auto spec = detail::fft(std::move(buf), false);

  // Raised-cosine transitions just outside the pass band; the lower taper is
  // kept away from DC so bin 0 is always zeroed.
  const double width = hi_hz - lo_hz;
  const double w_lo = std::min(0.5 * lo_hz, 0.1 * width);
  const double w_hi = std::min(0.1 * width, 0.5 * (nyquist - hi_hz));
  auto gain = [&](double f) -> double {
    if (f >= lo_hz && f <= hi_hz) return 1.0;
    if (w_lo > 0.0 && f > lo_hz - w_lo && f < lo_hz) {
      return 0.5 * (1.0 - std::cos(M_PI * (f - (lo_hz - w_lo)) / w_lo));
    }
    if (w_hi > 0.0 && f > hi_hz && f < hi_hz + w_hi) {
      return 0.5 * (1.0 + std::cos(M_PI * (f - hi_hz) / w_hi));
    }
    return 0.0;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t mirror = (n - k) % n;
    const double f =
        static_cast<double>(std::min(k, mirror)) * w.rate_hz /
        static_cast<double>(n);
    spec[k] *= gain(f);
  }

  auto filtered = detail::fft(std::move(spec), true);
  Waveform out = w;
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = filtered[i].real();
  return out;
}

double mean_rate(const EventSeries& events) {
  if (events.size() < 2) {
    throw Error(ErrorKind::EmptyResult, "mean_rate needs at least 2 events");
  }
  const double span = events.back() - events.front();
  return static_cast<double>(events.size() - 1) / span;
}

Waveform zscore(const Waveform& w) {
  validate_waveform(w, "zscore");
  const double n = static_cast<double>(w.samples.size());
  const double mean =
      std::accumulate(w.samples.begin(), w.samples.end(), 0.0) / n;
  double var = 0.0;
  for (double v : w.samples) var += (v - mean) * (v - mean);
  var /= n;
  const double sd = std::sqrt(var);
  if (sd <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "zscore of a constant signal");
  }
  Waveform out = w;
  for (auto& v : out.samples) v = (v - mean) / sd;
  return out;
}

}  // namespace cardiosync
