#include "cardiosync/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cardiosync/errors.hpp"

namespace cardiosync {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kTemplateRiseS = 0.15;  // systolic upstroke
constexpr double kTemplateFallS = 0.45;  // diastolic decay

// The pulse sample noise draws from its own seed-derived stream so a
// re-render from perturbed beats (render_jittered_pulse) sees the very same
// sensor noise and differs only in beat timing.
constexpr std::uint64_t kPulseNoiseSalt = 0xa24baed4963ee407ULL;

// Box-Muller on an explicit engine: keeps the sample stream independent of
// the C++ library's distribution internals, so seeds reproduce bit-exactly.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  double uniform() {  // in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Asymmetric raised-cosine pulse template, unit peak at tau = 0 with a fast
// rise before the beat and a slow decay after it, so Decline/Accelerate
// anchors are unambiguous.
double pulse_template(double tau) {
  if (tau >= -kTemplateRiseS && tau <= 0.0) {
    return 0.5 - 0.5 * std::cos(M_PI * (tau + kTemplateRiseS) / kTemplateRiseS);
  }
  if (tau > 0.0 && tau <= kTemplateFallS) {
    return 0.5 + 0.5 * std::cos(M_PI * tau / kTemplateFallS);
  }
  return 0.0;
}

Waveform render_pulse(const std::vector<double>& beats, double duration_s,
                      double pulse_rate_hz, double baseline_amp,
                      double resp_hz, double phi_r0, double noise_std,
                      Gaussian& noise) {
  Waveform pulse;
  pulse.label = SignalLabel::Bvp;
  pulse.rate_hz = pulse_rate_hz;
  pulse.start_s = 0.0;
  const std::size_t n =
      static_cast<std::size_t>(std::floor(duration_s * pulse_rate_hz + 1e-9)) + 1;
  pulse.samples.assign(n, 0.0);

  std::size_t next_beat = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / pulse_rate_hz;
    while (next_beat < beats.size() && beats[next_beat] < t - kTemplateFallS) {
      ++next_beat;
    }
    double v = 0.0;
    for (std::size_t b = next_beat;
         b < beats.size() && beats[b] <= t + kTemplateRiseS; ++b) {
      v += pulse_template(t - beats[b]);
    }
    // Respiratory baseline: the pulse level drops during inspiration.
    v -= baseline_amp * std::sin(phi_r0 + kTwoPi * resp_hz * t);
    if (noise_std > 0.0) v += noise_std * noise();
    pulse.samples[i] = v;
  }
  return pulse;
}

}  // namespace

void validate_synth_config(const SynthConfig& cfg) {
  const bool ok =
      cfg.duration_s > 0.0 && cfg.resp_hz > 0.0 && cfg.heart_hz > 0.0 &&
      cfg.couple_n >= 1 && cfg.couple_m >= 1 && cfg.epsilon >= 0.0 &&
      cfg.phase_noise >= 0.0 && cfg.resp_leak >= 0.0 &&
      cfg.pulse_noise >= 0.0 && cfg.pulse_rate_hz > 0.0 &&
      cfg.resp_rate_hz > 0.0 && cfg.sim_rate_hz >= 2.0 * cfg.heart_hz;
  if (!ok) {
    throw Error(ErrorKind::InvalidConfig, "invalid synthesis parameters");
  }
}

SynthSession generate(const SynthConfig& cfg) {
  validate_synth_config(cfg);

  Gaussian rng(cfg.seed);
  const double phi_r0 = kTwoPi * rng.uniform();
  const double phi_c0 = kTwoPi * rng.uniform();

  const double dt = 1.0 / cfg.sim_rate_hz;
  const double sqrt_dt = std::sqrt(dt);
  const long steps = std::lround(cfg.duration_s * cfg.sim_rate_hz);

  SynthTruth truth;
  double phi_c = phi_c0;
  double next_beat_phase = kTwoPi * (std::floor(phi_c0 / kTwoPi) + 1.0);
  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double phi_r = phi_r0 + kTwoPi * cfg.resp_hz * t;
    double drift = kTwoPi * cfg.heart_hz * (1.0 + cfg.rsa_gain * std::sin(phi_r));
    if (cfg.epsilon > 0.0) {
      drift += cfg.epsilon *
               std::sin(cfg.couple_n * phi_r - cfg.couple_m * phi_c);
    }
    double phi_c_next = phi_c + drift * dt;
    if (cfg.phase_noise > 0.0) {
      phi_c_next += cfg.phase_noise * sqrt_dt * rng();
    }
    // Beats fire when the cardiac phase first reaches each 2*pi multiple;
    // tracking the next threshold keeps the series strictly increasing even
    // if noise momentarily pushes the phase backwards.
    while (phi_c_next >= next_beat_phase) {
      const double frac = (next_beat_phase - phi_c) / (phi_c_next - phi_c);
      const double t_beat = t + frac * dt;
      truth.beat_times_s.push_back(t_beat);
      truth.resp_phase_truth.push_back(phi_r0 + kTwoPi * cfg.resp_hz * t_beat);
      next_beat_phase += kTwoPi;
    }
    phi_c = phi_c_next;
  }

  const double locked_rate =
      static_cast<double>(cfg.couple_n) / cfg.couple_m * cfg.resp_hz;
  truth.locked = cfg.epsilon > kTwoPi * std::abs(cfg.heart_hz - locked_rate);

  SynthSession out;
  out.truth = std::move(truth);

  out.resp.label = SignalLabel::Resp;
  out.resp.rate_hz = cfg.resp_rate_hz;
  out.resp.start_s = 0.0;
  const std::size_t n_resp = static_cast<std::size_t>(
                                 std::floor(cfg.duration_s * cfg.resp_rate_hz + 1e-9)) +
                             1;
  out.resp.samples.resize(n_resp);
  for (std::size_t i = 0; i < n_resp; ++i) {
    const double t = static_cast<double>(i) / cfg.resp_rate_hz;
    out.resp.samples[i] = std::sin(phi_r0 + kTwoPi * cfg.resp_hz * t);
  }

  Gaussian pulse_noise_rng(cfg.seed ^ kPulseNoiseSalt);
  out.pulse = render_pulse(out.truth.beat_times_s, cfg.duration_s,
                           cfg.pulse_rate_hz, cfg.resp_leak * cfg.rsa_gain,
                           cfg.resp_hz, phi_r0, cfg.pulse_noise,
                           pulse_noise_rng);
  return out;
}

Waveform render_jittered_pulse(const SynthConfig& cfg, const SynthTruth& truth,
                               double jitter_ms, std::uint64_t seed_offset) {
  validate_synth_config(cfg);
  if (jitter_ms < 0.0 || truth.beat_times_s.empty()) {
    throw Error(ErrorKind::InvalidInput,
                "jitter must be >= 0 and truth must hold beats");
  }
  Gaussian jitter_rng(cfg.seed ^ seed_offset);

  std::vector<double> beats = truth.beat_times_s;
  const double sigma = jitter_ms / 1000.0;
  if (sigma > 0.0) {
    for (auto& b : beats) b += sigma * jitter_rng();
    std::sort(beats.begin(), beats.end());
  }

  // Recover the respiratory phase offset the truth was generated with.
  const double phi_r0 =
      truth.resp_phase_truth.front() -
      kTwoPi * cfg.resp_hz * truth.beat_times_s.front();

  Gaussian noise_rng(cfg.seed ^ kPulseNoiseSalt);
  Waveform w = render_pulse(beats, cfg.duration_s, cfg.pulse_rate_hz,
                            cfg.resp_leak * cfg.rsa_gain, cfg.resp_hz, phi_r0,
                            cfg.pulse_noise, noise_rng);
  w.label = SignalLabel::Rppg;
  return w;
}

}  // namespace cardiosync
