#include <doctest.h>

#include <cmath>

#include "cardiosync/errors.hpp"
#include "cardiosync/phase.hpp"
#include "cardiosync/signal_ops.hpp"
#include "cardiosync/synth.hpp"
#include "helpers.hpp"

using namespace cardiosync;

TEST_CASE("generate is bit-deterministic per seed") {
  SynthConfig cfg;
  cfg.duration_s = 60.0;
  cfg.epsilon = 0.8;
  cfg.rsa_gain = 0.2;
  cfg.phase_noise = 0.3;
  cfg.seed = 1234;

  const SynthSession a = generate(cfg);
  const SynthSession b = generate(cfg);
  CHECK(a.truth.beat_times_s == b.truth.beat_times_s);
  CHECK(a.truth.resp_phase_truth == b.truth.resp_phase_truth);
  CHECK(a.resp.samples == b.resp.samples);
  CHECK(a.pulse.samples == b.pulse.samples);

  cfg.seed = 1235;
  const SynthSession c = generate(cfg);
  CHECK(a.truth.beat_times_s != c.truth.beat_times_s);
}

TEST_CASE("beat count tracks heart_hz when unmodulated") {
  SynthConfig cfg;
  cfg.duration_s = 100.0;
  cfg.heart_hz = 1.2;
  cfg.rsa_gain = 0.0;
  cfg.epsilon = 0.0;
  cfg.phase_noise = 0.0;
  const SynthSession s = generate(cfg);
  const double expected = cfg.heart_hz * cfg.duration_s;
  CHECK(std::abs(static_cast<double>(s.truth.beat_times_s.size()) - expected) <=
        1.0);
  for (std::size_t i = 1; i < s.truth.beat_times_s.size(); ++i) {
    CHECK(s.truth.beat_times_s[i] > s.truth.beat_times_s[i - 1]);
  }
}

TEST_CASE("locked flag reflects the analytic threshold") {
  SynthConfig cfg;
  cfg.duration_s = 30.0;
  cfg.resp_hz = 0.3;
  cfg.heart_hz = 1.25;  // 4:1 target is 1.2 -> detuning 0.05 Hz
  cfg.couple_n = 4;
  cfg.couple_m = 1;

  cfg.epsilon = 2.0 * M_PI * 0.05 * 2.0;  // twice the threshold
  CHECK(generate(cfg).truth.locked);
  cfg.epsilon = 2.0 * M_PI * 0.05 * 0.5;
  CHECK_FALSE(generate(cfg).truth.locked);
}

TEST_CASE("detect_peaks recovers the true beats") {
  SynthConfig cfg;
  cfg.duration_s = 120.0;
  cfg.heart_hz = 1.2;
  cfg.rsa_gain = 0.2;
  cfg.epsilon = 0.5;
  cfg.resp_hz = 0.3;
  cfg.phase_noise = 0.1;
  cfg.seed = 3;
  const SynthSession s = generate(cfg);

  const EventSeries peaks = detect_peaks(s.pulse);
  std::size_t matched = 0, considered = 0;
  for (double t : s.truth.beat_times_s) {
    if (t < 1.0 || t > cfg.duration_s - 1.0) continue;  // render edges
    ++considered;
    double best = 1e9;
    for (double p : peaks.times_s) best = std::min(best, std::abs(p - t));
    if (best <= 0.05) ++matched;
  }
  CHECK(static_cast<double>(matched) >= 0.99 * static_cast<double>(considered));
}

TEST_CASE("analytic phase of generated respiration matches the oscillator") {
  SynthConfig cfg;
  cfg.duration_s = 120.0;
  cfg.seed = 8;
  const SynthSession s = generate(cfg);

  // The analytic phase of sin(phi) is phi - pi/2 (plus a 2*pi branch).
  const PhaseSeries p = analytic_phase(s.resp);
  const std::size_t nb = s.truth.beat_times_s.size();
  double offset = 0.0;
  bool have_offset = false;
  std::size_t checked = 0;
  for (std::size_t k = 0; k < nb; ++k) {
    const double t = s.truth.beat_times_s[k];
    if (t < 0.05 * cfg.duration_s || t > 0.95 * cfg.duration_s) continue;
    const double expected = s.truth.resp_phase_truth[k] - M_PI / 2.0;
    const double got = phase_at(p, t);
    if (!have_offset) {
      offset = std::round((got - expected) / (2.0 * M_PI)) * 2.0 * M_PI;
      have_offset = true;
    }
    CHECK(std::abs(got - expected - offset) < 0.1);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("render_jittered_pulse is deterministic and orderly") {
  SynthConfig cfg;
  cfg.duration_s = 60.0;
  cfg.seed = 5;
  const SynthSession s = generate(cfg);

  const Waveform a = render_jittered_pulse(cfg, s.truth, 10.0);
  const Waveform b = render_jittered_pulse(cfg, s.truth, 10.0);
  CHECK(a.samples == b.samples);
  CHECK(a.label == SignalLabel::Rppg);

  CHECK_THROWS_AS(render_jittered_pulse(cfg, s.truth, -1.0), Error);
}

TEST_CASE("generate rejects bad configs") {
  SynthConfig cfg;
  cfg.duration_s = -1.0;
  CHECK_THROWS_AS(generate(cfg), Error);
  cfg = SynthConfig{};
  cfg.couple_m = 0;
  CHECK_THROWS_AS(generate(cfg), Error);
  cfg = SynthConfig{};
  cfg.sim_rate_hz = 1.0;  // cannot resolve beats
  CHECK_THROWS_AS(generate(cfg), Error);
}
