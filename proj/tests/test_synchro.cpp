#include <doctest.h>

#include <cmath>
#include <random>

#include "cardiosync/errors.hpp"
#include "cardiosync/synchro.hpp"
#include "cardiosync/synth.hpp"
#include "helpers.hpp"

using namespace cardiosync;

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

// Linear respiratory phase series (rate f), 50 Hz grid.
PhaseSeries linear_phase(double f, double duration, double phi0 = 0.0) {
  PhaseSeries p;
  p.rate_hz = 50.0;
  p.start_s = 0.0;
  const std::size_t n = static_cast<std::size_t>(duration * 50.0) + 1;
  p.phase_rad.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.phase_rad[i] = phi0 + kTwoPi * f * static_cast<double>(i) / 50.0;
  }
  return p;
}

SyncCurve flat_curve(double degree, double spacing_s, int count) {
  SyncCurve c;
  for (int i = 0; i < count; ++i) {
    c.beat_times_s.push_back(10.0 + spacing_s * i);
    c.degree.push_back(degree);
    c.best_n.push_back(4);
    c.best_m.push_back(1);
  }
  return c;
}
}  // namespace

TEST_CASE("psi_m folds the unwrapped phase onto [0, m)") {
  CHECK(psi_m(M_PI, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(psi_m(3.0 * M_PI, 2) == doctest::Approx(1.5).epsilon(1e-12));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> phi(0.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double x = phi(rng);
    for (int m = 1; m <= 3; ++m) {
      const double base = psi_m(x, m);
      CHECK(base >= 0.0);
      CHECK(base < static_cast<double>(m));
      CHECK(psi_m(x + kTwoPi * m, m) == doctest::Approx(base).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(psi_m(1.0, 0), Error);
}

TEST_CASE("big_psi folds n bands onto one line") {
  CHECK(big_psi(0.5, 3, 1) == doctest::Approx(M_PI).epsilon(1e-12));
  // Exact n:1 lattice points collapse to zero.
  for (int n = 2; n <= 6; ++n) {
    for (int k = 0; k < n; ++k) {
      const double psi = static_cast<double>(k) / n;
      CHECK(big_psi(psi, n, 1) < 1e-9);
    }
  }
  CHECK(big_psi(1.25, 2, 2) == doctest::Approx(0.5 * M_PI).epsilon(1e-12));
  CHECK_THROWS_AS(big_psi(0.5, 0, 1), Error);
  CHECK_THROWS_AS(big_psi(0.5, 1, -2), Error);
}

TEST_CASE("gamma_index measures phase concentration") {
  std::vector<double> constant(50, 1.234);
  CHECK(gamma_index(constant) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> antipodal = {0.0, M_PI};
  CHECK(gamma_index(antipodal) == doctest::Approx(0.0).epsilon(1e-15));

  CHECK_THROWS_AS(gamma_index(std::vector<double>{0.5}), Error);
}

TEST_CASE("gamma_index of random phases has expectation 1/N") {
  // E|mean unit vector|^2 = 1/N for iid uniform phases.
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const int trials = 10000;
  double acc = 0.0;
  std::vector<double> window(50);
  for (int t = 0; t < trials; ++t) {
    for (auto& v : window) v = phase(rng);
    acc += gamma_index(window);
  }
  CHECK(std::abs(acc / trials - 0.02) < 0.01);
}

TEST_CASE("gamma_index is rotation invariant and bounded") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::vector<double> window(50);
  for (int t = 0; t < 20; ++t) {
    for (auto& v : window) v = phase(rng);
    const double base = gamma_index(window);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
    std::vector<double> rotated = window;
    const double c = phase(rng);
    for (auto& v : rotated) v += c;
    CHECK(gamma_index(rotated) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("gamma is 1 only when all phases coincide") {
  std::vector<double> nearly(50, 0.7);
  nearly[10] += 5e-10;  // inside the numeric tolerance
  CHECK(gamma_index(nearly) == doctest::Approx(1.0).epsilon(1e-12));
  nearly[10] = 0.7 + 0.5;
  CHECK(gamma_index(nearly) < 1.0 - 1e-5);
}

TEST_CASE("reduced-ratio equivalence: (2n,2m) matches (n,m)") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> phi(0.0, 100.0);
  for (const auto& [n, m] : {std::pair{3, 1}, {4, 1}, {3, 2}, {5, 2}}) {
    std::vector<double> a(50), b(50);
    for (int i = 0; i < 50; ++i) {
      const double x = phi(rng);
      a[i] = big_psi(psi_m(x, m), n, m);
      b[i] = big_psi(psi_m(x, 2 * m), 2 * n, 2 * m);
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    }
    CHECK(gamma_index(a) == doctest::Approx(gamma_index(b)).epsilon(1e-9));
  }
}

TEST_CASE("ratio grid validation") {
  const RatioGrid grid = RatioGrid::standard();
  CHECK(grid.pairs.size() == 21);  // 14 with m=1, 7 odd-n with m=2
  CHECK_NOTHROW(validate_grid(grid));

  RatioGrid dupe;
  dupe.pairs = {{4, 2}};  // reduces to 2:1
  CHECK_THROWS_AS(validate_grid(dupe), Error);

  RatioGrid off;
  off.pairs = {{1, 1}};  // ratio below 1.5
  CHECK_THROWS_AS(validate_grid(off), Error);
}

TEST_CASE("sync_curve saturates on a perfect 4:1 lattice") {
  // Beats placed analytically at quarter phases of a 0.25 Hz respiration.
  const PhaseSeries phase = linear_phase(0.25, 240.0, 0.3);
  EventSeries beats;
  for (double t = 0.37; t < 239.0; t += 1.0) beats.times_s.push_back(t);

  const SyncCurve curve =
      sync_curve(beats, phase, RatioGrid::standard(), SynchroConfig{});
  REQUIRE(curve.size() == beats.size() - 50);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve.degree[i] >= 0.95);
    CHECK(curve.best_n[i] == 4);
    CHECK(curve.best_m[i] == 1);
  }
}

TEST_CASE("sync_curve stays low for uncoupled rhythms") {
  SynthConfig cfg;
  cfg.duration_s = 150.0;
  cfg.resp_hz = 0.25;
  cfg.heart_hz = 0.25 * 4.800075;  // detuned from every grid ratio
  cfg.epsilon = 0.0;
  cfg.phase_noise = 0.17;
  cfg.pulse_noise = 0.0;
  std::vector<double> medians;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.seed = seed;
    const SynthSession s = generate(cfg);
    // Phase series straight from the oscillator truth.
    const double phi0 = s.truth.resp_phase_truth.front() -
                        kTwoPi * cfg.resp_hz * s.truth.beat_times_s.front();
    const PhaseSeries phase = linear_phase(cfg.resp_hz, cfg.duration_s, phi0);
    EventSeries beats{s.truth.beat_times_s};
    const SyncCurve curve =
        sync_curve(beats, phase, RatioGrid::standard(), SynchroConfig{});
    medians.push_back(testutil::median(curve.degree));
  }
  CHECK(testutil::median(medians) < 0.15);
}

TEST_CASE("sync_curve needs window_beats + 1 beats") {
  const PhaseSeries phase = linear_phase(0.25, 100.0);
  EventSeries beats;
  for (int i = 0; i < 50; ++i) beats.times_s.push_back(1.0 + i);
  CHECK_THROWS_AS(
      sync_curve(beats, phase, RatioGrid::standard(), SynchroConfig{}), Error);
  try {
    sync_curve(beats, phase, RatioGrid::standard(), SynchroConfig{});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
}

TEST_CASE("detect_episodes applies threshold and duration rules") {
  const SynchroConfig cfg;

  CHECK(detect_episodes(flat_curve(0.05, 0.8, 80), cfg).empty());

  const auto one = detect_episodes(flat_curve(0.9, 0.8, 75), cfg);
  REQUIRE(one.size() == 1);
  CHECK(one[0].start_s == doctest::Approx(10.0));
  CHECK(one[0].end_s == doctest::Approx(10.0 + 0.8 * 74));
  CHECK(one[0].dominant_n == 4);
  CHECK(one[0].dominant_m == 1);

  // A 3 s excursion is below the 5 s minimum.
  SyncCurve brief = flat_curve(0.05, 0.5, 40);
  for (int i = 10; i < 16; ++i) brief.degree[i] = 0.5;  // 2.5 s span
  CHECK(detect_episodes(brief, cfg).empty());
}

TEST_CASE("episode dominant ratio ties break to smaller n+m") {
  SyncCurve c = flat_curve(0.9, 0.5, 30);
  for (int i = 0; i < 30; ++i) {
    c.best_n[i] = (i % 2 == 0) ? 5 : 3;
    c.best_m[i] = 1;
  }
  const auto eps = detect_episodes(c, SynchroConfig{});
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].dominant_n == 3);
}

TEST_CASE("episodes are disjoint and ordered") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> deg(0.0, 0.4);
  SyncCurve c;
  for (int i = 0; i < 300; ++i) {
    c.beat_times_s.push_back(0.7 * i);
    c.degree.push_back(deg(rng));
    c.best_n.push_back(4);
    c.best_m.push_back(1);
  }
  const auto eps = detect_episodes(c, SynchroConfig{});
  for (std::size_t i = 1; i < eps.size(); ++i) {
    CHECK(eps[i].start_s > eps[i - 1].end_s);
  }
  for (const auto& e : eps) {
    CHECK(e.duration_s == doctest::Approx(e.end_s - e.start_s));
    CHECK(e.duration_s >= 5.0);
  }
}

TEST_CASE("long_term_metrics aggregates the curve") {
  // 80 bpm beats against a 20 breaths/min phase ramp.
  EventSeries beats;
  for (int i = 0; i < 120; ++i) beats.times_s.push_back(i * 60.0 / 80.0);
  const PhaseSeries phase = linear_phase(20.0 / 60.0, 95.0);

  SyncCurve curve = flat_curve(0.02, 0.75, 60);
  curve.degree[1] = 0.31;
  const LongTermMetrics m =
      long_term_metrics(curve, {}, beats, phase);
  CHECK(m.min_pct == doctest::Approx(2.0));
  CHECK(m.max_pct == doctest::Approx(31.0));
  CHECK(m.num_sync == 0);
  CHECK(std::abs(m.freq_ratio - 4.0) < 0.1);

  CHECK_THROWS_AS(long_term_metrics(SyncCurve{}, {}, beats, phase), Error);
}
