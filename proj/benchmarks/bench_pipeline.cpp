#include <benchmark/benchmark.h>

#include "cardiosync/analysis.hpp"
#include "cardiosync/phase.hpp"
#include "cardiosync/signal_ops.hpp"
#include "cardiosync/synchro.hpp"
#include "cardiosync/synth.hpp"

using namespace cardiosync;

namespace {

SynthConfig bench_config() {
  SynthConfig cfg;
  cfg.duration_s = 180.0;  // one 3-minute session
  cfg.resp_hz = 0.3;
  cfg.heart_hz = 1.25;
  cfg.couple_n = 4;
  cfg.epsilon = 1.0;
  cfg.rsa_gain = 0.2;
  cfg.phase_noise = 0.2;
  cfg.seed = 1;
  return cfg;
}

Session session_from(const SynthSession& s) {
  Session out;
  out.subject_id = "bench";
  out.resp = s.resp;
  out.bvp = s.pulse;
  out.duration_s = s.resp.duration_s();
  return out;
}

}  // namespace

static void BM_Generate(benchmark::State& state) {
  const SynthConfig cfg = bench_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(cfg));
  }
}
BENCHMARK(BM_Generate);

static void BM_DetectPeaks(benchmark::State& state) {
  const SynthSession s = generate(bench_config());
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_peaks(s.pulse));
  }
}
BENCHMARK(BM_DetectPeaks);

static void BM_AnalyticPhase(benchmark::State& state) {
  const SynthSession s = generate(bench_config());
  const Waveform filtered = bandpass(s.resp, 0.05, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytic_phase(filtered));
  }
}
BENCHMARK(BM_AnalyticPhase);

static void BM_SyncCurve(benchmark::State& state) {
  const SynthSession s = generate(bench_config());
  const PhaseSeries phase = analytic_phase(bandpass(s.resp, 0.05, 1.0));
  const EventSeries beats = detect_peaks(s.pulse);
  const RatioGrid grid = RatioGrid::standard();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sync_curve(beats, phase, grid, SynchroConfig{}));
  }
}
BENCHMARK(BM_SyncCurve);

static void BM_AnalyzeSession(benchmark::State& state) {
  const Session session = session_from(generate(bench_config()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze_session(session, AnalyzeConfig{}));
  }
}
BENCHMARK(BM_AnalyzeSession);

BENCHMARK_MAIN();
