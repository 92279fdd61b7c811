#pragma once

#include <span>
#include <vector>

#include "cardiosync/phase.hpp"
#include "cardiosync/waveform.hpp"

namespace cardiosync {

struct RatioPair {
  int n = 1;
  int m = 1;
};

/// The n:m ratios scanned when maximizing the synchronization index.
/// Pairs must be gcd-reduced with n/m inside [1.5, 15].
struct RatioGrid {
  std::vector<RatioPair> pairs;

  /// n in [2..15] with m = 1, plus (n, 2) for odd n in [3..15].
  static RatioGrid standard();
};

void validate_grid(const RatioGrid& grid);

struct SynchroConfig {
  int window_beats = 50;  // must equal 2 * half_window
  int half_window = 25;   // beats on each side of the reference beat
  double gamma_threshold = 0.1;
  double min_episode_s = 5.0;
};

void validate_synchro_config(const SynchroConfig& cfg);

/// Per-beat synchronization degree with the winning ratio. Defined only on
/// interior beats (those with a full half-window on each side).
struct SyncCurve {
  std::vector<double> beat_times_s;
  std::vector<double> degree;  // in [0, 1]
  std::vector<int> best_n;
  std::vector<int> best_m;

  std::size_t size() const { return beat_times_s.size(); }
  bool empty() const { return beat_times_s.empty(); }
};

struct Episode {
  double start_s = 0.0;
  double end_s = 0.0;
  double duration_s = 0.0;
  int dominant_n = 0;
  int dominant_m = 0;
};

struct LongTermMetrics {
  double min_pct = 0.0;   // 100 * min degree
  double max_pct = 0.0;   // 100 * max degree
  int num_sync = 0;       // episode count
  double freq_ratio = 0.0;  // mean heart rate / mean respiratory rate
};

/// Normalized relative phase over m respiratory cycles:
/// (1/2pi) * (phi_r mod 2pi*m), in [0, m).
double psi_m(double phi_r, int m);

/// Folds the m-cycle relative phase onto one line:
/// (2pi/m) * ((psi * n) mod m), in [0, 2pi).
double big_psi(double psi, int n, int m);

/// Stability of the folded phases: (mean cos)^2 + (mean sin)^2, in [0, 1].
/// 1 means all phases coincide; ~1/N for incoherent phases.
double gamma_index(std::span<const double> big_psis);

/// Sliding-window synchronization degree: for every beat with half_window
/// beats on each side, gamma is evaluated over the surrounding window_beats
/// beats (the reference beat itself is excluded) for every grid ratio;
/// the curve records the maximum and its (n, m). Ties go to the smaller
/// n+m, then the smaller n.
SyncCurve sync_curve(const EventSeries& beats, const PhaseSeries& resp_phase,
                     const RatioGrid& grid, const SynchroConfig& cfg);

/// Maximal runs of consecutive curve beats with degree > gamma_threshold
/// whose first-to-last time span is at least min_episode_s. The dominant
/// ratio is the modal per-beat winner within the run.
std::vector<Episode> detect_episodes(const SyncCurve& curve,
                                     const SynchroConfig& cfg);

LongTermMetrics long_term_metrics(const SyncCurve& curve,
                                  const std::vector<Episode>& episodes,
                                  const EventSeries& beats,
                                  const PhaseSeries& resp_phase);

}  // namespace cardiosync
