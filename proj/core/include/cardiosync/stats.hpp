#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cardiosync/synchro.hpp"
#include "cardiosync/waveform.hpp"

namespace cardiosync {

/// Per-subject paired measurements (e.g. stationary vs recovery means).
struct PairedSample {
  std::vector<std::string> labels;
  std::vector<double> a;
  std::vector<double> b;
};

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double p_two_sided = 1.0;
};

/// Wilcoxon signed-rank test on the paired differences a - b. Zero
/// differences are dropped; ties in |diff| get average ranks. The two-sided
/// p-value is exact (full enumeration of sign assignments, conditional on
/// the observed ranks) for up to 15 non-zero differences and uses the
/// normal approximation with tie correction beyond that.
/// Throws InsufficientData with fewer than 5 non-zero differences.
WilcoxonResult wilcoxon_signed_rank(const PairedSample& s);

/// Product-moment correlation. Needs >= 3 pairs, both sides non-constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Windowed spectral heart-rate estimate: per non-overlapping window of
/// window_s seconds, the HR is 60 x the argmax frequency of the magnitude
/// spectrum inside band_bpm, after linear detrending and zero-padding to
/// at least 0.5 bpm resolution. Always returns the in-band argmax; callers
/// wanting quality control filter by spectral SNR themselves.
std::vector<double> estimate_hr(const Waveform& w, double window_s = 30.0,
                                std::pair<double, double> band_bpm = {40.0,
                                                                      220.0});

/// HR agreement metrics between a prediction and a reference sequence.
/// pearson_r is absent when either sequence is constant.
struct AgreementReport {
  double mae = 0.0;       // beats/min
  double mape_pct = 0.0;  // percent
  double rmse = 0.0;      // beats/min
  std::optional<double> pearson_r;
};

AgreementReport agreement(std::span<const double> pred_hr,
                          std::span<const double> ref_hr);

/// Two synchronization curves paired by nearest beat time (at most max_dt_s
/// apart, one-to-one). Unmatched points are dropped and counted.
struct AlignedCurves {
  std::vector<double> times_s;   // times of curve A's matched beats
  std::vector<double> degree_a;
  std::vector<double> degree_b;
  std::size_t dropped_a = 0;
  std::size_t dropped_b = 0;
};

AlignedCurves align_curves(const SyncCurve& a, const SyncCurve& b,
                           double max_dt_s = 0.25);

}  // namespace cardiosync
