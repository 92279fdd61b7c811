#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cardiosync/bprsa.hpp"
#include "cardiosync/ingest.hpp"
#include "cardiosync/signal_ops.hpp"
#include "cardiosync/stats.hpp"
#include "cardiosync/synchro.hpp"

namespace cardiosync {

enum class PulseSource { Bvp, Rppg };

const char* to_string(PulseSource source);

/// Effective parameters of a full session analysis. Every value here is
/// echoed into reports so a report plus its input files reproduces the run.
struct AnalyzeConfig {
  PulseSource source = PulseSource::Bvp;
  bool filter_resp = true;  // band-pass respiration before phase extraction
  double resp_band_lo_hz = 0.05;
  double resp_band_hi_hz = 1.0;
  double edge_frac = 0.02;
  PeakConfig peaks;
  RatioGrid grid = RatioGrid::standard();
  SynchroConfig sync;
  BprsaConfig bprsa;
  bool bprsa_zscore = true;  // z-score trigger and target before BPRSA
};

struct SessionInfo {
  std::string subject_id;
  std::string stage;
  int repetition = 0;
  std::string source;
  double duration_s = 0.0;
};

struct AnalysisResult {
  SessionInfo info;
  EventSeries beats;
  std::vector<double> resp_phase_at_beats;  // unwrapped, one per beat
  SyncCurve curve;
  std::vector<Episode> episodes;
  LongTermMetrics long_term;
  BprsaResult bprsa_decline;
  BprsaResult bprsa_accelerate;
  AnalyzeConfig config;
};

/// Runs the whole pipeline on one session: respiration conditioning and
/// phase extraction, pulse peak detection, the windowed synchronization
/// curve with episode detection and long-term metrics, and BPRSA for both
/// anchor kinds.
AnalysisResult analyze_session(const Session& session,
                               const AnalyzeConfig& cfg);

struct CompareResult {
  SessionInfo info;
  SyncCurve curve_bvp;
  SyncCurve curve_rppg;
  AlignedCurves aligned;
  std::optional<double> curve_pearson_r;  // absent if a curve is constant
  std::vector<double> hr_bvp;
  std::vector<double> hr_rppg;
  AgreementReport hr_agreement;  // rppg predicted against bvp reference
  double hr_window_s = 30.0;
  AnalyzeConfig config;
};

/// Runs the synchronization pipeline once per pulse source and compares the
/// resulting curves (nearest-beat alignment, then Pearson) plus windowed HR
/// agreement. Throws InvalidInput when a source is missing and
/// AlignmentError when fewer than half of the curve points can be paired.
CompareResult compare_sources(const Session& session,
                              const AnalyzeConfig& base_cfg);

/// One analyzed session's scalar metric values, keyed by metric name.
struct SessionMetricValues {
  std::string subject_id;
  int stage_number = 0;
  Stage stage = Stage::Stationary;
  int repetition = 0;
  std::map<std::string, double> values;
};

struct MetricStateSummary {
  double mean = 0.0;
  double sd = 0.0;
  int subjects = 0;
};

struct CohortMetricRow {
  std::string metric;
  MetricStateSummary stationary;
  MetricStateSummary recovery;
  std::optional<WilcoxonResult> test;  // across-state Wilcoxon, when computable
  std::string note;                    // why the test is absent, if it is
};

struct CohortStats {
  int subjects_paired = 0;
  std::vector<CohortMetricRow> rows;
  std::vector<SessionMetricValues> sessions;
};

/// Metric names understood by cohort_stats.
const std::vector<std::string>& known_metric_names();

/// Per-subject per-state metric means plus paired Wilcoxon tests across
/// states. Requires at least 5 subjects recorded in both states.
CohortStats cohort_stats(const CohortIndex& index,
                         std::vector<std::string> metrics,
                         const AnalyzeConfig& cfg);

}  // namespace cardiosync
