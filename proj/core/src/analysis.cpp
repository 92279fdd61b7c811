#include "cardiosync/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cardiosync/errors.hpp"
#include "cardiosync/phase.hpp"

namespace cardiosync {

namespace {

const Waveform& pick_pulse(const Session& session, PulseSource source) {
  const auto& chosen =
      source == PulseSource::Bvp ? session.bvp : session.rppg;
  if (!chosen) {
    throw Error(ErrorKind::InvalidInput,
                std::string("session has no ") + to_string(source) +
                    " waveform");
  }
  return *chosen;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

const char* to_string(PulseSource source) {
  return source == PulseSource::Bvp ? "bvp" : "rppg";
}

AnalysisResult analyze_session(const Session& session,
                               const AnalyzeConfig& cfg) {
  const Waveform& pulse = pick_pulse(session, cfg.source);

  Waveform resp_conditioned =
      cfg.filter_resp
          ? bandpass(session.resp, cfg.resp_band_lo_hz, cfg.resp_band_hi_hz)
          : session.resp;
  const PhaseSeries phase = analytic_phase(resp_conditioned, cfg.edge_frac);

  EventSeries beats = detect_peaks(pulse, cfg.peaks);
  // Keep only beats the respiratory phase can be evaluated at.
  std::erase_if(beats.times_s, [&](double t) {
    return t < phase.start_s || t > phase.end_s();
  });

  AnalysisResult result;
  result.config = cfg;
  result.info.subject_id = session.subject_id;
  result.info.stage = to_string(session.stage);
  result.info.repetition = session.repetition;
  result.info.source = to_string(cfg.source);
  result.info.duration_s = session.duration_s;

  result.curve = sync_curve(beats, phase, cfg.grid, cfg.sync);
  result.episodes = detect_episodes(result.curve, cfg.sync);
  result.long_term =
      long_term_metrics(result.curve, result.episodes, beats, phase);

  result.resp_phase_at_beats.reserve(beats.size());
  for (double t : beats.times_s) {
    result.resp_phase_at_beats.push_back(phase_at(phase, t));
  }

  const Waveform trigger = cfg.bprsa_zscore ? zscore(pulse) : pulse;
  const Waveform target =
      cfg.bprsa_zscore ? zscore(session.resp) : session.resp;
  result.bprsa_decline = average_segments(
      target, find_anchors(trigger, AnchorKind::Decline), cfg.bprsa);
  result.bprsa_accelerate = average_segments(
      target, find_anchors(trigger, AnchorKind::Accelerate), cfg.bprsa);

  result.beats = std::move(beats);
  return result;
}

CompareResult compare_sources(const Session& session,
                              const AnalyzeConfig& base_cfg) {
  if (!session.bvp || !session.rppg) {
    throw Error(ErrorKind::InvalidInput,
                "compare needs both bvp and rppg waveforms");
  }

  AnalyzeConfig cfg_bvp = base_cfg;
  cfg_bvp.source = PulseSource::Bvp;
  AnalyzeConfig cfg_rppg = base_cfg;
  cfg_rppg.source = PulseSource::Rppg;

  const AnalysisResult res_bvp = analyze_session(session, cfg_bvp);
  const AnalysisResult res_rppg = analyze_session(session, cfg_rppg);

  CompareResult out;
  out.info = res_bvp.info;
  out.info.source = "bvp+rppg";
  out.config = base_cfg;
  out.curve_bvp = res_bvp.curve;
  out.curve_rppg = res_rppg.curve;

  out.aligned = align_curves(out.curve_bvp, out.curve_rppg);
  const std::size_t smaller =
      std::min(out.curve_bvp.size(), out.curve_rppg.size());
  if (out.aligned.times_s.size() * 2 < smaller) {
    throw Error(ErrorKind::AlignmentError,
                "only " + std::to_string(out.aligned.times_s.size()) +
                    " of " + std::to_string(smaller) +
                    " curve points could be paired");
  }
  try {
    out.curve_pearson_r = pearson(out.aligned.degree_a, out.aligned.degree_b);
  } catch (const Error&) {
    out.curve_pearson_r = std::nullopt;
  }

  out.hr_bvp = estimate_hr(*session.bvp, out.hr_window_s);
  out.hr_rppg = estimate_hr(*session.rppg, out.hr_window_s);
  const std::size_t n_win = std::min(out.hr_bvp.size(), out.hr_rppg.size());
  out.hr_bvp.resize(n_win);
  out.hr_rppg.resize(n_win);
  out.hr_agreement = agreement(out.hr_rppg, out.hr_bvp);
  return out;
}

const std::vector<std::string>& known_metric_names() {
  static const std::vector<std::string> names = {
      "min_pct",     "max_pct",        "num_sync",       "freq_ratio",
      "mra_decline", "sap_decline",    "mra_accelerate", "sap_accelerate"};
  return names;
}

CohortStats cohort_stats(const CohortIndex& index,
                         std::vector<std::string> metrics,
                         const AnalyzeConfig& cfg) {
  if (metrics.empty()) metrics = known_metric_names();
  for (const auto& m : metrics) {
    const auto& known = known_metric_names();
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw Error(ErrorKind::InvalidConfig, "unknown metric '" + m + "'");
    }
  }
  if (index.sessions.empty()) {
    throw Error(ErrorKind::InsufficientData, "cohort index is empty");
  }

  CohortStats stats;
  for (const auto& rec : index.sessions) {
    const Session session = load_session(rec);
    const AnalysisResult res = analyze_session(session, cfg);
    SessionMetricValues v;
    v.subject_id = rec.subject_id;
    v.stage_number = rec.stage_number;
    v.stage = rec.stage();
    v.repetition = rec.repetition;
    v.values["min_pct"] = res.long_term.min_pct;
    v.values["max_pct"] = res.long_term.max_pct;
    v.values["num_sync"] = static_cast<double>(res.long_term.num_sync);
    v.values["freq_ratio"] = res.long_term.freq_ratio;
    v.values["mra_decline"] = res.bprsa_decline.mra;
    v.values["sap_decline"] = res.bprsa_decline.sap;
    v.values["mra_accelerate"] = res.bprsa_accelerate.mra;
    v.values["sap_accelerate"] = res.bprsa_accelerate.sap;
    stats.sessions.push_back(std::move(v));
  }

  // Per-subject per-state means.
  std::set<std::string> subjects;
  for (const auto& s : stats.sessions) subjects.insert(s.subject_id);

  struct SubjectMeans {
    std::map<std::string, double> stationary;
    std::map<std::string, double> recovery;
    bool has_stationary = false;
    bool has_recovery = false;
  };
  std::map<std::string, SubjectMeans> by_subject;
  for (const auto& subject : subjects) {
    SubjectMeans sm;
    for (const Stage stage : {Stage::Stationary, Stage::ExerciseRecovery}) {
      std::map<std::string, std::vector<double>> acc;
      for (const auto& s : stats.sessions) {
        if (s.subject_id != subject || s.stage != stage) continue;
        for (const auto& [k, val] : s.values) acc[k].push_back(val);
      }
      if (acc.empty()) continue;
      auto& dst = stage == Stage::Stationary ? sm.stationary : sm.recovery;
      for (const auto& [k, vals] : acc) dst[k] = mean_of(vals);
      (stage == Stage::Stationary ? sm.has_stationary : sm.has_recovery) =
          true;
    }
    by_subject[subject] = std::move(sm);
  }

  std::vector<std::string> paired;
  for (const auto& [subject, sm] : by_subject) {
    if (sm.has_stationary && sm.has_recovery) paired.push_back(subject);
  }
  stats.subjects_paired = static_cast<int>(paired.size());
  if (stats.subjects_paired < 5) {
    throw Error(ErrorKind::InsufficientData,
                "need >= 5 subjects with both states, got " +
                    std::to_string(stats.subjects_paired));
  }

  for (const auto& metric : metrics) {
    CohortMetricRow row;
    row.metric = metric;

    std::vector<double> stat_vals, rec_vals;
    for (const auto& [subject, sm] : by_subject) {
      if (sm.has_stationary) stat_vals.push_back(sm.stationary.at(metric));
      if (sm.has_recovery) rec_vals.push_back(sm.recovery.at(metric));
    }
    row.stationary = {mean_of(stat_vals), sample_sd(stat_vals),
                      static_cast<int>(stat_vals.size())};
    row.recovery = {mean_of(rec_vals), sample_sd(rec_vals),
                    static_cast<int>(rec_vals.size())};

    PairedSample pairs;
    for (const auto& subject : paired) {
      const auto& sm = by_subject.at(subject);
      pairs.labels.push_back(subject);
      pairs.a.push_back(sm.stationary.at(metric));
      pairs.b.push_back(sm.recovery.at(metric));
    }
    try {
      row.test = wilcoxon_signed_rank(pairs);
    } catch (const Error& e) {
      row.test = std::nullopt;
      row.note = e.what();
    }
    stats.rows.push_back(std::move(row));
  }
  return stats;
}

}  // namespace cardiosync
