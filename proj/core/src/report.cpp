#include "cardiosync/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cardiosync/errors.hpp"
#include "cardiosync/synchro.hpp"
#include "cardiosync/version.hpp"

namespace cardiosync {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) {
      throw Error(ErrorKind::Internal,
                  "cannot open " + tmp.string() + " for writing");
    }
    out << content;
    if (!out) {
      throw Error(ErrorKind::Internal, "write failed: " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json config_to_json(const AnalyzeConfig& cfg) {
  ordered_json j;
  j["source"] = to_string(cfg.source);
  j["filter_resp"] = cfg.filter_resp;
  j["resp_band_lo_hz"] = cfg.resp_band_lo_hz;
  j["resp_band_hi_hz"] = cfg.resp_band_hi_hz;
  j["edge_frac"] = cfg.edge_frac;
  j["peak_min_interval_s"] = cfg.peaks.min_interval_s;
  j["peak_prominence_frac"] = cfg.peaks.prominence_frac;
  std::vector<std::string> ratios;
  for (const auto& [n, m] : cfg.grid.pairs) {
    ratios.push_back(std::to_string(n) + ":" + std::to_string(m));
  }
  j["ratio_grid"] = ratios;
  j["window_beats"] = cfg.sync.window_beats;
  j["half_window"] = cfg.sync.half_window;
  j["gamma_threshold"] = cfg.sync.gamma_threshold;
  j["min_episode_s"] = cfg.sync.min_episode_s;
  j["bprsa_segment_s"] = cfg.bprsa.segment_s;
  j["bprsa_target_rate_hz"] = cfg.bprsa.target_rate_hz;
  j["bprsa_zscore"] = cfg.bprsa_zscore;
  return j;
}

ordered_json header_json(const char* kind, const SessionInfo& info) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = kind;
  j["session"] = {{"subject", info.subject_id},
                  {"stage", info.stage},
                  {"repetition", info.repetition},
                  {"source", info.source},
                  {"duration_s", info.duration_s}};
  return j;
}

ordered_json episodes_to_json(const std::vector<Episode>& episodes) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : episodes) {
    arr.push_back({{"start_s", e.start_s},
                   {"end_s", e.end_s},
                   {"duration_s", e.duration_s},
                   {"dominant_n", e.dominant_n},
                   {"dominant_m", e.dominant_m}});
  }
  return arr;
}

ordered_json bprsa_to_json(const BprsaResult& r, const std::string& csv_name) {
  return {{"anchor_count", r.anchor_count},
          {"mra", r.mra},
          {"sap", r.sap},
          {"segment_csv", csv_name}};
}

std::string degree_curve_csv(const SyncCurve& curve) {
  std::ostringstream out;
  out << "t_s,degree,best_n,best_m\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << fmt(curve.beat_times_s[i]) << ',' << fmt(curve.degree[i]) << ','
        << curve.best_n[i] << ',' << curve.best_m[i] << '\n';
  }
  return out.str();
}

std::string bprsa_csv(const BprsaResult& r, double target_rate_hz) {
  std::ostringstream out;
  out << "offset_s,value\n";
  const long half = static_cast<long>(r.avg_segment.size() / 2);
  for (std::size_t i = 0; i < r.avg_segment.size(); ++i) {
    const double offset =
        (static_cast<double>(static_cast<long>(i) - half)) / target_rate_hz;
    out << fmt(offset) << ',' << fmt(r.avg_segment[i]) << '\n';
  }
  return out.str();
}

}  // namespace

void write_analysis_outputs(const fs::path& out_dir,
                            const AnalysisResult& result) {
  fs::create_directories(out_dir);

  ordered_json j = header_json("analysis", result.info);
  j["config"] = config_to_json(result.config);
  j["long_term"] = {{"min_pct", result.long_term.min_pct},
                    {"max_pct", result.long_term.max_pct},
                    {"num_sync", result.long_term.num_sync},
                    {"freq_ratio", result.long_term.freq_ratio}};
  j["episodes"] = episodes_to_json(result.episodes);
  j["bprsa"] = {
      {"decline", bprsa_to_json(result.bprsa_decline, "bprsa_decline.csv")},
      {"accelerate",
       bprsa_to_json(result.bprsa_accelerate, "bprsa_accelerate.csv")}};
  j["beat_count"] = result.beats.size();
  j["artifacts"] = {{"degree_curve", "degree_curve.csv"},
                    {"synchrogram", "synchrogram.csv"}};
  write_atomic(out_dir / "report.json", j.dump(2) + "\n");

  write_atomic(out_dir / "degree_curve.csv", degree_curve_csv(result.curve));

  // Synchrogram points: the m-cycle relative phase at every beat, one
  // column per distinct m in the grid.
  std::set<int> ms;
  for (const auto& [n, m] : result.config.grid.pairs) ms.insert(m);
  std::ostringstream synchro;
  synchro << "t_s";
  for (int m : ms) synchro << ",psi_" << m;
  synchro << '\n';
  for (std::size_t k = 0; k < result.beats.size(); ++k) {
    synchro << fmt(result.beats.times_s[k]);
    for (int m : ms) {
      synchro << ',' << fmt(psi_m(result.resp_phase_at_beats[k], m));
    }
    synchro << '\n';
  }
  write_atomic(out_dir / "synchrogram.csv", synchro.str());

  write_atomic(out_dir / "bprsa_decline.csv",
               bprsa_csv(result.bprsa_decline, result.config.bprsa.target_rate_hz));
  write_atomic(out_dir / "bprsa_accelerate.csv",
               bprsa_csv(result.bprsa_accelerate,
                         result.config.bprsa.target_rate_hz));
}

void write_compare_outputs(const fs::path& out_dir,
                           const CompareResult& result) {
  fs::create_directories(out_dir);

  ordered_json j = header_json("compare", result.info);
  j["config"] = config_to_json(result.config);
  if (result.curve_pearson_r) {
    j["curve_pearson_r"] = *result.curve_pearson_r;
  } else {
    j["curve_pearson_r"] = nullptr;
  }
  j["alignment"] = {{"matched", result.aligned.times_s.size()},
                    {"dropped_bvp", result.aligned.dropped_a},
                    {"dropped_rppg", result.aligned.dropped_b},
                    {"max_dt_s", 0.25}};
  ordered_json hr = {{"window_s", result.hr_window_s},
                     {"windows", result.hr_bvp.size()},
                     {"mae", result.hr_agreement.mae},
                     {"mape_pct", result.hr_agreement.mape_pct},
                     {"rmse", result.hr_agreement.rmse}};
  if (result.hr_agreement.pearson_r) {
    hr["pearson_r"] = *result.hr_agreement.pearson_r;
  } else {
    hr["pearson_r"] = nullptr;
  }
  j["hr_agreement"] = hr;
  j["artifacts"] = {{"degree_bvp", "degree_bvp.csv"},
                    {"degree_rppg", "degree_rppg.csv"},
                    {"aligned_curves", "aligned_curves.csv"},
                    {"hr_windows", "hr_windows.csv"}};
  write_atomic(out_dir / "compare.json", j.dump(2) + "\n");

  write_atomic(out_dir / "degree_bvp.csv", degree_curve_csv(result.curve_bvp));
  write_atomic(out_dir / "degree_rppg.csv",
               degree_curve_csv(result.curve_rppg));

  std::ostringstream aligned;
  aligned << "t_s,degree_bvp,degree_rppg\n";
  for (std::size_t i = 0; i < result.aligned.times_s.size(); ++i) {
    aligned << fmt(result.aligned.times_s[i]) << ','
            << fmt(result.aligned.degree_a[i]) << ','
            << fmt(result.aligned.degree_b[i]) << '\n';
  }
  write_atomic(out_dir / "aligned_curves.csv", aligned.str());

  std::ostringstream hrcsv;
  hrcsv << "window,hr_bvp,hr_rppg\n";
  for (std::size_t i = 0; i < result.hr_bvp.size(); ++i) {
    hrcsv << i << ',' << fmt(result.hr_bvp[i]) << ',' << fmt(result.hr_rppg[i])
          << '\n';
  }
  write_atomic(out_dir / "hr_windows.csv", hrcsv.str());
}

void write_cohort_outputs(const fs::path& out_dir, const CohortStats& stats,
                          const AnalyzeConfig& cfg) {
  fs::create_directories(out_dir);

  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "cohort";
  j["config"] = config_to_json(cfg);
  j["subjects_paired"] = stats.subjects_paired;

  ordered_json rows = ordered_json::array();
  for (const auto& row : stats.rows) {
    ordered_json r;
    r["metric"] = row.metric;
    r["stationary"] = {{"mean", row.stationary.mean},
                       {"sd", row.stationary.sd},
                       {"subjects", row.stationary.subjects}};
    r["recovery"] = {{"mean", row.recovery.mean},
                     {"sd", row.recovery.sd},
                     {"subjects", row.recovery.subjects}};
    if (row.test) {
      r["wilcoxon"] = {{"statistic", row.test->statistic},
                       {"p_two_sided", row.test->p_two_sided}};
    } else {
      r["wilcoxon"] = nullptr;
      r["note"] = row.note;
    }
    rows.push_back(std::move(r));
  }
  j["metrics"] = rows;

  ordered_json sessions = ordered_json::array();
  for (const auto& s : stats.sessions) {
    ordered_json e;
    e["subject"] = s.subject_id;
    e["stage"] = s.stage_number;
    e["state"] = to_string(s.stage);
    e["repetition"] = s.repetition;
    for (const auto& [k, v] : s.values) e[k] = v;
    sessions.push_back(std::move(e));
  }
  j["sessions"] = sessions;
  j["artifacts"] = {{"table", "cohort_table.csv"}};
  write_atomic(out_dir / "cohort.json", j.dump(2) + "\n");

  std::ostringstream csv;
  csv << "metric,stationary_mean,stationary_sd,recovery_mean,recovery_sd,"
         "p_two_sided\n";
  for (const auto& row : stats.rows) {
    csv << row.metric << ',' << fmt(row.stationary.mean) << ','
        << fmt(row.stationary.sd) << ',' << fmt(row.recovery.mean) << ','
        << fmt(row.recovery.sd) << ',';
    if (row.test) {
      csv << fmt(row.test->p_two_sided);
    } else {
      csv << "NA";
    }
    csv << '\n';
  }
  write_atomic(out_dir / "cohort_table.csv", csv.str());
}

void write_bprsa_outputs(const fs::path& out_dir, const SessionInfo& info,
                         const BprsaResult& decline,
                         const BprsaResult& accelerate, const BprsaConfig& cfg,
                         bool zscored) {
  fs::create_directories(out_dir);
  ordered_json j = header_json("bprsa", info);
  j["config"] = {{"segment_s", cfg.segment_s},
                 {"target_rate_hz", cfg.target_rate_hz},
                 {"zscore", zscored}};
  j["decline"] = bprsa_to_json(decline, "bprsa_decline.csv");
  j["accelerate"] = bprsa_to_json(accelerate, "bprsa_accelerate.csv");
  write_atomic(out_dir / "bprsa.json", j.dump(2) + "\n");
  write_atomic(out_dir / "bprsa_decline.csv",
               bprsa_csv(decline, cfg.target_rate_hz));
  write_atomic(out_dir / "bprsa_accelerate.csv",
               bprsa_csv(accelerate, cfg.target_rate_hz));
}

std::string render_report_text(const fs::path& report_json) {
  std::ifstream in(report_json);
  if (!in) {
    throw Error(ErrorKind::MissingFile, report_json.string());
  }
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ParseError,
                report_json.string() + ": " + e.what());
  }
  if (!j.contains("tool") || j["tool"] != kToolName || !j.contains("kind")) {
    throw Error(ErrorKind::ParseError,
                report_json.string() + ": not a " + std::string(kToolName) +
                    " report");
  }

  std::ostringstream out;
  char buf[160];
  const std::string kind = j["kind"];
  out << kToolName << " " << j["version"].get<std::string>() << " — " << kind
      << " report\n";

  if (kind == "analysis") {
    const auto& s = j["session"];
    std::snprintf(buf, sizeof(buf),
                  "session: subject=%s stage=%s rep=%d source=%s (%.1f s)\n",
                  s["subject"].get<std::string>().c_str(),
                  s["stage"].get<std::string>().c_str(),
                  s["repetition"].get<int>(),
                  s["source"].get<std::string>().c_str(),
                  s["duration_s"].get<double>());
    out << buf;
    const auto& lt = j["long_term"];
    std::snprintf(buf, sizeof(buf),
                  "sync degree: min %.2f%%  max %.2f%%  episodes %d  "
                  "freq ratio %.3f\n",
                  lt["min_pct"].get<double>(), lt["max_pct"].get<double>(),
                  lt["num_sync"].get<int>(), lt["freq_ratio"].get<double>());
    out << buf;
    for (const auto& e : j["episodes"]) {
      std::snprintf(buf, sizeof(buf),
                    "  episode %.1f–%.1f s (%.1f s) locked %d:%d\n",
                    e["start_s"].get<double>(), e["end_s"].get<double>(),
                    e["duration_s"].get<double>(), e["dominant_n"].get<int>(),
                    e["dominant_m"].get<int>());
      out << buf;
    }
    for (const char* kindname : {"decline", "accelerate"}) {
      const auto& b = j["bprsa"][kindname];
      std::snprintf(buf, sizeof(buf),
                    "bprsa %-10s anchors %6d  mra %.4f  sap %+.4f\n", kindname,
                    b["anchor_count"].get<int>(), b["mra"].get<double>(),
                    b["sap"].get<double>());
      out << buf;
    }
  } else if (kind == "bprsa") {
    for (const char* kindname : {"decline", "accelerate"}) {
      const auto& b = j[kindname];
      std::snprintf(buf, sizeof(buf),
                    "bprsa %-10s anchors %6d  mra %.4f  sap %+.4f\n", kindname,
                    b["anchor_count"].get<int>(), b["mra"].get<double>(),
                    b["sap"].get<double>());
      out << buf;
    }
  } else if (kind == "compare") {
    if (j["curve_pearson_r"].is_null()) {
      out << "curve pearson r: undefined (constant curve)\n";
    } else {
      std::snprintf(buf, sizeof(buf), "curve pearson r: %.4f\n",
                    j["curve_pearson_r"].get<double>());
      out << buf;
    }
    const auto& a = j["alignment"];
    std::snprintf(buf, sizeof(buf),
                  "alignment: %zu matched, %zu/%zu dropped (bvp/rppg)\n",
                  a["matched"].get<std::size_t>(),
                  a["dropped_bvp"].get<std::size_t>(),
                  a["dropped_rppg"].get<std::size_t>());
    out << buf;
    const auto& hr = j["hr_agreement"];
    std::snprintf(buf, sizeof(buf),
                  "hr agreement: mae %.3f bpm  mape %.3f%%  rmse %.3f bpm\n",
                  hr["mae"].get<double>(), hr["mape_pct"].get<double>(),
                  hr["rmse"].get<double>());
    out << buf;
  } else if (kind == "cohort") {
    std::snprintf(buf, sizeof(buf), "subjects with both states: %d\n",
                  j["subjects_paired"].get<int>());
    out << buf;
    for (const auto& r : j["metrics"]) {
      std::string p = "NA";
      if (!r["wilcoxon"].is_null()) {
        std::snprintf(buf, sizeof(buf), "%.4g",
                      r["wilcoxon"]["p_two_sided"].get<double>());
        p = buf;
      }
      std::snprintf(buf, sizeof(buf),
                    "%-15s stationary %8.3f ± %-8.3f recovery %8.3f ± %-8.3f "
                    "p=%s\n",
                    r["metric"].get<std::string>().c_str(),
                    r["stationary"]["mean"].get<double>(),
                    r["stationary"]["sd"].get<double>(),
                    r["recovery"]["mean"].get<double>(),
                    r["recovery"]["sd"].get<double>(), p.c_str());
      out << buf;
    }
  } else {
    throw Error(ErrorKind::ParseError, "unknown report kind '" + kind + "'");
  }
  return out.str();
}

}  // namespace cardiosync
