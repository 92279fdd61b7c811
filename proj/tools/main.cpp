// Command line front end: analyze / compare / stats / bprsa / synth / report.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cardiosync/analysis.hpp"
#include "cardiosync/bprsa.hpp"
#include "cardiosync/errors.hpp"
#include "cardiosync/ingest.hpp"
#include "cardiosync/report.hpp"
#include "cardiosync/synth.hpp"
#include "cardiosync/version.hpp"

namespace fs = std::filesystem;
using namespace cardiosync;

namespace {

// Exit codes: 0 ok, 1 internal, 2 bad input/config, 3 insufficient data.
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitData = 3;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::EmptyResult:
    case ErrorKind::InsufficientData:
    case ErrorKind::AlignmentError:
      return kExitData;
    case ErrorKind::Internal:
      return kExitInternal;
    default:
      return kExitInput;
  }
}

struct SessionArgs {
  std::string manifest;
  std::string root;
  std::string subject;
  int stage = 0;       // 0 = unset
  int repetition = -1;  // -1 = unset
  std::string resp, bvp, rppg;
};

void add_session_options(CLI::App* cmd, SessionArgs& args) {
  cmd->add_option("--manifest", args.manifest,
                  "Cohort manifest (subject,stage,repetition,resp,bvp,rppg)");
  cmd->add_option("--root", args.root,
                  "Cohort root for manifest-relative paths")
      ->envname("CARDIOSYNC_ROOT");
  cmd->add_option("--subject", args.subject, "Subject id to select");
  cmd->add_option("--stage", args.stage, "Protocol stage (1..4) to select");
  cmd->add_option("--rep", args.repetition, "Repetition to select");
  cmd->add_option("--resp", args.resp, "Respiration CSV (direct mode)");
  cmd->add_option("--bvp", args.bvp, "Contact pulse CSV (direct mode)");
  cmd->add_option("--rppg", args.rppg, "Remote pulse CSV (direct mode)");
}

fs::path resolve_root(const SessionArgs& args) {
  if (!args.root.empty()) return args.root;
  return fs::path(args.manifest).parent_path();
}

Session select_session(const SessionArgs& args) {
  if (!args.manifest.empty()) {
    const CohortIndex index =
        scan_cohort(resolve_root(args), args.manifest);
    for (const auto& rec : index.sessions) {
      if (!args.subject.empty() && rec.subject_id != args.subject) continue;
      if (args.stage != 0 && rec.stage_number != args.stage) continue;
      if (args.repetition >= 0 && rec.repetition != args.repetition) continue;
      return load_session(rec);
    }
    throw Error(ErrorKind::InvalidInput,
                "no manifest entry matches the requested session");
  }
  if (args.resp.empty()) {
    throw Error(ErrorKind::InvalidConfig,
                "provide --manifest or --resp (plus --bvp/--rppg)");
  }
  SessionRecord rec;
  rec.subject_id = args.subject.empty() ? "session" : args.subject;
  rec.stage_number = args.stage == 0 ? 1 : args.stage;
  rec.repetition = args.repetition < 0 ? 0 : args.repetition;
  rec.resp_path = args.resp;
  if (!args.bvp.empty()) rec.bvp_path = args.bvp;
  if (!args.rppg.empty()) rec.rppg_path = args.rppg;
  return load_session(rec);
}

struct PipelineArgs {
  std::string source = "bvp";
  bool no_resp_filter = false;
  std::string ratios;
  AnalyzeConfig cfg;
  bool bprsa_raw = false;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& args) {
  cmd->add_option("--source", args.source, "Pulse source: bvp or rppg")
      ->check(CLI::IsMember({"bvp", "rppg"}));
  cmd->add_flag("--no-resp-filter", args.no_resp_filter,
                "Skip the respiration band-pass before phase extraction");
  cmd->add_option("--resp-band-lo", args.cfg.resp_band_lo_hz,
                  "Respiration band low edge, Hz")
      ->capture_default_str();
  cmd->add_option("--resp-band-hi", args.cfg.resp_band_hi_hz,
                  "Respiration band high edge, Hz")
      ->capture_default_str();
  cmd->add_option("--edge-frac", args.cfg.edge_frac,
                  "Edge fraction flagged unreliable after phase extraction")
      ->capture_default_str();
  cmd->add_option("--peak-min-interval", args.cfg.peaks.min_interval_s,
                  "Minimum inter-beat interval, s")
      ->capture_default_str();
  cmd->add_option("--peak-prominence", args.cfg.peaks.prominence_frac,
                  "Peak prominence as a fraction of the robust range")
      ->capture_default_str();
  cmd->add_option("--window-beats", args.cfg.sync.window_beats,
                  "Beats per synchronization window (even)")
      ->capture_default_str();
  cmd->add_option("--gamma-threshold", args.cfg.sync.gamma_threshold,
                  "Episode threshold on the synchronization degree")
      ->capture_default_str();
  cmd->add_option("--min-episode-s", args.cfg.sync.min_episode_s,
                  "Minimum episode duration, s")
      ->capture_default_str();
  cmd->add_option("--ratios", args.ratios,
                  "Ratio grid override, e.g. \"3:1,4:1,5:1\"");
  cmd->add_option("--bprsa-segment-s", args.cfg.bprsa.segment_s,
                  "BPRSA window length, s (centered on the anchor)")
      ->capture_default_str();
  cmd->add_option("--bprsa-target-rate", args.cfg.bprsa.target_rate_hz,
                  "BPRSA target resampling rate, Hz")
      ->capture_default_str();
  cmd->add_flag("--bprsa-raw", args.bprsa_raw,
                "Feed raw (not z-scored) signals into BPRSA");
}

RatioGrid parse_ratios(const std::string& spec) {
  RatioGrid grid;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    const std::string item =
        spec.substr(pos, comma == std::string::npos ? spec.size() - pos
                                                    : comma - pos);
    const std::size_t colon = item.find(':');
    try {
      if (colon == std::string::npos) {
        grid.pairs.push_back({std::stoi(item), 1});
      } else {
        grid.pairs.push_back(
            {std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidConfig,
                  "cannot parse ratio '" + item + "' (expected n:m)");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  validate_grid(grid);
  return grid;
}

AnalyzeConfig finalize_config(const PipelineArgs& args) {
  AnalyzeConfig cfg = args.cfg;
  cfg.source = args.source == "rppg" ? PulseSource::Rppg : PulseSource::Bvp;
  cfg.filter_resp = !args.no_resp_filter;
  cfg.bprsa_zscore = !args.bprsa_raw;
  if (cfg.sync.window_beats % 2 != 0) {
    throw Error(ErrorKind::InvalidConfig, "--window-beats must be even");
  }
  cfg.sync.half_window = cfg.sync.window_beats / 2;
  if (!args.ratios.empty()) cfg.grid = parse_ratios(args.ratios);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) +
               " — cardiorespiratory coupling analysis"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from an INI/TOML file");

  // analyze ----------------------------------------------------------------
  auto* analyze = app.add_subcommand(
      "analyze", "Full CRC pipeline on one session, reports + curve files");
  SessionArgs an_session;
  PipelineArgs an_pipe;
  std::string an_out = "analysis_out";
  add_session_options(analyze, an_session);
  add_pipeline_options(analyze, an_pipe);
  analyze->add_option("--out", an_out, "Output directory")
      ->capture_default_str();

  // compare ----------------------------------------------------------------
  auto* compare = app.add_subcommand(
      "compare", "Run the pipeline per pulse source and compare CRC curves");
  SessionArgs cp_session;
  PipelineArgs cp_pipe;
  std::string cp_out = "compare_out";
  double cp_hr_window = 30.0;
  add_session_options(compare, cp_session);
  add_pipeline_options(compare, cp_pipe);
  compare->add_option("--out", cp_out, "Output directory")
      ->capture_default_str();
  compare->add_option("--hr-window-s", cp_hr_window,
                      "HR estimation window, s")
      ->capture_default_str();

  // stats ------------------------------------------------------------------
  auto* stats_cmd = app.add_subcommand(
      "stats", "Cohort metric table with across-state Wilcoxon tests");
  SessionArgs st_session;
  PipelineArgs st_pipe;
  std::string st_out = "cohort_out";
  std::vector<std::string> st_metrics;
  add_session_options(stats_cmd, st_session);
  add_pipeline_options(stats_cmd, st_pipe);
  stats_cmd->add_option("--metrics", st_metrics,
                        "Metric selector (default: all)")
      ->delimiter(',');
  stats_cmd->add_option("--out", st_out, "Output directory")
      ->capture_default_str();

  // bprsa ------------------------------------------------------------------
  auto* bprsa_cmd = app.add_subcommand(
      "bprsa", "Bivariate phase-rectified signal averaging only");
  SessionArgs bp_session;
  PipelineArgs bp_pipe;
  std::string bp_out = "bprsa_out";
  add_session_options(bprsa_cmd, bp_session);
  add_pipeline_options(bprsa_cmd, bp_pipe);
  bprsa_cmd->add_option("--out", bp_out, "Output directory")
      ->capture_default_str();

  // synth ------------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a synthetic coupled session (ingest-compatible)");
  SynthConfig synth_cfg;
  std::string sy_out = "synth_out";
  std::string sy_subject = "synth";
  int sy_stage = 1;
  int sy_rep = 0;
  double sy_jitter_ms = -1.0;
  bool sy_duplicate = false;
  synth_cmd->add_option("--duration", synth_cfg.duration_s, "Seconds")
      ->capture_default_str();
  synth_cmd->add_option("--resp-hz", synth_cfg.resp_hz, "Breaths per second")
      ->capture_default_str();
  synth_cmd->add_option("--heart-hz", synth_cfg.heart_hz, "Beats per second")
      ->capture_default_str();
  synth_cmd->add_option("--couple-n", synth_cfg.couple_n, "Coupling ratio n")
      ->capture_default_str();
  synth_cmd->add_option("--couple-m", synth_cfg.couple_m, "Coupling ratio m")
      ->capture_default_str();
  synth_cmd->add_option("--epsilon", synth_cfg.epsilon,
                        "Coupling strength, rad/s")
      ->capture_default_str();
  synth_cmd->add_option("--rsa-gain", synth_cfg.rsa_gain,
                        "Respiratory sinus arrhythmia gain")
      ->capture_default_str();
  synth_cmd->add_option("--phase-noise", synth_cfg.phase_noise,
                        "Cardiac phase diffusion, rad/sqrt(s)")
      ->capture_default_str();
  synth_cmd->add_option("--resp-leak", synth_cfg.resp_leak,
                        "Respiratory baseline in the pulse, x rsa-gain")
      ->capture_default_str();
  synth_cmd->add_option("--pulse-noise", synth_cfg.pulse_noise,
                        "Measurement noise std on pulse samples")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_cfg.seed, "RNG seed")
      ->capture_default_str();
  synth_cmd->add_option("--pulse-rate", synth_cfg.pulse_rate_hz,
                        "Pulse sampling rate, Hz")
      ->capture_default_str();
  synth_cmd->add_option("--resp-rate", synth_cfg.resp_rate_hz,
                        "Respiration sampling rate, Hz")
      ->capture_default_str();
  synth_cmd->add_option("--sim-rate", synth_cfg.sim_rate_hz,
                        "Integration rate, Hz")
      ->capture_default_str();
  synth_cmd->add_option("--subject", sy_subject, "Manifest subject id")
      ->capture_default_str();
  synth_cmd->add_option("--stage", sy_stage, "Manifest stage (1..4)")
      ->capture_default_str();
  synth_cmd->add_option("--rep", sy_rep, "Manifest repetition")
      ->capture_default_str();
  synth_cmd->add_option(
      "--rppg-jitter-ms", sy_jitter_ms,
      "Also emit rppg.csv re-rendered from beats jittered by this sigma");
  synth_cmd->add_flag("--rppg-duplicate", sy_duplicate,
                      "Also emit rppg.csv as an exact copy of the pulse");
  synth_cmd->add_option("--out", sy_out, "Output directory")
      ->capture_default_str();

  // report -----------------------------------------------------------------
  auto* report_cmd =
      app.add_subcommand("report", "Pretty-print a report JSON");
  std::string rp_file;
  report_cmd->add_option("file", rp_file, "Report JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      const AnalyzeConfig cfg = finalize_config(an_pipe);
      const Session session = select_session(an_session);
      const AnalysisResult result = analyze_session(session, cfg);
      write_analysis_outputs(an_out, result);
      std::cout << render_report_text(fs::path(an_out) / "report.json");
      std::cout << "wrote " << (fs::path(an_out) / "report.json").string()
                << "\n";
    } else if (*compare) {
      AnalyzeConfig cfg = finalize_config(cp_pipe);
      const Session session = select_session(cp_session);
      CompareResult result = compare_sources(session, cfg);
      result.hr_window_s = cp_hr_window;
      write_compare_outputs(cp_out, result);
      std::cout << render_report_text(fs::path(cp_out) / "compare.json");
      std::cout << "wrote " << (fs::path(cp_out) / "compare.json").string()
                << "\n";
    } else if (*stats_cmd) {
      const AnalyzeConfig cfg = finalize_config(st_pipe);
      if (st_session.manifest.empty()) {
        throw Error(ErrorKind::InvalidConfig, "stats needs --manifest");
      }
      const CohortIndex index =
          scan_cohort(resolve_root(st_session), st_session.manifest);
      const CohortStats stats = cohort_stats(index, st_metrics, cfg);
      write_cohort_outputs(st_out, stats, cfg);
      std::cout << render_report_text(fs::path(st_out) / "cohort.json");
      std::cout << "wrote " << (fs::path(st_out) / "cohort.json").string()
                << "\n";
    } else if (*bprsa_cmd) {
      const AnalyzeConfig cfg = finalize_config(bp_pipe);
      const Session session = select_session(bp_session);
      const auto& pulse =
          cfg.source == PulseSource::Bvp ? session.bvp : session.rppg;
      if (!pulse) {
        throw Error(ErrorKind::InvalidInput,
                    std::string("session has no ") + to_string(cfg.source) +
                        " waveform");
      }
      const Waveform trigger = cfg.bprsa_zscore ? zscore(*pulse) : *pulse;
      const Waveform target =
          cfg.bprsa_zscore ? zscore(session.resp) : session.resp;
      const BprsaResult decline = average_segments(
          target, find_anchors(trigger, AnchorKind::Decline), cfg.bprsa);
      const BprsaResult accelerate = average_segments(
          target, find_anchors(trigger, AnchorKind::Accelerate), cfg.bprsa);
      SessionInfo info{session.subject_id, to_string(session.stage),
                       session.repetition, to_string(cfg.source),
                       session.duration_s};
      write_bprsa_outputs(bp_out, info, decline, accelerate, cfg.bprsa,
                          cfg.bprsa_zscore);
      std::cout << render_report_text(fs::path(bp_out) / "bprsa.json");
      std::cout << "wrote " << (fs::path(bp_out) / "bprsa.json").string()
                << "\n";
    } else if (*synth_cmd) {
      const SynthSession session = generate(synth_cfg);
      fs::create_directories(sy_out);
      write_waveform_csv(fs::path(sy_out) / "resp.csv", session.resp);
      write_waveform_csv(fs::path(sy_out) / "bvp.csv", session.pulse);

      SessionRecord rec;
      rec.subject_id = sy_subject;
      rec.stage_number = sy_stage;
      rec.repetition = sy_rep;
      rec.resp_path = "resp.csv";
      rec.bvp_path = "bvp.csv";
      if (sy_duplicate && sy_jitter_ms >= 0.0) {
        throw Error(ErrorKind::InvalidConfig,
                    "--rppg-duplicate and --rppg-jitter-ms are exclusive");
      }
      if (sy_duplicate) {
        Waveform copy = session.pulse;
        copy.label = SignalLabel::Rppg;
        write_waveform_csv(fs::path(sy_out) / "rppg.csv", copy);
        rec.rppg_path = "rppg.csv";
      } else if (sy_jitter_ms >= 0.0) {
        const Waveform rppg =
            render_jittered_pulse(synth_cfg, session.truth, sy_jitter_ms);
        write_waveform_csv(fs::path(sy_out) / "rppg.csv", rppg);
        rec.rppg_path = "rppg.csv";
      }
      write_manifest(fs::path(sy_out) / "manifest.csv", {rec});

      std::ofstream truth(fs::path(sy_out) / "truth.csv");
      truth << "beat_time_s,resp_phase_rad\n";
      char buf[80];
      for (std::size_t i = 0; i < session.truth.beat_times_s.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n",
                      session.truth.beat_times_s[i],
                      session.truth.resp_phase_truth[i]);
        truth << buf;
      }
      std::cout << "synth: " << session.truth.beat_times_s.size()
                << " beats over " << synth_cfg.duration_s << " s, "
                << (session.truth.locked ? "locked" : "unlocked")
                << " configuration\nwrote "
                << (fs::path(sy_out) / "manifest.csv").string() << "\n";
    } else if (*report_cmd) {
      std::cout << render_report_text(rp_file);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
