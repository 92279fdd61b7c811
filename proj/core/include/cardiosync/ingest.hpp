#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cardiosync/waveform.hpp"

namespace cardiosync {

/// Protocol stages 1 and 3 are stationary; 2 and 4 are exercise recovery.
enum class Stage { Stationary, ExerciseRecovery };

const char* to_string(Stage stage);
Stage stage_from_number(int stage_number);

/// Minimum common time span across a session's waveforms.
inline constexpr double kMinOverlapS = 60.0;

/// One recording: respiration plus at least one pulse source, overlapping
/// in time for at least kMinOverlapS.
struct Session {
  std::string subject_id;
  Stage stage = Stage::Stationary;
  int repetition = 0;
  std::optional<Waveform> bvp;
  std::optional<Waveform> rppg;
  Waveform resp;
  double duration_s = 0.0;  // overlapping span
};

/// Manifest entry; paths are resolved against the cohort root.
struct SessionRecord {
  std::string subject_id;
  int stage_number = 1;
  int repetition = 0;
  std::filesystem::path resp_path;
  std::filesystem::path bvp_path;   // empty when absent
  std::filesystem::path rppg_path;  // empty when absent

  Stage stage() const { return stage_from_number(stage_number); }
};

struct CohortIndex {
  std::vector<SessionRecord> sessions;
  std::filesystem::path root;
};

/// Loads a waveform CSV. Two-column files ("t_seconds,value" header) are
/// validated for uniform spacing (per-interval jitter at most 10% of the
/// nominal interval) and snapped to the uniform grid; one-column files
/// ("value" header) take their rate from expected_rate_hz or, failing that,
/// from a "<path>.rate" sidecar. NaN/Inf samples are rejected.
///
/// Throws ParseError (with line numbers), NonUniform, RateMismatch (when
/// expected_rate_hz is given and the measured rate deviates by > 1%), or
/// MissingFile.
Waveform load_waveform_csv(const std::filesystem::path& path,
                           SignalLabel label,
                           std::optional<double> expected_rate_hz = {});

/// Two-column CSV with full round-trip precision; a waveform written here
/// and re-ingested reproduces samples and rate exactly.
void write_waveform_csv(const std::filesystem::path& path, const Waveform& w);

/// Reads a cohort manifest (header "subject,stage,repetition,resp,bvp,rppg")
/// and validates each entry: files must exist and start with a recognized
/// header, (subject, stage, repetition) must be unique, and every session
/// needs resp plus at least one pulse path. Full waveform loading is
/// deferred to load_session.
CohortIndex scan_cohort(const std::filesystem::path& root,
                        const std::filesystem::path& manifest_path);

void write_manifest(const std::filesystem::path& manifest_path,
                    const std::vector<SessionRecord>& records);

/// Loads and validates one session's waveforms.
Session load_session(const SessionRecord& record);

}  // namespace cardiosync
