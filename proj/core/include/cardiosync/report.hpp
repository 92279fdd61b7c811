#pragma once

#include <filesystem>
#include <string>

#include "cardiosync/analysis.hpp"

namespace cardiosync {

/// Writes report.json plus plot-ready curve files (degree_curve.csv,
/// synchrogram.csv, bprsa_decline.csv, bprsa_accelerate.csv) into out_dir.
/// All files are written atomically (temp + rename) and contain no
/// timestamps, so identical runs produce byte-identical outputs.
void write_analysis_outputs(const std::filesystem::path& out_dir,
                            const AnalysisResult& result);

/// Writes compare.json plus degree_bvp.csv, degree_rppg.csv,
/// aligned_curves.csv and hr_windows.csv.
void write_compare_outputs(const std::filesystem::path& out_dir,
                           const CompareResult& result);

/// Writes cohort.json plus cohort_table.csv (state means +/- sd and the
/// across-state Wilcoxon p per metric).
void write_cohort_outputs(const std::filesystem::path& out_dir,
                          const CohortStats& stats,
                          const AnalyzeConfig& cfg);

/// Standalone BPRSA outputs: bprsa.json plus the two averaged-segment CSVs.
void write_bprsa_outputs(const std::filesystem::path& out_dir,
                         const SessionInfo& info, const BprsaResult& decline,
                         const BprsaResult& accelerate, const BprsaConfig& cfg,
                         bool zscored);

/// Human-readable summary of any report JSON written by the functions
/// above. Throws ParseError on files this tool did not produce.
std::string render_report_text(const std::filesystem::path& report_json);

}  // namespace cardiosync
