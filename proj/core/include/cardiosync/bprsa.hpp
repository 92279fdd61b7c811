#pragma once

#include <span>
#include <vector>

#include "cardiosync/waveform.hpp"

namespace cardiosync {

/// Anchor selection rule on the trigger (pulse) signal:
/// Decline selects samples falling below their predecessor, Accelerate
/// samples rising above it.
enum class AnchorKind { Decline, Accelerate };

const char* to_string(AnchorKind kind);

struct BprsaConfig {
  double segment_s = 4.0;        // total window, centered on the anchor
  double target_rate_hz = 50.0;  // grid of the averaged target segment
};

/// Averaged target-signal segment around the anchors plus its features.
/// avg_segment has segment_s * target_rate_hz + 1 points; the anchor sits
/// at the center index.
struct BprsaResult {
  std::vector<double> avg_segment;
  int anchor_count = 0;
  double mra = 0.0;  // peak-to-trough of the averaged segment
  double sap = 0.0;  // slope at the anchor, target units per second
};

/// Single-sample difference anchor detector on the trigger's native grid.
/// Throws InvalidInput if the trigger has fewer than 3 samples and
/// EmptyResult when no sample qualifies.
EventSeries find_anchors(const Waveform& trigger, AnchorKind kind);

/// Resamples the target to target_rate_hz, extracts the centered segment
/// around every anchor that fits entirely inside the target span, and
/// averages pointwise. Throws InsufficientData when no anchor is usable.
BprsaResult average_segments(const Waveform& target, const EventSeries& anchors,
                             const BprsaConfig& cfg = {});

/// max - min of the averaged segment.
double feature_mra(std::span<const double> avg_segment);

/// Central difference at the center index, units per second.
double feature_sap(std::span<const double> avg_segment, double target_rate_hz);

}  // namespace cardiosync
