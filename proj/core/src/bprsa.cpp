#include "cardiosync/bprsa.hpp"

#include <algorithm>
#include <cmath>

#include "cardiosync/errors.hpp"
#include "cardiosync/signal_ops.hpp"

namespace cardiosync {

const char* to_string(AnchorKind kind) {
  return kind == AnchorKind::Decline ? "decline" : "accelerate";
}

EventSeries find_anchors(const Waveform& trigger, AnchorKind kind) {
  validate_waveform(trigger, "find_anchors");
  if (trigger.samples.size() < 3) {
    throw Error(ErrorKind::InvalidInput, "trigger needs at least 3 samples");
  }
  EventSeries anchors;
  const auto& s = trigger.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const bool hit = kind == AnchorKind::Decline ? s[i] < s[i - 1]
                                                 : s[i] > s[i - 1];
    if (hit) anchors.times_s.push_back(trigger.time_of(i));
  }
  if (anchors.empty()) {
    throw Error(ErrorKind::EmptyResult, "no anchor points found");
  }
  return anchors;
}

BprsaResult average_segments(const Waveform& target,
                             const EventSeries& anchors,
                             const BprsaConfig& cfg) {
  if (!(cfg.segment_s > 0.0) || !(cfg.target_rate_hz > 0.0)) {
    throw Error(ErrorKind::InvalidConfig,
                "segment_s and target_rate_hz must be > 0");
  }
  validate_waveform(target, "average_segments");

  const Waveform resampled =
      std::abs(target.rate_hz - cfg.target_rate_hz) < 1e-12 * cfg.target_rate_hz
          ? target
          : resample(target, cfg.target_rate_hz);

  const long half_count =
      std::lround(cfg.segment_s * cfg.target_rate_hz / 2.0);
  const double half_s = static_cast<double>(half_count) / cfg.target_rate_hz;
  const std::size_t seg_len = static_cast<std::size_t>(2 * half_count + 1);

  std::vector<double> sum(seg_len, 0.0);
  int used = 0;
  for (double a : anchors.times_s) {
    if (a - half_s < resampled.start_s || a + half_s > resampled.end_s()) {
      continue;  // anchor too close to a record edge
    }
    for (std::size_t j = 0; j < seg_len; ++j) {
      const double t =
          a + (static_cast<double>(j) - static_cast<double>(half_count)) /
                  cfg.target_rate_hz;
      sum[j] += resampled.value_at(t);
    }
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorKind::InsufficientData,
                "no anchor has a full segment inside the target span");
  }

  BprsaResult out;
  out.avg_segment.resize(seg_len);
  for (std::size_t j = 0; j < seg_len; ++j) {
    out.avg_segment[j] = sum[j] / static_cast<double>(used);
  }
  out.anchor_count = used;
  out.mra = feature_mra(out.avg_segment);
  out.sap = feature_sap(out.avg_segment, cfg.target_rate_hz);
  return out;
}

double feature_mra(std::span<const double> avg_segment) {
  if (avg_segment.empty()) {
    throw Error(ErrorKind::InvalidInput, "empty segment");
  }
  const auto [mn, mx] =
      std::minmax_element(avg_segment.begin(), avg_segment.end());
  return *mx - *mn;
}

double feature_sap(std::span<const double> avg_segment,
                   double target_rate_hz) {
  if (avg_segment.size() < 3 || avg_segment.size() % 2 == 0) {
    throw Error(ErrorKind::InvalidInput,
                "segment must have odd length >= 3 (anchor at center)");
  }
  const std::size_t c = avg_segment.size() / 2;
  return (avg_segment[c + 1] - avg_segment[c - 1]) * target_rate_hz / 2.0;
}

}  // namespace cardiosync
