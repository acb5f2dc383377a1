#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "rsc/channels.hpp"

namespace rsc {

struct MonitorConfig {
  double iou_threshold = 0.0;      // in [0, 1]; comparison is strict (<)
  bool require_class_match = true;
};

enum class MonitorReason {
  kAgree,
  kAgreeEmpty,
  kClassMismatch,
  kIouBelowThreshold,
  kCardinalityMismatch,
};
inline constexpr int kMonitorReasonCount = 5;

std::string_view to_string(MonitorReason reason) noexcept;

struct MatchedPair {
  std::size_t index_a;
  std::size_t index_b;
  double iou;
};

// Outcome for one frame. For valid frames the system output is channel A's
// detections, passed through unmodified; invalid frames inhibit (empty
// output). matched_pairs is filled whenever both channels are non-empty,
// also on cardinality mismatch, where it pairs up min(|A|,|B|) detections
// as diagnostics.
struct MonitorDecision {
  std::int64_t frame_id = 0;
  bool valid = false;
  MonitorReason reason = MonitorReason::kCardinalityMismatch;
  std::vector<MatchedPair> matched_pairs;
  std::vector<Detection> output;
};

struct AvailabilityReport {
  std::uint64_t total_frames = 0;
  std::uint64_t valid_frames = 0;
  double availability = 1.0;  // valid/total; 1.0 for an empty run
  std::array<std::uint64_t, kMonitorReasonCount> reason_counts{};

  std::uint64_t count(MonitorReason reason) const noexcept {
    return reason_counts[static_cast<int>(reason)];
  }
};

// Greedy bipartite matching by descending IoU; ties break toward the lower
// (index_a, index_b). Matches min(a.size(), b.size()) pairs. Deterministic.
std::vector<MatchedPair> match_channels(const std::vector<Detection>& a,
                                        const std::vector<Detection>& b);

// Per-frame agreement decision. Precedence: both channels empty is a valid
// AGREE_EMPTY; unequal cardinality inhibits; then a class divergence on any
// matched pair (when required); then any pair IoU strictly below the
// threshold; otherwise AGREE. Stateless across frames.
MonitorDecision decide(const FrameRecord& frame, const MonitorConfig& config);

std::pair<std::vector<MonitorDecision>, AvailabilityReport> run_monitor(
    const std::vector<FrameRecord>& frames, const MonitorConfig& config);

// Calibration samples: per-frame maximum IoU over the greedy matching
// (threshold-free). Frames with an empty channel contribute no sample.
std::vector<double> frame_iou_samples(const std::vector<FrameRecord>& frames);

}  // namespace rsc
