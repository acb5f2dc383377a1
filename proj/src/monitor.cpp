#include "rsc/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsc {

std::string_view to_string(MonitorReason reason) noexcept {
  switch (reason) {
    case MonitorReason::kAgree:
      return "AGREE";
    case MonitorReason::kAgreeEmpty:
      return "AGREE_EMPTY";
    case MonitorReason::kClassMismatch:
      return "CLASS_MISMATCH";
    case MonitorReason::kIouBelowThreshold:
      return "IOU_BELOW_THRESHOLD";
    case MonitorReason::kCardinalityMismatch:
      return "CARDINALITY_MISMATCH";
  }
  return "CARDINALITY_MISMATCH";
}

std::vector<MatchedPair> match_channels(const std::vector<Detection>& a,
                                        const std::vector<Detection>& b) {
  struct Candidate {
    double iou;
    std::size_t index_a;
    std::size_t index_b;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(a.size() * b.size());
  for (std::size_t ia = 0; ia < a.size(); ++ia) {
    for (std::size_t ib = 0; ib < b.size(); ++ib) {
      candidates.push_back({iou(a[ia].bbox(), b[ib].bbox()), ia, ib});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& lhs, const Candidate& rhs) {
              if (lhs.iou != rhs.iou) return lhs.iou > rhs.iou;
              if (lhs.index_a != rhs.index_a) return lhs.index_a < rhs.index_a;
              return lhs.index_b < rhs.index_b;
            });

  std::vector<bool> used_a(a.size(), false);
  std::vector<bool> used_b(b.size(), false);
  std::vector<MatchedPair> pairs;
  pairs.reserve(std::min(a.size(), b.size()));
  for (const Candidate& c : candidates) {
    if (used_a[c.index_a] || used_b[c.index_b]) continue;
    used_a[c.index_a] = true;
    used_b[c.index_b] = true;
    pairs.push_back({c.index_a, c.index_b, c.iou});
  }
  return pairs;
}

MonitorDecision decide(const FrameRecord& frame, const MonitorConfig& config) {
  if (!std::isfinite(config.iou_threshold) || config.iou_threshold < 0.0 ||
      config.iou_threshold > 1.0) {
    throw std::invalid_argument("monitor threshold must lie in [0, 1]");
  }

  MonitorDecision decision;
  decision.frame_id = frame.frame_id;

  const auto& a = frame.channel_a;
  const auto& b = frame.channel_b;

  if (a.empty() && b.empty()) {
    decision.valid = true;
    decision.reason = MonitorReason::kAgreeEmpty;
    return decision;
  }
  if (!a.empty() && !b.empty()) {
    decision.matched_pairs = match_channels(a, b);
  }
  if (a.size() != b.size()) {
    // matched_pairs kept as diagnostics; the frame still inhibits.
    decision.valid = false;
    decision.reason = MonitorReason::kCardinalityMismatch;
    return decision;
  }

  if (config.require_class_match) {
    for (const MatchedPair& pair : decision.matched_pairs) {
      if (a[pair.index_a].sign_class() != b[pair.index_b].sign_class()) {
        decision.valid = false;
        decision.reason = MonitorReason::kClassMismatch;
        return decision;
      }
    }
  }
  for (const MatchedPair& pair : decision.matched_pairs) {
    if (pair.iou < config.iou_threshold) {
      decision.valid = false;
      decision.reason = MonitorReason::kIouBelowThreshold;
      return decision;
    }
  }

  decision.valid = true;
  decision.reason = MonitorReason::kAgree;
  decision.output = a;  // pass-through source is channel A, unmodified
  return decision;
}

std::pair<std::vector<MonitorDecision>, AvailabilityReport> run_monitor(
    const std::vector<FrameRecord>& frames, const MonitorConfig& config) {
  std::vector<MonitorDecision> decisions;
  decisions.reserve(frames.size());
  AvailabilityReport report;
  report.total_frames = frames.size();
  for (const FrameRecord& frame : frames) {
    decisions.push_back(decide(frame, config));
    const MonitorDecision& d = decisions.back();
    if (d.valid) ++report.valid_frames;
    ++report.reason_counts[static_cast<int>(d.reason)];
  }
  report.availability =
      frames.empty() ? 1.0
                     : static_cast<double>(report.valid_frames) /
                           static_cast<double>(report.total_frames);
  return {std::move(decisions), report};
}

std::vector<double> frame_iou_samples(const std::vector<FrameRecord>& frames) {
  std::vector<double> samples;
  samples.reserve(frames.size());
  for (const FrameRecord& frame : frames) {
    if (frame.channel_a.empty() || frame.channel_b.empty()) continue;
    const auto pairs = match_channels(frame.channel_a, frame.channel_b);
    double best = 0.0;
    for (const MatchedPair& pair : pairs) best = std::max(best, pair.iou);
    samples.push_back(best);
  }
  return samples;
}

}  // namespace rsc
