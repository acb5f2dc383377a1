#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rsc/channels.hpp"

namespace rsc {

struct GroundTruthAnnotation {
  BoundingBox bbox;
  SignClass sign_class;

  friend bool operator==(const GroundTruthAnnotation&,
                         const GroundTruthAnnotation&) = default;
};

struct GroundTruthRecord {
  std::int64_t frame_id = 0;
  std::vector<GroundTruthAnnotation> annotations;
};

// Ground truth fixture: same line format as detections minus the channel
// and confidence fields. Records sorted by frame id on load.
std::vector<GroundTruthRecord> load_ground_truth(const std::filesystem::path& path);
void save_ground_truth(const std::vector<GroundTruthRecord>& records,
                       const std::filesystem::path& path);

struct MatchCounts {
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
};

// Greedy confidence-ordered matching within one frame. Predictions are
// visited by descending confidence (input order breaks ties); each takes
// the unmatched same-class truth with the highest IoU >= iou_min, lower
// truth index on ties. Each truth matches at most once. iou_min in (0, 1].
MatchCounts match_predictions(std::span<const Detection> predictions,
                              std::span<const GroundTruthAnnotation> truth,
                              double iou_min);

struct FrameDetections {
  std::int64_t frame_id = 0;
  std::vector<Detection> detections;
};

// One channel's detections pulled out of the paired stream.
std::vector<FrameDetections> extract_channel(const std::vector<FrameRecord>& frames,
                                             ChannelId id);

struct PRPoint {
  double confidence_cutoff;
  double precision;  // 1.0 at zero predictions
  double recall;     // 1.0 at zero ground truths
};

// Precision/recall pairs at every distinct confidence cutoff, descending.
// A single greedy pass in global confidence order labels each prediction;
// greedy matching has the prefix property (the matching of the top-k
// predictions extends to top-k+1), so cumulative counts at each cutoff
// equal a full re-match of the predictions above it.
std::vector<PRPoint> pr_curve(const std::vector<FrameDetections>& predictions,
                              const std::vector<GroundTruthRecord>& truth,
                              double iou_min);

// Area under the all-points precision envelope: sum over recall steps of
// step width times max precision at or beyond that recall. Empty curve
// (no predictions) scores 0.
double average_precision(std::span<const PRPoint> curve);

struct EvaluationSummary {
  ChannelId channel = ChannelId::A;
  double iou_min = 0.5;
  double confidence_min = 0.5;
  std::uint64_t predictions = 0;    // after the confidence filter
  std::uint64_t ground_truths = 0;
  MatchCounts counts;               // operating point: all filtered predictions
  double precision = 1.0;
  double recall = 1.0;
  double average_precision = 0.0;
  std::vector<PRPoint> curve;
};

// Filters one channel's detections by confidence >= confidence_min, then
// matches against ground truth per frame and derives the PR curve and AP.
EvaluationSummary evaluate_channel(const std::vector<FrameRecord>& frames,
                                   ChannelId id,
                                   const std::vector<GroundTruthRecord>& truth,
                                   double iou_min, double confidence_min);

}  // namespace rsc
