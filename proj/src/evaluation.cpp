#include "rsc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "rsc/errors.hpp"
#include "rsc/jsonl.hpp"

namespace rsc {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_iou_min(double iou_min) {
  if (!std::isfinite(iou_min) || !(iou_min > 0.0) || iou_min > 1.0) {
    throw std::invalid_argument("iou_min must lie in (0, 1]");
  }
}

// Visit order for predictions: confidence descending, input order on ties.
std::vector<std::size_t> confidence_order(std::span<const Detection> predictions) {
  std::vector<std::size_t> order(predictions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t lhs, std::size_t rhs) {
                     return predictions[lhs].confidence() > predictions[rhs].confidence();
                   });
  return order;
}

// Greedy choice for one prediction: unmatched, class-equal truth with the
// highest IoU >= iou_min; lower truth index on ties. Returns npos if none.
std::size_t best_truth(const Detection& pred,
                       std::span<const GroundTruthAnnotation> truth,
                       const std::vector<bool>& used, double iou_min) {
  std::size_t best = static_cast<std::size_t>(-1);
  double best_iou = -1.0;  // any eligible overlap beats this; ties keep the lower index
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (used[t]) continue;
    if (truth[t].sign_class != pred.sign_class()) continue;
    const double overlap = iou(pred.bbox(), truth[t].bbox);
    if (overlap < iou_min) continue;
    if (overlap > best_iou) {
      best = t;
      best_iou = overlap;
    }
  }
  return best;
}

}  // namespace

std::vector<GroundTruthRecord> load_ground_truth(const std::filesystem::path& path) {
  std::map<std::int64_t, GroundTruthRecord> by_frame;
  jsonl::for_each_record(path, [&](std::size_t line, const nlohmann::json& record) {
    for (auto it = record.begin(); it != record.end(); ++it) {
      if (it.key() != "frame" && it.key() != "class" && it.key() != "bbox") {
        throw ParseError(path.string(), line, "unknown field '" + it.key() + "'");
      }
    }
    auto frame_it = record.find("frame");
    if (frame_it == record.end() || !frame_it->is_number_integer()) {
      throw ParseError(path.string(), line, "frame must be an integer");
    }
    auto class_it = record.find("class");
    if (class_it == record.end() || !class_it->is_string() ||
        class_it->get<std::string>().empty()) {
      throw ParseError(path.string(), line, "class must be a non-empty string");
    }
    auto bbox_it = record.find("bbox");
    if (bbox_it == record.end() || !bbox_it->is_array() || bbox_it->size() != 4) {
      throw ParseError(path.string(), line, "bbox must be an array of four numbers");
    }
    double c[4];
    for (int i = 0; i < 4; ++i) {
      if (!(*bbox_it)[i].is_number()) {
        throw ParseError(path.string(), line, "bbox must be an array of four numbers");
      }
      c[i] = (*bbox_it)[i].get<double>();
    }
    const auto frame_id = frame_it->get<std::int64_t>();
    GroundTruthRecord& rec = by_frame[frame_id];
    rec.frame_id = frame_id;
    try {
      rec.annotations.push_back(
          {BoundingBox(c[0], c[1], c[2], c[3]), SignClass(class_it->get<std::string>())});
    } catch (const std::invalid_argument& e) {
      throw ParseError(path.string(), line, e.what());
    }
  });

  std::vector<GroundTruthRecord> records;
  records.reserve(by_frame.size());
  for (auto& [id, rec] : by_frame) records.push_back(std::move(rec));
  return records;
}

void save_ground_truth(const std::vector<GroundTruthRecord>& records,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  for (const GroundTruthRecord& rec : records) {
    for (const GroundTruthAnnotation& ann : rec.annotations) {
      ordered_json line;
      line["frame"] = rec.frame_id;
      line["class"] = ann.sign_class.label();
      line["bbox"] = ordered_json::array(
          {ann.bbox.x_min(), ann.bbox.y_min(), ann.bbox.x_max(), ann.bbox.y_max()});
      out << line.dump() << '\n';
    }
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

MatchCounts match_predictions(std::span<const Detection> predictions,
                              std::span<const GroundTruthAnnotation> truth,
                              double iou_min) {
  check_iou_min(iou_min);
  std::vector<bool> used(truth.size(), false);
  MatchCounts counts;
  for (std::size_t ip : confidence_order(predictions)) {
    const std::size_t t = best_truth(predictions[ip], truth, used, iou_min);
    if (t == static_cast<std::size_t>(-1)) {
      ++counts.false_positives;
    } else {
      used[t] = true;
      ++counts.true_positives;
    }
  }
  counts.false_negatives = truth.size() - counts.true_positives;
  return counts;
}

std::vector<FrameDetections> extract_channel(const std::vector<FrameRecord>& frames,
                                             ChannelId id) {
  std::vector<FrameDetections> out;
  out.reserve(frames.size());
  for (const FrameRecord& frame : frames) {
    out.push_back({frame.frame_id, frame.channel(id)});
  }
  return out;
}

std::vector<PRPoint> pr_curve(const std::vector<FrameDetections>& predictions,
                              const std::vector<GroundTruthRecord>& truth,
                              double iou_min) {
  check_iou_min(iou_min);

  std::map<std::int64_t, const GroundTruthRecord*> truth_by_frame;
  std::uint64_t total_truth = 0;
  for (const GroundTruthRecord& rec : truth) {
    truth_by_frame[rec.frame_id] = &rec;
    total_truth += rec.annotations.size();
  }

  struct Scored {
    double confidence;
    std::int64_t frame_id;
    std::size_t pred_index;
    bool matched = false;
  };
  std::vector<Scored> scored;
  std::map<std::int64_t, const FrameDetections*> preds_by_frame;
  for (const FrameDetections& fd : predictions) {
    preds_by_frame[fd.frame_id] = &fd;
    for (std::size_t i = 0; i < fd.detections.size(); ++i) {
      scored.push_back({fd.detections[i].confidence(), fd.frame_id, i, false});
    }
  }
  // Global order: confidence descending, then frame and input order. Within
  // a frame this equals the match_predictions visit order, and frames do
  // not share truth, so one greedy pass labels every prediction with the
  // matched/unmatched outcome it has at any cutoff including it.
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& l, const Scored& r) {
    if (l.confidence != r.confidence) return l.confidence > r.confidence;
    if (l.frame_id != r.frame_id) return l.frame_id < r.frame_id;
    return l.pred_index < r.pred_index;
  });

  std::map<std::int64_t, std::vector<bool>> used_by_frame;
  for (Scored& s : scored) {
    auto truth_it = truth_by_frame.find(s.frame_id);
    if (truth_it == truth_by_frame.end()) continue;
    const auto& annotations = truth_it->second->annotations;
    auto& used = used_by_frame[s.frame_id];
    if (used.empty()) used.assign(annotations.size(), false);
    const Detection& pred = preds_by_frame[s.frame_id]->detections[s.pred_index];
    const std::size_t t = best_truth(pred, annotations, used, iou_min);
    if (t != static_cast<std::size_t>(-1)) {
      used[t] = true;
      s.matched = true;
    }
  }

  std::vector<PRPoint> curve;
  std::uint64_t tp = 0;
  std::uint64_t seen = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].matched) ++tp;
    ++seen;
    const bool last_at_cutoff =
        i + 1 == scored.size() || scored[i + 1].confidence != scored[i].confidence;
    if (!last_at_cutoff) continue;
    PRPoint point;
    point.confidence_cutoff = scored[i].confidence;
    point.precision = static_cast<double>(tp) / static_cast<double>(seen);
    point.recall = total_truth == 0
                       ? 1.0
                       : static_cast<double>(tp) / static_cast<double>(total_truth);
    curve.push_back(point);
  }
  return curve;
}

double average_precision(std::span<const PRPoint> curve) {
  if (curve.empty()) return 0.0;
  // Right-to-left precision envelope, then rectangle sum over recall steps.
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double step = curve[i].recall - prev_recall;
    if (step > 0.0) {
      ap += step * envelope[i];
      prev_recall = curve[i].recall;
    }
  }
  return ap;
}

EvaluationSummary evaluate_channel(const std::vector<FrameRecord>& frames,
                                   ChannelId id,
                                   const std::vector<GroundTruthRecord>& truth,
                                   double iou_min, double confidence_min) {
  check_iou_min(iou_min);
  if (!std::isfinite(confidence_min) || confidence_min < 0.0 || confidence_min > 1.0) {
    throw std::invalid_argument("confidence_min must lie in [0, 1]");
  }

  std::vector<FrameDetections> filtered;
  filtered.reserve(frames.size());
  std::uint64_t prediction_count = 0;
  for (const FrameRecord& frame : frames) {
    FrameDetections fd;
    fd.frame_id = frame.frame_id;
    for (const Detection& det : frame.channel(id)) {
      if (det.confidence() >= confidence_min) fd.detections.push_back(det);
    }
    prediction_count += fd.detections.size();
    filtered.push_back(std::move(fd));
  }

  std::map<std::int64_t, const GroundTruthRecord*> truth_by_frame;
  std::uint64_t truth_count = 0;
  for (const GroundTruthRecord& rec : truth) {
    truth_by_frame[rec.frame_id] = &rec;
    truth_count += rec.annotations.size();
  }

  EvaluationSummary summary;
  summary.channel = id;
  summary.iou_min = iou_min;
  summary.confidence_min = confidence_min;
  summary.predictions = prediction_count;
  summary.ground_truths = truth_count;

  static const std::vector<GroundTruthAnnotation> kNoTruth;
  std::map<std::int64_t, bool> frame_seen;
  for (const FrameDetections& fd : filtered) {
    frame_seen[fd.frame_id] = true;
    auto it = truth_by_frame.find(fd.frame_id);
    const auto& annotations = it == truth_by_frame.end() ? kNoTruth : it->second->annotations;
    const MatchCounts c = match_predictions(fd.detections, annotations, iou_min);
    summary.counts.true_positives += c.true_positives;
    summary.counts.false_positives += c.false_positives;
    summary.counts.false_negatives += c.false_negatives;
  }
  // Truth-only frames: every annotation is a miss.
  for (const GroundTruthRecord& rec : truth) {
    if (!frame_seen.count(rec.frame_id)) {
      summary.counts.false_negatives += rec.annotations.size();
    }
  }

  const std::uint64_t tp = summary.counts.true_positives;
  const std::uint64_t fp = summary.counts.false_positives;
  summary.precision = (tp + fp) == 0 ? 1.0
                                     : static_cast<double>(tp) /
                                           static_cast<double>(tp + fp);
  summary.recall = truth_count == 0
                       ? 1.0
                       : static_cast<double>(tp) / static_cast<double>(truth_count);
  summary.curve = pr_curve(filtered, truth, iou_min);
  summary.average_precision = average_precision(summary.curve);
  return summary;
}

}  // namespace rsc
