#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

#include "rsc/channels.hpp"
#include "rsc/errors.hpp"
#include "rsc/evaluation.hpp"
#include "rsc/geometry.hpp"
#include "oracles.hpp"

using rsc::BoundingBox;
using rsc::ChannelId;
using rsc::Detection;
using rsc::FrameDetections;
using rsc::FrameRecord;
using rsc::GroundTruthAnnotation;
using rsc::GroundTruthRecord;
using rsc::PRPoint;
using rsc::SignClass;

namespace {

Detection det(double x_min, double y_min, double x_max, double y_max,
              double confidence, const char* cls = "sign") {
  return Detection(BoundingBox(x_min, y_min, x_max, y_max), SignClass(cls),
                   confidence);
}

GroundTruthAnnotation truth_box(double x_min, double y_min, double x_max,
                                double y_max, const char* cls = "sign") {
  return {BoundingBox(x_min, y_min, x_max, y_max), SignClass(cls)};
}

}  // namespace

TEST_CASE("perfect predictions score AP 1.0") {
  std::vector<FrameDetections> preds;
  std::vector<GroundTruthRecord> truth;
  for (int f = 0; f < 5; ++f) {
    preds.push_back({f, {det(f, 0, f + 1, 1, 0.9 - 0.1 * f)}});
    truth.push_back({f, {truth_box(f, 0, f + 1, 1)}});
  }
  const auto curve = rsc::pr_curve(preds, truth, 0.5);
  REQUIRE(!curve.empty());
  for (const PRPoint& p : curve) CHECK(p.precision == 1.0);
  CHECK(curve.back().recall == 1.0);
  CHECK(rsc::average_precision(curve) == 1.0);
}

TEST_CASE("worked four-prediction curve and its AP") {
  // One frame, two truths, four predictions: TP, FP, TP, FP by confidence.
  std::vector<FrameDetections> preds;
  preds.push_back({0,
                   {det(0, 0, 1, 1, 0.9),        // matches truth 0
                    det(10, 10, 11, 11, 0.8),    // no overlap: FP
                    det(2, 0, 3, 1, 0.7),        // matches truth 1
                    det(20, 20, 21, 21, 0.6)}}); // no overlap: FP
  std::vector<GroundTruthRecord> truth;
  truth.push_back({0, {truth_box(0, 0, 1, 1), truth_box(2, 0, 3, 1)}});

  const auto curve = rsc::pr_curve(preds, truth, 0.5);
  REQUIRE(curve.size() == 4);
  CHECK(curve[0].confidence_cutoff == 0.9);
  CHECK(curve[0].precision == 1.0);
  CHECK(curve[0].recall == 0.5);
  CHECK(curve[1].confidence_cutoff == 0.8);
  CHECK(curve[1].precision == 0.5);
  CHECK(curve[1].recall == 0.5);
  CHECK(curve[2].confidence_cutoff == 0.7);
  CHECK(curve[2].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(curve[2].recall == 1.0);
  CHECK(curve[3].confidence_cutoff == 0.6);
  CHECK(curve[3].precision == 0.5);
  CHECK(curve[3].recall == 1.0);

  // Envelope: precision 1 up to recall 0.5, then 2/3 up to recall 1.
  const double ap = rsc::average_precision(curve);
  CHECK(std::fabs(ap - 5.0 / 6.0) <= 1e-12);
}

TEST_CASE("each truth matches at most one prediction") {
  const std::vector<Detection> preds = {det(0, 0, 1, 1, 0.9),
                                        det(0, 0, 1, 1, 0.8)};
  const std::vector<GroundTruthAnnotation> truth = {truth_box(0, 0, 1, 1)};
  const auto counts = rsc::match_predictions(preds, truth, 0.5);
  CHECK(counts.true_positives == 1);
  CHECK(counts.false_positives == 1);
  CHECK(counts.false_negatives == 0);
}

TEST_CASE("higher confidence wins a contested truth") {
  // The lower-confidence prediction overlaps better, but the higher one
  // claims the truth first; the better-overlap prediction goes unmatched.
  const std::vector<Detection> preds = {
      det(0.0, 0.0, 1.0, 1.0, 0.6),   // IoU 1.0 with truth, visited second
      det(0.2, 0.0, 1.2, 1.0, 0.9)};  // IoU ~0.667, visited first
  const std::vector<GroundTruthAnnotation> truth = {truth_box(0, 0, 1, 1)};
  const auto counts = rsc::match_predictions(preds, truth, 0.5);
  CHECK(counts.true_positives == 1);
  CHECK(counts.false_positives == 1);
}

TEST_CASE("class must match and overlap must reach the floor") {
  const std::vector<GroundTruthAnnotation> truth = {truth_box(0, 0, 1, 1, "a")};
  const std::vector<Detection> other_class = {det(0, 0, 1, 1, 0.9, "b")};
  const auto wrong_class = rsc::match_predictions(other_class, truth, 0.5);
  CHECK(wrong_class.true_positives == 0);
  CHECK(wrong_class.false_positives == 1);
  CHECK(wrong_class.false_negatives == 1);

  // iou((0,0,1,1), (0.25,0,1.25,1)) = 0.75/1.25 = 0.6.
  const std::vector<Detection> at_floor = {det(0.25, 0, 1.25, 1, 0.9, "a")};
  CHECK(rsc::match_predictions(at_floor, truth, 0.6).true_positives == 1);
  CHECK(rsc::match_predictions(at_floor, truth, 0.6001).true_positives == 0);
}

TEST_CASE("iou_min must lie in (0, 1]") {
  CHECK_THROWS_AS(rsc::match_predictions({}, {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rsc::match_predictions({}, {}, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(rsc::match_predictions({}, {}, 1.5), std::invalid_argument);
  CHECK_NOTHROW(rsc::match_predictions({}, {}, 1.0));
}

TEST_CASE("greedy matching agrees with the exhaustive reference") {
  std::mt19937_64 rng(31415);
  std::uniform_int_distribution<int> pred_count(0, 6);
  std::uniform_int_distribution<int> truth_count(0, 5);
  std::uniform_real_distribution<double> pos(0.0, 4.0);
  std::uniform_real_distribution<double> side(0.5, 2.0);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  std::uniform_int_distribution<int> cls(0, 1);
  const char* classes[2] = {"a", "b"};

  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Detection> preds;
    for (int i = pred_count(rng); i-- > 0;) {
      const double x = pos(rng), y = pos(rng);
      preds.push_back(det(x, y, x + side(rng), y + side(rng), conf(rng),
                          classes[cls(rng)]));
    }
    std::vector<GroundTruthAnnotation> truth;
    for (int i = truth_count(rng); i-- > 0;) {
      const double x = pos(rng), y = pos(rng);
      truth.push_back(truth_box(x, y, x + side(rng), y + side(rng),
                                classes[cls(rng)]));
    }
    const double iou_min = 0.05 + 0.5 * conf(rng);

    const auto greedy = rsc::match_predictions(preds, truth, iou_min);
    const auto exact = rsc::testing::brute_force_match(preds, truth, iou_min);
    CHECK(greedy.true_positives == exact.true_positives);
    CHECK(greedy.false_positives == exact.false_positives);
    CHECK(greedy.false_negatives == exact.false_negatives);
  }
}

TEST_CASE("curve cutoffs partition the predictions") {
  // At each curve point, precision's denominator is the number of
  // predictions at or above the cutoff; equal confidences share a point.
  std::vector<FrameDetections> preds;
  preds.push_back({0, {det(0, 0, 1, 1, 0.9), det(5, 5, 6, 6, 0.7),
                       det(0, 0, 1, 1, 0.7)}});
  preds.push_back({1, {det(0, 0, 1, 1, 0.7), det(9, 9, 10, 10, 0.4)}});
  std::vector<GroundTruthRecord> truth;
  truth.push_back({0, {truth_box(0, 0, 1, 1)}});
  truth.push_back({1, {truth_box(0, 0, 1, 1)}});

  const auto curve = rsc::pr_curve(preds, truth, 0.5);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].confidence_cutoff == 0.9);
  CHECK(curve[0].precision == 1.0);          // 1 TP of 1
  CHECK(curve[0].recall == 0.5);
  CHECK(curve[1].confidence_cutoff == 0.7);  // three ties collapse here
  CHECK(curve[1].precision == 0.5);          // 2 TP of 4
  CHECK(curve[1].recall == 1.0);
  CHECK(curve[2].confidence_cutoff == 0.4);
  CHECK(curve[2].precision == doctest::Approx(0.4).epsilon(1e-12));  // 2 of 5
  CHECK(curve[2].recall == 1.0);
}

TEST_CASE("appending weaker false positives never changes AP") {
  std::vector<FrameDetections> preds;
  preds.push_back({0, {det(0, 0, 1, 1, 0.9), det(3, 3, 4, 4, 0.6)}});
  std::vector<GroundTruthRecord> truth;
  truth.push_back({0, {truth_box(0, 0, 1, 1), truth_box(7, 7, 8, 8)}});
  const double base_ap = rsc::average_precision(rsc::pr_curve(preds, truth, 0.5));

  auto extended = preds;
  for (int i = 0; i < 4; ++i) {
    extended[0].detections.push_back(det(50 + i, 50, 51 + i, 51, 0.3 - 0.05 * i));
  }
  const double extended_ap =
      rsc::average_precision(rsc::pr_curve(extended, truth, 0.5));
  CHECK(extended_ap == doctest::Approx(base_ap).epsilon(1e-12));
}

TEST_CASE("degenerate curve conventions") {
  CHECK(rsc::average_precision({}) == 0.0);

  // Predictions but no truth anywhere: recall pegs at 1, precision falls.
  std::vector<FrameDetections> preds;
  preds.push_back({0, {det(0, 0, 1, 1, 0.9)}});
  const auto curve = rsc::pr_curve(preds, {}, 0.5);
  REQUIRE(curve.size() == 1);
  CHECK(curve[0].recall == 1.0);
  CHECK(curve[0].precision == 0.0);

  // No predictions at all: empty curve.
  CHECK(rsc::pr_curve({}, {}, 0.5).empty());
}

TEST_CASE("evaluate_channel filters, matches, and aggregates") {
  std::vector<FrameRecord> frames;
  {
    FrameRecord f;
    f.frame_id = 0;
    f.channel_a.push_back(det(0, 0, 1, 1, 0.9));
    f.channel_b.push_back(det(0, 0, 1, 1, 0.95));
    f.channel_b.push_back(det(5, 5, 6, 6, 0.3));  // below confidence_min
    frames.push_back(std::move(f));
  }
  {
    FrameRecord f;
    f.frame_id = 1;
    f.channel_b.push_back(det(9, 9, 10, 10, 0.8));  // FP
    frames.push_back(std::move(f));
  }
  std::vector<GroundTruthRecord> truth;
  truth.push_back({0, {truth_box(0, 0, 1, 1)}});
  truth.push_back({2, {truth_box(0, 0, 1, 1)}});  // truth-only frame: FN

  const auto summary = rsc::evaluate_channel(frames, ChannelId::B, truth, 0.5, 0.5);
  CHECK(summary.channel == ChannelId::B);
  CHECK(summary.predictions == 2);  // the 0.3 detection is filtered out
  CHECK(summary.ground_truths == 2);
  CHECK(summary.counts.true_positives == 1);
  CHECK(summary.counts.false_positives == 1);
  CHECK(summary.counts.false_negatives == 1);
  CHECK(summary.precision == 0.5);
  CHECK(summary.recall == 0.5);
  REQUIRE(summary.curve.size() == 2);
  CHECK(summary.curve[0].confidence_cutoff == 0.95);

  // Channel A sees only its own stream.
  const auto a_summary = rsc::evaluate_channel(frames, ChannelId::A, truth, 0.5, 0.5);
  CHECK(a_summary.predictions == 1);
  CHECK(a_summary.counts.true_positives == 1);
  CHECK(a_summary.counts.false_positives == 0);

  CHECK_THROWS_AS(rsc::evaluate_channel(frames, ChannelId::B, truth, 0.5, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(rsc::evaluate_channel(frames, ChannelId::B, truth, 0.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("evaluation with zero filtered predictions is vacuously precise") {
  std::vector<FrameRecord> frames(1);
  frames[0].frame_id = 0;
  frames[0].channel_b.push_back(det(0, 0, 1, 1, 0.2));
  std::vector<GroundTruthRecord> truth;
  truth.push_back({0, {truth_box(0, 0, 1, 1)}});

  const auto summary = rsc::evaluate_channel(frames, ChannelId::B, truth, 0.5, 0.9);
  CHECK(summary.predictions == 0);
  CHECK(summary.precision == 1.0);
  CHECK(summary.recall == 0.0);
  CHECK(summary.average_precision == 0.0);
  CHECK(summary.curve.empty());
}

TEST_CASE("ground truth fixtures round-trip") {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("rsc_gt_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);

  std::vector<GroundTruthRecord> records;
  records.push_back({0, {truth_box(0, 0, 1, 1, "hold"), truth_box(2, 2, 3, 3, "rwy")}});
  records.push_back({5, {truth_box(0.125, 0.25, 1.5, 2.75, "hold")}});
  const fs::path path = dir / "truth.jsonl";
  rsc::save_ground_truth(records, path);

  const auto loaded = rsc::load_ground_truth(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].frame_id == 0);
  CHECK(loaded[0].annotations == records[0].annotations);
  CHECK(loaded[1].frame_id == 5);
  CHECK(loaded[1].annotations == records[1].annotations);

  // Detection-only fields are rejected in truth fixtures.
  {
    std::ofstream out(dir / "bad.jsonl", std::ios::binary);
    out << R"({"frame": 0, "class": "s", "bbox": [0, 0, 1, 1], "confidence": 0.5})" << "\n";
  }
  CHECK_THROWS_AS(rsc::load_ground_truth(dir / "bad.jsonl"), rsc::ParseError);

  fs::remove_all(dir);
}
