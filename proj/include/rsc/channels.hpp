#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rsc/calibration.hpp"
#include "rsc/geometry.hpp"

namespace rsc {

enum class ChannelId { A, B };

std::string_view to_string(ChannelId id) noexcept;

// Sign class label; non-empty, compared by exact string equality. The label
// vocabulary is open: the toolkit never interprets label contents.
class SignClass {
 public:
  explicit SignClass(std::string label);

  const std::string& label() const noexcept { return label_; }

  friend bool operator==(const SignClass&, const SignClass&) = default;
  friend auto operator<=>(const SignClass&, const SignClass&) = default;

 private:
  std::string label_;
};

// One detector output. Confidence lies in [0, 1].
class Detection {
 public:
  Detection(BoundingBox bbox, SignClass sign_class, double confidence);

  const BoundingBox& bbox() const noexcept { return bbox_; }
  const SignClass& sign_class() const noexcept { return sign_class_; }
  double confidence() const noexcept { return confidence_; }

  friend bool operator==(const Detection&, const Detection&) = default;

 private:
  BoundingBox bbox_;
  SignClass sign_class_;
  double confidence_;
};

// Per-frame outputs of both channels. Either list may be empty; a frame
// that appears in only one channel's stream still gets a record.
struct FrameRecord {
  std::int64_t frame_id = 0;
  std::vector<Detection> channel_a;
  std::vector<Detection> channel_b;

  const std::vector<Detection>& channel(ChannelId id) const noexcept;
};

// Loads a detections fixture: one JSON object per line with exactly the
// fields frame, channel, class, bbox, confidence (README documents the
// format). '#' lines and blank lines are skipped. Records come back sorted
// by frame id; within a frame and channel, file order is preserved.
// Throws ParseError with the offending line number on malformed input.
std::vector<FrameRecord> load_detections(const std::filesystem::path& path);

// Inverse of load_detections up to comment/blank lines: frames in id order,
// channel A lines before channel B lines within a frame. Numeric fields
// round-trip bit-exactly.
void save_detections(const std::vector<FrameRecord>& frames,
                     const std::filesystem::path& path);

// Deterministic synthetic replay source. Every frame holds one detection
// per channel with class base_class. Channel A is the unit square at the
// origin; channel B is the unit square slid laterally by (1-v)/(1+v) so the
// pair's IoU equals v, a Beta(params) draw. Draws come from
// std::mt19937_64(seed) mapped to (0,1) doubles; per frame the order is
// IoU target, confidence A, confidence B (README pins the exact mapping).
// Confidences are uniform on [0.5, 1).
std::vector<FrameRecord> synthesize_frames(const BetaParams& params,
                                           std::size_t frame_count,
                                           std::uint64_t seed,
                                           const SignClass& base_class);

}  // namespace rsc
