#include "rsc/channels.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "rsc/errors.hpp"
#include "rsc/jsonl.hpp"

namespace rsc {

namespace {

using ordered_json = nlohmann::ordered_json;

const nlohmann::json& require_field(const nlohmann::json& record,
                                    const char* key,
                                    const std::filesystem::path& path,
                                    std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) {
    throw ParseError(path.string(), line, std::string("missing field '") + key + "'");
  }
  return *it;
}

void reject_unknown_fields(const nlohmann::json& record,
                           std::initializer_list<const char*> known,
                           const std::filesystem::path& path, std::size_t line) {
  for (auto it = record.begin(); it != record.end(); ++it) {
    bool ok = false;
    for (const char* key : known) {
      if (it.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ParseError(path.string(), line, "unknown field '" + it.key() + "'");
    }
  }
}

BoundingBox parse_bbox(const nlohmann::json& value,
                       const std::filesystem::path& path, std::size_t line) {
  if (!value.is_array() || value.size() != 4) {
    throw ParseError(path.string(), line, "bbox must be an array of four numbers");
  }
  double c[4];
  for (int i = 0; i < 4; ++i) {
    if (!value[i].is_number()) {
      throw ParseError(path.string(), line, "bbox must be an array of four numbers");
    }
    c[i] = value[i].get<double>();
  }
  try {
    return BoundingBox(c[0], c[1], c[2], c[3]);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string(), line, e.what());
  }
}

ordered_json bbox_json(const BoundingBox& box) {
  return ordered_json::array({box.x_min(), box.y_min(), box.x_max(), box.y_max()});
}

}  // namespace

std::string_view to_string(ChannelId id) noexcept {
  return id == ChannelId::A ? "A" : "B";
}

SignClass::SignClass(std::string label) : label_(std::move(label)) {
  if (label_.empty()) {
    throw std::invalid_argument("sign class label must be non-empty");
  }
}

Detection::Detection(BoundingBox bbox, SignClass sign_class, double confidence)
    : bbox_(bbox), sign_class_(std::move(sign_class)), confidence_(confidence) {
  if (!std::isfinite(confidence_) || confidence_ < 0.0 || confidence_ > 1.0) {
    throw std::invalid_argument("detection confidence must lie in [0, 1]");
  }
}

const std::vector<Detection>& FrameRecord::channel(ChannelId id) const noexcept {
  return id == ChannelId::A ? channel_a : channel_b;
}

std::vector<FrameRecord> load_detections(const std::filesystem::path& path) {
  std::map<std::int64_t, FrameRecord> by_frame;
  jsonl::for_each_record(path, [&](std::size_t line, const nlohmann::json& record) {
    reject_unknown_fields(record, {"frame", "channel", "class", "bbox", "confidence"},
                          path, line);
    const auto& frame_field = require_field(record, "frame", path, line);
    if (!frame_field.is_number_integer()) {
      throw ParseError(path.string(), line, "frame must be an integer");
    }
    const auto frame_id = frame_field.get<std::int64_t>();

    const auto& channel_field = require_field(record, "channel", path, line);
    if (!channel_field.is_string()) {
      throw ParseError(path.string(), line, "channel must be \"A\" or \"B\"");
    }
    const std::string channel = channel_field.get<std::string>();
    if (channel != "A" && channel != "B") {
      throw ParseError(path.string(), line, "channel must be \"A\" or \"B\"");
    }

    const auto& class_field = require_field(record, "class", path, line);
    if (!class_field.is_string() || class_field.get<std::string>().empty()) {
      throw ParseError(path.string(), line, "class must be a non-empty string");
    }

    const BoundingBox box = parse_bbox(require_field(record, "bbox", path, line), path, line);

    const auto& conf_field = require_field(record, "confidence", path, line);
    if (!conf_field.is_number()) {
      throw ParseError(path.string(), line, "confidence must be a number");
    }
    const double confidence = conf_field.get<double>();
    if (!std::isfinite(confidence) || confidence < 0.0 || confidence > 1.0) {
      throw ParseError(path.string(), line, "confidence must lie in [0, 1]");
    }

    FrameRecord& frame = by_frame[frame_id];
    frame.frame_id = frame_id;
    auto& list = channel == "A" ? frame.channel_a : frame.channel_b;
    list.emplace_back(box, SignClass(class_field.get<std::string>()), confidence);
  });

  std::vector<FrameRecord> frames;
  frames.reserve(by_frame.size());
  for (auto& [id, frame] : by_frame) frames.push_back(std::move(frame));
  return frames;
}

void save_detections(const std::vector<FrameRecord>& frames,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  for (const FrameRecord& frame : frames) {
    for (ChannelId id : {ChannelId::A, ChannelId::B}) {
      for (const Detection& det : frame.channel(id)) {
        ordered_json record;
        record["frame"] = frame.frame_id;
        record["channel"] = to_string(id);
        record["class"] = det.sign_class().label();
        record["bbox"] = bbox_json(det.bbox());
        record["confidence"] = det.confidence();
        out << record.dump() << '\n';
      }
    }
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

std::vector<FrameRecord> synthesize_frames(const BetaParams& params,
                                           std::size_t frame_count,
                                           std::uint64_t seed,
                                           const SignClass& base_class) {
  if (frame_count == 0) {
    throw std::invalid_argument("synthesize_frames: frame_count must be positive");
  }
  std::mt19937_64 rng(seed);
  // 53-bit mantissa draw nudged off zero: (x >> 11) + 0.5 spans (0, 2^53),
  // so the quantile always sees p strictly inside (0, 1).
  auto next_unit = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };

  std::vector<FrameRecord> frames;
  frames.reserve(frame_count);
  for (std::size_t i = 0; i < frame_count; ++i) {
    const double v = beta_quantile(params, next_unit());
    const double confidence_a = 0.5 + 0.5 * next_unit();
    const double confidence_b = 0.5 + 0.5 * next_unit();
    // Unit squares offset laterally by d overlap in a strip of width 1-d:
    // IoU = (1-d)/(1+d), so d = (1-v)/(1+v) hits the target exactly.
    const double shift = (1.0 - v) / (1.0 + v);
    FrameRecord frame;
    frame.frame_id = static_cast<std::int64_t>(i);
    frame.channel_a.emplace_back(BoundingBox(0.0, 0.0, 1.0, 1.0), base_class,
                                 confidence_a);
    frame.channel_b.emplace_back(BoundingBox(shift, 0.0, 1.0 + shift, 1.0),
                                 base_class, confidence_b);
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace rsc
