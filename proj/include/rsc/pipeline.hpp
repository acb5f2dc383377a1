#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rsc/channels.hpp"
#include "rsc/compliance.hpp"

namespace rsc {

enum class QuantileMode { kFitted, kEmpirical };
std::string_view to_string(QuantileMode mode) noexcept;

struct RunConfig {
  std::filesystem::path detections;
  std::filesystem::path truth;
  std::filesystem::path dataset_a;
  std::filesystem::path dataset_b;
  std::filesystem::path out_dir;

  double availability_target = 0.95;
  QuantileMode quantile_mode = QuantileMode::kFitted;
  double reference_threshold = 0.32;  // informational comparison only
  ChannelId evaluated_channel = ChannelId::B;
  double iou_min = 0.5;
  double confidence_min = 0.5;

  // Empty paths select the built-in catalogs.
  std::filesystem::path requirements_catalog;
  std::filesystem::path objectives_catalog;

  std::optional<bool> attest_dissimilar_networks;
  std::optional<bool> attest_dissimilar_toolchains;
  std::optional<bool> attest_dissimilar_hardware;
  std::optional<bool> attest_separate_teams;
  std::optional<bool> attest_independent_verification;

  std::uint64_t seed = 0;  // echoed into summary.json; no stage draws from it
};

struct RunResult {
  bool passed = false;
  std::vector<std::string> failures;  // availability shortfall, FAIL assertions
  double availability = 0.0;
  double threshold = 0.0;
};

// Executes calibrate -> monitor -> evaluate -> trace -> independence ->
// architecture -> compliance over the fixture inputs and writes every
// artifact under out_dir with fixed names (see README). Re-running with an
// identical config and inputs produces byte-identical artifacts. Parse and
// I/O problems throw; assurance shortfalls come back in RunResult.
RunResult run_pipeline(const RunConfig& config);

// Artifact file names written by run_pipeline, in write order.
const std::vector<std::string>& pipeline_artifact_names();

inline constexpr double kDemoAlpha = 5.88;
inline constexpr double kDemoBeta = 3.01;
inline constexpr std::size_t kDemoFrameCount = 4000;
inline constexpr std::uint64_t kDemoSeed = 19;

// Writes the bundled demo inputs: a synthesized two-channel detections
// fixture, ground truth mirroring channel A, and two small dataset trees
// whose sidecar tags each cover the whole built-in requirements catalog.
void write_demo_fixtures(const std::filesystem::path& dir,
                         std::size_t frame_count = kDemoFrameCount,
                         std::uint64_t seed = kDemoSeed);

}  // namespace rsc
