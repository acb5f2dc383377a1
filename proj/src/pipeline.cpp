#include "rsc/pipeline.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "rsc/datatrace.hpp"
#include "rsc/evaluation.hpp"
#include "rsc/monitor.hpp"
#include "rsc/reports.hpp"

namespace rsc {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_text_artifact(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<DataItem> prefixed_manifest(const std::filesystem::path& root,
                                        const std::string& prefix) {
  std::vector<DataItem> items = build_manifest(root);
  for (DataItem& item : items) item.path = prefix + item.path;
  return items;
}

}  // namespace

std::string_view to_string(QuantileMode mode) noexcept {
  return mode == QuantileMode::kFitted ? "fitted" : "empirical";
}

const std::vector<std::string>& pipeline_artifact_names() {
  static const std::vector<std::string> names = {
      "calibration.json", "decisions.jsonl",   "availability.json",
      "evaluation.json",  "manifest_a.txt",    "manifest_b.txt",
      "trace_matrix.json", "coverage.json",    "independence.json",
      "architecture.json", "compliance.json",  "compliance.txt",
      "summary.json",
  };
  return names;
}

RunResult run_pipeline(const RunConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  std::vector<std::string> failures;

  // Calibration: per-frame divergence samples, Beta fit, threshold.
  const std::vector<FrameRecord> frames = load_detections(config.detections);
  const std::vector<double> samples = frame_iou_samples(frames);
  const CalibrationResult calibration =
      calibrate_threshold(samples, config.availability_target);
  const double threshold_fitted = calibration.threshold;
  const double threshold_empirical =
      empirical_quantile(samples, 1.0 - config.availability_target);
  const double threshold = config.quantile_mode == QuantileMode::kFitted
                               ? threshold_fitted
                               : threshold_empirical;
  write_json_artifact(
      calibration_json(calibration, iou_histogram(samples), threshold_fitted,
                       threshold_empirical, to_string(config.quantile_mode),
                       threshold, config.reference_threshold),
      config.out_dir / "calibration.json");

  // Monitor pass at the calibrated threshold.
  const auto [decisions, availability] =
      run_monitor(frames, MonitorConfig{threshold, true});
  {
    std::ostringstream lines;
    for (const MonitorDecision& decision : decisions) {
      lines << decision_json(decision).dump() << '\n';
    }
    write_text_artifact(lines.str(), config.out_dir / "decisions.jsonl");
  }
  write_json_artifact(availability_json(availability),
                      config.out_dir / "availability.json");

  // Check-channel evaluation against ground truth.
  const std::vector<GroundTruthRecord> truth = load_ground_truth(config.truth);
  const EvaluationSummary evaluation =
      evaluate_channel(frames, config.evaluated_channel, truth, config.iou_min,
                       config.confidence_min);
  write_json_artifact(evaluation_json(evaluation), config.out_dir / "evaluation.json");

  // Dataset traceability over both channels' datasets combined; fixed a/
  // and b/ prefixes keep artifact bytes independent of where roots live.
  const std::vector<Requirement> requirements =
      config.requirements_catalog.empty() ? builtin_requirements()
                                          : load_catalog(config.requirements_catalog);
  const std::vector<DataItem> manifest_a = prefixed_manifest(config.dataset_a, "a/");
  const std::vector<DataItem> manifest_b = prefixed_manifest(config.dataset_b, "b/");
  save_manifest(manifest_a, config.out_dir / "manifest_a.txt");
  save_manifest(manifest_b, config.out_dir / "manifest_b.txt");
  std::vector<DataItem> combined = manifest_a;
  combined.insert(combined.end(), manifest_b.begin(), manifest_b.end());
  const auto [matrix, coverage] = trace(requirements, combined);
  write_json_artifact(trace_matrix_json(requirements, matrix),
                      config.out_dir / "trace_matrix.json");
  write_json_artifact(coverage_json(coverage), config.out_dir / "coverage.json");

  const std::vector<HashCollision> collisions =
      check_independence(manifest_a, manifest_b);
  write_json_artifact(independence_json(collisions),
                      config.out_dir / "independence.json");

  // Architecture assertions from the run evidence plus attestations.
  ArchInputs arch_inputs;
  bool channel_a_present = false;
  bool channel_b_present = false;
  for (const FrameRecord& frame : frames) {
    if (!frame.channel_a.empty()) channel_a_present = true;
    if (!frame.channel_b.empty()) channel_b_present = true;
  }
  arch_inputs.channel_a_present = channel_a_present;
  arch_inputs.channel_b_present = channel_b_present;
  arch_inputs.monitor_threshold = threshold;
  arch_inputs.independent_datasets = collisions.empty();
  arch_inputs.attest_dissimilar_networks = config.attest_dissimilar_networks;
  arch_inputs.attest_dissimilar_toolchains = config.attest_dissimilar_toolchains;
  arch_inputs.attest_dissimilar_hardware = config.attest_dissimilar_hardware;
  arch_inputs.attest_separate_teams = config.attest_separate_teams;
  arch_inputs.attest_independent_verification = config.attest_independent_verification;
  const std::vector<ArchAssertion> assertions = check_architecture(arch_inputs);
  write_json_artifact(architecture_json(assertions),
                      config.out_dir / "architecture.json");

  // Compliance report; evidence references resolve against the artifacts
  // written above, so this stage runs last.
  const std::vector<Objective> objectives =
      config.objectives_catalog.empty() ? builtin_objectives()
                                        : load_objectives(config.objectives_catalog);
  const ComplianceReport report =
      compliance_report(objectives, assertions, config.out_dir);
  write_json_artifact(compliance_json(report), config.out_dir / "compliance.json");
  write_text_artifact(compliance_text(report), config.out_dir / "compliance.txt");

  if (availability.availability < config.availability_target) {
    std::ostringstream msg;
    msg << "availability " << availability.availability << " below target "
        << config.availability_target;
    failures.push_back(msg.str());
  }
  for (const ArchAssertion& assertion : assertions) {
    if (assertion.result == AssertionResult::kFail) {
      failures.push_back(assertion.id + " FAIL: " + assertion.detail);
    }
  }

  RunResult result;
  result.passed = failures.empty();
  result.failures = failures;
  result.availability = availability.availability;
  result.threshold = threshold;

  ordered_json summary;
  summary["status"] = result.passed ? "PASS" : "FAIL";
  summary["failures"] = failures;
  summary["availability"] = availability.availability;
  summary["availability_target"] = config.availability_target;
  summary["quantile_mode"] = std::string(to_string(config.quantile_mode));
  summary["threshold"] = threshold;
  summary["reference_threshold"] = config.reference_threshold;
  summary["reference_delta"] = threshold - config.reference_threshold;
  summary["evaluated_channel"] = std::string(to_string(config.evaluated_channel));
  summary["average_precision"] = evaluation.average_precision;
  summary["seed"] = config.seed;
  summary["artifacts"] = pipeline_artifact_names();
  write_json_artifact(summary, config.out_dir / "summary.json");

  return result;
}

void write_demo_fixtures(const std::filesystem::path& dir, std::size_t frame_count,
                         std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const SignClass sign_class("holding-position");
  const std::vector<FrameRecord> frames =
      synthesize_frames(BetaParams(kDemoAlpha, kDemoBeta), frame_count, seed, sign_class);
  save_detections(frames, dir / "detections.jsonl");

  // Ground truth mirrors channel A, making A the reference detector.
  std::vector<GroundTruthRecord> truth;
  truth.reserve(frames.size());
  for (const FrameRecord& frame : frames) {
    GroundTruthRecord rec;
    rec.frame_id = frame.frame_id;
    for (const Detection& det : frame.channel_a) {
      rec.annotations.push_back({det.bbox(), det.sign_class()});
    }
    truth.push_back(std::move(rec));
  }
  save_ground_truth(truth, dir / "truth.jsonl");

  // Two small dataset trees with distinct content. Sidecar tags rotate
  // through each dimension so every built-in requirement is covered by both
  // trees; the offsets keep SNOW items from being a dimension's only source
  // elsewhere.
  const char* airports[] = {"KSFO", "KBOS", "KSAN"};
  const char* weather[] = {"FAIR", "RAIN", "SNOW", "FOG"};
  const char* time_of_day[] = {"MRNG", "DUSK", "AFTN", "DAWN"};
  const char* distance[] = {"DS10", "DS12", "DS14"};
  const char* elevation[] = {"EL10", "EL13", "EL16"};
  const char* lateral[] = {"LO00", "LO07", "LO14"};

  for (const char* channel : {"a", "b"}) {
    const std::filesystem::path root =
        dir / (std::string("dataset_") + channel);
    std::filesystem::create_directories(root);
    for (int i = 0; i < 10; ++i) {
      std::ostringstream name;
      name << "sample_" << std::setw(2) << std::setfill('0') << i << ".txt";
      std::ostringstream content;
      content << "synthetic capture placeholder, channel " << channel << ", sample "
              << i << "\n";
      write_text_artifact(content.str(), root / name.str());
      std::ostringstream tags;
      tags << airports[i % 3] << '\n'
           << weather[i % 4] << '\n'
           << time_of_day[(i + i / 4) % 4] << '\n'
           << distance[i % 3] << '\n'
           << elevation[(i + 1) % 3] << '\n'
           << lateral[(i + 2) % 3] << '\n';
      write_text_artifact(tags.str(), root / (name.str() + ".tags"));
    }
  }
}

}  // namespace rsc
