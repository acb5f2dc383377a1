// rsc: dual-channel detection assurance toolkit.
//
// Subcommands mirror the pipeline stages: calibrate, monitor, evaluate,
// trace (build/matrix/coverage/independence), comply, synth, demo, and run
// for the end-to-end composition. All outputs are deterministic for a fixed
// input and configuration.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsc/datatrace.hpp"
#include "rsc/errors.hpp"
#include "rsc/evaluation.hpp"
#include "rsc/monitor.hpp"
#include "rsc/pipeline.hpp"
#include "rsc/reports.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitAssuranceFailure = 1;
constexpr int kExitError = 2;

void emit(const ordered_json& document, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << document.dump(2) << '\n';
  } else {
    rsc::write_json_artifact(document, out_path);
  }
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out << text;
  }
}

std::vector<rsc::Requirement> load_requirements_arg(const std::string& catalog) {
  if (catalog == "builtin") return rsc::builtin_requirements();
  return rsc::load_catalog(catalog);
}

rsc::ChannelId parse_channel(const std::string& name) {
  if (name == "A") return rsc::ChannelId::A;
  if (name == "B") return rsc::ChannelId::B;
  throw CLI::ValidationError("--channel", "must be A or B");
}

// Attestation flags are tri-state: absent, true, or false.
struct AttestOptions {
  std::optional<bool> networks, toolchains, hardware, teams, verification;

  void attach(CLI::App* cmd) {
    auto add = [cmd](const char* flag, std::optional<bool>& slot, const char* desc) {
      cmd->add_option_function<bool>(
             flag, [&slot](const bool& v) { slot = v; }, desc)
          ->expected(1);
    };
    add("--attest-networks", networks, "attest dissimilar channel network architectures");
    add("--attest-toolchains", toolchains, "attest dissimilar implementation toolchains");
    add("--attest-hardware", hardware, "attest dissimilar execution hardware");
    add("--attest-teams", teams, "attest separate development teams");
    add("--attest-verification", verification, "attest independent verification");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-channel detection assurance toolkit"};
  app.require_subcommand(1);

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "fit the divergence distribution and derive a monitor threshold");
  std::string cal_detections;
  double cal_availability = 0.95;
  std::string cal_mode = "fitted";
  double cal_reference = 0.32;
  std::string cal_out;
  calibrate->add_option("--detections", cal_detections, "detections fixture (JSONL)")
      ->required();
  calibrate->add_option("--availability", cal_availability,
                        "target availability in (0,1)");
  calibrate->add_option("--quantile-mode", cal_mode, "fitted|empirical")
      ->check(CLI::IsMember({"fitted", "empirical"}));
  calibrate->add_option("--reference-threshold", cal_reference,
                        "externally configured threshold to compare against");
  calibrate->add_option("--out", cal_out, "write the report here instead of stdout");

  // monitor
  auto* monitor = app.add_subcommand(
      "monitor", "replay a fixture through the agreement monitor");
  std::string mon_detections, mon_report, mon_decisions;
  double mon_threshold = 0.0;
  bool mon_no_class_match = false;
  monitor->add_option("--detections", mon_detections, "detections fixture (JSONL)")
      ->required();
  monitor->add_option("--threshold", mon_threshold, "IoU inhibition threshold in [0,1]")
      ->required();
  monitor->add_flag("--no-class-match", mon_no_class_match,
                    "compare geometry only, ignore class divergence");
  monitor->add_option("--decisions", mon_decisions,
                      "write decision lines here instead of stdout");
  monitor->add_option("--report", mon_report, "write the availability report here");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "precision/recall of one channel against ground truth");
  std::string eval_detections, eval_truth, eval_channel = "B", eval_out;
  double eval_iou_min = 0.5;
  double eval_confidence_min = 0.5;
  evaluate->add_option("--detections", eval_detections, "detections fixture (JSONL)")
      ->required();
  evaluate->add_option("--truth", eval_truth, "ground truth fixture (JSONL)")
      ->required();
  evaluate->add_option("--channel", eval_channel, "A|B")
      ->check(CLI::IsMember({"A", "B"}));
  evaluate->add_option("--iou-min", eval_iou_min, "match eligibility IoU in (0,1]");
  evaluate->add_option("--confidence-min", eval_confidence_min,
                       "prediction confidence filter in [0,1]");
  evaluate->add_option("--out", eval_out, "write the report here instead of stdout");

  // trace
  auto* trace_cmd = app.add_subcommand("trace", "dataset traceability tools");
  trace_cmd->require_subcommand(1);

  auto* trace_build = trace_cmd->add_subcommand("build", "hash a dataset tree into a manifest");
  std::string tb_root, tb_out, tb_prefix;
  trace_build->add_option("--root", tb_root, "dataset root directory")->required();
  trace_build->add_option("--out", tb_out, "manifest output path")->required();
  trace_build->add_option("--prefix", tb_prefix, "prefix prepended to item paths");

  auto* trace_matrix = trace_cmd->add_subcommand("matrix", "requirement/item trace matrix");
  std::string tm_catalog = "builtin", tm_manifest, tm_out;
  trace_matrix->add_option("--catalog", tm_catalog, "requirements catalog file or 'builtin'");
  trace_matrix->add_option("--manifest", tm_manifest, "dataset manifest")->required();
  trace_matrix->add_option("--out", tm_out, "write the matrix here instead of stdout");

  auto* trace_coverage = trace_cmd->add_subcommand("coverage", "per-requirement coverage");
  std::string tc_catalog = "builtin", tc_manifest, tc_out;
  trace_coverage->add_option("--catalog", tc_catalog, "requirements catalog file or 'builtin'");
  trace_coverage->add_option("--manifest", tc_manifest, "dataset manifest")->required();
  trace_coverage->add_option("--out", tc_out, "write the report here instead of stdout");

  auto* trace_independence = trace_cmd->add_subcommand(
      "independence", "content-hash disjointness of two manifests");
  std::string ti_a, ti_b, ti_out;
  trace_independence->add_option("--manifest-a", ti_a, "first manifest")->required();
  trace_independence->add_option("--manifest-b", ti_b, "second manifest")->required();
  trace_independence->add_option("--out", ti_out, "write the result here instead of stdout");

  // comply
  auto* comply = app.add_subcommand("comply", "process objective compliance reporting");
  comply->require_subcommand(1);
  auto* comply_report = comply->add_subcommand("report", "render the compliance report");
  std::string cr_objectives = "builtin", cr_evidence, cr_architecture, cr_out;
  std::string cr_format = "json";
  AttestOptions cr_attest;
  comply_report->add_option("--objectives", cr_objectives,
                            "objectives catalog file or 'builtin'");
  comply_report->add_option("--evidence", cr_evidence,
                            "directory evidence references resolve against");
  comply_report->add_option("--architecture", cr_architecture,
                            "architecture.json from a prior run");
  comply_report->add_option("--format", cr_format, "json|text")
      ->check(CLI::IsMember({"json", "text"}));
  comply_report->add_option("--out", cr_out, "write the report here instead of stdout");
  cr_attest.attach(comply_report);

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic two-channel fixture");
  double sy_alpha = rsc::kDemoAlpha;
  double sy_beta = rsc::kDemoBeta;
  std::size_t sy_frames = 1000;
  std::uint64_t sy_seed = 0;
  std::string sy_class = "holding-position", sy_out;
  synth->add_option("--alpha", sy_alpha, "Beta alpha parameter");
  synth->add_option("--beta", sy_beta, "Beta beta parameter");
  synth->add_option("--frames", sy_frames, "frame count")->check(CLI::PositiveNumber);
  synth->add_option("--seed", sy_seed, "generator seed");
  synth->add_option("--class", sy_class, "sign class label");
  synth->add_option("--out", sy_out, "detections output path")->required();

  // demo
  auto* demo = app.add_subcommand("demo", "write the bundled demo fixture set");
  std::string demo_out;
  std::size_t demo_frames = rsc::kDemoFrameCount;
  std::uint64_t demo_seed = rsc::kDemoSeed;
  demo->add_option("--out", demo_out, "output directory")->required();
  demo->add_option("--frames", demo_frames, "frame count")->check(CLI::PositiveNumber);
  demo->add_option("--seed", demo_seed, "generator seed");

  // run
  auto* run = app.add_subcommand("run", "full assurance pipeline over a fixture set");
  rsc::RunConfig run_config;
  std::string run_detections, run_truth, run_dataset_a, run_dataset_b, run_out;
  std::string run_requirements = "builtin", run_objectives = "builtin";
  std::string run_channel = "B", run_mode = "fitted", run_format = "json";
  AttestOptions run_attest;
  run->add_option("--detections", run_detections, "detections fixture (JSONL)")->required();
  run->add_option("--truth", run_truth, "ground truth fixture (JSONL)")->required();
  run->add_option("--dataset-a", run_dataset_a, "channel A dataset root")->required();
  run->add_option("--dataset-b", run_dataset_b, "channel B dataset root")->required();
  run->add_option("--out", run_out, "artifact output directory")->required();
  run->add_option("--availability", run_config.availability_target,
                  "target availability in (0,1)");
  run->add_option("--quantile-mode", run_mode, "fitted|empirical")
      ->check(CLI::IsMember({"fitted", "empirical"}));
  run->add_option("--reference-threshold", run_config.reference_threshold,
                  "externally configured threshold to compare against");
  run->add_option("--channel", run_channel, "channel evaluated against truth (A|B)")
      ->check(CLI::IsMember({"A", "B"}));
  run->add_option("--iou-min", run_config.iou_min, "match eligibility IoU in (0,1]");
  run->add_option("--confidence-min", run_config.confidence_min,
                  "prediction confidence filter in [0,1]");
  run->add_option("--requirements", run_requirements,
                  "requirements catalog file or 'builtin'");
  run->add_option("--objectives", run_objectives, "objectives catalog file or 'builtin'");
  run->add_option("--seed", run_config.seed, "seed echoed into summary.json");
  run->add_option("--format", run_format, "stdout summary format (json|text)")
      ->check(CLI::IsMember({"json", "text"}));
  run_attest.attach(run);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*calibrate) {
      const auto frames = rsc::load_detections(cal_detections);
      const auto samples = rsc::frame_iou_samples(frames);
      const auto result = rsc::calibrate_threshold(samples, cal_availability);
      const double fitted = result.threshold;
      const double empirical =
          rsc::empirical_quantile(samples, 1.0 - cal_availability);
      const double selected = cal_mode == "fitted" ? fitted : empirical;
      emit(rsc::calibration_json(result, rsc::iou_histogram(samples), fitted,
                                 empirical, cal_mode, selected, cal_reference),
           cal_out);
      return 0;
    }

    if (*monitor) {
      const auto frames = rsc::load_detections(mon_detections);
      const auto [decisions, report] = rsc::run_monitor(
          frames, rsc::MonitorConfig{mon_threshold, !mon_no_class_match});
      std::ostringstream lines;
      for (const auto& decision : decisions) {
        lines << rsc::decision_json(decision).dump() << '\n';
      }
      emit_text(lines.str(), mon_decisions);
      if (!mon_report.empty()) {
        rsc::write_json_artifact(rsc::availability_json(report), mon_report);
      }
      return 0;
    }

    if (*evaluate) {
      const auto frames = rsc::load_detections(eval_detections);
      const auto truth = rsc::load_ground_truth(eval_truth);
      const auto summary =
          rsc::evaluate_channel(frames, parse_channel(eval_channel), truth,
                                eval_iou_min, eval_confidence_min);
      emit(rsc::evaluation_json(summary), eval_out);
      return 0;
    }

    if (*trace_build) {
      auto items = rsc::build_manifest(tb_root);
      for (auto& item : items) item.path = tb_prefix + item.path;
      rsc::save_manifest(items, tb_out);
      return 0;
    }
    if (*trace_matrix) {
      const auto catalog = load_requirements_arg(tm_catalog);
      const auto items = rsc::load_manifest(tm_manifest);
      const auto [matrix, coverage] = rsc::trace(catalog, items);
      emit(rsc::trace_matrix_json(catalog, matrix), tm_out);
      return 0;
    }
    if (*trace_coverage) {
      const auto catalog = load_requirements_arg(tc_catalog);
      const auto items = rsc::load_manifest(tc_manifest);
      const auto [matrix, coverage] = rsc::trace(catalog, items);
      emit(rsc::coverage_json(coverage), tc_out);
      return 0;
    }
    if (*trace_independence) {
      const auto manifest_a = rsc::load_manifest(ti_a);
      const auto manifest_b = rsc::load_manifest(ti_b);
      const auto collisions = rsc::check_independence(manifest_a, manifest_b);
      emit(rsc::independence_json(collisions), ti_out);
      return collisions.empty() ? 0 : kExitAssuranceFailure;
    }

    if (*comply_report) {
      const auto objectives = cr_objectives == "builtin"
                                  ? rsc::builtin_objectives()
                                  : rsc::load_objectives(cr_objectives);
      std::vector<rsc::ArchAssertion> assertions;
      if (!cr_architecture.empty()) {
        // Reuse the assertions of a prior run verbatim.
        std::ifstream in(cr_architecture);
        if (!in) throw std::runtime_error("cannot open: " + cr_architecture);
        const auto doc = nlohmann::json::parse(in);
        for (const auto& row : doc.at("assertions")) {
          rsc::ArchAssertion assertion;
          assertion.id = row.at("id").get<std::string>();
          assertion.description = row.at("description").get<std::string>();
          const auto result = row.at("result").get<std::string>();
          assertion.result = result == "PASS" ? rsc::AssertionResult::kPass
                             : result == "FAIL" ? rsc::AssertionResult::kFail
                                                : rsc::AssertionResult::kManual;
          assertion.detail = row.at("detail").get<std::string>();
          assertions.push_back(std::move(assertion));
        }
      } else {
        rsc::ArchInputs inputs;
        inputs.attest_dissimilar_networks = cr_attest.networks;
        inputs.attest_dissimilar_toolchains = cr_attest.toolchains;
        inputs.attest_dissimilar_hardware = cr_attest.hardware;
        inputs.attest_separate_teams = cr_attest.teams;
        inputs.attest_independent_verification = cr_attest.verification;
        assertions = rsc::check_architecture(inputs);
      }
      const auto report = rsc::compliance_report(
          objectives, assertions,
          cr_evidence.empty() ? std::filesystem::path() : std::filesystem::path(cr_evidence));
      if (cr_format == "text") {
        emit_text(rsc::compliance_text(report), cr_out);
      } else {
        emit(rsc::compliance_json(report), cr_out);
      }
      return 0;
    }

    if (*synth) {
      const auto frames = rsc::synthesize_frames(
          rsc::BetaParams(sy_alpha, sy_beta), sy_frames, sy_seed, rsc::SignClass(sy_class));
      rsc::save_detections(frames, sy_out);
      return 0;
    }

    if (*demo) {
      rsc::write_demo_fixtures(demo_out, demo_frames, demo_seed);
      return 0;
    }

    if (*run) {
      run_config.detections = run_detections;
      run_config.truth = run_truth;
      run_config.dataset_a = run_dataset_a;
      run_config.dataset_b = run_dataset_b;
      run_config.out_dir = run_out;
      run_config.quantile_mode = run_mode == "fitted" ? rsc::QuantileMode::kFitted
                                                      : rsc::QuantileMode::kEmpirical;
      run_config.evaluated_channel = parse_channel(run_channel);
      if (run_requirements != "builtin") run_config.requirements_catalog = run_requirements;
      if (run_objectives != "builtin") run_config.objectives_catalog = run_objectives;
      run_config.attest_dissimilar_networks = run_attest.networks;
      run_config.attest_dissimilar_toolchains = run_attest.toolchains;
      run_config.attest_dissimilar_hardware = run_attest.hardware;
      run_config.attest_separate_teams = run_attest.teams;
      run_config.attest_independent_verification = run_attest.verification;

      const rsc::RunResult result = rsc::run_pipeline(run_config);
      if (run_format == "text") {
        std::cout << (result.passed ? "PASS" : "FAIL") << " availability="
                  << result.availability << " threshold=" << result.threshold << '\n';
        for (const auto& failure : result.failures) {
          std::cout << "  " << failure << '\n';
        }
      } else {
        ordered_json summary;
        summary["status"] = result.passed ? "PASS" : "FAIL";
        summary["failures"] = result.failures;
        summary["availability"] = result.availability;
        summary["threshold"] = result.threshold;
        std::cout << summary.dump(2) << '\n';
      }
      return result.passed ? 0 : kExitAssuranceFailure;
    }
  } catch (const rsc::ParseError& e) {
    ordered_json failure;
    failure["status"] = "ERROR";
    failure["kind"] = "parse_error";
    failure["file"] = e.file();
    failure["line"] = e.line();
    failure["message"] = e.message();
    std::cerr << failure.dump(2) << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    ordered_json failure;
    failure["status"] = "ERROR";
    failure["kind"] = "error";
    failure["message"] = e.what();
    std::cerr << failure.dump(2) << '\n';
    return kExitError;
  }

  return 0;
}
