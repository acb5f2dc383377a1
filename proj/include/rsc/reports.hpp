#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rsc/calibration.hpp"
#include "rsc/compliance.hpp"
#include "rsc/datatrace.hpp"
#include "rsc/evaluation.hpp"
#include "rsc/monitor.hpp"

// Canonical artifact encodings. Every report is rendered through these
// builders so the CLI and the pipeline emit identical bytes; ordered_json
// keeps key order stable.

namespace rsc {

nlohmann::ordered_json calibration_json(const CalibrationResult& result,
                                        const IouHistogram& histogram,
                                        double threshold_fitted,
                                        double threshold_empirical,
                                        std::string_view quantile_mode,
                                        double selected_threshold,
                                        double reference_threshold);

nlohmann::ordered_json decision_json(const MonitorDecision& decision);
nlohmann::ordered_json availability_json(const AvailabilityReport& report);

nlohmann::ordered_json evaluation_json(const EvaluationSummary& summary);

nlohmann::ordered_json trace_matrix_json(const std::vector<Requirement>& catalog,
                                         const TraceMatrix& matrix);
nlohmann::ordered_json coverage_json(const CoverageReport& report);
nlohmann::ordered_json independence_json(const std::vector<HashCollision>& collisions);

nlohmann::ordered_json architecture_json(const std::vector<ArchAssertion>& assertions);
nlohmann::ordered_json compliance_json(const ComplianceReport& report);
std::string compliance_text(const ComplianceReport& report);

// Serializes with a trailing newline so artifacts are well-formed text files.
void write_json_artifact(const nlohmann::ordered_json& document,
                         const std::filesystem::path& path);

}  // namespace rsc
