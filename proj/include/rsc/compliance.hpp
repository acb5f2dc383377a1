#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rsc {

enum class ObjectiveStatus { kSatisfied, kModelLevel, kArchMitigation, kOutOfScope };
std::string_view to_string(ObjectiveStatus status) noexcept;

enum class Dal { A, B, C, D };
std::string_view to_string(Dal level) noexcept;

// One process objective row. independence_at is the subset of applicability
// levels at which the objective must be satisfied with independence.
struct Objective {
  std::string id;
  std::string title;
  std::set<Dal> applicability;
  std::set<Dal> independence_at;
  ObjectiveStatus status;
  std::string rationale;
  std::vector<std::string> evidence;  // artifact references, relative paths
};

// Built-in level C catalog: 23 objectives, none out of scope; 14 satisfied
// by the usual means, 4 moved to model level, 5 justified by architectural
// mitigation.
const std::vector<Objective>& builtin_objectives();

// Catalog file: one objective per line,
//   <id>|<status>|<applicability>|<title>|<rationale>|<evidence>|<evidence>...
// applicability is comma-separated levels, 'i' prefix marking independence
// (e.g. "iA,iB,C"). Duplicate ids and unknown statuses raise ParseError.
std::vector<Objective> load_objectives(const std::filesystem::path& path);

enum class AssertionResult { kPass, kFail, kManual };
std::string_view to_string(AssertionResult result) noexcept;

struct ArchAssertion {
  std::string id;  // RSC-A1 .. RSC-A8
  std::string description;
  AssertionResult result;
  std::string detail;
};

// Evidence feeding the architecture assertions. A1, A2, and A4 are checked
// mechanically when their inputs are present; the rest are attestations
// (true PASS, false FAIL, absent MANUAL).
struct ArchInputs {
  std::optional<bool> channel_a_present;  // A1; both must be set to check
  std::optional<bool> channel_b_present;
  std::optional<double> monitor_threshold;  // A2; set when the monitor ran
  std::optional<bool> independent_datasets;  // A4; set when the check ran
  std::optional<bool> attest_dissimilar_networks;   // A3
  std::optional<bool> attest_dissimilar_toolchains; // A5
  std::optional<bool> attest_dissimilar_hardware;   // A6
  std::optional<bool> attest_separate_teams;        // A7
  std::optional<bool> attest_independent_verification;  // A8
};

// Always returns exactly eight assertions, RSC-A1 through RSC-A8, in order.
std::vector<ArchAssertion> check_architecture(const ArchInputs& inputs);

enum class EvidenceResolution { kFound, kMissing };
std::string_view to_string(EvidenceResolution resolution) noexcept;

struct ComplianceRow {
  Objective objective;
  std::vector<std::pair<std::string, EvidenceResolution>> evidence;
};

struct ComplianceReport {
  std::vector<ComplianceRow> rows;  // sorted lexicographically by id
  std::map<ObjectiveStatus, std::uint64_t> histogram;  // all four statuses keyed
  std::vector<ArchAssertion> assertions;
};

// Resolves each evidence reference against evidence_dir (existence check)
// and aggregates the status histogram. Pure function of its inputs.
ComplianceReport compliance_report(const std::vector<Objective>& objectives,
                                   const std::vector<ArchAssertion>& assertions,
                                   const std::filesystem::path& evidence_dir);

}  // namespace rsc
