#include "rsc/reports.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rsc {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json bbox_json(const BoundingBox& box) {
  return ordered_json::array({box.x_min(), box.y_min(), box.x_max(), box.y_max()});
}

ordered_json detection_json(const Detection& det) {
  ordered_json j;
  j["class"] = det.sign_class().label();
  j["bbox"] = bbox_json(det.bbox());
  j["confidence"] = det.confidence();
  return j;
}

ordered_json assertion_json(const ArchAssertion& assertion) {
  ordered_json j;
  j["id"] = assertion.id;
  j["description"] = assertion.description;
  j["result"] = to_string(assertion.result);
  j["detail"] = assertion.detail;
  return j;
}

}  // namespace

ordered_json calibration_json(const CalibrationResult& result,
                              const IouHistogram& histogram,
                              double threshold_fitted, double threshold_empirical,
                              std::string_view quantile_mode,
                              double selected_threshold, double reference_threshold) {
  ordered_json j;
  j["samples"] = histogram.total;
  j["sample_mean"] = result.sample_mean;
  j["sample_variance"] = result.sample_variance;
  j["alpha"] = result.params.alpha;
  j["beta"] = result.params.beta;
  j["target_availability"] = result.target_availability;
  j["quantile_mode"] = std::string(quantile_mode);
  j["threshold"] = selected_threshold;
  j["threshold_fitted"] = threshold_fitted;
  j["threshold_empirical"] = threshold_empirical;
  // Informational cross-check against an externally configured threshold.
  j["reference_threshold"] = reference_threshold;
  j["reference_delta"] = selected_threshold - reference_threshold;
  ordered_json hist;
  hist["bins"] = IouHistogram::kBinCount;
  hist["range"] = ordered_json::array({0.0, 1.0});
  hist["counts"] = histogram.counts;
  j["histogram"] = std::move(hist);
  return j;
}

ordered_json decision_json(const MonitorDecision& decision) {
  ordered_json j;
  j["frame"] = decision.frame_id;
  j["valid"] = decision.valid;
  j["reason"] = to_string(decision.reason);
  ordered_json pairs = ordered_json::array();
  for (const MatchedPair& pair : decision.matched_pairs) {
    pairs.push_back(ordered_json::array({pair.index_a, pair.index_b, pair.iou}));
  }
  j["pairs"] = std::move(pairs);
  ordered_json output = ordered_json::array();
  for (const Detection& det : decision.output) output.push_back(detection_json(det));
  j["output"] = std::move(output);
  return j;
}

ordered_json availability_json(const AvailabilityReport& report) {
  ordered_json j;
  j["total_frames"] = report.total_frames;
  j["valid_frames"] = report.valid_frames;
  j["availability"] = report.availability;
  ordered_json reasons;
  for (int i = 0; i < kMonitorReasonCount; ++i) {
    const auto reason = static_cast<MonitorReason>(i);
    reasons[std::string(to_string(reason))] = report.count(reason);
  }
  j["reasons"] = std::move(reasons);
  return j;
}

ordered_json evaluation_json(const EvaluationSummary& summary) {
  ordered_json j;
  j["channel"] = to_string(summary.channel);
  j["iou_min"] = summary.iou_min;
  j["confidence_min"] = summary.confidence_min;
  j["predictions"] = summary.predictions;
  j["ground_truths"] = summary.ground_truths;
  j["true_positives"] = summary.counts.true_positives;
  j["false_positives"] = summary.counts.false_positives;
  j["false_negatives"] = summary.counts.false_negatives;
  j["precision"] = summary.precision;
  j["recall"] = summary.recall;
  j["average_precision"] = summary.average_precision;
  ordered_json curve = ordered_json::array();
  for (const PRPoint& point : summary.curve) {
    ordered_json p;
    p["confidence"] = point.confidence_cutoff;
    p["precision"] = point.precision;
    p["recall"] = point.recall;
    curve.push_back(std::move(p));
  }
  j["curve"] = std::move(curve);
  return j;
}

ordered_json trace_matrix_json(const std::vector<Requirement>& catalog,
                               const TraceMatrix& matrix) {
  ordered_json j;
  ordered_json requirements = ordered_json::array();
  for (std::size_t i = 0; i < matrix.requirement_items.size(); ++i) {
    const auto& [id, items] = matrix.requirement_items[i];
    ordered_json row;
    row["id"] = id;
    row["dimension"] = to_string(catalog[i].dimension);
    row["description"] = catalog[i].description;
    row["items"] = items;
    requirements.push_back(std::move(row));
  }
  j["requirements"] = std::move(requirements);
  ordered_json items = ordered_json::array();
  for (const auto& [path, ids] : matrix.item_requirements) {
    ordered_json row;
    row["path"] = path;
    row["requirements"] = ids;
    items.push_back(std::move(row));
  }
  j["items"] = std::move(items);
  return j;
}

ordered_json coverage_json(const CoverageReport& report) {
  ordered_json j;
  ordered_json counts = ordered_json::array();
  for (const CoverageCount& count : report.counts) {
    ordered_json row;
    row["id"] = count.id;
    row["dimension"] = to_string(count.dimension);
    row["items"] = count.items;
    counts.push_back(std::move(row));
  }
  j["counts"] = std::move(counts);
  j["uncovered"] = report.uncovered;
  j["untraced_tags"] = report.untraced_tags;
  ordered_json missing = ordered_json::array();
  for (const auto& [path, dimensions] : report.items_missing_dimension) {
    ordered_json row;
    row["path"] = path;
    ordered_json dims = ordered_json::array();
    for (Dimension d : dimensions) dims.push_back(std::string(to_string(d)));
    row["missing"] = std::move(dims);
    missing.push_back(std::move(row));
  }
  j["items_missing_dimension"] = std::move(missing);
  return j;
}

ordered_json independence_json(const std::vector<HashCollision>& collisions) {
  ordered_json j;
  j["independent"] = collisions.empty();
  j["collision_count"] = collisions.size();
  ordered_json list = ordered_json::array();
  for (const HashCollision& collision : collisions) {
    ordered_json row;
    row["hash"] = collision.hash;
    row["paths_a"] = collision.paths_a;
    row["paths_b"] = collision.paths_b;
    list.push_back(std::move(row));
  }
  j["collisions"] = std::move(list);
  return j;
}

ordered_json architecture_json(const std::vector<ArchAssertion>& assertions) {
  ordered_json j;
  ordered_json list = ordered_json::array();
  for (const ArchAssertion& assertion : assertions) {
    list.push_back(assertion_json(assertion));
  }
  j["assertions"] = std::move(list);
  return j;
}

ordered_json compliance_json(const ComplianceReport& report) {
  ordered_json j;
  ordered_json objectives = ordered_json::array();
  for (const ComplianceRow& row : report.rows) {
    ordered_json o;
    o["id"] = row.objective.id;
    o["title"] = row.objective.title;
    o["status"] = to_string(row.objective.status);
    ordered_json applicability = ordered_json::array();
    for (Dal level : row.objective.applicability) {
      applicability.push_back(std::string(to_string(level)));
    }
    o["applicability"] = std::move(applicability);
    ordered_json independence = ordered_json::array();
    for (Dal level : row.objective.independence_at) {
      independence.push_back(std::string(to_string(level)));
    }
    o["independence_at"] = std::move(independence);
    o["rationale"] = row.objective.rationale;
    ordered_json evidence = ordered_json::array();
    for (const auto& [ref, resolution] : row.evidence) {
      ordered_json e;
      e["ref"] = ref;
      e["resolution"] = to_string(resolution);
      evidence.push_back(std::move(e));
    }
    o["evidence"] = std::move(evidence);
    objectives.push_back(std::move(o));
  }
  j["objectives"] = std::move(objectives);
  ordered_json histogram;
  for (const auto& [status, count] : report.histogram) {
    histogram[std::string(to_string(status))] = count;
  }
  j["status_histogram"] = std::move(histogram);
  ordered_json assertions = ordered_json::array();
  for (const ArchAssertion& assertion : report.assertions) {
    assertions.push_back(assertion_json(assertion));
  }
  j["architecture"] = std::move(assertions);
  return j;
}

std::string compliance_text(const ComplianceReport& report) {
  std::ostringstream out;
  out << "Process objective compliance\n";
  out << "============================\n\n";
  out << std::left << std::setw(14) << "objective" << std::setw(17) << "status"
      << std::setw(10) << "evidence"
      << "title\n";
  out << std::string(78, '-') << '\n';
  for (const ComplianceRow& row : report.rows) {
    std::string evidence = "-";
    if (!row.evidence.empty()) {
      std::size_t found = 0;
      for (const auto& [ref, resolution] : row.evidence) {
        if (resolution == EvidenceResolution::kFound) ++found;
      }
      evidence = std::to_string(found) + "/" + std::to_string(row.evidence.size());
    }
    out << std::left << std::setw(14) << row.objective.id << std::setw(17)
        << to_string(row.objective.status) << std::setw(10) << evidence
        << row.objective.title << '\n';
  }
  out << '\n' << "Status totals:";
  for (const auto& [status, count] : report.histogram) {
    out << ' ' << to_string(status) << '=' << count;
  }
  out << "\n\nArchitecture assertions\n";
  out << "-----------------------\n";
  for (const ArchAssertion& assertion : report.assertions) {
    out << std::left << std::setw(8) << assertion.id << std::setw(8)
        << to_string(assertion.result) << assertion.description << '\n';
    if (!assertion.detail.empty()) {
      out << std::string(16, ' ') << assertion.detail << '\n';
    }
  }
  return out.str();
}

void write_json_artifact(const ordered_json& document,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << document.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace rsc
