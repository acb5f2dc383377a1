#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rsc {

// Operational design domain dimensions a data requirement can constrain.
enum class Dimension {
  kAirport,
  kWeather,
  kTimeOfDay,
  kDistance,
  kElevation,
  kLateralOffset,
};
inline constexpr int kDimensionCount = 6;

std::string_view to_string(Dimension dimension) noexcept;
Dimension parse_dimension(std::string_view token);  // throws std::invalid_argument

struct Requirement {
  std::string id;  // short tag, e.g. KSFO or DS10; unique within a catalog
  Dimension dimension;
  std::string description;
};

// The built-in data requirements catalog: 20 requirements spanning all six
// dimensions (3 airports, 4 weather conditions, 4 times of day, 3 distance
// bands, 3 camera elevation bands, 3 lateral offset bands).
const std::vector<Requirement>& builtin_requirements();

// Catalog file: one requirement per line, "<id> <DIMENSION> <description>";
// '#' lines and blank lines are skipped. Duplicate ids and unknown
// dimensions raise ParseError.
std::vector<Requirement> load_catalog(const std::filesystem::path& path);

// One dataset file: content hash, size, and the requirement tags claimed by
// its sidecar. Tags are sorted and deduplicated.
struct DataItem {
  std::string path;  // relative, '/'-separated
  std::string content_hash;
  std::uint64_t byte_size = 0;
  std::vector<std::string> tags;
};

// Streaming SHA-256, lowercase hex.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(std::string_view bytes);

// Walks root recursively and hashes every regular file. "<name>.tags"
// sidecars attach tags (one id per line, '#' and blank lines skipped) to
// "<name>" and are not items themselves. Items come back sorted by path.
// Paths containing whitespace are rejected (the manifest line format is
// space-delimited).
std::vector<DataItem> build_manifest(const std::filesystem::path& root);

// Manifest file: "<hash> <size> <path> <tag,tag,...>" per line, sorted by
// path, LF endings. A line without the tags field carries zero tags.
void save_manifest(const std::vector<DataItem>& items,
                   const std::filesystem::path& path);
std::vector<DataItem> load_manifest(const std::filesystem::path& path);

// Requirement rows in catalog order, item rows in path order. Rows list
// only known requirement ids; unknown tags surface in CoverageReport.
struct TraceMatrix {
  std::vector<std::pair<std::string, std::vector<std::string>>> requirement_items;
  std::vector<std::pair<std::string, std::vector<std::string>>> item_requirements;
};

struct CoverageCount {
  std::string id;
  Dimension dimension;
  std::uint64_t items = 0;
};

struct CoverageReport {
  std::vector<CoverageCount> counts;  // catalog order
  std::vector<std::string> uncovered;
  std::vector<std::string> untraced_tags;
  // Items whose tag set touches none of a dimension's requirements.
  std::vector<std::pair<std::string, std::vector<Dimension>>> items_missing_dimension;
};

// Pure analysis; gaps are report content, never errors.
std::pair<TraceMatrix, CoverageReport> trace(const std::vector<Requirement>& catalog,
                                             const std::vector<DataItem>& items);

struct HashCollision {
  std::string hash;
  std::vector<std::string> paths_a;
  std::vector<std::string> paths_b;
};

// Content hashes shared between the two manifests, sorted by hash. Empty
// result means the datasets are disjoint at file granularity.
std::vector<HashCollision> check_independence(const std::vector<DataItem>& manifest_a,
                                              const std::vector<DataItem>& manifest_b);

}  // namespace rsc
