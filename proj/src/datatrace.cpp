#include "rsc/datatrace.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "rsc/errors.hpp"

namespace rsc {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

std::string to_hex(const unsigned char* digest, unsigned length) {
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned i = 0; i < length; ++i) {
    hex.push_back(kHexDigits[digest[i] >> 4]);
    hex.push_back(kHexDigits[digest[i] & 0x0f]);
  }
  return hex;
}

// RAII wrapper; EVP is the non-deprecated libcrypto digest interface.
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256: digest init failed");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t size) {
    if (EVP_DigestUpdate(ctx_, data, size) != 1) {
      throw std::runtime_error("sha256: digest update failed");
    }
  }

  std::string finish() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned length = 0;
    if (EVP_DigestFinal_ex(ctx_, digest, &length) != 1) {
      throw std::runtime_error("sha256: digest final failed");
    }
    return to_hex(digest, length);
  }

 private:
  EVP_MD_CTX* ctx_;
};

bool has_whitespace(const std::string& s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Sidecar: one requirement id per line; '#' and blank lines skipped.
std::vector<std::string> load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open sidecar");
  std::set<std::string> tags;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string token = trim(line);
    if (token.empty() || token[0] == '#') continue;
    if (has_whitespace(token)) {
      throw ParseError(path.string(), line_no, "tag must be a single token");
    }
    tags.insert(token);
  }
  return {tags.begin(), tags.end()};
}

const std::vector<Requirement>& builtin_catalog() {
  // Operational design domain sampling requirements for the runway sign
  // datasets: three airports, four weather conditions, four times of day,
  // and three bands each of distance, camera elevation, and lateral offset.
  static const std::vector<Requirement> catalog = {
      {"KSFO", Dimension::kAirport, "San Francisco International Airport"},
      {"KBOS", Dimension::kAirport, "Boston Logan International Airport"},
      {"KSAN", Dimension::kAirport, "San Diego International Airport"},
      {"FAIR", Dimension::kWeather, "fair conditions"},
      {"RAIN", Dimension::kWeather, "rain"},
      {"SNOW", Dimension::kWeather, "snow"},
      {"FOG", Dimension::kWeather, "fog"},
      {"MRNG", Dimension::kTimeOfDay, "morning"},
      {"DUSK", Dimension::kTimeOfDay, "dusk"},
      {"AFTN", Dimension::kTimeOfDay, "afternoon"},
      {"DAWN", Dimension::kTimeOfDay, "dawn"},
      {"DS10", Dimension::kDistance, "distance to sign 10 to 12 meters"},
      {"DS12", Dimension::kDistance, "distance to sign 12 to 14 meters"},
      {"DS14", Dimension::kDistance, "distance to sign 14 to 16 meters"},
      {"EL10", Dimension::kElevation, "camera elevation 1.0 to 1.3 meters"},
      {"EL13", Dimension::kElevation, "camera elevation 1.3 to 1.6 meters"},
      {"EL16", Dimension::kElevation, "camera elevation 1.6 to 1.9 meters"},
      {"LO00", Dimension::kLateralOffset, "lateral offset 0 to 0.7 meters"},
      {"LO07", Dimension::kLateralOffset, "lateral offset 0.7 to 1.4 meters"},
      {"LO14", Dimension::kLateralOffset, "lateral offset 1.4 to 2.1 meters"},
  };
  return catalog;
}

}  // namespace

std::string_view to_string(Dimension dimension) noexcept {
  switch (dimension) {
    case Dimension::kAirport:
      return "AIRPORT";
    case Dimension::kWeather:
      return "WEATHER";
    case Dimension::kTimeOfDay:
      return "TIME_OF_DAY";
    case Dimension::kDistance:
      return "DISTANCE";
    case Dimension::kElevation:
      return "ELEVATION";
    case Dimension::kLateralOffset:
      return "LATERAL_OFFSET";
  }
  return "AIRPORT";
}

Dimension parse_dimension(std::string_view token) {
  for (int i = 0; i < kDimensionCount; ++i) {
    const auto dim = static_cast<Dimension>(i);
    if (token == to_string(dim)) return dim;
  }
  throw std::invalid_argument("unknown dimension: " + std::string(token));
}

const std::vector<Requirement>& builtin_requirements() { return builtin_catalog(); }

std::vector<Requirement> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open catalog");
  std::vector<Requirement> catalog;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty() || content[0] == '#') continue;
    std::istringstream fields(content);
    std::string id, dimension_token;
    fields >> id >> dimension_token;
    if (id.empty() || dimension_token.empty()) {
      throw ParseError(path.string(), line_no, "expected '<id> <DIMENSION> <description>'");
    }
    std::string description;
    std::getline(fields, description);
    description = trim(description);
    if (description.empty()) {
      throw ParseError(path.string(), line_no, "expected '<id> <DIMENSION> <description>'");
    }
    if (!seen.insert(id).second) {
      throw ParseError(path.string(), line_no, "duplicate requirement id: " + id);
    }
    try {
      catalog.push_back({id, parse_dimension(dimension_token), description});
    } catch (const std::invalid_argument& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return catalog;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for hashing: " + path.string());
  Sha256 hasher;
  char buffer[64 * 1024];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    hasher.update(buffer, static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw std::runtime_error("read failed while hashing: " + path.string());
  return hasher.finish();
}

std::string sha256_bytes(std::string_view bytes) {
  Sha256 hasher;
  hasher.update(bytes.data(), bytes.size());
  return hasher.finish();
}

std::vector<DataItem> build_manifest(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw std::invalid_argument("dataset root is not a directory: " + root.string());
  }
  std::vector<DataItem> items;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::filesystem::path& file = entry.path();
    if (file.extension() == ".tags") continue;
    const std::string rel = file.lexically_relative(root).generic_string();
    if (has_whitespace(rel)) {
      throw std::invalid_argument("dataset path contains whitespace: " + rel);
    }
    DataItem item;
    item.path = rel;
    item.byte_size = static_cast<std::uint64_t>(std::filesystem::file_size(file));
    item.content_hash = sha256_file(file);
    const std::filesystem::path sidecar = file.string() + ".tags";
    if (std::filesystem::exists(sidecar)) {
      item.tags = load_sidecar(sidecar);
    }
    items.push_back(std::move(item));
  }
  std::sort(items.begin(), items.end(),
            [](const DataItem& a, const DataItem& b) { return a.path < b.path; });
  return items;
}

void save_manifest(const std::vector<DataItem>& items,
                   const std::filesystem::path& path) {
  std::vector<const DataItem*> sorted;
  sorted.reserve(items.size());
  for (const DataItem& item : items) sorted.push_back(&item);
  std::sort(sorted.begin(), sorted.end(),
            [](const DataItem* a, const DataItem* b) { return a->path < b->path; });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (const DataItem* item : sorted) {
    out << item->content_hash << ' ' << item->byte_size << ' ' << item->path;
    if (!item->tags.empty()) {
      out << ' ';
      for (std::size_t i = 0; i < item->tags.size(); ++i) {
        if (i > 0) out << ',';
        out << item->tags[i];
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<DataItem> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open manifest");
  std::vector<DataItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty() || content[0] == '#') continue;
    std::istringstream fields(content);
    DataItem item;
    std::string tags_field;
    if (!(fields >> item.content_hash >> item.byte_size >> item.path)) {
      throw ParseError(path.string(), line_no, "expected '<hash> <size> <path> [tags]'");
    }
    fields >> tags_field;  // absent field means zero tags
    std::string extra;
    if (fields >> extra) {
      throw ParseError(path.string(), line_no, "trailing fields after tags");
    }
    std::set<std::string> tags;
    std::size_t start = 0;
    while (start <= tags_field.size() && !tags_field.empty()) {
      const std::size_t comma = tags_field.find(',', start);
      const std::string tag = tags_field.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      if (tag.empty()) {
        throw ParseError(path.string(), line_no, "empty tag in tag list");
      }
      tags.insert(tag);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    item.tags.assign(tags.begin(), tags.end());
    items.push_back(std::move(item));
  }
  return items;
}

std::pair<TraceMatrix, CoverageReport> trace(const std::vector<Requirement>& catalog,
                                             const std::vector<DataItem>& items) {
  std::map<std::string, const Requirement*> by_id;
  for (const Requirement& req : catalog) by_id[req.id] = &req;

  std::vector<const DataItem*> sorted_items;
  sorted_items.reserve(items.size());
  for (const DataItem& item : items) sorted_items.push_back(&item);
  std::sort(sorted_items.begin(), sorted_items.end(),
            [](const DataItem* a, const DataItem* b) { return a->path < b->path; });

  std::map<std::string, std::vector<std::string>> req_items;
  std::set<std::string> untraced;
  TraceMatrix matrix;
  CoverageReport report;

  for (const DataItem* item : sorted_items) {
    std::vector<std::string> known;
    std::set<Dimension> covered_dims;
    for (const std::string& tag : item->tags) {
      auto it = by_id.find(tag);
      if (it == by_id.end()) {
        untraced.insert(tag);
        continue;
      }
      known.push_back(tag);
      covered_dims.insert(it->second->dimension);
      req_items[tag].push_back(item->path);
    }
    std::vector<Dimension> missing;
    for (int d = 0; d < kDimensionCount; ++d) {
      if (!covered_dims.count(static_cast<Dimension>(d))) {
        missing.push_back(static_cast<Dimension>(d));
      }
    }
    if (!missing.empty()) {
      report.items_missing_dimension.emplace_back(item->path, std::move(missing));
    }
    matrix.item_requirements.emplace_back(item->path, std::move(known));
  }

  for (const Requirement& req : catalog) {
    auto& paths = req_items[req.id];  // already path-sorted by item order
    report.counts.push_back({req.id, req.dimension, paths.size()});
    if (paths.empty()) report.uncovered.push_back(req.id);
    matrix.requirement_items.emplace_back(req.id, std::move(paths));
  }
  report.untraced_tags.assign(untraced.begin(), untraced.end());
  return {std::move(matrix), std::move(report)};
}

std::vector<HashCollision> check_independence(const std::vector<DataItem>& manifest_a,
                                              const std::vector<DataItem>& manifest_b) {
  std::map<std::string, std::vector<std::string>> hashes_a;
  for (const DataItem& item : manifest_a) hashes_a[item.content_hash].push_back(item.path);
  std::map<std::string, std::vector<std::string>> hashes_b;
  for (const DataItem& item : manifest_b) hashes_b[item.content_hash].push_back(item.path);

  std::vector<HashCollision> collisions;
  for (auto& [hash, paths_a] : hashes_a) {
    auto it = hashes_b.find(hash);
    if (it == hashes_b.end()) continue;
    HashCollision collision;
    collision.hash = hash;
    collision.paths_a = paths_a;
    collision.paths_b = it->second;
    std::sort(collision.paths_a.begin(), collision.paths_a.end());
    std::sort(collision.paths_b.begin(), collision.paths_b.end());
    collisions.push_back(std::move(collision));
  }
  return collisions;  // map iteration already sorts by hash
}

}  // namespace rsc
