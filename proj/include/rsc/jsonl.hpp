#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "rsc/errors.hpp"

namespace rsc::jsonl {

// Streams the record lines of a JSONL file: blank lines and '#' comment
// lines are skipped, everything else must parse as a JSON object and is
// handed to fn with its 1-based line number. I/O and syntax problems raise
// ParseError.
inline void for_each_record(
    const std::filesystem::path& path,
    const std::function<void(std::size_t, const nlohmann::json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (!record.is_object())
      throw ParseError(path.string(), line_no, "record is not a JSON object");
    fn(line_no, record);
  }
}

}  // namespace rsc::jsonl
