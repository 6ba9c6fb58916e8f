#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "shapkit/feature.hpp"

namespace shapkit::llm {

struct DatasetInstance {
  /// 1-based data row number (header excluded).
  std::size_t row = 0;
  std::string label;
  FeatureSet features;
};

struct Dataset {
  std::vector<DatasetInstance> instances;
  /// One message per skipped row.
  std::vector<std::string> warnings;
};

/// Reads a disease/symptom CSV: a header line, then rows of a label followed
/// by symptom cells. Blank cells are dropped and cells are whitespace
/// trimmed. Rows that are malformed or have no symptoms are skipped with a
/// warning; if no row survives, DatasetError is thrown.
Dataset parse_dataset(std::istream& in, const std::string& source_name = "<stream>");
Dataset ingest_dataset(const std::filesystem::path& path);

/// Splits one CSV record (RFC 4180 quoting). Throws DatasetError on an
/// unterminated quote.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace shapkit::llm
