#include "shapkit/llm/dataset.hpp"

#include <fstream>

#include "shapkit/error.hpp"

namespace shapkit::llm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  if (quoted) throw DatasetError("unterminated quoted field");
  cells.push_back(std::move(cell));
  return cells;
}

Dataset parse_dataset(std::istream& in, const std::string& source_name) {
  Dataset dataset;
  std::string line;
  if (!std::getline(in, line)) throw DatasetError(source_name + ": empty file");

  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::string where = source_name + " row " + std::to_string(row);
    std::vector<std::string> cells;
    try {
      cells = split_csv_line(line);
    } catch (const DatasetError& e) {
      dataset.warnings.push_back(where + ": " + e.what() + ", skipped");
      continue;
    }
    std::string label = trim(cells.front());
    if (label.empty()) {
      dataset.warnings.push_back(where + ": missing label, skipped");
      continue;
    }
    std::vector<Feature> features;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      std::string symptom = trim(cells[c]);
      if (symptom.empty()) continue;
      const auto id = static_cast<FeatureId>(features.size());
      features.push_back({id, symptom, symptom});
    }
    if (features.empty()) {
      dataset.warnings.push_back(where + ": no symptoms, skipped");
      continue;
    }
    if (features.size() > FeatureSet::kMaxFeatures) {
      dataset.warnings.push_back(where + ": too many symptoms, skipped");
      continue;
    }
    dataset.instances.push_back({row, std::move(label), FeatureSet(std::move(features))});
  }
  if (dataset.instances.empty()) {
    throw DatasetError(source_name + ": no usable rows (" + std::to_string(dataset.warnings.size()) +
                       " skipped)");
  }
  return dataset;
}

Dataset ingest_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset " + path.string());
  return parse_dataset(in, path.filename().string());
}

}  // namespace shapkit::llm
