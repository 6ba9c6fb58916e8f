#include <doctest.h>

#include <sstream>

#include "shapkit/error.hpp"
#include "shapkit/llm/dataset.hpp"

using namespace shapkit;
using namespace shapkit::llm;

TEST_CASE("blank cells are dropped and cells trimmed") {
  std::istringstream in("Disease,Symptom_1,Symptom_2,Symptom_3,Symptom_4\n"
                        "Fungal infection, itching, skin_rash, ,\n");
  const auto dataset = parse_dataset(in);
  REQUIRE(dataset.instances.size() == 1);
  const auto& instance = dataset.instances.front();
  CHECK(instance.label == "Fungal infection");
  CHECK(instance.row == 1);
  REQUIRE(instance.features.size() == 2);
  CHECK(instance.features[0].label == "itching");
  CHECK(instance.features[1].content == "skin_rash");
  CHECK(dataset.warnings.empty());
}

TEST_CASE("header-only file is an error") {
  std::istringstream in("Disease,Symptom_1\n");
  CHECK_THROWS_AS(parse_dataset(in), DatasetError);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_dataset(empty), DatasetError);
}

TEST_CASE("ten symptoms give ten features") {
  std::string row = "Flu";
  for (int i = 0; i < 10; ++i) row += ",s" + std::to_string(i);
  std::istringstream in("h\n" + row + "\n");
  CHECK(parse_dataset(in).instances.front().features.size() == 10);
}

TEST_CASE("bad rows are skipped with a warning") {
  std::istringstream in("Disease,Symptom_1\n"
                        "Cold,cough\n"
                        "Nothing, , \n"
                        ",cough\n"
                        "\"Broken,cough\n"
                        "\"Flu, seasonal\",fever\n");
  const auto dataset = parse_dataset(in, "d.csv");
  REQUIRE(dataset.instances.size() == 2);
  CHECK(dataset.instances[1].label == "Flu, seasonal");
  CHECK(dataset.instances[1].row == 5);
  CHECK(dataset.warnings.size() == 3);
  CHECK(dataset.warnings[0].find("d.csv row 2") == 0);
}

TEST_CASE("csv splitting") {
  CHECK(split_csv_line("a,\"b,c\",\"d\"\"e\"") == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(split_csv_line("") == std::vector<std::string>{""});
  CHECK_THROWS_AS(split_csv_line("\"open"), DatasetError);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(ingest_dataset("/nonexistent/data.csv"), DatasetError);
}
