// Records fixtures/pipeline/transcript_n5.jsonl against the in-process fake
// server, so the compare pipeline can be replayed offline.
//
//   make_pipeline_fixture [fixture_dir]

#include <filesystem>
#include <iostream>

#include "shapkit/cli/commands.hpp"
#include "support/fake_llm_server.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir =
      argc > 1 ? std::filesystem::path(argv[1]) : std::filesystem::path(SHAPKIT_FIXTURE_DIR) / "pipeline";
  const auto transcript = dir / "transcript_n5.jsonl";
  std::filesystem::remove(transcript);

  fake_llm::Server server;
  const int code = shapkit::cli::run(
      {"compare", "--dataset", (dir / "dataset_n5.csv").string(), "--transcript",
       transcript.string(), "--mode", "record", "--endpoint", server.url(), "--deterministic",
       "--methods", "cached,sliding_window,counterfactual", "--window-size", "3", "--workers", "1",
       "--out", (dir / "expected_compare.csv").string()},
      std::cout, std::cerr);
  std::cerr << "completions " << server.completion_requests() << ", embeddings "
            << server.embedding_requests() << '\n';
  return code;
}
