#include "shapkit/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "shapkit/audit.hpp"
#include "shapkit/fixture.hpp"
#include "shapkit/llm/dataset.hpp"
#include "shapkit/llm/llm_payoff.hpp"
#include "shapkit/llm/similarity.hpp"

namespace shapkit::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write " + path.string());
  file << content;
  if (!file) throw Error("failed writing " + path.string());
}

// CSV cell; quotes only when needed.
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

GameFixture single_game(const RunConfig& config) {
  if (config.games.size() != 1) throw UsageError("exactly one --game is required");
  return load_game_fixture(config.games.front());
}

std::unique_ptr<llm::TranscriptStore> open_store(const RunConfig& config) {
  if (config.mode != llm::TranscriptMode::kLive && !config.transcript) {
    throw UsageError(std::string(llm::to_string(config.mode)) + " mode needs --transcript");
  }
  std::shared_ptr<llm::InferenceClient> client;
  if (config.mode != llm::TranscriptMode::kReplay) client = std::make_shared<llm::OpenAiClient>();
  return std::make_unique<llm::TranscriptStore>(config.mode, config.transcript, std::move(client));
}

llm::Dataset load_dataset(const RunConfig& config, std::ostream& err) {
  if (!config.dataset) throw UsageError("--dataset is required");
  auto dataset = llm::ingest_dataset(*config.dataset);
  for (const auto& w : dataset.warnings) err << "warning: " << w << '\n';
  return dataset;
}

AttributionResult run_method(Method method, PayoffSource& source, const FeatureSet& features,
                             const RunConfig& config) {
  const auto options = config.attribution_options();
  switch (method) {
    case Method::kExact:
      return attribute_exact(source, features, options);
    case Method::kCached:
      return attribute_cached(source, features, options);
    case Method::kSlidingWindow:
      if (!config.window_size) throw UsageError("sliding_window needs --window-size");
      return attribute_sliding_window(source, features, *config.window_size, config.window_cache,
                                      config.window_context, options);
    case Method::kCounterfactual:
      return attribute_counterfactual(source, features, options);
    case Method::kOracle:
      return attribute_oracle(source, features, options);
  }
  throw InvalidArgument("unhandled method");
}

std::string ranked_table(const AttributionResult& result, const FeatureSet& features) {
  std::vector<std::pair<double, const Feature*>> rows;
  std::size_t width = 7;
  for (const auto& f : features) {
    rows.emplace_back(result.scores.at(f.id), &f);
    width = std::max(width, f.label.size());
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::ostringstream out;
  out << "rank  " << std::left << std::setw(static_cast<int>(width)) << "feature"
      << "  score\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << std::left << std::setw(4) << (i + 1) << "  " << std::setw(static_cast<int>(width))
        << rows[i].second->label << "  " << format_number(rows[i].first) << '\n';
  }
  out << "sum " << format_number(result.sum());
  if (result.grand && result.baseline) {
    out << ", h(X) - h(empty) " << format_number(*result.grand - *result.baseline);
  }
  out << ", inference calls " << result.call_stats.inference_calls << '\n';
  return out.str();
}

void emit_json(const nlohmann::json& doc, const RunConfig& config, std::ostream& out) {
  const auto text = doc.dump(2) + "\n";
  if (config.out) {
    write_file(*config.out, text);
  } else {
    out << text;
  }
}

TableGame random_table_game(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> payoff(0.0, 1.0);
  TableGame game({}, 0.0);
  std::vector<FeatureId> ids(n);
  for (CoalitionMask mask = 0; mask < (CoalitionMask{1} << n); ++mask) {
    std::vector<FeatureId> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (CoalitionMask{1} << i)) members.push_back(static_cast<FeatureId>(i));
    }
    game.set(Coalition(std::move(members)), payoff(engine));
  }
  return game;
}

std::vector<std::string> feature_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i));
  return labels;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::optional<std::size_t> expected_calls(Method method, std::size_t n,
                                          std::optional<std::size_t> window_size,
                                          bool window_cache) {
  switch (method) {
    case Method::kExact:
      return n << n;
    case Method::kCached:
    case Method::kOracle:
      return std::size_t{1} << n;
    case Method::kCounterfactual:
      return n + 1;
    case Method::kSlidingWindow: {
      if (!window_size || window_cache) return std::nullopt;
      const std::size_t w = *window_size;
      return (n - w + 1) * (w << w);
    }
  }
  return std::nullopt;
}

int cmd_attribute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if ((config.method == Method::kSlidingWindow) != config.window_size.has_value()) {
    throw UsageError(config.window_size ? "--window-size only applies to sliding_window"
                                        : "sliding_window needs --window-size");
  }

  nlohmann::json metadata = nlohmann::json::object();
  std::optional<FeatureSet> features;
  std::shared_ptr<PayoffSource> source;
  std::unique_ptr<llm::TranscriptStore> store;

  switch (config.source) {
    case SourceKind::kTable: {
      auto fixture = single_game(config);
      features.emplace(fixture.features);
      source = fixture.game;
      metadata["fixture"] = fixture.name;
      break;
    }
    case SourceKind::kNoisy: {
      auto fixture = single_game(config);
      features.emplace(fixture.features);
      source = std::make_shared<NoisyGame>(fixture.game, config.noise_std, config.seed.value_or(0));
      metadata["fixture"] = fixture.name;
      break;
    }
    case SourceKind::kLlm: {
      auto dataset = load_dataset(config, err);
      const llm::DatasetInstance* chosen = &dataset.instances.front();
      if (!config.instances.empty()) {
        auto it = std::find_if(dataset.instances.begin(), dataset.instances.end(),
                               [&](const auto& i) { return i.row == config.instances.front(); });
        if (it == dataset.instances.end()) {
          throw UsageError("dataset has no usable row " + std::to_string(config.instances.front()));
        }
        chosen = &*it;
      }
      features.emplace(chosen->features);
      store = open_store(config);
      auto llm_source = std::make_shared<llm::LlmPayoffSource>(
          chosen->features, llm::PromptTemplate::symptoms(), config.inference, *store,
          llm::LlmPayoffOptions{config.reuse_base_for_grand});
      metadata["instance"] = {{"row", chosen->row}, {"label", chosen->label}};
      metadata["base_answer"] = llm_source->base_answer();
      metadata["grand_coalition"] = config.reuse_base_for_grand ? "pinned_base" : "fresh_draw";
      source = std::move(llm_source);
      break;
    }
  }

  const auto result = run_method(config.method, *source, *features, config);
  out << ranked_table(result, *features);

  nlohmann::json report = {
      {"header",
       {{"generated_at", utc_timestamp()}, {"wall_time_seconds", result.wall_time_seconds}}},
      {"config", to_json(config)},
      {"source", source->description()},
      {"metadata", std::move(metadata)},
      {"result", to_json(result, *features, false)},
  };
  emit_json(report, config, out);
  return kExitOk;
}

int cmd_audit(const RunConfig& config, std::ostream& out, std::ostream&) {
  if (config.games.empty()) throw UsageError("audit needs at least one --game fixture");
  std::vector<GameFixture> fixtures;
  for (const auto& path : config.games) fixtures.push_back(load_game_fixture(path));

  AuditOptions options;
  options.tolerance = config.tolerance;
  options.window_size = config.window_size.value_or(2);
  options.window_context = config.window_context;
  options.noisy_trials = config.trials;
  options.noise_std = config.noise_std;
  options.seed = config.seed.value_or(42);
  options.noisy_fixture = config.noisy_fixture;

  const auto start = Clock::now();
  const auto matrix = compliance_matrix(fixtures, options);
  const auto mismatches = compare_to_expected(matrix);
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();

  out << render_table(matrix);
  nlohmann::json mismatch_json = nlohmann::json::array();
  for (const auto& m : mismatches) {
    out << "mismatch: " << to_string(m.method) << " " << m.axiom << ": expected " << m.expected
        << ", observed " << m.observed << '\n';
    mismatch_json.push_back({{"method", to_string(m.method)},
                             {"axiom", m.axiom},
                             {"expected", m.expected},
                             {"observed", m.observed}});
  }
  out << (mismatches.empty() ? "matrix matches the expected compliance pattern\n"
                             : "matrix deviates from the expected compliance pattern\n");

  if (config.out) {
    nlohmann::json report = {
        {"header", {{"generated_at", utc_timestamp()}, {"wall_time_seconds", elapsed}}},
        {"config", to_json(config)},
        {"matrix", to_json(matrix)},
        {"matches_expected", mismatches.empty()},
        {"mismatches", std::move(mismatch_json)},
    };
    write_file(*config.out, report.dump(2) + "\n");
  }
  if (!mismatches.empty() && !config.allow_mismatch) return kExitFailure;
  return kExitOk;
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.source == SourceKind::kLlm) {
    throw UsageError("bench supports table and noisy sources");
  }
  if (config.n_min < 1 || config.n_min > config.n_max) throw UsageError("need 1 <= --n-min <= --n-max");
  if (config.runs_per_point < 1) throw UsageError("--runs must be at least 1");
  std::vector<Method> methods = config.methods;
  if (methods.empty()) {
    methods = {Method::kExact, Method::kCached, Method::kSlidingWindow, Method::kCounterfactual};
  }
  const bool needs_window =
      std::find(methods.begin(), methods.end(), Method::kSlidingWindow) != methods.end();
  if (needs_window && !config.window_size) throw UsageError("sliding_window needs --window-size");

  std::ostringstream csv;
  csv << "method,n,window_size,inference_calls,expected_calls,wall_time_mean_seconds\n";
  bool all_match = true;
  const std::uint64_t seed = config.seed.value_or(0);
  for (Method method : methods) {
    for (std::size_t n = config.n_min; n <= config.n_max; ++n) {
      if (method == Method::kSlidingWindow && *config.window_size > n) {
        err << "note: skipping sliding_window at n=" << n << " (window " << *config.window_size
            << " is wider)\n";
        continue;
      }
      const auto features = FeatureSet::from_labels(feature_labels(n));
      auto table = std::make_shared<TableGame>(random_table_game(n, seed + n));
      double total_time = 0.0;
      std::size_t calls = 0;
      for (std::size_t run = 0; run < config.runs_per_point; ++run) {
        std::shared_ptr<PayoffSource> source = table;
        if (config.source == SourceKind::kNoisy) {
          source = std::make_shared<NoisyGame>(table, config.noise_std, seed + run);
        }
        const auto result = run_method(method, *source, features, config);
        total_time += result.wall_time_seconds;
        if (run > 0 && result.call_stats.inference_calls != calls) all_match = false;
        calls = result.call_stats.inference_calls;
      }
      const std::optional<std::size_t> window =
          method == Method::kSlidingWindow ? config.window_size : std::nullopt;
      auto expected = expected_calls(method, n, window, config.window_cache);
      if (expected && config.samples > 1) *expected *= config.samples;
      if (expected && *expected != calls) all_match = false;
      csv << to_string(method) << ',' << n << ',' << (window ? std::to_string(*window) : "") << ','
          << calls << ',' << (expected ? std::to_string(*expected) : "") << ','
          << format_number(total_time / static_cast<double>(config.runs_per_point)) << '\n';
    }
  }

  if (config.out) {
    write_file(*config.out, csv.str());
  } else {
    out << csv.str();
  }
  if (config.report) {
    nlohmann::json report = {{"header", {{"generated_at", utc_timestamp()}}},
                             {"config", to_json(config)},
                             {"calls_match_closed_forms", all_match}};
    write_file(*config.report, report.dump(2) + "\n");
  }
  if (!all_match) {
    err << "error: instrumented call counts deviate from the closed forms\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.min_features > config.max_features) {
    throw UsageError("--min-features must not exceed --max-features");
  }
  std::vector<Method> methods = config.methods;
  if (methods.empty()) methods = {Method::kCached, Method::kSlidingWindow, Method::kCounterfactual};
  RunConfig resolved = config;
  resolved.methods = methods;
  if (std::find(methods.begin(), methods.end(), Method::kSlidingWindow) != methods.end() &&
      !resolved.window_size) {
    resolved.window_size = 3;
  }

  const auto dataset = load_dataset(config, err);
  auto store = open_store(config);

  struct Row {
    std::size_t instance;
    std::string label;
    std::size_t n;
    Method method;
    std::optional<double> similarity;
  };
  std::vector<Row> rows;
  nlohmann::json instance_reports = nlohmann::json::array();

  for (const auto& instance : dataset.instances) {
    if (!config.instances.empty() &&
        std::find(config.instances.begin(), config.instances.end(), instance.row) ==
            config.instances.end()) {
      continue;
    }
    const std::size_t n = instance.features.size();
    if (n < config.min_features || n > config.max_features) continue;

    llm::LlmPayoffSource source(instance.features, llm::PromptTemplate::symptoms(),
                                config.inference, *store,
                                llm::LlmPayoffOptions{config.reuse_base_for_grand});
    const auto gold = run_method(Method::kExact, source, instance.features, resolved);
    nlohmann::json results = {{"exact", to_json(gold, instance.features, false)}};

    for (Method method : methods) {
      if (method == Method::kSlidingWindow && *resolved.window_size > n) {
        err << "warning: row " << instance.row << ": window " << *resolved.window_size
            << " exceeds " << n << " features, skipped\n";
        continue;
      }
      const auto result = run_method(method, source, instance.features, resolved);
      results[std::string(to_string(method))] = to_json(result, instance.features, false);
      std::optional<double> similarity;
      try {
        similarity = llm::compare_attributions(result, gold, instance.features);
      } catch (const ZeroVector&) {
        err << "warning: row " << instance.row << ": zero attribution vector for "
            << to_string(method) << ", similarity undefined\n";
      }
      rows.push_back({instance.row, instance.label, n, method, similarity});
    }
    instance_reports.push_back({{"row", instance.row},
                                {"label", instance.label},
                                {"base_answer", source.base_answer()},
                                {"results", std::move(results)}});
  }
  if (rows.empty()) throw Error("no dataset instance matched the selection");

  std::ostringstream csv;
  csv << "kind,instance,label,n_features,method,similarity,count\n";
  for (const auto& r : rows) {
    csv << "instance," << r.instance << ',' << csv_cell(r.label) << ',' << r.n << ','
        << to_string(r.method) << ',' << (r.similarity ? format_number(*r.similarity) : "")
        << ",1\n";
  }
  // Means are recomputed from the per-instance rows.
  struct Mean {
    double total = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<std::size_t, std::size_t>, Mean> by_count;  // (n, method index)
  std::map<std::size_t, Mean> overall;
  auto method_index = [&](Method m) {
    return static_cast<std::size_t>(std::find(methods.begin(), methods.end(), m) - methods.begin());
  };
  for (const auto& r : rows) {
    if (!r.similarity) continue;
    auto& bucket = by_count[{r.n, method_index(r.method)}];
    bucket.total += *r.similarity;
    ++bucket.count;
    auto& all = overall[method_index(r.method)];
    all.total += *r.similarity;
    ++all.count;
  }
  for (const auto& [key, mean] : by_count) {
    csv << "feature_count,,," << key.first << ',' << to_string(methods[key.second]) << ','
        << format_number(mean.total / static_cast<double>(mean.count)) << ',' << mean.count << '\n';
  }
  for (const auto& [index, mean] : overall) {
    csv << "overall,,,," << to_string(methods[index]) << ','
        << format_number(mean.total / static_cast<double>(mean.count)) << ',' << mean.count << '\n';
  }

  if (config.out) {
    write_file(*config.out, csv.str());
  } else {
    out << csv.str();
  }
  if (config.report) {
    nlohmann::json report = {{"header", {{"generated_at", utc_timestamp()}}},
                             {"config", to_json(resolved)},
                             {"gold_standard", "exact"},
                             {"grand_coalition",
                              config.reuse_base_for_grand ? "pinned_base" : "fresh_draw"},
                             {"instances", std::move(instance_reports)}};
    write_file(*config.report, report.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_ingest_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto dataset = load_dataset(config, err);
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& i : dataset.instances) ++histogram[i.features.size()];
  out << "instances: " << dataset.instances.size() << '\n'
      << "skipped rows: " << dataset.warnings.size() << '\n'
      << "features  instances\n";
  for (const auto& [n, count] : histogram) {
    out << std::left << std::setw(8) << n << "  " << count << '\n';
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shapley-style feature attribution for stochastic payoff sources", "shapkit"};
  app.require_subcommand(1);

  RunConfig config;
  std::string method = "cached";
  std::string methods;
  std::size_t window_size = 0;
  std::string window_context = "held";
  std::string source = "table";
  std::string mode = "replay";
  std::string instances;
  std::int64_t llm_seed = 0;
  std::uint64_t seed = 0;
  bool no_window_cache = false;
  bool deterministic = false;

  auto add_llm = [&](CLI::App* cmd) {
    cmd->add_option("--dataset", config.dataset, "disease/symptom CSV");
    cmd->add_option("--transcript", config.transcript, "JSON-lines transcript file");
    cmd->add_option("--mode", mode, "record, replay or live")
        ->check(CLI::IsMember({"record", "replay", "live"}));
    cmd->add_option("--endpoint", config.inference.endpoint_url, "OpenAI-compatible base URL");
    cmd->add_option("--model", config.inference.model, "chat model");
    cmd->add_option("--embedding-model", config.inference.embedding_model, "embedding model");
    cmd->add_option("--temperature", config.inference.temperature, "sampling temperature");
    cmd->add_option("--llm-seed", llm_seed, "sampling seed sent to the model");
    cmd->add_flag("--deterministic", deterministic, "temperature 0 and seed 42");
    cmd->add_option("--max-retries", config.inference.max_retries, "HTTP retries");
    cmd->add_option("--timeout", config.inference.timeout_seconds, "HTTP timeout in seconds");
    cmd->add_flag("--reuse-base", config.reuse_base_for_grand,
                  "score the grand coalition with the pinned base answer");
  };
  auto add_window = [&](CLI::App* cmd) {
    cmd->add_option("--window-size", window_size, "sliding window size");
    cmd->add_option("--window-context", window_context, "held or restricted")
        ->check(CLI::IsMember({"held", "restricted"}));
  };
  auto add_runtime = [&](CLI::App* cmd) {
    cmd->add_option("--samples", config.samples, "draws averaged per coalition")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", config.workers, "concurrent coalition evaluations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "seed for noisy games and generated benchmarks");
  };

  auto* attribute = app.add_subcommand("attribute", "attribute one game or dataset instance");
  attribute->add_option("--method", method, "exact, cached, sliding_window, counterfactual, oracle")
      ->check(CLI::IsMember({"exact", "cached", "sliding_window", "counterfactual", "oracle"}));
  add_window(attribute);
  attribute->add_flag("--no-window-cache", no_window_cache, "evaluate windows without a cache");
  add_runtime(attribute);
  attribute->add_option("--tolerance", config.tolerance, "numerical tolerance");
  attribute->add_option("--source", source, "table, noisy or llm")
      ->check(CLI::IsMember({"table", "noisy", "llm"}));
  attribute->add_option("--game", config.games, "table game fixture");
  attribute->add_option("--noise-std", config.noise_std, "noise of the noisy source");
  attribute->add_option("--instance", instances, "dataset row number");
  add_llm(attribute);
  attribute->add_option("--out", config.out, "JSON report path");

  auto* audit = app.add_subcommand("audit", "axiom compliance matrix over game fixtures");
  audit->add_option("--game", config.games, "table game fixture (repeatable)");
  audit->add_option("--tolerance", config.tolerance, "check tolerance");
  add_window(audit);
  audit->add_option("--trials", config.trials, "stochastic efficiency trials");
  audit->add_option("--noise-std", config.noise_std, "noise of the stochastic trials");
  audit->add_option("--seed", seed, "first trial seed");
  audit->add_option("--noisy-fixture", config.noisy_fixture, "fixture index used for trials");
  audit->add_flag("--allow-mismatch", config.allow_mismatch,
                  "exit 0 even if the matrix deviates from the expected pattern");
  audit->add_option("--out", config.out, "JSON report path");

  auto* bench = app.add_subcommand("bench", "inference-call counts and wall time versus n");
  bench->add_option("--methods", methods, "comma-separated methods");
  add_window(bench);
  bench->add_flag("--window-cache", config.window_cache, "cache sliding-window evaluations");
  add_runtime(bench);
  bench->add_option("--source", source, "table or noisy")->check(CLI::IsMember({"table", "noisy"}));
  bench->add_option("--noise-std", config.noise_std, "noise of the noisy source");
  bench->add_option("--n-min", config.n_min, "smallest feature count");
  bench->add_option("--n-max", config.n_max, "largest feature count");
  bench->add_option("--runs", config.runs_per_point, "runs per (method, n)");
  bench->add_option("--out", config.out, "CSV path");
  bench->add_option("--report", config.report, "JSON provenance path");

  auto* compare = app.add_subcommand("compare", "similarity of each method to exact Shapley values");
  compare->add_option("--methods", methods, "comma-separated methods");
  add_window(compare);
  add_runtime(compare);
  compare->add_option("--instances", instances, "comma-separated dataset rows");
  compare->add_option("--min-features", config.min_features, "smallest instance size");
  compare->add_option("--max-features", config.max_features, "largest instance size");
  add_llm(compare);
  compare->add_option("--out", config.out, "CSV path");
  compare->add_option("--report", config.report, "JSON report path");

  auto* ingest = app.add_subcommand("ingest-check", "parse a dataset and summarize it");
  ingest->add_option("--dataset", config.dataset, "disease/symptom CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  auto given = [&](const std::string& name) {
    return chosen->get_option_no_throw(name) != nullptr && chosen->count(name) > 0;
  };
  try {
    config.method = parse_method(method);
    for (std::size_t pos = 0; pos < methods.size();) {
      auto comma = methods.find(',', pos);
      if (comma == std::string::npos) comma = methods.size();
      if (comma > pos) config.methods.push_back(parse_method(methods.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    for (std::size_t pos = 0; pos < instances.size();) {
      auto comma = instances.find(',', pos);
      if (comma == std::string::npos) comma = instances.size();
      if (comma > pos) config.instances.push_back(std::stoul(instances.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    if (given("--window-size")) config.window_size = window_size;
    config.window_context = parse_window_context(window_context);
    if (chosen == attribute) config.window_cache = !no_window_cache;
    if (chosen == bench && !given("--window-cache")) config.window_cache = false;
    if (given("--seed")) config.seed = seed;
    config.source = parse_source_kind(source);
    config.mode = llm::parse_transcript_mode(mode);
    if (deterministic) {
      config.inference.temperature = 0.0;
      config.inference.seed = 42;
    }
    if (given("--llm-seed")) {
      config.inference.seed = llm_seed;
    }
    if (chosen == attribute && config.dataset && !given("--source")) {
      config.source = SourceKind::kLlm;
    }
    config.inference.validate();
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (chosen == attribute) return cmd_attribute(config, out, err);
    if (chosen == audit) return cmd_audit(config, out, err);
    if (chosen == bench) return cmd_bench(config, out, err);
    if (chosen == compare) return cmd_compare(config, out, err);
    return cmd_ingest_check(config, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    try {
      std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
      err << "  caused by: " << inner.what() << '\n';
    }
    return kExitFailure;
  }
}

}  // namespace shapkit::cli
