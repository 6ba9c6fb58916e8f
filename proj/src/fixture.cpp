#include "shapkit/fixture.hpp"

#include <algorithm>
#include <fstream>

#include "shapkit/error.hpp"

namespace shapkit {

TableGame table_game_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw FixtureError("table game document must be a JSON object");
  double default_payoff = 0.0;
  if (auto it = doc.find("default"); it != doc.end()) {
    if (!it->is_number()) throw FixtureError("'default' must be a number");
    default_payoff = it->get<double>();
  }
  TableGame game({}, default_payoff);
  auto entries = doc.find("entries");
  if (entries == doc.end()) return game;
  if (!entries->is_object()) throw FixtureError("'entries' must be an object");
  for (const auto& [raw_key, value] : entries->items()) {
    if (!value.is_number()) throw FixtureError("payoff for '" + raw_key + "' is not a number");
    Coalition coalition;
    try {
      coalition = Coalition::parse_key(raw_key);
    } catch (const InvalidArgument& e) {
      throw FixtureError(e.what());
    }
    if (game.entries().contains(coalition.key())) {
      throw FixtureError("entry '" + raw_key + "' duplicates coalition '" + coalition.key() + "'");
    }
    try {
      game.set(coalition, value.get<double>());
    } catch (const InvalidArgument& e) {
      throw FixtureError(e.what());
    }
  }
  return game;
}

nlohmann::json to_json(const TableGame& game) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [key, value] : game.entries()) entries[key] = value;
  return {{"default", game.default_payoff()}, {"entries", std::move(entries)}};
}

GameFixture game_fixture_from_json(const nlohmann::json& doc, std::string fallback_name) {
  auto game = std::make_shared<TableGame>(table_game_from_json(doc));
  std::string name = doc.value("name", std::move(fallback_name));

  std::vector<Feature> features;
  if (auto it = doc.find("features"); it != doc.end()) {
    if (!it->is_array()) throw FixtureError("'features' must be an array");
    for (const auto& f : *it) {
      if (!f.is_object() || !f.contains("id") || !f["id"].is_number_unsigned()) {
        throw FixtureError("each feature needs a non-negative integer 'id'");
      }
      Feature feature;
      feature.id = f["id"].get<FeatureId>();
      feature.label = f.value("label", std::to_string(feature.id));
      feature.content = f.value("content", feature.label);
      features.push_back(std::move(feature));
    }
  } else {
    FeatureId max_id = 0;
    bool any = false;
    for (const auto& [key, value] : game->entries()) {
      const auto coalition = Coalition::parse_key(key);
      for (FeatureId id : coalition.members()) {
        max_id = std::max(max_id, id);
        any = true;
      }
    }
    if (!any) throw FixtureError("fixture without 'features' must list at least one coalition");
    for (FeatureId id = 0; id <= max_id; ++id) {
      features.push_back({id, std::to_string(id), std::to_string(id)});
    }
  }

  std::optional<FeatureSet> set;
  try {
    set.emplace(std::move(features));
  } catch (const InvalidArgument& e) {
    throw FixtureError(e.what());
  }
  for (const auto& [key, value] : game->entries()) {
    const auto coalition = Coalition::parse_key(key);
    for (FeatureId id : coalition.members()) {
      if (!set->contains(id)) {
        throw FixtureError("entry '" + key + "' references unknown feature " + std::to_string(id));
      }
    }
  }
  return GameFixture{std::move(name), std::move(*set), std::move(game)};
}

GameFixture load_game_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FixtureError("cannot open game fixture " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FixtureError(path.string() + ": " + e.what());
  }
  return game_fixture_from_json(doc, path.stem().string());
}

}  // namespace shapkit
