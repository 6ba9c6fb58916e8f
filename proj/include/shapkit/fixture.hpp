#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "shapkit/feature.hpp"
#include "shapkit/payoff.hpp"

namespace shapkit {

/// A table game together with the features it is played over.
struct GameFixture {
  std::string name;
  FeatureSet features;
  std::shared_ptr<TableGame> game;
};

/// Parses `{ "default": number, "entries": { "<key>": number } }`.
///
/// Keys are ','-separated feature ids in any order; they are re-canonicalized
/// and a key that collapses onto an earlier one is rejected. Throws FixtureError.
TableGame table_game_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const TableGame& game);

/// Parses a table game document with an optional
/// `"features": [{"id": 0, "label": "a", "content": "..."}]` list and optional
/// `"name"`. Without a feature list, ids 0..max(id) are used, labelled by id.
GameFixture game_fixture_from_json(const nlohmann::json& doc, std::string fallback_name);

GameFixture load_game_fixture(const std::filesystem::path& path);

}  // namespace shapkit
