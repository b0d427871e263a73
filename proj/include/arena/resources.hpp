#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "arena/affordance/engine.hpp"
#include "arena/scene/catalog.hpp"
#include "arena/scene/layout.hpp"

namespace arena {

// Everything loaded from a data directory: catalog, rule tables, layouts.
struct Resources {
  std::filesystem::path data_dir;
  std::shared_ptr<const scene::Catalog> catalog;
  std::shared_ptr<const affordance::RuleBook> rules;
  std::shared_ptr<const affordance::Engine> engine;
  std::map<std::string, std::shared_ptr<const scene::SceneLayout>, std::less<>> layouts;

  // Throws ValidationError for unknown ids.
  std::shared_ptr<const scene::SceneLayout> layout(std::string_view id) const;

  // Reads catalog.json, rules.json and layouts/*.json.
  static Resources load(const std::filesystem::path& data_dir);
  // The data directory of this build, overridable through ARENA_DATA_DIR.
  static const Resources& shipped();
};

std::filesystem::path default_data_dir();

}  // namespace arena
