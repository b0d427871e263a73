#include "arena/resources.hpp"

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "arena/error.hpp"

namespace arena {

std::shared_ptr<const scene::SceneLayout> Resources::layout(std::string_view id) const {
  auto it = layouts.find(id);
  if (it == layouts.end()) {
    throw Error(Errc::kValidationError, "unknown layout_id '" + std::string(id) + "'");
  }
  return it->second;
}

Resources Resources::load(const std::filesystem::path& data_dir) {
  Resources r;
  r.data_dir = data_dir;
  r.catalog = std::make_shared<const scene::Catalog>(scene::load_catalog(data_dir / "catalog.json"));
  r.rules = std::make_shared<const affordance::RuleBook>(
      affordance::load_rules(data_dir / "rules.json", *r.catalog));
  r.engine = std::make_shared<const affordance::Engine>(r.rules);
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir / "layouts", ec)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) throw Error(Errc::kIoError, "cannot list " + (data_dir / "layouts").string());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto layout = std::make_shared<const scene::SceneLayout>(scene::load_layout(f, *r.catalog));
    const std::string id = layout->layout_id;
    if (!r.layouts.emplace(id, std::move(layout)).second) {
      throw Error(Errc::kValidationError, "duplicate layout id '" + id + "'");
    }
  }
  return r;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("ARENA_DATA_DIR"); env && *env) return env;
  return ARENA_DATA_DIR;
}

const Resources& Resources::shipped() {
  static const Resources r = load(default_data_dir());
  return r;
}

}  // namespace arena
