#pragma once

#include <string>
#include <vector>

#include "arena/cdf/cdf.hpp"
#include "arena/resources.hpp"

namespace arena::testing {

// Shipped data plus the layouts under tests/fixtures/layouts.
const Resources& fixture_resources();
std::string fixture_dir();

struct MissionSpec {
  std::string layout_id;
  scene::Cell agent;
  scene::Heading heading = scene::Heading::kN;
  // Extra objects: [{"id", "class", "location", "state"?}]; layout
  // furnishings are always copied in.
  util::Json objects = util::Json::array();
  util::Json goals = util::Json::array();
  util::Json obstacles = util::Json::array();
  util::Json room_power = util::Json::object();
  // Furnishing ids to leave out of the scene.
  std::vector<std::string> without;
};

util::Json mission_json(const MissionSpec& spec, const Resources& res);
cdf::CDF mission(const MissionSpec& spec, const Resources& res = fixture_resources());

}  // namespace arena::testing
