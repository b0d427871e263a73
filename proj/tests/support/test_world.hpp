#pragma once

#include <memory>
#include <string>
#include <vector>

#include "arena/scene/catalog.hpp"
#include "arena/scene/layout.hpp"
#include "arena/scene/world.hpp"

namespace arena::testing {

std::string data_dir();
std::shared_ptr<const scene::Catalog> shipped_catalog();
std::shared_ptr<const scene::SceneLayout> shipped_layout(const std::string& id);

// One room covering the whole grid, no doorways, one viewpoint at `vp`.
std::shared_ptr<scene::SceneLayout> single_room(const std::vector<std::string>& rows,
                                                scene::Cell vp = {1, 1});

scene::WorldState empty_world(std::shared_ptr<const scene::SceneLayout> layout,
                              scene::Cell agent, scene::Heading heading = scene::Heading::kN);

// Adds an instance with class-default state; returns its id.
std::string add_object(scene::WorldState& world, const std::string& id, const std::string& cls,
                       scene::Location loc);

}  // namespace arena::testing
