#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "arena/affordance/actions.hpp"
#include "arena/scene/world.hpp"

namespace arena::nav {

struct NavAction {
  enum class Kind : uint8_t {
    kGotoViewpoint,
    kGotoRoom,
    kGotoObject,
    kMoveForward,
    kMoveBackward,
    kRotate,
    kLookAround,
  };

  Kind kind = Kind::kLookAround;
  std::string name;  // viewpoint, room or instance id
  int amount = 0;    // cells for moves, degrees for Rotate

  static NavAction goto_viewpoint(std::string v) { return {Kind::kGotoViewpoint, std::move(v), 0}; }
  static NavAction goto_room(std::string r) { return {Kind::kGotoRoom, std::move(r), 0}; }
  static NavAction goto_object(std::string id) { return {Kind::kGotoObject, std::move(id), 0}; }
  static NavAction move_forward(int k) { return {Kind::kMoveForward, {}, k}; }
  static NavAction move_backward(int k) { return {Kind::kMoveBackward, {}, k}; }
  static NavAction rotate(int degrees) { return {Kind::kRotate, {}, degrees}; }
  static NavAction look_around() { return {Kind::kLookAround, {}, 0}; }

  // k >= 1 for moves; Rotate takes a non-zero multiple of 90 in (-360, 360).
  bool well_formed() const;
  bool operator==(const NavAction&) const = default;
};

std::string_view nav_kind_name(NavAction::Kind k);
std::optional<NavAction::Kind> parse_nav_kind(std::string_view name);

struct Path {
  std::vector<scene::Cell> cells;  // includes both endpoints
  int cost = 0;
};

// A* over the 4-connected free cells, Manhattan heuristic; equal-priority
// frontier entries expand in discovery order and neighbours are pushed
// N, E, S, W. Throws Unreachable.
Path shortest_path(const scene::Occupancy& occ, scene::Cell from, scene::Cell to);
std::optional<Path> find_path(const scene::Occupancy& occ, scene::Cell from, scene::Cell to);

// BFS distances from a cell (-1 where unreachable), row-major.
std::vector<int> distance_field(const scene::Occupancy& occ, scene::Cell from);

using Panorama = std::array<std::vector<scene::ObservedObject>, 4>;

struct NavOutcome {
  scene::WorldState world;
  affordance::ActionResult result;
  int steps_taken = 0;
  std::optional<Panorama> panorama;
};

// Observations at N, E, S, W; the agent's heading is left alone.
Panorama look_around(const scene::WorldState& world);

// Viewpoint of `room` with the smallest path cost from `from`, ties by name.
const scene::Viewpoint* nearest_viewpoint(const scene::WorldState& world, std::string_view room,
                                          scene::Cell from);

NavOutcome execute_nav(const scene::WorldState& world, const NavAction& action);

}  // namespace arena::nav
