#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arena/scene/catalog.hpp"
#include "arena/scene/layout.hpp"
#include "arena/scene/object.hpp"

namespace arena::scene {

struct AgentState {
  Cell cell;
  Heading heading = Heading::kN;
  std::optional<std::string> held;

  bool operator==(const AgentState&) const = default;
};

class WorldState {
 public:
  std::shared_ptr<const SceneLayout> layout;
  std::shared_ptr<const Catalog> catalog;
  // Mission-specific extra blocked cells.
  std::set<Cell> obstacles;
  std::map<std::string, ObjectInstance, std::less<>> objects;
  AgentState agent;
  std::map<std::string, bool, std::less<>> room_power;
  int64_t tick = 0;

  const ObjectInstance* find(std::string_view id) const;
  // Throws UnknownInstance.
  const ObjectInstance& at(std::string_view id) const;
  ObjectInstance& at(std::string_view id);
  const ObjectClass& class_of(const ObjectInstance& obj) const { return catalog->at(obj.class_id); }
  const ObjectClass& class_of(std::string_view id) const { return class_of(at(id)); }

  // Layout walls, mission obstacles and blocking fixtures.
  Occupancy occupancy() const;

  // The cell-located ancestor of an object, or nullptr when its chain ends in
  // the agent's hand. Stops on broken chains.
  const ObjectInstance* root(std::string_view id) const;
  bool held_root(std::string_view id) const;
  // Cell an object occupies for geometry: its root's cell, the agent's cell when held.
  Cell position(std::string_view id) const;
  // True when any ancestor link is "in" a closed openable container.
  bool enclosed(std::string_view id) const;

  // Direct children (linked in/on), sorted by id.
  std::vector<std::string> children(std::string_view id) const;
  // Children linked through "in" / "on" respectively.
  std::vector<std::string> contents_in(std::string_view id) const;
  std::vector<std::string> contents_on(std::string_view id) const;

  std::optional<std::string> room_at(Cell c) const;
  std::string agent_room() const;
  bool room_powered(std::string_view room) const;

  bool operator==(const WorldState& other) const;
};

// Every invariant violation, empty when the world is valid.
std::vector<std::string> world_problems(const WorldState& world);
// Throws ValidationError naming the first problem.
void validate(const WorldState& world);

// Integer grid traversal from cell centre to cell centre; true when no
// blocked cell strictly between the endpoints has its interior crossed.
// Passing exactly through a cell corner touches neither side cell.
bool line_of_sight(const Occupancy& occ, Cell from, Cell to);

inline constexpr int kInteractionRange = 2;
// Chebyshev distance <= kInteractionRange with line of sight.
bool within_reach(const Occupancy& occ, Cell agent, Cell target);

struct ObservedObject {
  std::string instance_id;
  std::string class_id;
  int bearing_deg = 0;  // clockwise from heading, rounded
  double distance = 0;  // euclidean, cells
  std::vector<std::string> visible_state_flags;

  bool operator==(const ObservedObject&) const = default;
};

inline constexpr double kDefaultFovDeg = 90.0;
inline constexpr int kDefaultViewRange = 12;

// Objects whose position lies in the view cone and range, not occluded and
// not inside a closed container. Held objects are not reported. Sorted by id.
std::vector<ObservedObject> symbolic_observation(const WorldState& world, Heading heading,
                                                 double fov_deg = kDefaultFovDeg,
                                                 int max_range = kDefaultViewRange);

// Transitively contained ids, depth first with children in id order.
// Throws UnknownInstance.
std::vector<std::string> containment_closure(const WorldState& world, std::string_view id);

}  // namespace arena::scene
