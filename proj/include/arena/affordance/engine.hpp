#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arena/affordance/actions.hpp"
#include "arena/affordance/rules.hpp"
#include "arena/scene/world.hpp"

namespace arena::affordance {

struct Applicability {
  bool ok = false;
  std::optional<ResultCode> code;
  std::string reason;

  explicit operator bool() const { return ok; }
};

// Reachable for interaction: not in the agent's hand chain, not shut inside a
// closed container, and within reach of the agent's cell.
bool accessible(const scene::WorldState& world, const scene::Occupancy& occ, std::string_view id);
bool accessible_from(const scene::WorldState& world, const scene::Occupancy& occ, scene::Cell from,
                     std::string_view id);

// First object (by id) that hands out liquid and is accessible.
const scene::ObjectInstance* liquid_source(const scene::WorldState& world,
                                           const scene::Occupancy& occ);

// Instances of `class_id` in the same room as `device_id`, sorted by id.
std::vector<std::string> linked_instances(const scene::WorldState& world, std::string_view device_id,
                                          std::string_view class_id);

// Id the next spawned instance of a class would receive.
std::string next_instance_id(const scene::WorldState& world, std::string_view class_id);

class Engine {
 public:
  explicit Engine(std::shared_ptr<const RuleBook> rules);

  Applicability applicable(const scene::WorldState& world, const InteractionAction& action) const;

  // Copying form; failures return the input world with only tick advanced.
  std::pair<scene::WorldState, ActionResult> apply(const scene::WorldState& world,
                                                   const InteractionAction& action) const;
  ActionResult apply_in_place(scene::WorldState& world, const InteractionAction& action) const;

  // Ordered by (verb, target, secondary).
  std::vector<InteractionAction> enumerate_applicable(const scene::WorldState& world) const;

  // First unmet precondition of a behavior, nullopt when all hold.
  std::optional<std::string> unmet_precondition(const scene::WorldState& world,
                                                const DeviceBehavior& behavior,
                                                std::string_view device_id) const;

  const RuleBook& rules() const { return *rules_; }

 private:
  Applicability check(const scene::WorldState& world, const scene::Occupancy& occ,
                      const InteractionAction& action) const;

  std::shared_ptr<const RuleBook> rules_;
};

}  // namespace arena::affordance
