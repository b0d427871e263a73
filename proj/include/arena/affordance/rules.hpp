#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arena/affordance/actions.hpp"
#include "arena/scene/catalog.hpp"
#include "arena/scene/object.hpp"

namespace arena::affordance {

// Where the acting object must be relative to the agent.
enum class Access : uint8_t { kReach, kHeld, kReachOrHeld };

// Boolean state test on an object. "filled" and "note" are pseudo-flags for
// "has a liquid" and "carries sticky-note text".
struct StateTest {
  std::string key;
  bool value = false;
};

struct AffordanceRule {
  Verb verb = Verb::kExamine;
  std::vector<scene::Property> requires_props;
  std::vector<scene::Property> excludes_props;
  Access target_access = Access::kReach;
  bool hands_empty = false;
  std::vector<StateTest> target_state;
  std::vector<scene::Property> secondary_requires;
  std::vector<StateTest> secondary_state;
  bool liquid_source = false;
  std::vector<std::pair<scene::Flag, bool>> effects;
};

enum class Trigger : uint8_t { kToggleOn, kClose };

struct DevicePrecondition {
  enum class Kind : uint8_t {
    kSelfPowered,
    kRoomPower,
    kSelfClosed,
    kSelfContains,
    kSelfFilled,
    kLinkedContains,
    kLinkedExists,
  };
  Kind kind = Kind::kRoomPower;
  std::string linked_class;
  std::string item_class;
  std::string liquid;

  std::string describe() const;
};

struct DeviceEffect {
  enum class Target : uint8_t { kSelf, kContents, kLinkedContents, kAllRooms, kOwnRoom };
  Target target = Target::kSelf;
  std::string linked_class;
  std::vector<std::pair<scene::Flag, bool>> set;
  std::optional<std::string> color;
  std::optional<std::string> fill;
  bool empty = false;
  std::optional<std::string> spawn_class;
  std::optional<std::string> consume_class;
  std::optional<bool> room_power;
};

struct DeviceBehavior {
  std::string device_class_id;
  Trigger trigger = Trigger::kToggleOn;
  std::vector<DevicePrecondition> preconditions;
  std::vector<DeviceEffect> effects;
};

class RuleBook {
 public:
  RuleBook() = default;
  RuleBook(std::vector<AffordanceRule> rules, std::vector<DeviceBehavior> devices);

  const AffordanceRule* rule(Verb v) const;
  const std::vector<DeviceBehavior>& devices() const { return devices_; }
  std::vector<const DeviceBehavior*> behaviors(std::string_view class_id, Trigger trigger) const;
  // Button or tool colors named by device effects.
  std::vector<std::string> effect_colors() const;

 private:
  std::map<Verb, AffordanceRule> rules_;
  std::vector<DeviceBehavior> devices_;
};

// Throws ParseError / ValidationError. Device and item classes must exist in the catalog.
RuleBook parse_rules(std::string_view text, const scene::Catalog& catalog);
RuleBook load_rules(const std::filesystem::path& path, const scene::Catalog& catalog);

}  // namespace arena::affordance
