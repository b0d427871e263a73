#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arena/resources.hpp"
#include "arena/scene/world.hpp"
#include "arena/util/json.hpp"

namespace arena::cdf {

inline constexpr int kCdfVersion = 1;

enum class Predicate : uint8_t {
  kStateIs,
  kLocated,
  kHolding,
  kFilled,
  kColored,
  kScanned,
  kToggled,
};

std::string_view predicate_name(Predicate p);
std::optional<Predicate> parse_predicate(std::string_view name);

// Exactly one of `object` / `object_class` is set. Class-level goals hold
// when any instance of the class satisfies them.
struct GoalCondition {
  Predicate predicate = Predicate::kStateIs;
  std::string object;
  std::string object_class;
  scene::Flag flag = scene::Flag::kHot;  // state_is
  bool value = true;                     // state_is
  std::string receptacle;                // located, direct parent link
  std::string room;                      // located, alternative to receptacle
  std::optional<std::string> liquid;     // filled; nullopt means empty
  std::string color;                     // colored, effective colour

  bool class_level() const { return !object_class.empty(); }
  bool operator==(const GoalCondition&) const = default;
};

struct SceneSpec {
  std::string layout_id;
  scene::Cell agent_cell;
  scene::Heading agent_heading = scene::Heading::kN;
  std::map<std::string, bool> room_power;  // rooms not listed are powered
  std::set<scene::Cell> obstacles;
  std::vector<scene::ObjectInstance> objects;  // sorted by id after parsing

  bool operator==(const SceneSpec&) const = default;
};

struct MissionText {
  std::string mission_description;
  std::vector<std::string> subgoal_descriptions;
  std::vector<std::string> hints;  // sticky-note texts, in layout note order
  std::vector<std::string> prompts;

  bool operator==(const MissionText&) const = default;
};

struct CDF {
  std::string cdf_id;
  std::string task_type;  // may be empty for hand-written missions
  uint64_t seed = 0;
  bool unique_tool = false;
  SceneSpec scene;
  std::vector<GoalCondition> goals;
  MissionText text;
  // Catalog the scene was validated against; state JSON is written relative
  // to class defaults.
  std::shared_ptr<const scene::Catalog> catalog;

  bool operator==(const CDF&) const = default;
};

// Throws ParseError / ValidationError with a field path; the result is
// normalised (objects sorted by id) so serialize is a function of content.
CDF parse_cdf(std::string_view text, const Resources& res);
CDF parse_cdf_json(const util::Json& doc, const Resources& res);
// Checks every reference and the scene invariants; throws ValidationError.
void validate_cdf(const CDF& cdf, const Resources& res);

util::Json cdf_to_json(const CDF& cdf);
std::string serialize_cdf(const CDF& cdf);

util::Json goal_to_json(const GoalCondition& g);
GoalCondition goal_from_json(const util::Json& value, const std::string& where);

// World at tick 0: layout, scene objects, and the layout's sticky notes as
// sticky_note_<i> carrying hints[i] (the layout text past the hint list).
scene::WorldState build_world(const CDF& cdf, const Resources& res);
std::string sticky_note_id(size_t index);

// Colour the object shows: an override or the class appearance.
std::string effective_color(const scene::WorldState& world, const scene::ObjectInstance& obj);

bool goal_holds_for(const scene::WorldState& world, const GoalCondition& g,
                    const scene::ObjectInstance& obj);
// Throws UnknownReference for an instance, class, receptacle or room that the
// world does not contain.
bool goal_holds(const scene::WorldState& world, const GoalCondition& g);

struct GoalStatus {
  std::vector<bool> subgoals;
  bool mission = true;  // conjunction; vacuously true

  int m() const { return mission ? 1 : 0; }
  bool operator==(const GoalStatus&) const = default;
};

GoalStatus goal_status(const scene::WorldState& world, const std::vector<GoalCondition>& goals);

std::string describe_goal(const GoalCondition& g);

}  // namespace arena::cdf
