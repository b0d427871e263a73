#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/scene/catalog.hpp"
#include "arena/scene/geometry.hpp"
#include "arena/util/json.hpp"

namespace arena::scene {

enum class Flag : uint8_t {
  kOpen,
  kBroken,
  kDirty,
  kHot,
  kCold,
  kToggledOn,
  kPowered,
  kCooked,
  kInfected,
  kUsed,
};

inline constexpr size_t kFlagCount = 10;
inline constexpr std::array<Flag, kFlagCount> kAllFlags = {
    Flag::kOpen,      Flag::kBroken,  Flag::kDirty,  Flag::kHot,      Flag::kCold,
    Flag::kToggledOn, Flag::kPowered, Flag::kCooked, Flag::kInfected, Flag::kUsed,
};

std::string_view flag_name(Flag f);
std::optional<Flag> parse_flag(std::string_view name);

// Property that licenses a flag; nullopt means "any non-decor class".
std::optional<Property> licensing_property(Flag f);
bool flag_licensed(const ObjectClass& cls, Flag f);
// Initial value of a flag for a fresh instance (powerable devices start powered).
bool flag_default(const ObjectClass& cls, Flag f);

struct ObjectState {
  std::array<bool, kFlagCount> flags{};
  std::optional<std::string> filled_with;

  bool get(Flag f) const { return flags[static_cast<size_t>(f)]; }
  void set(Flag f, bool v) { flags[static_cast<size_t>(f)] = v; }

  static ObjectState defaults_for(const ObjectClass& cls);

  bool operator==(const ObjectState&) const = default;
};

struct Location {
  enum class Kind : uint8_t { kCell, kInside, kOn, kHeld };

  Kind kind = Kind::kCell;
  Cell cell{};
  std::string parent;

  static Location at(Cell c) { return {Kind::kCell, c, {}}; }
  static Location inside(std::string id) { return {Kind::kInside, {}, std::move(id)}; }
  static Location on(std::string id) { return {Kind::kOn, {}, std::move(id)}; }
  static Location held() { return {Kind::kHeld, {}, {}}; }

  bool has_parent() const { return kind == Kind::kInside || kind == Kind::kOn; }

  bool operator==(const Location&) const = default;
};

struct ObjectInstance {
  std::string instance_id;
  std::string class_id;
  Location location;
  ObjectState state;
  std::optional<std::string> color_override;
  // Only sticky notes carry text.
  std::optional<std::string> note_text;

  bool operator==(const ObjectInstance&) const = default;
};

// State JSON lists only flags that differ from the class defaults, plus
// "filled_with" and "color" when set.
util::Json state_to_json(const ObjectClass& cls, const ObjectState& state,
                         const std::optional<std::string>& color);
void state_from_json(const util::Json& value, const ObjectClass& cls, const std::string& where,
                     ObjectState& state, std::optional<std::string>& color);

util::Json location_to_json(const Location& loc);
Location location_from_json(const util::Json& value, const std::string& where);

// Active flags as observation badges ("open", "hot", "filled:water", "color:red").
std::vector<std::string> state_badges(const ObjectInstance& obj);

}  // namespace arena::scene
