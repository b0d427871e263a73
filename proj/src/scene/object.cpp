#include "arena/scene/object.hpp"

#include "arena/error.hpp"

namespace arena::scene {

namespace {

constexpr std::array<std::string_view, kFlagCount> kFlagNames = {
    "open", "broken", "dirty", "hot", "cold", "toggled_on", "powered", "cooked", "infected", "used",
};

}  // namespace

std::string_view flag_name(Flag f) { return kFlagNames[static_cast<size_t>(f)]; }

std::optional<Flag> parse_flag(std::string_view name) {
  for (size_t i = 0; i < kFlagCount; ++i) {
    if (kFlagNames[i] == name) return static_cast<Flag>(i);
  }
  return std::nullopt;
}

std::optional<Property> licensing_property(Flag f) {
  switch (f) {
    case Flag::kOpen: return Property::kOpenable;
    case Flag::kBroken: return Property::kBreakable;
    case Flag::kDirty: return Property::kDirtyable;
    case Flag::kHot: return Property::kHeatable;
    case Flag::kCold: return Property::kChillable;
    case Flag::kToggledOn: return Property::kToggleable;
    case Flag::kPowered: return Property::kPowerable;
    case Flag::kCooked: return Property::kCookable;
    case Flag::kInfected: return Property::kInfectable;
    case Flag::kUsed: return std::nullopt;
  }
  return std::nullopt;
}

bool flag_licensed(const ObjectClass& cls, Flag f) {
  if (auto p = licensing_property(f)) return cls.has(*p);
  return !cls.has(Property::kDecor);
}

bool flag_default(const ObjectClass& cls, Flag f) {
  return f == Flag::kPowered && cls.has(Property::kPowerable);
}

ObjectState ObjectState::defaults_for(const ObjectClass& cls) {
  ObjectState s;
  for (Flag f : kAllFlags) s.set(f, flag_default(cls, f));
  return s;
}

util::Json state_to_json(const ObjectClass& cls, const ObjectState& state,
                         const std::optional<std::string>& color) {
  util::Json out = util::Json::object();
  for (Flag f : kAllFlags) {
    if (state.get(f) != flag_default(cls, f)) out[std::string(flag_name(f))] = state.get(f);
  }
  if (state.filled_with) out["filled_with"] = *state.filled_with;
  if (color) out["color"] = *color;
  return out;
}

void state_from_json(const util::Json& value, const ObjectClass& cls, const std::string& where,
                     ObjectState& state, std::optional<std::string>& color) {
  state = ObjectState::defaults_for(cls);
  color.reset();
  if (!value.is_object()) throw Error(Errc::kValidationError, where + ": expected an object");
  for (auto it = value.begin(); it != value.end(); ++it) {
    const std::string& key = it.key();
    const std::string path = where + "." + key;
    if (key == "filled_with") {
      if (!it->is_string()) throw Error(Errc::kValidationError, path + ": expected a string");
      state.filled_with = it->get<std::string>();
      util::require_identifier(*state.filled_with, path);
      continue;
    }
    if (key == "color") {
      if (!it->is_string()) throw Error(Errc::kValidationError, path + ": expected a string");
      color = it->get<std::string>();
      util::require_identifier(*color, path);
      continue;
    }
    auto flag = parse_flag(key);
    if (!flag) throw Error(Errc::kValidationError, path + ": unknown state flag");
    if (!it->is_boolean()) throw Error(Errc::kValidationError, path + ": expected a boolean");
    state.set(*flag, it->get<bool>());
  }
}

util::Json location_to_json(const Location& loc) {
  switch (loc.kind) {
    case Location::Kind::kCell: return {{"cell", util::cell_json(loc.cell)}};
    case Location::Kind::kInside: return {{"in", loc.parent}};
    case Location::Kind::kOn: return {{"on", loc.parent}};
    case Location::Kind::kHeld: return {{"held", true}};
  }
  return {};
}

Location location_from_json(const util::Json& value, const std::string& where) {
  if (!value.is_object() || value.size() != 1) {
    throw Error(Errc::kValidationError,
                where + ": expected exactly one of {cell, in, on, held}");
  }
  const auto it = value.begin();
  const std::string& key = it.key();
  if (key == "cell") return Location::at(util::parse_cell(*it, where + ".cell"));
  if (key == "in" || key == "on") {
    if (!it->is_string()) throw Error(Errc::kValidationError, where + "." + key + ": expected id");
    return key == "in" ? Location::inside(it->get<std::string>())
                       : Location::on(it->get<std::string>());
  }
  if (key == "held") {
    if (!it->is_boolean() || !it->get<bool>()) {
      throw Error(Errc::kValidationError, where + ".held: expected true");
    }
    return Location::held();
  }
  throw Error(Errc::kValidationError, where + "." + key + ": unknown location kind");
}

std::vector<std::string> state_badges(const ObjectInstance& obj) {
  std::vector<std::string> out;
  for (Flag f : kAllFlags) {
    if (f == Flag::kPowered) continue;
    if (obj.state.get(f)) out.emplace_back(flag_name(f));
  }
  if (obj.state.filled_with) out.push_back("filled:" + *obj.state.filled_with);
  if (obj.color_override) out.push_back("color:" + *obj.color_override);
  return out;
}

}  // namespace arena::scene
