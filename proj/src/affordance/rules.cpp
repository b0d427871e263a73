#include "arena/affordance/rules.hpp"

#include <algorithm>
#include <set>

#include "arena/error.hpp"
#include "arena/util/files.hpp"
#include "arena/util/json.hpp"

namespace arena::affordance {

namespace {

constexpr std::array<std::string_view, 11> kVerbNames = {
    "Examine", "Pickup", "Place", "Open", "Close", "Break", "Pour", "Toggle", "Fill", "Scan", "Clean",
};

constexpr std::array<std::string_view, 10> kResultNames = {
    "AffordanceMissing", "PreconditionFailed", "OutOfRange",       "UnknownInstance", "HandsFull",
    "HandsEmpty",        "Unsupported",        "UnknownViewpoint", "UnknownRoom",     "Unreachable",
};

using util::FieldReader;
using util::Json;

[[noreturn]] void invalid(const std::string& where, const std::string& msg) {
  throw Error(Errc::kValidationError, where + ": " + msg);
}

std::vector<scene::Property> read_props(FieldReader& r, std::string_view key) {
  std::vector<scene::Property> out;
  const Json* list = r.find(key);
  if (!list) return out;
  if (!list->is_array()) invalid(r.path(key), "expected an array");
  for (const auto& v : *list) {
    auto p = v.is_string() ? scene::parse_property(v.get<std::string>()) : std::nullopt;
    if (!p) invalid(r.path(key), "unknown property " + v.dump());
    out.push_back(*p);
  }
  return out;
}

std::vector<StateTest> read_state_tests(FieldReader& r, std::string_view key) {
  std::vector<StateTest> out;
  const Json* obj = r.find(key);
  if (!obj) return out;
  if (!obj->is_object()) invalid(r.path(key), "expected an object");
  for (auto it = obj->begin(); it != obj->end(); ++it) {
    if (it.key() != "filled" && it.key() != "note" && !scene::parse_flag(it.key())) {
      invalid(r.path(key), "unknown state key '" + it.key() + "'");
    }
    if (!it->is_boolean()) invalid(r.path(key) + "." + it.key(), "expected a boolean");
    out.push_back({it.key(), it->get<bool>()});
  }
  return out;
}

std::vector<std::pair<scene::Flag, bool>> read_assignments(const Json& obj, const std::string& where) {
  std::vector<std::pair<scene::Flag, bool>> out;
  if (!obj.is_object()) invalid(where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    auto f = scene::parse_flag(it.key());
    if (!f) invalid(where, "unknown flag '" + it.key() + "'");
    if (!it->is_boolean()) invalid(where + "." + it.key(), "expected a boolean");
    out.emplace_back(*f, it->get<bool>());
  }
  return out;
}

// A rule may only assign flags that its required properties license.
void check_licensed(const AffordanceRule& rule, const std::string& where) {
  for (const auto& [flag, value] : rule.effects) {
    const auto prop = scene::licensing_property(flag);
    bool ok;
    if (prop) {
      ok = std::find(rule.requires_props.begin(), rule.requires_props.end(), *prop) !=
           rule.requires_props.end();
    } else {
      ok = std::find(rule.excludes_props.begin(), rule.excludes_props.end(),
                     scene::Property::kDecor) != rule.excludes_props.end();
    }
    if (!ok) {
      invalid(where, "effect on '" + std::string(scene::flag_name(flag)) +
                         "' is not licensed by the rule's required properties");
    }
  }
}

Access parse_access(const std::string& s, const std::string& where) {
  if (s == "reach") return Access::kReach;
  if (s == "held") return Access::kHeld;
  if (s == "reach_or_held") return Access::kReachOrHeld;
  invalid(where, "expected reach, held or reach_or_held");
}

void require_class(const scene::Catalog& catalog, const std::string& id, const std::string& where) {
  if (!catalog.find(id)) invalid(where, "unknown class '" + id + "'");
}

DevicePrecondition parse_precondition(const Json& v, const std::string& where,
                                      const scene::Catalog& catalog) {
  FieldReader r(v, where);
  DevicePrecondition p;
  const std::string kind = r.required_string("kind");
  using K = DevicePrecondition::Kind;
  if (kind == "self_powered") {
    p.kind = K::kSelfPowered;
  } else if (kind == "room_power") {
    p.kind = K::kRoomPower;
  } else if (kind == "self_closed") {
    p.kind = K::kSelfClosed;
  } else if (kind == "self_contains") {
    p.kind = K::kSelfContains;
    p.item_class = r.required_string("item");
    require_class(catalog, p.item_class, r.path("item"));
  } else if (kind == "self_filled") {
    p.kind = K::kSelfFilled;
    p.liquid = r.required_string("liquid");
  } else if (kind == "linked_contains") {
    p.kind = K::kLinkedContains;
    p.linked_class = r.required_string("linked");
    p.item_class = r.required_string("item");
    require_class(catalog, p.linked_class, r.path("linked"));
    require_class(catalog, p.item_class, r.path("item"));
  } else if (kind == "linked_exists") {
    p.kind = K::kLinkedExists;
    p.linked_class = r.required_string("linked");
    require_class(catalog, p.linked_class, r.path("linked"));
  } else {
    invalid(r.path("kind"), "unknown precondition kind '" + kind + "'");
  }
  r.reject_unknown();
  return p;
}

DeviceEffect parse_effect(const Json& v, const std::string& where, const scene::Catalog& catalog) {
  FieldReader r(v, where);
  DeviceEffect e;
  const std::string target = r.required_string("target");
  using T = DeviceEffect::Target;
  if (target == "self") {
    e.target = T::kSelf;
  } else if (target == "contents") {
    e.target = T::kContents;
  } else if (target == "linked_contents") {
    e.target = T::kLinkedContents;
    e.linked_class = r.required_string("linked");
    require_class(catalog, e.linked_class, r.path("linked"));
  } else if (target == "all_rooms") {
    e.target = T::kAllRooms;
  } else if (target == "own_room") {
    e.target = T::kOwnRoom;
  } else {
    invalid(r.path("target"), "unknown effect target '" + target + "'");
  }
  if (const Json* set = r.find("set")) e.set = read_assignments(*set, r.path("set"));
  e.color = r.optional_string("color");
  e.fill = r.optional_string("fill");
  e.empty = r.optional_bool("empty").value_or(false);
  e.spawn_class = r.optional_string("spawn");
  e.consume_class = r.optional_string("consume");
  e.room_power = r.optional_bool("room_power");
  if (e.spawn_class) require_class(catalog, *e.spawn_class, r.path("spawn"));
  if (e.consume_class) require_class(catalog, *e.consume_class, r.path("consume"));
  const bool room_target = e.target == T::kAllRooms || e.target == T::kOwnRoom;
  if (room_target != e.room_power.has_value()) {
    invalid(where, "room_power applies exactly to room targets");
  }
  r.reject_unknown();
  return e;
}

}  // namespace

std::string_view verb_name(Verb v) { return kVerbNames[static_cast<size_t>(v)]; }

std::optional<Verb> parse_verb(std::string_view name) {
  for (size_t i = 0; i < kVerbNames.size(); ++i) {
    if (kVerbNames[i] == name) return static_cast<Verb>(i);
  }
  return std::nullopt;
}

std::string_view result_code_name(ResultCode c) { return kResultNames[static_cast<size_t>(c)]; }

std::optional<ResultCode> parse_result_code(std::string_view name) {
  for (size_t i = 0; i < kResultNames.size(); ++i) {
    if (kResultNames[i] == name) return static_cast<ResultCode>(i);
  }
  return std::nullopt;
}

std::string DevicePrecondition::describe() const {
  switch (kind) {
    case Kind::kSelfPowered: return "device_powered";
    case Kind::kRoomPower: return "room_power";
    case Kind::kSelfClosed: return "device_closed";
    case Kind::kSelfContains: return "contains:" + item_class;
    case Kind::kSelfFilled: return "filled_with:" + liquid;
    case Kind::kLinkedContains: return linked_class + "_contains:" + item_class;
    case Kind::kLinkedExists: return "linked:" + linked_class;
  }
  return "?";
}

RuleBook::RuleBook(std::vector<AffordanceRule> rules, std::vector<DeviceBehavior> devices)
    : devices_(std::move(devices)) {
  for (auto& r : rules) rules_[r.verb] = std::move(r);
}

const AffordanceRule* RuleBook::rule(Verb v) const {
  auto it = rules_.find(v);
  return it == rules_.end() ? nullptr : &it->second;
}

std::vector<const DeviceBehavior*> RuleBook::behaviors(std::string_view class_id,
                                                       Trigger trigger) const {
  std::vector<const DeviceBehavior*> out;
  for (const auto& d : devices_) {
    if (d.device_class_id == class_id && d.trigger == trigger) out.push_back(&d);
  }
  return out;
}

std::vector<std::string> RuleBook::effect_colors() const {
  std::set<std::string> out;
  for (const auto& d : devices_)
    for (const auto& e : d.effects)
      if (e.color) out.insert(*e.color);
  return {out.begin(), out.end()};
}

RuleBook parse_rules(std::string_view text, const scene::Catalog& catalog) {
  const Json doc = util::parse_json(text, "rules");
  FieldReader root(doc, "rules");

  std::vector<AffordanceRule> rules;
  std::set<Verb> seen;
  const Json& list = root.required_array("interactions");
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string where = "interactions[" + std::to_string(i) + "]";
    FieldReader r(list[i], where);
    AffordanceRule rule;
    const std::string verb = r.required_string("verb");
    auto v = parse_verb(verb);
    if (!v) invalid(r.path("verb"), "unknown verb '" + verb + "'");
    if (!seen.insert(*v).second) invalid(r.path("verb"), "duplicate rule for " + verb);
    rule.verb = *v;
    rule.requires_props = read_props(r, "requires");
    rule.excludes_props = read_props(r, "excludes");
    rule.target_access = parse_access(r.required_string("target"), r.path("target"));
    if (auto hands = r.optional_string("hands")) {
      if (*hands != "empty" && *hands != "any") invalid(r.path("hands"), "expected empty or any");
      rule.hands_empty = *hands == "empty";
    }
    rule.target_state = read_state_tests(r, "target_state");
    rule.secondary_requires = read_props(r, "secondary_requires");
    rule.secondary_state = read_state_tests(r, "secondary_state");
    rule.liquid_source = r.optional_bool("liquid_source").value_or(false);
    if (const Json* eff = r.find("effects")) rule.effects = read_assignments(*eff, r.path("effects"));
    r.reject_unknown();
    if (verb_takes_secondary(rule.verb) && rule.secondary_requires.empty()) {
      invalid(where, verb + " needs secondary_requires");
    }
    check_licensed(rule, where);
    rules.push_back(std::move(rule));
  }
  for (Verb v : kAllVerbs) {
    if (!seen.contains(v)) invalid("interactions", "missing rule for " + std::string(verb_name(v)));
  }

  std::vector<DeviceBehavior> devices;
  if (const Json* dev = root.find("devices")) {
    for (size_t i = 0; i < dev->size(); ++i) {
      const std::string where = "devices[" + std::to_string(i) + "]";
      FieldReader r((*dev)[i], where);
      DeviceBehavior d;
      d.device_class_id = r.required_string("device");
      const scene::ObjectClass* cls = catalog.find(d.device_class_id);
      if (!cls) invalid(r.path("device"), "unknown class '" + d.device_class_id + "'");
      const std::string trigger = r.required_string("trigger");
      if (trigger == "toggle_on") {
        d.trigger = Trigger::kToggleOn;
        if (!cls->has(scene::Property::kToggleable)) invalid(where, "toggle_on device is not toggleable");
      } else if (trigger == "close") {
        d.trigger = Trigger::kClose;
        if (!cls->has(scene::Property::kOpenable)) invalid(where, "close device is not openable");
      } else {
        invalid(r.path("trigger"), "expected toggle_on or close");
      }
      const Json& pre = r.required_array("preconditions");
      for (size_t k = 0; k < pre.size(); ++k) {
        d.preconditions.push_back(
            parse_precondition(pre[k], where + ".preconditions[" + std::to_string(k) + "]", catalog));
      }
      const Json& eff = r.required_array("effects");
      for (size_t k = 0; k < eff.size(); ++k) {
        d.effects.push_back(parse_effect(eff[k], where + ".effects[" + std::to_string(k) + "]", catalog));
      }
      r.reject_unknown();
      devices.push_back(std::move(d));
    }
  }
  root.reject_unknown({"rules_version"});
  return RuleBook(std::move(rules), std::move(devices));
}

RuleBook load_rules(const std::filesystem::path& path, const scene::Catalog& catalog) {
  return parse_rules(util::read_file(path), catalog);
}

}  // namespace arena::affordance
