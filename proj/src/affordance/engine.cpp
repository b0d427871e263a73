#include "arena/affordance/engine.hpp"

#include <algorithm>

#include "arena/error.hpp"

namespace arena::affordance {

using scene::Flag;
using scene::Location;
using scene::ObjectClass;
using scene::ObjectInstance;
using scene::Occupancy;
using scene::Property;
using scene::WorldState;

namespace {

Applicability pass() { return {true, std::nullopt, "ok"}; }
Applicability fail(ResultCode code, std::string reason) { return {false, code, std::move(reason)}; }

std::string q_id(std::string_view id) { return "'" + std::string(id) + "'"; }

bool state_test_holds(const ObjectInstance& obj, const StateTest& t) {
  if (t.key == "filled") return obj.state.filled_with.has_value() == t.value;
  if (t.key == "note") return obj.note_text.has_value() == t.value;
  return obj.state.get(*scene::parse_flag(t.key)) == t.value;
}

std::string describe_test(const StateTest& t) {
  if (t.key == "filled") return t.value ? "filled" : "empty";
  if (t.key == "note") return t.value ? "a sticky note" : "not a sticky note";
  return (t.value ? "" : "not ") + t.key;
}

std::string location_string(const Location& loc) {
  switch (loc.kind) {
    case Location::Kind::kCell:
      return "cell:" + std::to_string(loc.cell.x) + "," + std::to_string(loc.cell.y);
    case Location::Kind::kInside: return "in:" + loc.parent;
    case Location::Kind::kOn: return "on:" + loc.parent;
    case Location::Kind::kHeld: return "held";
  }
  return "?";
}

std::string bool_string(bool b) { return b ? "true" : "false"; }

// Applies changes to a world while recording the observable delta.
class Mutator {
 public:
  explicit Mutator(WorldState& world) : world_(world) {}

  void set_flag(const std::string& id, Flag f, bool value) {
    ObjectInstance& obj = world_.at(id);
    if (!scene::flag_licensed(world_.class_of(obj), f)) return;
    if (value && (f == Flag::kHot || f == Flag::kCold)) {
      set_flag(id, f == Flag::kHot ? Flag::kCold : Flag::kHot, false);
    }
    if (obj.state.get(f) == value) return;
    delta_.push_back({id, std::string(scene::flag_name(f)), bool_string(!value), bool_string(value)});
    obj.state.set(f, value);
  }

  void set_fill(const std::string& id, std::optional<std::string> liquid) {
    ObjectInstance& obj = world_.at(id);
    if (obj.state.filled_with == liquid) return;
    delta_.push_back({id, "filled_with", obj.state.filled_with.value_or("none"), liquid.value_or("none")});
    obj.state.filled_with = std::move(liquid);
  }

  void set_color(const std::string& id, const std::string& color) {
    ObjectInstance& obj = world_.at(id);
    if (world_.class_of(obj).has(Property::kDecor) || obj.color_override == color) return;
    delta_.push_back({id, "color", obj.color_override.value_or("none"), color});
    obj.color_override = color;
  }

  void move(const std::string& id, Location loc) {
    ObjectInstance& obj = world_.at(id);
    delta_.push_back({id, "location", location_string(obj.location), location_string(loc)});
    if (obj.location.kind == Location::Kind::kHeld) world_.agent.held.reset();
    if (loc.kind == Location::Kind::kHeld) world_.agent.held = id;
    obj.location = std::move(loc);
  }

  void remove(const std::string& id) {
    const ObjectInstance& obj = world_.at(id);
    delta_.push_back({id, "location", location_string(obj.location), "consumed"});
    // Anything resting in or on a consumed item stays where it was.
    const Location fallback = obj.location;
    for (const std::string& child : world_.children(id)) world_.at(child).location = fallback;
    world_.objects.erase(id);
  }

  void spawn(const std::string& class_id, const std::string& parent) {
    const ObjectClass& cls = world_.catalog->at(class_id);
    const ObjectClass& pcls = world_.class_of(parent);
    ObjectInstance obj;
    obj.instance_id = next_instance_id(world_, class_id);
    obj.class_id = class_id;
    obj.location = pcls.containment == scene::Containment::kIn ? Location::inside(parent)
                                                               : Location::on(parent);
    obj.state = scene::ObjectState::defaults_for(cls);
    delta_.push_back({obj.instance_id, "location", "none", location_string(obj.location)});
    world_.objects.emplace(obj.instance_id, std::move(obj));
  }

  void set_room_power(const std::string& room, bool on) {
    if (world_.room_powered(room) == on) return;
    delta_.push_back({room, "room_power", bool_string(!on), bool_string(on)});
    world_.room_power[room] = on;
  }

  std::vector<StateChange> take() { return std::move(delta_); }

 private:
  WorldState& world_;
  std::vector<StateChange> delta_;
};

std::string room_of(const WorldState& world, std::string_view id) {
  return world.room_at(world.position(id)).value_or("");
}

bool has_child_of_class(const WorldState& world, std::string_view parent, std::string_view cls) {
  for (const std::string& c : world.children(parent)) {
    if (world.at(c).class_id == cls) return true;
  }
  return false;
}

void run_effects(const WorldState& before, Mutator& m, const DeviceBehavior& behavior,
                 const std::string& device_id) {
  for (const DeviceEffect& e : behavior.effects) {
    using T = DeviceEffect::Target;
    if (e.target == T::kAllRooms || e.target == T::kOwnRoom) {
      if (e.target == T::kAllRooms) {
        for (const auto& room : before.layout->rooms) m.set_room_power(room.name, *e.room_power);
      } else {
        m.set_room_power(room_of(before, device_id), *e.room_power);
      }
      continue;
    }
    std::vector<std::string> targets;
    if (e.target == T::kSelf) {
      targets.push_back(device_id);
    } else if (e.target == T::kContents) {
      targets = before.children(device_id);
    } else {
      for (const std::string& linked : linked_instances(before, device_id, e.linked_class)) {
        for (std::string& c : before.children(linked)) targets.push_back(std::move(c));
      }
    }
    for (const std::string& id : targets) {
      for (const auto& [flag, value] : e.set) m.set_flag(id, flag, value);
      if (e.color) m.set_color(id, *e.color);
      const ObjectInstance& obj = before.at(id);
      const ObjectClass& cls = before.class_of(obj);
      if (e.fill && cls.has(Property::kFillable) && !obj.state.filled_with &&
          !obj.state.get(Flag::kBroken)) {
        m.set_fill(id, *e.fill);
      }
      if (e.empty) m.set_fill(id, std::nullopt);
      if (e.consume_class) {
        for (const std::string& c : before.children(id)) {
          if (before.at(c).class_id == *e.consume_class) {
            m.remove(c);
            break;
          }
        }
      }
      if (e.spawn_class) m.spawn(*e.spawn_class, id);
    }
  }
}

}  // namespace

bool accessible_from(const WorldState& world, const Occupancy& occ, scene::Cell from,
                     std::string_view id) {
  if (!world.find(id) || world.held_root(id) || world.enclosed(id)) return false;
  return scene::within_reach(occ, from, world.position(id));
}

bool accessible(const WorldState& world, const Occupancy& occ, std::string_view id) {
  return accessible_from(world, occ, world.agent.cell, id);
}

const ObjectInstance* liquid_source(const WorldState& world, const Occupancy& occ) {
  for (const auto& [id, obj] : world.objects) {
    const ObjectClass* cls = world.catalog->find(obj.class_id);
    if (cls && cls->provides_liquid && accessible(world, occ, id)) return &obj;
  }
  return nullptr;
}

std::vector<std::string> linked_instances(const WorldState& world, std::string_view device_id,
                                          std::string_view class_id) {
  std::vector<std::string> out;
  const std::string room = room_of(world, device_id);
  for (const auto& [id, obj] : world.objects) {
    if (obj.class_id == class_id && id != device_id && room_of(world, id) == room) out.push_back(id);
  }
  return out;
}

std::string next_instance_id(const WorldState& world, std::string_view class_id) {
  for (int n = 1;; ++n) {
    std::string id = std::string(class_id) + "_" + std::to_string(n);
    if (!world.find(id)) return id;
  }
}

Engine::Engine(std::shared_ptr<const RuleBook> rules) : rules_(std::move(rules)) {}

std::optional<std::string> Engine::unmet_precondition(const WorldState& world,
                                                      const DeviceBehavior& behavior,
                                                      std::string_view device_id) const {
  const ObjectInstance& dev = world.at(device_id);
  const ObjectClass& cls = world.class_of(dev);
  for (const DevicePrecondition& p : behavior.preconditions) {
    using K = DevicePrecondition::Kind;
    bool ok = true;
    switch (p.kind) {
      case K::kSelfPowered:
        ok = !cls.has(Property::kPowerable) || dev.state.get(Flag::kPowered);
        break;
      case K::kRoomPower: ok = world.room_powered(room_of(world, device_id)); break;
      case K::kSelfClosed: ok = !cls.has(Property::kOpenable) || !dev.state.get(Flag::kOpen); break;
      case K::kSelfContains: ok = has_child_of_class(world, device_id, p.item_class); break;
      case K::kSelfFilled: ok = dev.state.filled_with == p.liquid; break;
      case K::kLinkedContains: {
        ok = false;
        for (const std::string& l : linked_instances(world, device_id, p.linked_class)) {
          ok = ok || has_child_of_class(world, l, p.item_class);
        }
        break;
      }
      case K::kLinkedExists: ok = !linked_instances(world, device_id, p.linked_class).empty(); break;
    }
    if (!ok) return p.describe();
  }
  return std::nullopt;
}

Applicability Engine::check(const WorldState& world, const Occupancy& occ,
                            const InteractionAction& a) const {
  const std::string verb(verb_name(a.verb));
  if (!a.well_formed()) {
    return fail(ResultCode::kUnsupported,
                verb + (verb_takes_secondary(a.verb) ? " needs a destination" : " takes no destination"));
  }
  const AffordanceRule* rule = rules_->rule(a.verb);
  if (!rule) return fail(ResultCode::kUnsupported, "no rule for " + verb);

  // existence
  const ObjectInstance* target = world.find(a.target);
  if (!target) return fail(ResultCode::kUnknownInstance, "unknown instance " + q_id(a.target));
  const ObjectClass& tcls = world.class_of(*target);

  // property
  for (Property p : rule->requires_props) {
    if (!tcls.has(p)) {
      return fail(ResultCode::kAffordanceMissing,
                  q_id(a.target) + " is not " + std::string(scene::property_name(p)));
    }
  }
  for (Property p : rule->excludes_props) {
    if (tcls.has(p)) {
      return fail(ResultCode::kAffordanceMissing,
                  verb + " does not apply to " + std::string(scene::property_name(p)) + " objects");
    }
  }
  const ObjectInstance* secondary = nullptr;
  if (a.secondary) {
    secondary = world.find(*a.secondary);
    if (!secondary) return fail(ResultCode::kUnknownInstance, "unknown instance " + q_id(*a.secondary));
    const ObjectClass& scls = world.class_of(*secondary);
    for (Property p : rule->secondary_requires) {
      if (!scls.has(p)) {
        return fail(ResultCode::kAffordanceMissing,
                    q_id(*a.secondary) + " is not " + std::string(scene::property_name(p)));
      }
    }
  }

  // range
  const bool holding_target = world.agent.held == a.target;
  switch (rule->target_access) {
    case Access::kReach:
      if (!accessible(world, occ, a.target)) {
        return fail(ResultCode::kOutOfRange, q_id(a.target) + " is out of reach");
      }
      break;
    case Access::kReachOrHeld:
      if (!holding_target && !accessible(world, occ, a.target)) {
        return fail(ResultCode::kOutOfRange, q_id(a.target) + " is out of reach");
      }
      break;
    case Access::kHeld: break;
  }
  if (secondary && *a.secondary != a.target && !accessible(world, occ, *a.secondary)) {
    return fail(ResultCode::kOutOfRange, q_id(*a.secondary) + " is out of reach");
  }
  if (rule->liquid_source && !liquid_source(world, occ)) {
    return fail(ResultCode::kOutOfRange, "no water source within reach");
  }

  // hands
  if (rule->hands_empty && world.agent.held) {
    return fail(ResultCode::kHandsFull, "already holding " + q_id(*world.agent.held));
  }
  if (rule->target_access == Access::kHeld && !holding_target) {
    if (!world.agent.held) return fail(ResultCode::kHandsEmpty, "not holding anything");
    return fail(ResultCode::kPreconditionFailed, "not holding " + q_id(a.target));
  }

  // state
  for (const StateTest& t : rule->target_state) {
    if (!state_test_holds(*target, t)) {
      return fail(ResultCode::kPreconditionFailed, q_id(a.target) + " is not " + describe_test(t));
    }
  }
  if (secondary) {
    if (*a.secondary == a.target) {
      return fail(ResultCode::kPreconditionFailed, "target and destination are the same object");
    }
    for (const StateTest& t : rule->secondary_state) {
      if (!state_test_holds(*secondary, t)) {
        return fail(ResultCode::kPreconditionFailed,
                    q_id(*a.secondary) + " is not " + describe_test(t));
      }
    }
    const ObjectClass& scls = world.class_of(*secondary);
    if (a.verb == Verb::kPlace && scls.has(Property::kOpenable) &&
        scls.containment == scene::Containment::kIn && !secondary->state.get(Flag::kOpen)) {
      return fail(ResultCode::kPreconditionFailed, q_id(*a.secondary) + " is closed");
    }
  }

  // device
  if (a.verb == Verb::kToggle && !target->state.get(Flag::kToggledOn)) {
    for (const DeviceBehavior* b : rules_->behaviors(target->class_id, Trigger::kToggleOn)) {
      if (auto unmet = unmet_precondition(world, *b, a.target)) {
        return fail(ResultCode::kPreconditionFailed,
                    "cannot turn on " + q_id(a.target) + ": precondition " + *unmet + " not met");
      }
    }
  }
  return pass();
}

Applicability Engine::applicable(const WorldState& world, const InteractionAction& action) const {
  return check(world, world.occupancy(), action);
}

ActionResult Engine::apply_in_place(WorldState& world, const InteractionAction& a) const {
  const Applicability verdict = applicable(world, a);
  ++world.tick;
  if (!verdict) return ActionResult::fail(*verdict.code, verdict.reason);

  const WorldState before = world;
  Mutator m(world);
  ActionResult result = ActionResult::ok(std::string(verb_name(a.verb)) + " " + a.target);
  const ObjectInstance& target = before.at(a.target);
  const AffordanceRule& rule = *rules_->rule(a.verb);

  switch (a.verb) {
    case Verb::kExamine: result.text = target.note_text; break;
    case Verb::kPickup: m.move(a.target, Location::held()); break;
    case Verb::kPlace: {
      const ObjectClass& scls = before.class_of(*a.secondary);
      m.move(a.target, scls.containment == scene::Containment::kIn ? Location::inside(*a.secondary)
                                                                   : Location::on(*a.secondary));
      break;
    }
    case Verb::kOpen: m.set_flag(a.target, Flag::kOpen, true); break;
    case Verb::kClose:
    {
      m.set_flag(a.target, Flag::kOpen, false);
      const WorldState snapshot = world;
      for (const DeviceBehavior* b : rules_->behaviors(target.class_id, Trigger::kClose)) {
        // Passive: a close-triggered behavior simply does nothing when unmet.
        if (!unmet_precondition(snapshot, *b, a.target)) run_effects(snapshot, m, *b, a.target);
      }
      break;
    }
    case Verb::kPour:
      m.set_fill(*a.secondary, target.state.filled_with);
      m.set_fill(a.target, std::nullopt);
      break;
    case Verb::kToggle:
      if (target.state.get(Flag::kToggledOn)) {
        m.set_flag(a.target, Flag::kToggledOn, false);
      } else {
        m.set_flag(a.target, Flag::kToggledOn, true);
        const WorldState snapshot = world;
        for (const DeviceBehavior* b : rules_->behaviors(target.class_id, Trigger::kToggleOn)) {
          run_effects(snapshot, m, *b, a.target);
        }
      }
      break;
    case Verb::kFill: {
      const ObjectInstance* src = liquid_source(before, before.occupancy());
      m.set_fill(a.target, *before.class_of(*src).provides_liquid);
      break;
    }
    case Verb::kBreak:
    case Verb::kScan:
    case Verb::kClean: break;
  }
  for (const auto& [flag, value] : rule.effects) m.set_flag(a.target, flag, value);
  result.state_delta = m.take();
  return result;
}

std::pair<WorldState, ActionResult> Engine::apply(const WorldState& world,
                                                  const InteractionAction& action) const {
  WorldState next = world;
  ActionResult r = apply_in_place(next, action);
  return {std::move(next), std::move(r)};
}

std::vector<InteractionAction> Engine::enumerate_applicable(const WorldState& world) const {
  const Occupancy occ = world.occupancy();
  std::vector<InteractionAction> out;
  for (Verb v : kAllVerbs) {
    for (const auto& [tid, tobj] : world.objects) {
      if (!verb_takes_secondary(v)) {
        InteractionAction a{v, tid, std::nullopt};
        if (check(world, occ, a)) out.push_back(std::move(a));
        continue;
      }
      for (const auto& [sid, sobj] : world.objects) {
        InteractionAction a{v, tid, sid};
        if (check(world, occ, a)) out.push_back(std::move(a));
      }
    }
  }
  return out;
}

}  // namespace arena::affordance
