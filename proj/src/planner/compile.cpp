#include "arena/planner/compile.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "arena/error.hpp"
#include "arena/nav/nav.hpp"

namespace arena::planner {

using affordance::Access;
using affordance::DeviceBehavior;
using affordance::DeviceEffect;
using affordance::DevicePrecondition;
using affordance::Trigger;
using affordance::Verb;
using scene::Cell;
using scene::Flag;
using scene::Location;
using scene::ObjectClass;
using scene::ObjectInstance;
using scene::Property;
using scene::WorldState;

namespace {

constexpr size_t kMaxCandidates = 8;

[[noreturn]] void compile_error(const std::string& what) { throw Error(Errc::kCompileError, what); }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

struct PlaceInfo {
  std::string name;
  Cell cell;
};

// One way an object can be accessible from a place.
struct AccessOpt {
  std::vector<FluentId> pre;
  std::optional<FluentId> loc;  // the object's own location fluent
  std::string parent;           // direct parent, empty for floor / fixtures
  std::string via;              // movable grandparent chain member, if any
  std::string label;
};

// Pending changes of one operator, mirroring the engine's mutator order.
struct Effects {
  std::vector<std::pair<std::pair<std::string, Flag>, bool>> flags;
  std::map<std::string, std::optional<std::string>> fills;
  std::map<std::string, std::string> colors;
  std::set<std::string> rooms_powered;
  std::vector<std::string> consumed;
  std::vector<std::string> spawned;
};

class Grounder {
 public:
  Grounder(const cdf::CDF& mission, const Resources& res)
      : cdf_(mission), res_(res), w0_(cdf::build_world(mission, res)), occ_(w0_.occupancy()) {}

  PlanningProblem run();

 private:
  // --- object model -------------------------------------------------------
  const ObjectInstance* obj(const std::string& id) const {
    if (const ObjectInstance* o = w0_.find(id)) return o;
    auto it = proto_.find(id);
    return it == proto_.end() ? nullptr : &it->second;
  }
  const ObjectClass& cls(const std::string& id) const { return res_.catalog->at(obj(id)->class_id); }
  bool movable(const std::string& id) const { return cls(id).has(Property::kPickupable); }
  bool receptacle(const std::string& id) const { return cls(id).has(Property::kReceptacle); }
  bool closable_in(const std::string& id) const {
    const ObjectClass& c = cls(id);
    return c.has(Property::kOpenable) && c.containment == scene::Containment::kIn;
  }
  std::string link_pred(const std::string& r) const {
    return cls(r).containment == scene::Containment::kIn ? "in" : "on";
  }
  bool tracked(const std::string& r) const { return cand_.contains(r); }
  bool candidate(const std::string& x, const std::string& r) const {
    auto it = cand_.find(r);
    return it != cand_.end() && std::binary_search(it->second.begin(), it->second.end(), x);
  }
  bool initial_parent(const std::string& x, const std::string& r) const {
    const ObjectInstance* o = w0_.find(x);
    return o && o->location.has_parent() && o->location.parent == r;
  }
  bool link_allowed(const std::string& x, const std::string& r) const {
    if (x == r || !receptacle(r)) return false;
    if (initial_parent(x, r)) return true;
    if (auto it = spawn_device_.find(x); it != spawn_device_.end() && it->second == r) return true;
    return !tracked(r) || candidate(x, r);
  }

  // --- fluents ------------------------------------------------------------
  FluentId F(const std::string& pred, std::vector<std::string> args = {}) {
    return b_.fluent(pred, std::move(args));
  }
  FluentId at_vp(const PlaceInfo& p) { return F("at-vp", {p.name}); }
  FluentId link(const std::string& x, const std::string& r) { return F(link_pred(r), {x, r}); }
  FluentId flag(const std::string& x, Flag f, bool v) {
    const std::string n(scene::flag_name(f));
    return F(v ? n : "not-" + n, {x});
  }
  // Precondition for a state test; nullopt when it always holds.
  // Sets `impossible` when it can never hold.
  std::optional<FluentId> flag_test(const std::string& x, Flag f, bool v, bool& impossible) {
    if (!scene::flag_licensed(cls(x), f)) {
      if (v) impossible = true;
      return std::nullopt;
    }
    return flag(x, f, v);
  }

  // --- access -------------------------------------------------------------
  std::optional<std::vector<FluentId>> static_chain(const std::string& x);
  std::vector<AccessOpt> fixture_options(const std::string& x, const PlaceInfo& p);
  std::vector<AccessOpt> depth1_options(const std::string& x, const PlaceInfo& p);
  const std::vector<AccessOpt>& reach_options(const std::string& x, size_t place);
  AccessOpt held_option(const std::string& x) {
    return {{F("holding", {x})}, std::nullopt, "", "", "held"};
  }
  std::optional<std::string> liquid_at(const PlaceInfo& p) const;

  // --- operators ----------------------------------------------------------
  void setup();
  void ground_goto();
  void ground_place();
  void ground_simple(Verb v);
  void ground_pour();
  void ground_goals();

  struct Variant {
    std::vector<FluentId> pre;
    Effects fx;
    std::string label;
  };
  std::vector<Variant> device_variants(const std::string& d, Trigger trigger);

  void set_flag(Effects& fx, const std::string& id, Flag f, bool v) const;
  void emit(std::string name, std::vector<FluentId> pre, std::vector<FluentId> add,
            std::vector<FluentId> del, const Effects& fx);
  void finish_effects(Operator& op, const Effects& fx);
  void post_pass();

  const cdf::CDF& cdf_;
  const Resources& res_;
  WorldState w0_;
  scene::Occupancy occ_;
  ProblemBuilder b_;

  std::vector<PlaceInfo> places_;
  std::vector<std::string> ids_;         // every object id incl. predicted spawns, sorted
  std::vector<std::string> receptacles_;
  std::map<std::string, ObjectInstance> proto_;
  std::map<std::string, std::string> spawn_device_;  // spawn id -> device
  std::map<std::string, std::string> device_spawn_;
  std::map<std::string, std::vector<std::string>> cand_;
  std::set<std::string> palette_;
  std::set<std::string> liquids_;
  std::map<std::pair<std::string, size_t>, std::vector<AccessOpt>> reach_cache_;
  std::vector<std::pair<size_t, std::string>> consumes_, spawns_;
  std::vector<std::string> goal_objects_;
};

void Grounder::set_flag(Effects& fx, const std::string& id, Flag f, bool v) const {
  if (!scene::flag_licensed(cls(id), f)) return;
  if (v && (f == Flag::kHot || f == Flag::kCold)) set_flag(fx, id, f == Flag::kHot ? Flag::kCold : Flag::kHot, false);
  fx.flags.push_back({{id, f}, v});
}

std::optional<std::vector<FluentId>> Grounder::static_chain(const std::string& x) {
  std::vector<FluentId> pre;
  const ObjectInstance* cur = w0_.find(x);
  for (size_t guard = 0; cur && cur->location.has_parent() && guard <= w0_.objects.size(); ++guard) {
    const ObjectInstance* parent = w0_.find(cur->location.parent);
    if (!parent || movable(parent->instance_id)) return std::nullopt;
    if (cur->location.kind == Location::Kind::kInside && closable_in(parent->instance_id)) {
      pre.push_back(F("open", {parent->instance_id}));
    }
    cur = parent;
  }
  if (!cur || cur->location.kind != Location::Kind::kCell) return std::nullopt;
  return pre;
}

std::vector<AccessOpt> Grounder::fixture_options(const std::string& x, const PlaceInfo& p) {
  auto chain = static_chain(x);
  if (!chain || !scene::within_reach(occ_, p.cell, w0_.position(x))) return {};
  return {AccessOpt{*chain, std::nullopt, "", "", "fix"}};
}

// Floor or a fixture parent; no movable in the chain.
std::vector<AccessOpt> Grounder::depth1_options(const std::string& x, const PlaceInfo& p) {
  std::vector<AccessOpt> out;
  const ObjectInstance* o = w0_.find(x);
  if (o && o->location.kind == Location::Kind::kCell && scene::within_reach(occ_, p.cell, o->location.cell)) {
    const FluentId f = F("on-floor", {x});
    out.push_back({{f}, f, "", "", "floor"});
  }
  for (const std::string& r : receptacles_) {
    if (movable(r) || !link_allowed(x, r)) continue;
    for (AccessOpt base : fixture_options(r, p)) {
      const FluentId f = link(x, r);
      base.pre.insert(base.pre.begin(), f);
      if (closable_in(r)) base.pre.push_back(F("open", {r}));
      base.loc = f;
      base.parent = r;
      base.label = link_pred(r) + "_" + r;
      out.push_back(std::move(base));
    }
  }
  return out;
}

const std::vector<AccessOpt>& Grounder::reach_options(const std::string& x, size_t place) {
  const auto key = std::make_pair(x, place);
  if (auto it = reach_cache_.find(key); it != reach_cache_.end()) return it->second;
  const PlaceInfo& p = places_[place];
  std::vector<AccessOpt> out;
  if (!movable(x)) {
    out = fixture_options(x, p);
  } else {
    out = depth1_options(x, p);
    for (const std::string& r : receptacles_) {
      if (!movable(r) || !link_allowed(x, r)) continue;
      for (const AccessOpt& inner : depth1_options(r, p)) {
        if (inner.parent == x) continue;
        AccessOpt o;
        const FluentId f = link(x, r);
        o.pre.push_back(f);
        if (closable_in(r)) o.pre.push_back(F("open", {r}));
        o.pre.insert(o.pre.end(), inner.pre.begin(), inner.pre.end());
        o.loc = f;
        o.parent = r;
        o.via = r;
        o.label = link_pred(r) + "_" + r + "-" + inner.label;
        out.push_back(std::move(o));
      }
    }
  }
  return reach_cache_.emplace(key, std::move(out)).first->second;
}

std::optional<std::string> Grounder::liquid_at(const PlaceInfo& p) const {
  // Sources are fixtures (checked in setup), so the first accessible one by id is static.
  for (const auto& [id, o] : w0_.objects) {
    const ObjectClass& c = w0_.class_of(o);
    if (c.provides_liquid && affordance::accessible_from(w0_, occ_, p.cell, id)) return c.provides_liquid;
  }
  return std::nullopt;
}

void Grounder::setup() {
  const auto& layout = *w0_.layout;
  std::optional<std::string> start_vp;
  for (const auto& v : layout.viewpoints) {
    if (v.cell == w0_.agent.cell && !start_vp) start_vp = v.name;
  }
  std::vector<PlaceInfo> vps;
  for (const auto& v : layout.viewpoints) vps.push_back({v.name, v.cell});
  std::sort(vps.begin(), vps.end(), [](const PlaceInfo& a, const PlaceInfo& b) { return a.name < b.name; });
  places_ = vps;
  if (!start_vp) places_.push_back({std::string(kStartPlace), w0_.agent.cell});

  for (const auto& [id, o] : w0_.objects) {
    const ObjectClass& c = w0_.class_of(o);
    if (c.provides_liquid && (c.has(Property::kPickupable) || !static_chain(id) || !static_chain(id)->empty())) {
      compile_error("liquid source '" + id + "' must be a fixed, uncovered fixture");
    }
    if (!c.has(Property::kPickupable) && o.location.has_parent() && !static_chain(id)) {
      compile_error("fixture '" + id + "' rests on a movable object");
    }
  }

  // Spawn prediction: one spawn per device, only when a single device can spawn the class.
  std::map<std::string, std::vector<std::string>> spawners;
  for (const auto& [id, o] : w0_.objects) {
    for (Trigger t : {Trigger::kToggleOn, Trigger::kClose}) {
      for (const DeviceBehavior* b : res_.rules->behaviors(o.class_id, t)) {
        for (const DeviceEffect& e : b->effects) {
          if (e.spawn_class) spawners[*e.spawn_class].push_back(id);
          if (e.consume_class && res_.catalog->at(*e.consume_class).has(Property::kReceptacle)) {
            compile_error("consumed class '" + *e.consume_class + "' may hold other objects");
          }
          if ((e.spawn_class || e.consume_class) && e.target != DeviceEffect::Target::kSelf) {
            compile_error("spawn and consume effects must target the device itself");
          }
        }
      }
    }
  }
  for (auto& [k, devices] : spawners) {
    std::sort(devices.begin(), devices.end());
    devices.erase(std::unique(devices.begin(), devices.end()), devices.end());
    if (devices.size() != 1) continue;
    const std::string& d = devices.front();
    ObjectInstance t;
    t.instance_id = affordance::next_instance_id(w0_, k);
    t.class_id = k;
    t.location = w0_.class_of(d).containment == scene::Containment::kIn ? Location::inside(d) : Location::on(d);
    t.state = scene::ObjectState::defaults_for(res_.catalog->at(k));
    spawn_device_[t.instance_id] = d;
    device_spawn_[d] = t.instance_id;
    proto_.emplace(t.instance_id, std::move(t));
  }

  for (const auto& [id, o] : w0_.objects) ids_.push_back(id);
  for (const auto& [id, o] : proto_) ids_.push_back(id);
  std::sort(ids_.begin(), ids_.end());
  for (const auto& id : ids_) {
    if (receptacle(id)) receptacles_.push_back(id);
  }

  // Goal objects.
  for (const auto& g : cdf_.goals) {
    if (!g.class_level()) {
      goal_objects_.push_back(g.object);
      continue;
    }
    std::vector<std::string> match;
    for (const auto& id : ids_) {
      if (obj(id)->class_id == g.object_class) match.push_back(id);
    }
    if (match.size() != 1) {
      compile_error("class goal on '" + g.object_class + "' needs exactly one instance, found " +
                    std::to_string(match.size()));
    }
    goal_objects_.push_back(match.front());
  }

  // Tracked receptacles and their candidate contents.
  std::set<std::string> needed_classes;
  std::set<std::string> track;
  for (const auto& [id, o] : w0_.objects) {
    for (Trigger t : {Trigger::kToggleOn, Trigger::kClose}) {
      for (const DeviceBehavior* b : res_.rules->behaviors(o.class_id, t)) {
        for (const DevicePrecondition& pc : b->preconditions) {
          if (!pc.item_class.empty()) needed_classes.insert(pc.item_class);
        }
        for (const DeviceEffect& e : b->effects) {
          using T = DeviceEffect::Target;
          if (e.consume_class) needed_classes.insert(*e.consume_class);
          if (e.target == T::kContents || e.consume_class || e.spawn_class) {
            if (w0_.class_of(o).has(Property::kReceptacle)) track.insert(id);
          }
          if (e.target == T::kLinkedContents) {
            for (const auto& l : affordance::linked_instances(w0_, id, e.linked_class)) {
              if (receptacle(l)) track.insert(l);
            }
          }
          if (e.color) palette_.insert(*e.color);
        }
      }
    }
  }
  for (const std::string& r : track) {
    std::set<std::string> c;
    for (const auto& g : goal_objects_) {
      if (movable(g)) c.insert(g);
    }
    for (const auto& id : ids_) {
      if (movable(id) && needed_classes.contains(obj(id)->class_id)) c.insert(id);
      if (movable(id) && initial_parent(id, r)) c.insert(id);
    }
    if (auto it = device_spawn_.find(r); it != device_spawn_.end()) c.insert(it->second);
    c.erase(r);
    if (c.size() > kMaxCandidates) {
      compile_error("too many candidate contents for '" + r + "' (" + std::to_string(c.size()) + ")");
    }
    cand_[r] = {c.begin(), c.end()};
  }
  for (const auto& g : cdf_.goals) {
    if (g.predicate == cdf::Predicate::kColored) palette_.insert(g.color);
    if (g.predicate == cdf::Predicate::kFilled && g.liquid) liquids_.insert(*g.liquid);
  }
  for (const auto& [id, o] : w0_.objects) {
    if (o.state.filled_with) liquids_.insert(*o.state.filled_with);
    if (auto l = w0_.class_of(o).provides_liquid) liquids_.insert(*l);
    for (Trigger t : {Trigger::kToggleOn, Trigger::kClose}) {
      for (const DeviceBehavior* b : res_.rules->behaviors(o.class_id, t)) {
        for (const DevicePrecondition& pc : b->preconditions) {
          if (!pc.liquid.empty()) liquids_.insert(pc.liquid);
        }
        for (const DeviceEffect& e : b->effects) {
          if (e.fill) liquids_.insert(*e.fill);
        }
      }
    }
  }
}

void Grounder::emit(std::string name, std::vector<FluentId> pre, std::vector<FluentId> add,
                    std::vector<FluentId> del, const Effects& fx) {
  Operator op{std::move(name), std::move(pre), std::move(add), std::move(del)};
  finish_effects(op, fx);
  const size_t index = b_.operators().size();
  for (const auto& c : fx.consumed) consumes_.push_back({index, c});
  for (const auto& s : fx.spawned) spawns_.push_back({index, s});
  b_.add_operator(std::move(op));
}

void Grounder::finish_effects(Operator& op, const Effects& fx) {
  std::map<std::pair<std::string, Flag>, bool> final_flags;
  for (const auto& [key, v] : fx.flags) final_flags[key] = v;
  for (const auto& [key, v] : final_flags) {
    op.add.push_back(flag(key.first, key.second, v));
    op.del.push_back(flag(key.first, key.second, !v));
  }
  for (const auto& [id, liquid] : fx.fills) {
    for (const std::string& l : liquids_) {
      if (l != liquid) op.del.push_back(F("filled", {id, l}));
    }
    if (liquid) {
      op.add.push_back(F("filled", {id, *liquid}));
      op.del.push_back(F("empty", {id}));
    } else {
      op.add.push_back(F("empty", {id}));
    }
  }
  for (const auto& [id, color] : fx.colors) {
    std::set<std::string> others = palette_;
    others.insert(cdf::effective_color(w0_, *obj(id)));
    for (const auto& c : others) {
      if (c != color) op.del.push_back(F("color", {id, c}));
    }
    op.add.push_back(F("color", {id, color}));
  }
  for (const auto& r : fx.rooms_powered) op.add.push_back(F("room-power", {r}));
}

void Grounder::ground_goto() {
  for (const PlaceInfo& u : places_) {
    for (const PlaceInfo& v : places_) {
      if (v.name == kStartPlace || u.name == v.name) continue;
      if (!nav::find_path(occ_, u.cell, v.cell)) continue;
      emit("goto--" + v.name + "---from_" + u.name, {at_vp(u)}, {at_vp(v)}, {at_vp(u)}, {});
    }
  }
}

namespace {

bool props_ok(const ObjectClass& c, const std::vector<Property>& requires_props,
              const std::vector<Property>& excludes_props) {
  for (Property p : requires_props) {
    if (!c.has(p)) return false;
  }
  for (Property p : excludes_props) {
    if (c.has(p)) return false;
  }
  return true;
}

}  // namespace

// Single-target verbs. Examine has no effect on planning state and is not grounded.
void Grounder::ground_simple(Verb v) {
  const affordance::AffordanceRule& rule = *res_.rules->rule(v);
  const std::string verb = lower(affordance::verb_name(v));
  for (const std::string& x : ids_) {
    const ObjectClass& c = cls(x);
    if (!props_ok(c, rule.requires_props, rule.excludes_props)) continue;

    std::vector<FluentId> state_pre;
    bool impossible = false;
    for (const auto& t : rule.target_state) {
      if (t.key == "note" || (t.key == "filled" && t.value)) {
        impossible = true;
      } else if (t.key == "filled") {
        state_pre.push_back(F("empty", {x}));
      } else if (auto f = flag_test(x, *scene::parse_flag(t.key), t.value, impossible)) {
        state_pre.push_back(*f);
      }
    }
    if (impossible) continue;

    // Verb-specific outcomes, each with its own extra preconditions.
    std::vector<Variant> variants;
    if (v == Verb::kToggle) {
      Variant off{{flag(x, Flag::kToggledOn, true)}, {}, "off"};
      set_flag(off.fx, x, Flag::kToggledOn, false);
      variants.push_back(std::move(off));
      const bool has_behaviors = !res_.rules->behaviors(c.class_id, Trigger::kToggleOn).empty();
      std::vector<Variant> on = has_behaviors ? device_variants(x, Trigger::kToggleOn)
                                              : std::vector<Variant>{Variant{}};
      for (Variant& var : on) {
        var.pre.push_back(flag(x, Flag::kToggledOn, false));
        set_flag(var.fx, x, Flag::kToggledOn, true);
        var.label = var.label.empty() ? "on" : "on-" + var.label;
        variants.push_back(std::move(var));
      }
    } else if (v == Verb::kClose) {
      const bool has_behaviors = !res_.rules->behaviors(c.class_id, Trigger::kClose).empty();
      std::vector<Variant> closes{Variant{}};
      if (has_behaviors) {
        std::vector<Variant> active = device_variants(x, Trigger::kClose);
        if (!active.empty()) closes = std::move(active);
      }
      for (Variant& var : closes) {
        set_flag(var.fx, x, Flag::kOpen, false);
        variants.push_back(std::move(var));
      }
    } else {
      Variant plain;
      if (v == Verb::kOpen) set_flag(plain.fx, x, Flag::kOpen, true);
      variants.push_back(std::move(plain));
    }
    for (Variant& var : variants) {
      for (const auto& [f, val] : rule.effects) set_flag(var.fx, x, f, val);
    }

    auto make = [&](const std::optional<size_t>& place, const AccessOpt& opt) {
      std::optional<std::string> liquid;
      if (rule.liquid_source) {
        if (!place) return;
        liquid = liquid_at(places_[*place]);
        if (!liquid) return;
      }
      for (const Variant& var : variants) {
        std::vector<FluentId> pre = state_pre;
        pre.insert(pre.end(), opt.pre.begin(), opt.pre.end());
        pre.insert(pre.end(), var.pre.begin(), var.pre.end());
        std::vector<std::string> tokens;
        if (place) {
          pre.push_back(at_vp(places_[*place]));
          tokens.push_back(places_[*place].name);
        }
        tokens.push_back(opt.label);
        if (!var.label.empty()) tokens.push_back(var.label);
        std::vector<FluentId> add, del;
        Effects fx = var.fx;
        if (rule.hands_empty) pre.push_back(F("handempty"));
        if (v == Verb::kPickup) {
          add.push_back(F("holding", {x}));
          del.push_back(F("handempty"));
          if (opt.loc) del.push_back(*opt.loc);
          if (!opt.parent.empty() && tracked(opt.parent)) add.push_back(F("not-in", {x, opt.parent}));
        }
        if (v == Verb::kFill) fx.fills[x] = liquid;
        emit(verb + "--" + x + "---" + join(tokens, "-"), std::move(pre), std::move(add), std::move(del), fx);
      }
    };

    const bool reach = rule.target_access != Access::kHeld;
    const bool held = rule.target_access != Access::kReach && movable(x);
    for (size_t i = 0; i < places_.size(); ++i) {
      if (reach) {
        for (const AccessOpt& opt : reach_options(x, i)) make(i, opt);
      }
      if (held && rule.liquid_source) make(i, held_option(x));
    }
    if (held && !rule.liquid_source) make(std::nullopt, held_option(x));
  }
}

void Grounder::ground_place() {
  const affordance::AffordanceRule& rule = *res_.rules->rule(Verb::kPlace);
  for (const std::string& x : ids_) {
    if (!props_ok(cls(x), rule.requires_props, rule.excludes_props) || !movable(x)) continue;
    for (const std::string& r : receptacles_) {
      if (!link_allowed(x, r) || !props_ok(cls(r), rule.secondary_requires, {})) continue;
      std::vector<FluentId> state_pre;
      bool impossible = false;
      for (const auto& t : rule.secondary_state) {
        if (auto f = flag_test(r, *scene::parse_flag(t.key), t.value, impossible)) state_pre.push_back(*f);
      }
      if (impossible) continue;
      if (closable_in(r)) state_pre.push_back(F("open", {r}));
      for (size_t i = 0; i < places_.size(); ++i) {
        for (const AccessOpt& opt : reach_options(r, i)) {
          if (opt.parent == x || opt.via == x) continue;
          std::vector<FluentId> pre = state_pre;
          pre.push_back(at_vp(places_[i]));
          pre.push_back(F("holding", {x}));
          pre.insert(pre.end(), opt.pre.begin(), opt.pre.end());
          std::vector<FluentId> add{link(x, r), F("handempty")};
          std::vector<FluentId> del{F("holding", {x})};
          if (tracked(r)) del.push_back(F("not-in", {x, r}));
          emit("place--" + x + "--" + r + "---" + places_[i].name + "-" + opt.label, std::move(pre),
               std::move(add), std::move(del), {});
        }
      }
    }
  }
}

void Grounder::ground_pour() {
  const affordance::AffordanceRule& rule = *res_.rules->rule(Verb::kPour);
  for (const std::string& x : ids_) {
    if (!props_ok(cls(x), rule.requires_props, rule.excludes_props) || !movable(x)) continue;
    for (const std::string& y : ids_) {
      if (y == x || !props_ok(cls(y), rule.secondary_requires, {})) continue;
      std::vector<FluentId> state_pre;
      bool impossible = false;
      for (const auto& t : rule.secondary_state) {
        if (t.key == "filled") {
          if (t.value) impossible = true;
          else state_pre.push_back(F("empty", {y}));
        } else if (auto f = flag_test(y, *scene::parse_flag(t.key), t.value, impossible)) {
          state_pre.push_back(*f);
        }
      }
      for (const auto& t : rule.target_state) {
        if (t.key == "filled") continue;  // handled per liquid below
        if (auto f = flag_test(x, *scene::parse_flag(t.key), t.value, impossible)) state_pre.push_back(*f);
      }
      if (impossible) continue;
      for (size_t i = 0; i < places_.size(); ++i) {
        for (const AccessOpt& opt : reach_options(y, i)) {
          if (opt.parent == x || opt.via == x) continue;
          for (const std::string& l : liquids_) {
            std::vector<FluentId> pre = state_pre;
            pre.push_back(at_vp(places_[i]));
            pre.push_back(F("holding", {x}));
            pre.push_back(F("filled", {x, l}));
            pre.insert(pre.end(), opt.pre.begin(), opt.pre.end());
            Effects fx;
            fx.fills[y] = l;
            fx.fills[x] = std::nullopt;
            emit("pour--" + x + "--" + y + "---" + places_[i].name + "-" + opt.label + "-" + l,
                 std::move(pre), {}, {}, fx);
          }
        }
      }
    }
  }
}

std::vector<Grounder::Variant> Grounder::device_variants(const std::string& d, Trigger trigger) {
  using K = DevicePrecondition::Kind;
  using T = DeviceEffect::Target;
  const ObjectClass& dc = cls(d);
  const auto behaviors = res_.rules->behaviors(dc.class_id, trigger);
  const std::string room = w0_.room_at(w0_.position(d)).value_or("");

  // Receptacles whose exact contents this firing depends on.
  std::vector<std::string> tr;
  auto want = [&](const std::string& r) {
    if (tracked(r) && std::find(tr.begin(), tr.end(), r) == tr.end()) tr.push_back(r);
  };
  for (const DeviceBehavior* b : behaviors) {
    for (const DevicePrecondition& pc : b->preconditions) {
      if (pc.kind == K::kSelfContains) want(d);
      if (pc.kind == K::kLinkedContains) {
        for (const auto& l : affordance::linked_instances(w0_, d, pc.linked_class)) want(l);
      }
      if (pc.kind == K::kLinkedExists &&
          affordance::linked_instances(w0_, d, pc.linked_class).empty()) {
        return {};
      }
      if (pc.kind == K::kSelfPowered && dc.has(Property::kPowerable) && trigger == Trigger::kClose &&
          !w0_.at(d).state.get(Flag::kPowered)) {
        return {};  // a passive behavior that can never fire
      }
    }
    for (const DeviceEffect& e : b->effects) {
      if (e.target == T::kContents || e.consume_class || e.spawn_class) want(d);
      if (e.target == T::kLinkedContents) {
        for (const auto& l : affordance::linked_instances(w0_, d, e.linked_class)) want(l);
      }
    }
  }
  std::map<std::string, std::vector<std::string>> fixed_children;
  for (const auto& r : tr) {
    for (const auto& c : w0_.children(r)) {
      if (!movable(c)) fixed_children[r].push_back(c);
    }
  }

  std::vector<Variant> out;
  std::vector<size_t> masks(tr.size(), 0);
  std::function<void(size_t)> enumerate = [&](size_t k) {
    if (k < tr.size()) {
      const size_t n = cand_.at(tr[k]).size();
      for (size_t m = 0; m < (size_t{1} << n); ++m) {
        masks[k] = m;
        enumerate(k + 1);
      }
      return;
    }
    std::map<std::string, std::vector<std::string>> contents;
    Variant base;
    std::vector<std::string> tokens;
    for (size_t i = 0; i < tr.size(); ++i) {
      const auto& cands = cand_.at(tr[i]);
      std::vector<std::string> s = fixed_children[tr[i]];
      std::vector<std::string> chosen;
      for (size_t j = 0; j < cands.size(); ++j) {
        if (masks[i] >> j & 1) {
          s.push_back(cands[j]);
          chosen.push_back(cands[j]);
          base.pre.push_back(link(cands[j], tr[i]));
        } else {
          base.pre.push_back(F("not-in", {cands[j], tr[i]}));
        }
      }
      std::sort(s.begin(), s.end());
      contents[tr[i]] = std::move(s);
      tokens.push_back(tr[i] + "_" + (chosen.empty() ? "none" : join(chosen, "_")));
    }
    auto contents_of = [&](const std::string& r) -> const std::vector<std::string>& {
      static const std::vector<std::string> kNone;
      auto it = contents.find(r);
      return it == contents.end() ? kNone : it->second;
    };
    auto has_class = [&](const std::string& r, const std::string& k) {
      for (const auto& c : contents_of(r)) {
        if (obj(c)->class_id == k) return true;
      }
      return false;
    };

    // Alternatives for existence preconditions on untracked receptacles.
    std::vector<std::pair<std::vector<FluentId>, std::string>> alts{{{}, ""}};
    auto branch = [&](const std::vector<std::pair<FluentId, std::string>>& options) {
      std::vector<std::pair<std::vector<FluentId>, std::string>> next;
      for (const auto& [pre, label] : alts) {
        for (const auto& [f, l] : options) {
          auto p = pre;
          p.push_back(f);
          next.push_back({std::move(p), label.empty() ? l : label + "-" + l});
        }
      }
      alts = std::move(next);
    };
    auto containing = [&](const std::string& r, const std::string& k) {
      std::vector<std::pair<FluentId, std::string>> options;
      for (const auto& c : ids_) {
        if (obj(c)->class_id == k && movable(c) && link_allowed(c, r)) {
          options.push_back({link(c, r), "with_" + c});
        }
      }
      return options;
    };
    for (const DeviceBehavior* b : behaviors) {
      for (const DevicePrecondition& pc : b->preconditions) {
        switch (pc.kind) {
          case K::kSelfPowered:
            if (dc.has(Property::kPowerable)) base.pre.push_back(F("device-ready", {d}));
            break;
          case K::kRoomPower: base.pre.push_back(F("room-power", {room})); break;
          case K::kSelfClosed:
            if (dc.has(Property::kOpenable) && trigger != Trigger::kClose) {
              base.pre.push_back(flag(d, Flag::kOpen, false));
            }
            break;
          case K::kSelfFilled:
            if (!dc.has(Property::kFillable)) return;
            base.pre.push_back(F("filled", {d, pc.liquid}));
            break;
          case K::kSelfContains:
            if (tracked(d)) {
              if (!has_class(d, pc.item_class)) return;
            } else {
              auto options = containing(d, pc.item_class);
              if (options.empty()) return;
              branch(options);
            }
            break;
          case K::kLinkedContains: {
            bool satisfied = false;
            std::vector<std::pair<FluentId, std::string>> options;
            for (const auto& l : affordance::linked_instances(w0_, d, pc.linked_class)) {
              if (tracked(l)) {
                satisfied = satisfied || has_class(l, pc.item_class);
              } else {
                auto more = containing(l, pc.item_class);
                options.insert(options.end(), more.begin(), more.end());
              }
            }
            if (satisfied) break;
            if (options.empty()) return;
            branch(options);
            break;
          }
          case K::kLinkedExists: break;  // checked statically above
        }
      }
    }

    for (const DeviceBehavior* b : behaviors) {
      for (const DeviceEffect& e : b->effects) {
        if (e.target == T::kAllRooms) {
          for (const auto& r : w0_.layout->rooms) base.fx.rooms_powered.insert(r.name);
          continue;
        }
        if (e.target == T::kOwnRoom) {
          base.fx.rooms_powered.insert(room);
          continue;
        }
        std::vector<std::string> targets;
        if (e.target == T::kSelf) {
          targets.push_back(d);
        } else if (e.target == T::kContents) {
          targets = contents_of(d);
        } else {
          for (const auto& l : affordance::linked_instances(w0_, d, e.linked_class)) {
            const auto& c = contents_of(l);
            targets.insert(targets.end(), c.begin(), c.end());
          }
        }
        for (const std::string& id : targets) {
          for (const auto& [f, val] : e.set) set_flag(base.fx, id, f, val);
          if (e.color && !cls(id).has(Property::kDecor)) base.fx.colors[id] = *e.color;
          if (e.fill && cls(id).has(Property::kFillable)) {
            base.pre.push_back(F("empty", {id}));
            bool never = false;
            if (auto f = flag_test(id, Flag::kBroken, false, never)) base.pre.push_back(*f);
            base.fx.fills[id] = *e.fill;
          }
          if (e.empty) base.fx.fills[id] = std::nullopt;
          if (e.consume_class) {
            for (const auto& c : contents_of(id)) {
              if (obj(c)->class_id != *e.consume_class) continue;
              if (!movable(c)) return;
              base.fx.consumed.push_back(c);
              break;
            }
          }
          if (e.spawn_class) {
            auto it = device_spawn_.find(d);
            if (it == device_spawn_.end()) return;
            base.pre.push_back(F("unspawned", {it->second}));
            base.fx.spawned.push_back(it->second);
          }
        }
      }
    }
    for (auto& [pre, label] : alts) {
      Variant v = base;
      v.pre.insert(v.pre.end(), pre.begin(), pre.end());
      std::vector<std::string> t = tokens;
      if (!label.empty()) t.push_back(label);
      v.label = join(t, "-");
      out.push_back(std::move(v));
    }
  };
  enumerate(0);
  return out;
}

void Grounder::post_pass() {
  // Consumed and spawned objects: every fluent about them is rewritten to its
  // value in a world where the object is gone / freshly made.
  auto rewrite = [&](size_t op_index, const std::string& id, const WorldState& hypo) {
    Operator& op = b_.operators()[op_index];
    auto about = [&](FluentId f) {
      const Fluent& fl = b_.at(f);
      return !fl.args.empty() && fl.args[0] == id && fl.predicate != "at-vp";
    };
    std::erase_if(op.add, about);
    std::erase_if(op.del, about);
    for (FluentId f = 0; f < b_.fluent_count(); ++f) {
      if (!about(f)) continue;
      (fluent_holds(b_.at(f), hypo, cdf_.scene.agent_cell) ? op.add : op.del).push_back(f);
    }
  };
  for (const auto& [index, id] : consumes_) {
    WorldState hypo = w0_;
    hypo.objects.erase(id);
    if (hypo.agent.held == id) hypo.agent.held.reset();
    rewrite(index, id, hypo);
  }
  for (const auto& [index, id] : spawns_) {
    WorldState hypo = w0_;
    hypo.objects[id] = proto_.at(id);
    rewrite(index, id, hypo);
  }
}

void Grounder::ground_goals() {
  for (size_t i = 0; i < cdf_.goals.size(); ++i) {
    const cdf::GoalCondition& g = cdf_.goals[i];
    const std::string& o = goal_objects_[i];
    switch (g.predicate) {
      case cdf::Predicate::kStateIs:
        if (g.flag == Flag::kPowered) {
          if (obj(o)->state.get(Flag::kPowered) == g.value) continue;
          compile_error("goal on '" + o + "' power supply cannot be changed by any action");
        }
        b_.add_goal(flag(o, g.flag, g.value));
        break;
      case cdf::Predicate::kLocated:
        if (!g.room.empty()) compile_error("room-located goals are not supported by the planner");
        if (!link_allowed(o, g.receptacle)) compile_error("'" + o + "' cannot rest in '" + g.receptacle + "'");
        b_.add_goal(link(o, g.receptacle));
        break;
      case cdf::Predicate::kHolding: b_.add_goal(F("holding", {o})); break;
      case cdf::Predicate::kFilled:
        b_.add_goal(g.liquid ? F("filled", {o, *g.liquid}) : F("empty", {o}));
        break;
      case cdf::Predicate::kColored: b_.add_goal(F("color", {o, g.color})); break;
      case cdf::Predicate::kScanned: b_.add_goal(flag(o, Flag::kUsed, true)); break;
      case cdf::Predicate::kToggled: b_.add_goal(flag(o, Flag::kToggledOn, true)); break;
    }
  }
}

PlanningProblem Grounder::run() {
  setup();
  ground_goto();
  for (Verb v : {Verb::kPickup, Verb::kOpen, Verb::kClose, Verb::kBreak, Verb::kToggle, Verb::kFill,
                 Verb::kScan, Verb::kClean}) {
    ground_simple(v);
  }
  ground_place();
  ground_pour();
  ground_goals();
  post_pass();

  std::vector<FluentId> initial;
  for (FluentId f = 0; f < b_.fluent_count(); ++f) {
    if (fluent_holds(b_.at(f), w0_, cdf_.scene.agent_cell)) initial.push_back(f);
  }
  std::vector<char> produced(b_.fluent_count(), 0);
  for (const Operator& op : b_.operators()) {
    for (FluentId f : op.add) produced[f] = 1;
  }
  for (FluentId f : b_.goal()) {
    if (!produced[f] && !std::binary_search(initial.begin(), initial.end(), f)) {
      compile_error("no operator produces goal " + b_.at(f).key());
    }
  }
  b_.set_initial(std::move(initial));
  return b_.finish(cdf_.cdf_id);
}

}  // namespace

PlanningProblem compile(const cdf::CDF& mission, const Resources& res) {
  return Grounder(mission, res).run();
}

}  // namespace arena::planner
