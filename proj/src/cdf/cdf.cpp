#include "arena/cdf/cdf.hpp"

#include <algorithm>
#include <array>

#include "arena/error.hpp"

namespace arena::cdf {

using scene::Flag;
using scene::Location;
using scene::ObjectInstance;
using scene::Property;
using util::Json;

namespace {

constexpr std::array<std::string_view, 7> kPredicateNames = {
    "state_is", "located", "holding", "filled", "colored", "scanned", "toggled",
};

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw Error(Errc::kValidationError, where + ": " + what);
}

std::vector<std::string> string_list(util::FieldReader& r, std::string_view key, bool required) {
  std::vector<std::string> out;
  const Json* arr = required ? &r.required_array(key) : r.find(key);
  if (!arr) return out;
  if (!arr->is_array()) invalid(r.path(key), "expected an array of strings");
  for (const auto& s : *arr) {
    if (!s.is_string()) invalid(r.path(key), "expected an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

std::string_view predicate_name(Predicate p) { return kPredicateNames[static_cast<size_t>(p)]; }

std::optional<Predicate> parse_predicate(std::string_view name) {
  for (size_t i = 0; i < kPredicateNames.size(); ++i) {
    if (kPredicateNames[i] == name) return static_cast<Predicate>(i);
  }
  return std::nullopt;
}

std::string sticky_note_id(size_t index) { return "sticky_note_" + std::to_string(index + 1); }

Json goal_to_json(const GoalCondition& g) {
  Json out = Json::object();
  out["predicate"] = std::string(predicate_name(g.predicate));
  if (g.class_level()) {
    out["object_class"] = g.object_class;
  } else {
    out["object"] = g.object;
  }
  switch (g.predicate) {
    case Predicate::kStateIs:
      out["flag"] = std::string(scene::flag_name(g.flag));
      out["value"] = g.value;
      break;
    case Predicate::kLocated:
      if (!g.room.empty()) {
        out["room"] = g.room;
      } else {
        out["receptacle"] = g.receptacle;
      }
      break;
    case Predicate::kFilled: out["liquid"] = g.liquid ? Json(*g.liquid) : Json(nullptr); break;
    case Predicate::kColored: out["color"] = g.color; break;
    default: break;
  }
  return out;
}

GoalCondition goal_from_json(const Json& value, const std::string& where) {
  util::FieldReader r(value, where);
  GoalCondition g;
  const std::string pred = r.required_string("predicate");
  auto p = parse_predicate(pred);
  if (!p) invalid(r.path("predicate"), "unknown predicate '" + pred + "'");
  g.predicate = *p;
  auto obj = r.optional_string("object");
  auto cls = r.optional_string("object_class");
  if (obj.has_value() == cls.has_value()) invalid(where, "needs exactly one of object, object_class");
  g.object = obj.value_or("");
  g.object_class = cls.value_or("");
  switch (g.predicate) {
    case Predicate::kStateIs: {
      const std::string f = r.required_string("flag");
      auto flag = scene::parse_flag(f);
      if (!flag) invalid(r.path("flag"), "unknown state flag '" + f + "'");
      g.flag = *flag;
      const Json& v = r.required("value");
      if (!v.is_boolean()) invalid(r.path("value"), "expected a boolean");
      g.value = v.get<bool>();
      break;
    }
    case Predicate::kLocated: {
      auto rec = r.optional_string("receptacle");
      auto room = r.optional_string("room");
      if (rec.has_value() == room.has_value()) invalid(where, "needs exactly one of receptacle, room");
      g.receptacle = rec.value_or("");
      g.room = room.value_or("");
      break;
    }
    case Predicate::kFilled: {
      const Json& l = r.required_nullable("liquid");
      if (l.is_null()) break;
      if (!l.is_string()) invalid(r.path("liquid"), "expected a liquid name or null");
      g.liquid = l.get<std::string>();
      util::require_identifier(*g.liquid, r.path("liquid"));
      break;
    }
    case Predicate::kColored:
      g.color = r.required_string("color");
      util::require_identifier(g.color, r.path("color"));
      break;
    default: break;
  }
  r.reject_unknown();
  return g;
}

Json cdf_to_json(const CDF& cdf) {
  Json doc = Json::object();
  doc["cdf_version"] = kCdfVersion;
  doc["cdf_id"] = cdf.cdf_id;
  if (!cdf.task_type.empty()) doc["task_type"] = cdf.task_type;
  doc["options"] = {{"seed", cdf.seed}, {"unique_tool", cdf.unique_tool}};

  Json scene = Json::object();
  scene["layout_id"] = cdf.scene.layout_id;
  scene["agent"] = {{"cell", util::cell_json(cdf.scene.agent_cell)},
                    {"heading", std::string(scene::heading_name(cdf.scene.agent_heading))}};
  scene["room_power"] = Json::object();
  for (const auto& [room, on] : cdf.scene.room_power) scene["room_power"][room] = on;
  scene["obstacles"] = Json::array();
  for (auto c : cdf.scene.obstacles) scene["obstacles"].push_back(util::cell_json(c));
  scene["objects"] = Json::array();
  const scene::Catalog& catalog = cdf.catalog ? *cdf.catalog : *Resources::shipped().catalog;
  for (const auto& o : cdf.scene.objects) {
    Json j = {{"id", o.instance_id}, {"class", o.class_id},
              {"location", scene::location_to_json(o.location)}};
    const scene::ObjectClass* cls = catalog.find(o.class_id);
    if (cls) {
      j["state"] = scene::state_to_json(*cls, o.state, o.color_override);
    } else {
      j["state"] = Json::object();
    }
    scene["objects"].push_back(std::move(j));
  }
  doc["scene"] = std::move(scene);

  doc["goals"] = Json::array();
  for (const auto& g : cdf.goals) doc["goals"].push_back(goal_to_json(g));
  doc["text"] = {{"mission_description", cdf.text.mission_description},
                 {"subgoal_descriptions", cdf.text.subgoal_descriptions},
                 {"hints", cdf.text.hints},
                 {"prompts", cdf.text.prompts}};
  return doc;
}

std::string serialize_cdf(const CDF& cdf) { return util::canonical_dump(cdf_to_json(cdf)); }

CDF parse_cdf(std::string_view text, const Resources& res) {
  return parse_cdf_json(util::parse_json(text, "cdf"), res);
}

CDF parse_cdf_json(const Json& doc, const Resources& res) {
  util::FieldReader root(doc, "cdf");
  CDF cdf;
  cdf.catalog = res.catalog;
  const int64_t version = root.required_int("cdf_version");
  if (version != kCdfVersion) invalid(root.path("cdf_version"), "unsupported version");
  cdf.cdf_id = root.required_string("cdf_id");
  util::require_identifier(cdf.cdf_id, root.path("cdf_id"));
  cdf.task_type = root.optional_string("task_type").value_or("");

  if (const Json* opts = root.find("options")) {
    util::FieldReader o(*opts, root.path("options"));
    if (const Json* s = o.find("seed")) {
      if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<int64_t>() >= 0)) invalid(o.path("seed"), "expected a non-negative integer");
      cdf.seed = s->get<uint64_t>();
    }
    cdf.unique_tool = o.optional_bool("unique_tool").value_or(false);
    o.reject_unknown();
  }

  util::FieldReader sc(root.required_object("scene"), "cdf.scene");
  cdf.scene.layout_id = sc.required_string("layout_id");
  const auto layout_it = res.layouts.find(cdf.scene.layout_id);
  if (layout_it == res.layouts.end()) {
    invalid(sc.path("layout_id"), "unknown layout '" + cdf.scene.layout_id + "'");
  }
  {
    util::FieldReader ag(sc.required_object("agent"), sc.path("agent"));
    cdf.scene.agent_cell = util::parse_cell(ag.required("cell"), ag.path("cell"));
    const std::string h = ag.required_string("heading");
    auto heading = scene::parse_heading(h);
    if (!heading) invalid(ag.path("heading"), "expected N, E, S or W");
    cdf.scene.agent_heading = *heading;
    ag.reject_unknown();
  }
  if (const Json* rp = sc.find("room_power")) {
    if (!rp->is_object()) invalid(sc.path("room_power"), "expected an object");
    for (auto it = rp->begin(); it != rp->end(); ++it) {
      if (!it->is_boolean()) invalid(sc.path("room_power") + "." + it.key(), "expected a boolean");
      cdf.scene.room_power[it.key()] = it->get<bool>();
    }
  }
  if (const Json* obs = sc.find("obstacles")) {
    if (!obs->is_array()) invalid(sc.path("obstacles"), "expected an array");
    for (size_t i = 0; i < obs->size(); ++i) {
      cdf.scene.obstacles.insert(
          util::parse_cell((*obs)[i], sc.path("obstacles") + "[" + std::to_string(i) + "]"));
    }
  }
  const Json& objs = sc.required_array("objects");
  std::set<std::string> ids;
  for (size_t i = 0; i < objs.size(); ++i) {
    const std::string where = sc.path("objects") + "[" + std::to_string(i) + "]";
    util::FieldReader o(objs[i], where);
    ObjectInstance inst;
    inst.instance_id = o.required_string("id");
    util::require_identifier(inst.instance_id, o.path("id"));
    if (!ids.insert(inst.instance_id).second) invalid(o.path("id"), "duplicate id");
    inst.class_id = o.required_string("class");
    const scene::ObjectClass* cls = res.catalog->find(inst.class_id);
    if (!cls) invalid(o.path("class"), "unknown class '" + inst.class_id + "'");
    if (cls->has(Property::kDecor) && inst.class_id == "sticky_note") {
      invalid(o.path("class"), "sticky notes come from the layout and mission hints");
    }
    inst.location = scene::location_from_json(o.required("location"), o.path("location"));
    if (const Json* st = o.find("state")) {
      scene::state_from_json(*st, *cls, o.path("state"), inst.state, inst.color_override);
    } else {
      inst.state = scene::ObjectState::defaults_for(*cls);
    }
    o.reject_unknown();
    cdf.scene.objects.push_back(std::move(inst));
  }
  std::sort(cdf.scene.objects.begin(), cdf.scene.objects.end(),
            [](const ObjectInstance& a, const ObjectInstance& b) { return a.instance_id < b.instance_id; });
  sc.reject_unknown();

  const Json& goals = root.required_array("goals");
  for (size_t i = 0; i < goals.size(); ++i) {
    cdf.goals.push_back(goal_from_json(goals[i], "cdf.goals[" + std::to_string(i) + "]"));
  }

  util::FieldReader tx(root.required_object("text"), "cdf.text");
  cdf.text.mission_description = tx.required_string("mission_description");
  cdf.text.subgoal_descriptions = string_list(tx, "subgoal_descriptions", true);
  cdf.text.hints = string_list(tx, "hints", false);
  cdf.text.prompts = string_list(tx, "prompts", false);
  tx.reject_unknown();
  root.reject_unknown();

  validate_cdf(cdf, res);
  return cdf;
}

void validate_cdf(const CDF& cdf, const Resources& res) {
  auto layout = res.layout(cdf.scene.layout_id);
  if (cdf.text.subgoal_descriptions.size() != cdf.goals.size()) {
    invalid("cdf.text.subgoal_descriptions",
            "has " + std::to_string(cdf.text.subgoal_descriptions.size()) + " entries for " +
                std::to_string(cdf.goals.size()) + " goals");
  }
  if (cdf.text.hints.size() > layout->sticky_notes.size()) {
    invalid("cdf.text.hints", "layout '" + layout->layout_id + "' has only " +
                                  std::to_string(layout->sticky_notes.size()) + " sticky notes");
  }
  for (const auto& [room, on] : cdf.scene.room_power) {
    (void)on;
    if (!layout->room(room)) invalid("cdf.scene.room_power." + room, "unknown room");
  }
  for (auto c : cdf.scene.obstacles) {
    if (c.x < 0 || c.y < 0 || c.x >= layout->width || c.y >= layout->height) {
      invalid("cdf.scene.obstacles", "obstacle out of bounds");
    }
  }
  for (size_t i = 0; i < cdf.scene.objects.size(); ++i) {
    const std::string& id = cdf.scene.objects[i].instance_id;
    if (id.rfind("sticky_note_", 0) == 0) {
      invalid("cdf.scene.objects[" + std::to_string(i) + "].id", "reserved id '" + id + "'");
    }
  }

  const scene::WorldState world = build_world(cdf, res);
  for (const auto& p : scene::world_problems(world)) invalid("cdf.scene", p);
  for (const auto& o : cdf.scene.objects) {
    if (o.location.kind == Location::Kind::kCell && world.obstacles.contains(o.location.cell)) {
      invalid("cdf.scene.objects." + o.instance_id, "placed on an obstacle");
    }
  }

  for (size_t i = 0; i < cdf.goals.size(); ++i) {
    const GoalCondition& g = cdf.goals[i];
    const std::string where = "cdf.goals[" + std::to_string(i) + "]";
    const scene::ObjectClass* cls = nullptr;
    if (g.class_level()) {
      cls = res.catalog->find(g.object_class);
      if (!cls) invalid(where + ".object_class", "unknown class '" + g.object_class + "'");
    } else {
      const ObjectInstance* obj = world.find(g.object);
      if (!obj) invalid(where + ".object", "unknown instance '" + g.object + "'");
      cls = &world.class_of(*obj);
    }
    switch (g.predicate) {
      case Predicate::kStateIs:
        if (!scene::flag_licensed(*cls, g.flag)) {
          invalid(where + ".flag", "'" + std::string(scene::flag_name(g.flag)) + "' does not apply to " +
                                       cls->class_id);
        }
        break;
      case Predicate::kLocated:
        if (!g.room.empty()) {
          if (!layout->room(g.room)) invalid(where + ".room", "unknown room '" + g.room + "'");
        } else {
          const ObjectInstance* rec = world.find(g.receptacle);
          if (!rec) invalid(where + ".receptacle", "unknown instance '" + g.receptacle + "'");
          if (!world.class_of(*rec).has(Property::kReceptacle)) {
            invalid(where + ".receptacle", "'" + g.receptacle + "' is not a receptacle");
          }
        }
        if (!cls->has(Property::kPickupable)) invalid(where, cls->class_id + " cannot be moved");
        break;
      case Predicate::kHolding:
        if (!cls->has(Property::kPickupable)) invalid(where, cls->class_id + " cannot be held");
        break;
      case Predicate::kFilled:
        if (!cls->has(Property::kFillable)) invalid(where, cls->class_id + " is not fillable");
        break;
      case Predicate::kColored:
        if (cls->has(Property::kDecor)) invalid(where, "decor cannot be recolored");
        break;
      case Predicate::kScanned:
        if (cls->has(Property::kDecor)) invalid(where, "decor cannot be scanned");
        break;
      case Predicate::kToggled:
        if (!cls->has(Property::kToggleable)) invalid(where, cls->class_id + " is not toggleable");
        break;
    }
  }
}

scene::WorldState build_world(const CDF& cdf, const Resources& res) {
  scene::WorldState w;
  w.layout = res.layout(cdf.scene.layout_id);
  w.catalog = res.catalog;
  w.obstacles = cdf.scene.obstacles;
  w.agent.cell = cdf.scene.agent_cell;
  w.agent.heading = cdf.scene.agent_heading;
  for (const auto& [room, on] : cdf.scene.room_power) w.room_power[room] = on;
  for (const auto& o : cdf.scene.objects) {
    w.objects[o.instance_id] = o;
    if (o.location.kind == Location::Kind::kHeld) w.agent.held = o.instance_id;
  }
  const auto& notes = w.layout->sticky_notes;
  const scene::ObjectClass& note_cls = res.catalog->at("sticky_note");
  for (size_t i = 0; i < notes.size(); ++i) {
    ObjectInstance n;
    n.instance_id = sticky_note_id(i);
    n.class_id = "sticky_note";
    n.location = Location::at(notes[i].cell);
    n.state = scene::ObjectState::defaults_for(note_cls);
    n.note_text = i < cdf.text.hints.size() ? cdf.text.hints[i] : notes[i].text;
    w.objects[n.instance_id] = std::move(n);
  }
  return w;
}

std::string effective_color(const scene::WorldState& world, const ObjectInstance& obj) {
  if (obj.color_override) return *obj.color_override;
  return world.class_of(obj).appearance.color;
}

bool goal_holds_for(const scene::WorldState& world, const GoalCondition& g, const ObjectInstance& obj) {
  switch (g.predicate) {
    case Predicate::kStateIs: return obj.state.get(g.flag) == g.value;
    case Predicate::kLocated:
      if (!g.room.empty()) {
        if (world.held_root(obj.instance_id)) return false;
        const auto room = world.room_at(world.position(obj.instance_id));
        return room && *room == g.room;
      }
      return obj.location.has_parent() && obj.location.parent == g.receptacle;
    case Predicate::kHolding: return world.agent.held == obj.instance_id;
    case Predicate::kFilled: return obj.state.filled_with == g.liquid;
    case Predicate::kColored: return effective_color(world, obj) == g.color;
    case Predicate::kScanned: return obj.state.get(Flag::kUsed);
    case Predicate::kToggled: return obj.state.get(Flag::kToggledOn);
  }
  return false;
}

bool goal_holds(const scene::WorldState& world, const GoalCondition& g) {
  if (g.predicate == Predicate::kLocated) {
    if (!g.room.empty() && !world.layout->room(g.room)) {
      throw Error(Errc::kUnknownReference, "unknown room '" + g.room + "'");
    }
    if (g.room.empty() && !world.find(g.receptacle)) {
      throw Error(Errc::kUnknownReference, "unknown receptacle '" + g.receptacle + "'");
    }
  }
  if (!g.class_level()) {
    const ObjectInstance* obj = world.find(g.object);
    if (!obj) throw Error(Errc::kUnknownReference, "unknown instance '" + g.object + "'");
    return goal_holds_for(world, g, *obj);
  }
  if (!world.catalog->find(g.object_class)) {
    throw Error(Errc::kUnknownReference, "unknown class '" + g.object_class + "'");
  }
  for (const auto& [id, obj] : world.objects) {
    if (obj.class_id == g.object_class && goal_holds_for(world, g, obj)) return true;
  }
  return false;
}

GoalStatus goal_status(const scene::WorldState& world, const std::vector<GoalCondition>& goals) {
  GoalStatus s;
  for (const auto& g : goals) {
    const bool ok = goal_holds(world, g);
    s.subgoals.push_back(ok);
    s.mission = s.mission && ok;
  }
  return s;
}

std::string describe_goal(const GoalCondition& g) {
  const std::string who = g.class_level() ? "any " + g.object_class : g.object;
  switch (g.predicate) {
    case Predicate::kStateIs:
      return who + (g.value ? " is " : " is not ") + std::string(scene::flag_name(g.flag));
    case Predicate::kLocated: return who + " is at " + (g.room.empty() ? g.receptacle : g.room);
    case Predicate::kHolding: return "holding " + who;
    case Predicate::kFilled: return who + (g.liquid ? " holds " + *g.liquid : " is empty");
    case Predicate::kColored: return who + " is " + g.color;
    case Predicate::kScanned: return who + " is scanned";
    case Predicate::kToggled: return who + " is switched on";
  }
  return who;
}

}  // namespace arena::cdf
