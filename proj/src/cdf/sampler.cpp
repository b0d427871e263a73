#include "arena/cdf/sampler.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "arena/error.hpp"
#include "arena/util/rng.hpp"

namespace arena::cdf {

using scene::Flag;
using scene::Location;
using scene::ObjectClass;
using scene::ObjectInstance;
using scene::Property;

namespace {

constexpr std::array<std::string_view, 12> kNames = {
    "pickup&deliver", "heat&deliver",   "freeze&deliver", "repair&deliver",
    "fill&deliver",   "color&deliver",  "clean&deliver",  "pourContainer",
    "breakObject",    "insertInDevice", "toggleDevice",   "scanObject",
};

// Items that gate devices; kept out of distractor and target draws so they
// only appear where a tool needs them.
const std::set<std::string> kToolItems = {"coffee_beans", "control_panel", "printer_cartridge", "toy"};
const std::set<std::string> kSurfaces = {"counter_top", "desk", "shelf", "table"};
const std::vector<std::string> kInsertDevices = {"cabinet", "fridge", "microwave", "time_machine"};
const std::vector<std::string> kToggleDevices = {"computer", "light_switch", "microwave", "printer_3d"};
const std::vector<std::string> kColors = {"blue", "green", "red"};

std::string spaced(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

class Draw {
 public:
  Draw(const MissionTemplate& t, const Resources& res, const scene::SceneLayout& layout,
       util::Rng& rng, bool unique_tool)
      : t_(t), res_(res), layout_(layout), rng_(rng), unique_(unique_tool) {}

  // nullopt rejects the draw.
  std::optional<CDF> run() {
    for (const auto& f : layout_.furnishings) {
      ObjectInstance obj{f.instance_id, f.class_id, Location::at(f.cell), f.state, f.color_override, {}};
      objects_.emplace(f.instance_id, std::move(obj));
      if (kSurfaces.contains(f.class_id)) surfaces_.push_back(f.instance_id);
    }
    std::sort(surfaces_.begin(), surfaces_.end());
    if (surfaces_.size() < 2) return std::nullopt;
    if (!task()) return std::nullopt;

    const size_t distractors = rng_.below(3);
    const auto pool = movables([](const ObjectClass&) { return true; });
    for (size_t i = 0; i < distractors; ++i) place(rng_.pick(pool), rng_.pick(surfaces_));

    CDF c;
    c.catalog = res_.catalog;
    c.task_type = std::string(task_type_name(t_.type));
    c.unique_tool = unique_;
    c.scene.layout_id = layout_.layout_id;
    c.scene.room_power = room_power_;
    if (!agent(c.scene)) return std::nullopt;
    for (auto& [id, obj] : objects_) c.scene.objects.push_back(std::move(obj));
    c.goals = goals_;
    c.text.mission_description = mission_;
    c.text.subgoal_descriptions = subgoals_;
    c.text.hints = hints_;
    c.text.prompts = {"Start by finding the " + spaced(first_) + "."};
    return c;
  }

 private:
  const ObjectClass& cls(const std::string& id) const {
    return res_.catalog->at(objects_.at(id).class_id);
  }
  std::string name_of(const std::string& id) const { return spaced(objects_.at(id).class_id); }

  template <typename Pred>
  std::vector<std::string> movables(Pred pred) const {
    std::vector<std::string> out;
    for (const auto& [id, c] : res_.catalog->classes()) {
      if (c.has(Property::kPickupable) && !c.has(Property::kDecor) && !kToolItems.contains(id) &&
          pred(c)) {
        out.push_back(id);
      }
    }
    return out;
  }

  std::optional<std::string> first_of(const std::string& class_id) const {
    for (const auto& [id, obj] : objects_) {
      if (obj.class_id == class_id) return id;
    }
    return std::nullopt;
  }

  std::string place(const std::string& class_id, const std::string& parent) {
    int k = 1;
    while (objects_.contains(class_id + "_" + std::to_string(k))) ++k;
    const std::string id = class_id + "_" + std::to_string(k);
    const ObjectClass& c = res_.catalog->at(class_id);
    const bool inside = cls(parent).containment == scene::Containment::kIn;
    objects_.emplace(id, ObjectInstance{id, class_id,
                                        inside ? Location::inside(parent) : Location::on(parent),
                                        scene::ObjectState::defaults_for(c), std::nullopt, {}});
    return id;
  }

  // Target object on a random surface; honours the template's target class.
  std::optional<std::string> target(Property needed) {
    auto pool = movables([&](const ObjectClass& c) { return c.has(needed); });
    return target_from(pool);
  }
  std::optional<std::string> target_from(const std::vector<std::string>& pool) {
    std::string class_id;
    if (t_.target_class) {
      if (std::find(pool.begin(), pool.end(), *t_.target_class) == pool.end()) return std::nullopt;
      class_id = *t_.target_class;
    } else {
      if (pool.empty()) return std::nullopt;
      class_id = rng_.pick(pool);
    }
    const std::string parent = rng_.pick(surfaces_);
    const std::string id = place(class_id, parent);
    if (first_.empty()) {
      first_ = class_id;
      hints_.push_back("The " + spaced(class_id) + " was left on the " + name_of(parent) + ".");
    }
    return id;
  }

  // Delivery surface other than the object's current parent.
  std::optional<std::string> destination(const std::string& obj) {
    std::vector<std::string> options;
    for (const auto& s : surfaces_) {
      if (s == objects_.at(obj).location.parent) continue;
      if (t_.receptacle_class && objects_.at(s).class_id != *t_.receptacle_class) continue;
      options.push_back(s);
    }
    if (options.empty()) return std::nullopt;
    return rng_.pick(options);
  }

  void goal(GoalCondition g, std::string text) {
    goals_.push_back(std::move(g));
    subgoals_.push_back(std::move(text));
  }

  GoalCondition state_goal(const std::string& obj, Flag f, bool value) {
    GoalCondition g;
    g.predicate = Predicate::kStateIs;
    g.object = obj;
    g.flag = f;
    g.value = value;
    return g;
  }

  bool deliver(const std::string& obj) {
    auto dest = destination(obj);
    if (!dest) return false;
    GoalCondition g;
    g.predicate = Predicate::kLocated;
    g.object = obj;
    g.receptacle = *dest;
    goal(g, "Put the " + name_of(obj) + " on the " + name_of(*dest) + ".");
    mission_ += " and deliver it to the " + name_of(*dest) + ".";
    return true;
  }

  void disable(const std::string& class_id) {
    if (auto id = first_of(class_id)) objects_.at(*id).state.set(Flag::kPowered, false);
  }

  // Two tools can produce the change; with unique_tool one is switched off.
  // `first` is disabled via `off_first`, `second` via `off_second`.
  void tools(const std::function<void()>& off_first, const std::function<void()>& off_second) {
    if (!unique_) return;
    if (rng_.coin()) {
      off_first();
    } else {
      off_second();
    }
  }

  bool task() {
    using P = Property;
    switch (t_.type) {
      case TaskType::kPickupDeliver: {
        auto x = target(P::kPickupable);
        if (!x) return false;
        mission_ = "Pick up the " + name_of(*x);
        return deliver(*x);
      }
      case TaskType::kHeatDeliver: {
        auto x = target(P::kHeatable);
        if (!x || !first_of("microwave") || !first_of("laser_cannon")) return false;
        bool laser = true;
        tools([&] { disable("microwave"); }, [&] { laser = false; });
        if (laser) {
          if (rng_.coin()) {
            place("control_panel", *first_of("laser_cannon"));
          } else {
            place("control_panel", rng_.pick(surfaces_));
          }
        }
        goal(state_goal(*x, Flag::kHot, true), "Heat the " + name_of(*x) + ".");
        mission_ = "Heat the " + name_of(*x);
        return deliver(*x);
      }
      case TaskType::kFreezeDeliver: {
        auto x = target(P::kChillable);
        if (!x || !first_of("fridge") || !first_of("blue_monitor")) return false;
        tools([&] { disable("fridge"); }, [&] { disable("blue_monitor"); });
        goal(state_goal(*x, Flag::kCold, true), "Chill the " + name_of(*x) + ".");
        mission_ = "Chill the " + name_of(*x);
        return deliver(*x);
      }
      case TaskType::kRepairDeliver: {
        auto x = target(P::kBreakable);
        if (!x || !first_of("time_machine")) return false;
        objects_.at(*x).state.set(Flag::kBroken, true);
        goal(state_goal(*x, Flag::kBroken, false), "Repair the " + name_of(*x) + ".");
        mission_ = "Repair the broken " + name_of(*x);
        return deliver(*x);
      }
      case TaskType::kFillDeliver: {
        const std::string liquid = t_.liquid.value_or("water");
        if (liquid != "water") return false;
        auto x = target(P::kFillable);
        if (!x || !first_of("sink")) return false;
        GoalCondition g;
        g.predicate = Predicate::kFilled;
        g.object = *x;
        g.liquid = liquid;
        goal(g, "Fill the " + name_of(*x) + " with " + liquid + ".");
        mission_ = "Fill the " + name_of(*x) + " with " + liquid;
        return deliver(*x);
      }
      case TaskType::kColorDeliver: {
        auto x = target(P::kPickupable);
        if (!x || !first_of("color_changer")) return false;
        const std::string current = cls(*x).appearance.color;
        std::vector<std::string> options;
        for (const auto& c : kColors) {
          if (c != current && (!t_.color || *t_.color == c)) options.push_back(c);
        }
        if (options.empty()) return false;
        GoalCondition g;
        g.predicate = Predicate::kColored;
        g.object = *x;
        g.color = rng_.pick(options);
        if (!first_of("button_" + g.color)) return false;
        goal(g, "Make the " + name_of(*x) + " " + g.color + ".");
        mission_ = "Turn the " + name_of(*x) + " " + g.color;
        return deliver(*x);
      }
      case TaskType::kCleanDeliver: {
        auto x = target(P::kDirtyable);
        if (!x || !first_of("sink")) return false;
        objects_.at(*x).state.set(Flag::kDirty, true);
        goal(state_goal(*x, Flag::kDirty, false), "Clean the " + name_of(*x) + ".");
        mission_ = "Clean the dirty " + name_of(*x);
        return deliver(*x);
      }
      case TaskType::kPourContainer: {
        const std::string liquid = t_.liquid.value_or("water");
        auto src = target(P::kFillable);
        if (!src) return false;
        const auto pool = movables([](const ObjectClass& c) { return c.has(Property::kFillable); });
        const std::string dst = place(rng_.pick(pool), rng_.pick(surfaces_));
        objects_.at(*src).state.filled_with = liquid;
        GoalCondition full;
        full.predicate = Predicate::kFilled;
        full.object = dst;
        full.liquid = liquid;
        GoalCondition empty;
        empty.predicate = Predicate::kFilled;
        empty.object = *src;
        goal(full, "Pour the " + liquid + " into the " + name_of(dst) + ".");
        goal(empty, "Leave the " + name_of(*src) + " empty.");
        mission_ = "Pour the " + liquid + " from the " + name_of(*src) + " into the " + name_of(dst) + ".";
        return true;
      }
      case TaskType::kBreakObject: {
        auto x = target(P::kBreakable);
        if (!x) return false;
        goal(state_goal(*x, Flag::kBroken, true), "Break the " + name_of(*x) + ".");
        mission_ = "Break the " + name_of(*x) + ".";
        return true;
      }
      case TaskType::kInsertInDevice: {
        const std::string dev_cls = t_.receptacle_class.value_or(rng_.pick(kInsertDevices));
        auto dev = first_of(dev_cls);
        if (!dev || cls(*dev).containment != scene::Containment::kIn) return false;
        auto x = target(P::kPickupable);
        if (!x) return false;
        GoalCondition g;
        g.predicate = Predicate::kLocated;
        g.object = *x;
        g.receptacle = *dev;
        goal(g, "Put the " + name_of(*x) + " in the " + name_of(*dev) + ".");
        mission_ = "Put the " + name_of(*x) + " inside the " + name_of(*dev) + ".";
        return true;
      }
      case TaskType::kToggleDevice: {
        const std::string dev_cls = t_.device_class.value_or(rng_.pick(kToggleDevices));
        auto dev = first_of(dev_cls);
        if (!dev || !cls(*dev).has(P::kToggleable)) return false;
        first_ = dev_cls;
        if (dev_cls == "light_switch" && rng_.coin()) {
          const auto* room = layout_.room_at(objects_.at(*dev).location.cell);
          if (room) {
            room_power_[room->name] = false;
            hints_.push_back("The power in the " + spaced(room->name) + " is out.");
          }
        }
        if (dev_cls == "printer_3d") place("printer_cartridge", rng_.pick(surfaces_));
        GoalCondition g;
        g.predicate = Predicate::kToggled;
        g.object = *dev;
        goal(g, "Turn on the " + name_of(*dev) + ".");
        mission_ = "Turn on the " + name_of(*dev) + ".";
        return true;
      }
      case TaskType::kScanObject: {
        auto x = target(P::kPickupable);
        if (!x) return false;
        GoalCondition g;
        g.predicate = Predicate::kScanned;
        g.object = *x;
        goal(g, "Scan the " + name_of(*x) + ".");
        mission_ = "Scan the " + name_of(*x) + ".";
        return true;
      }
    }
    return false;
  }

  bool agent(SceneSpec& scene) {
    scene::Occupancy occ = layout_.base_occupancy();
    for (const auto& f : layout_.furnishings) {
      if (res_.catalog->at(f.class_id).blocking) occ.block(f.cell);
    }
    std::vector<scene::Cell> free;
    for (int y = 0; y < layout_.height; ++y) {
      for (int x = 0; x < layout_.width; ++x) {
        if (!occ.blocked({x, y}) && layout_.room_at({x, y})) free.push_back({x, y});
      }
    }
    if (free.empty()) return false;
    scene.agent_cell = rng_.pick(free);
    scene.agent_heading = static_cast<scene::Heading>(rng_.below(4));
    return true;
  }

  const MissionTemplate& t_;
  const Resources& res_;
  const scene::SceneLayout& layout_;
  util::Rng& rng_;
  bool unique_;
  std::map<std::string, ObjectInstance> objects_;
  std::vector<std::string> surfaces_;
  std::map<std::string, bool> room_power_;
  std::vector<GoalCondition> goals_;
  std::vector<std::string> subgoals_;
  std::vector<std::string> hints_;
  std::string mission_;
  std::string first_;
};

}  // namespace

std::string_view task_type_name(TaskType t) { return kNames[static_cast<size_t>(t)]; }

std::optional<TaskType> parse_task_type(std::string_view name) {
  for (size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<TaskType>(i);
  }
  return std::nullopt;
}

std::string task_slug(TaskType t) {
  std::string out;
  for (char c : task_type_name(t)) {
    if (c == '&') {
      out += '_';
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      out += '_';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      out += c;
    }
  }
  return out;
}

std::vector<MissionTemplate> default_pool(const std::vector<TaskType>& types) {
  std::vector<MissionTemplate> out;
  for (TaskType t : types) out.push_back(MissionTemplate{t, {}, {}, {}, {}, {}});
  return out;
}

std::vector<CDF> sample_missions(const std::vector<MissionTemplate>& pool, const Resources& res,
                                 const SampleOptions& options) {
  if (pool.empty()) throw Error(Errc::kEmptyInput, "mission pool is empty");
  std::vector<std::string> layout_ids = options.layouts;
  if (layout_ids.empty()) {
    for (const auto& [id, layout] : res.layouts) layout_ids.push_back(id);
  }
  std::sort(layout_ids.begin(), layout_ids.end());
  std::vector<std::shared_ptr<const scene::SceneLayout>> layouts;
  for (const auto& id : layout_ids) layouts.push_back(res.layout(id));
  if (layouts.empty()) throw Error(Errc::kEmptyInput, "no layouts to sample from");

  std::vector<CDF> out;
  out.reserve(options.n);
  for (size_t i = 0; i < options.n; ++i) {
    const MissionTemplate& t = pool[i % pool.size()];
    const uint64_t seed = util::derive_seed(options.seed, i);
    util::Rng rng(seed);
    std::optional<CDF> got;
    for (size_t attempt = 0; attempt < options.max_attempts && !got; ++attempt) {
      const auto& layout = *layouts[rng.below(layouts.size())];
      Draw draw(t, res, layout, rng, options.unique_tool);
      got = draw.run();
      if (!got) continue;
      got->seed = seed;
      char idx[16];
      std::snprintf(idx, sizeof idx, "%05zu", i);
      got->cdf_id = task_slug(t.type) + "_" + idx;
      validate_cdf(*got, res);
      if (options.accept && !options.accept(*got)) got.reset();
    }
    if (!got) {
      throw Error(Errc::kGenerationExhausted,
                  "mission " + std::to_string(i) + " (" + std::string(task_type_name(t.type)) +
                      "): no acceptable draw in " + std::to_string(options.max_attempts) + " attempts");
    }
    out.push_back(std::move(*got));
  }
  return out;
}

}  // namespace arena::cdf
