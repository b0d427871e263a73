#include <gtest/gtest.h>

#include "arena/affordance/engine.hpp"
#include "arena/error.hpp"
#include "arena/resources.hpp"
#include "arena/util/files.hpp"
#include "arena/util/rng.hpp"
#include "test_world.hpp"

using namespace arena;
using namespace arena::scene;
using namespace arena::affordance;
using arena::testing::add_object;
using arena::testing::empty_world;
using arena::testing::single_room;

namespace {

const Engine& engine() { return *Resources::shipped().engine; }

InteractionAction act(Verb v, std::string target, std::optional<std::string> secondary = std::nullopt) {
  return {v, std::move(target), std::move(secondary)};
}

// Open 9x7 room, agent in the middle facing north.
WorldState lab() {
  static auto layout = single_room(std::vector<std::string>(7, std::string(9, '.')), {4, 3});
  return empty_world(layout, {4, 3});
}

ActionResult run(WorldState& w, Verb v, std::string target,
                 std::optional<std::string> secondary = std::nullopt) {
  return engine().apply_in_place(w, act(v, std::move(target), std::move(secondary)));
}

// Random small world: a few fixtures and movables in random licensed states.
WorldState random_world(util::Rng& rng, int movables) {
  WorldState w = lab();
  std::vector<Cell> cells;
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x)
      if (Cell{x, y} != w.agent.cell) cells.push_back({x, y});
  rng.shuffle(cells);
  size_t next = 0;
  const std::vector<std::string> fixtures = {"table", "fridge", "microwave", "sink", "time_machine",
                                             "color_changer", "button_red", "coffee_maker", "cabinet"};
  const std::vector<std::string> items = {"bowl", "mug", "apple", "vase", "beaker", "book",
                                          "coffee_beans", "plate", "trophy", "sticky_note"};
  std::vector<std::string> receptacles;
  for (int i = 0; i < 3; ++i) {
    const std::string cls = rng.pick(fixtures);
    const std::string id = cls + "_" + std::to_string(i + 1);
    add_object(w, id, cls, Location::at(cells[next++]));
    if (w.catalog->at(cls).has(Property::kReceptacle)) receptacles.push_back(id);
  }
  for (int i = 0; i < movables; ++i) {
    const std::string cls = rng.pick(items);
    const std::string id = cls + "_" + std::to_string(10 + i);
    Location loc = Location::at(cells[next++]);
    const uint64_t roll = rng.below(4);
    if (cls != "sticky_note" && roll == 0 && !receptacles.empty()) {
      const std::string& parent = rng.pick(receptacles);
      loc = w.catalog->at(w.at(parent).class_id).containment == Containment::kIn
                ? Location::inside(parent)
                : Location::on(parent);
    } else if (cls != "sticky_note" && roll == 1 && !w.agent.held) {
      loc = Location::held();
    }
    add_object(w, id, cls, loc);
    if (cls == "sticky_note") w.at(id).note_text = "hint " + std::to_string(i);
    if (w.catalog->at(cls).has(Property::kReceptacle)) receptacles.push_back(id);
  }
  for (auto& [id, obj] : w.objects) {
    const ObjectClass& cls = w.catalog->at(obj.class_id);
    for (Flag f : kAllFlags) {
      if (flag_licensed(cls, f) && rng.below(3) == 0) obj.state.set(f, !obj.state.get(f));
    }
    if (obj.state.get(Flag::kHot)) obj.state.set(Flag::kCold, false);
    if (cls.has(Property::kFillable) && rng.coin()) obj.state.filled_with = "water";
  }
  if (rng.coin()) w.room_power["lab"] = false;
  w.agent.heading = static_cast<Heading>(rng.below(4));
  return w;
}

std::vector<InteractionAction> all_syntactic(const WorldState& w) {
  std::vector<InteractionAction> out;
  for (Verb v : kAllVerbs) {
    for (const auto& [t, a] : w.objects) {
      if (verb_takes_secondary(v)) {
        for (const auto& [s, b] : w.objects) out.push_back({v, t, s});
      } else {
        out.push_back({v, t, std::nullopt});
      }
    }
  }
  return out;
}

}  // namespace

TEST(Rules, ShippedTablesLoad) {
  const RuleBook& rules = *Resources::shipped().rules;
  for (Verb v : kAllVerbs) EXPECT_NE(rules.rule(v), nullptr) << verb_name(v);
  EXPECT_EQ(rules.effect_colors(), (std::vector<std::string>{"blue", "green", "red"}));
}

TEST(Rules, RejectsUnlicensedEffectAndUnknownNames) {
  const Catalog& cat = *Resources::shipped().catalog;
  std::string text = util::canonical_dump(util::parse_json(
      util::read_file(Resources::shipped().data_dir / "rules.json"), "rules"));
  auto doc = util::parse_json(text, "rules");
  doc["interactions"][5]["effects"] = {{"hot", true}};  // Break may not heat
  EXPECT_THROW(parse_rules(doc.dump(), cat), Error);
  doc = util::parse_json(text, "rules");
  doc["interactions"][1]["requires"] = {"flyable"};
  EXPECT_THROW(parse_rules(doc.dump(), cat), Error);
  doc = util::parse_json(text, "rules");
  doc["devices"][0]["device"] = "warp_drive";
  EXPECT_THROW(parse_rules(doc.dump(), cat), Error);
}

TEST(Affordance, PickupPrinterIsMissingAffordance) {
  WorldState w = lab();
  add_object(w, "printer_3d_1", "printer_3d", Location::at({4, 2}));
  const auto v = engine().applicable(w, act(Verb::kPickup, "printer_3d_1"));
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.code, ResultCode::kAffordanceMissing);
}

TEST(Affordance, UnpluggedMicrowaveRefusesToToggle) {
  WorldState w = lab();
  add_object(w, "microwave_1", "microwave", Location::at({4, 2}));
  w.at("microwave_1").state.set(Flag::kPowered, false);
  const auto v = engine().applicable(w, act(Verb::kToggle, "microwave_1"));
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.code, ResultCode::kPreconditionFailed);
  EXPECT_NE(v.reason.find("device_powered"), std::string::npos) << v.reason;
  w.at("microwave_1").state.set(Flag::kPowered, true);
  EXPECT_TRUE(engine().applicable(w, act(Verb::kToggle, "microwave_1")).ok);
}

TEST(Affordance, BreakIntactVase) {
  WorldState w = lab();
  add_object(w, "vase_1", "vase", Location::at({5, 2}));
  EXPECT_TRUE(engine().applicable(w, act(Verb::kBreak, "vase_1")).ok);
  auto [next, r] = engine().apply(w, act(Verb::kBreak, "vase_1"));
  EXPECT_TRUE(r.success);
  EXPECT_TRUE(next.at("vase_1").state.get(Flag::kBroken));
  ASSERT_EQ(r.state_delta.size(), 1u);
  EXPECT_EQ(r.state_delta[0], (StateChange{"vase_1", "broken", "false", "true"}));
  EXPECT_EQ(engine().applicable(next, act(Verb::kBreak, "vase_1")).code,
            ResultCode::kPreconditionFailed);
}

TEST(Affordance, TimeMachineRepairsContents) {
  WorldState w = lab();
  add_object(w, "time_machine_1", "time_machine", Location::at({4, 2}));
  add_object(w, "bowl_1", "bowl", Location::inside("time_machine_1"));
  w.at("bowl_1").state.set(Flag::kBroken, true);
  EXPECT_TRUE(run(w, Verb::kToggle, "time_machine_1").success);
  EXPECT_FALSE(w.at("bowl_1").state.get(Flag::kBroken));

  // Open door: the machine refuses to start.
  w.at("bowl_1").state.set(Flag::kBroken, true);
  w.at("time_machine_1").state.set(Flag::kToggledOn, false);
  w.at("time_machine_1").state.set(Flag::kOpen, true);
  const ActionResult r = run(w, Verb::kToggle, "time_machine_1");
  EXPECT_FALSE(r.success);
  EXPECT_NE(r.message.find("device_closed"), std::string::npos);
  EXPECT_TRUE(w.at("bowl_1").state.get(Flag::kBroken));
}

TEST(Affordance, RedButtonRecolorsBowlOnChanger) {
  WorldState w = lab();
  add_object(w, "color_changer_1", "color_changer", Location::at({4, 2}));
  add_object(w, "button_red_1", "button_red", Location::at({5, 2}));
  add_object(w, "bowl_1", "bowl", Location::on("color_changer_1"));
  EXPECT_TRUE(run(w, Verb::kToggle, "button_red_1").success);
  EXPECT_EQ(w.at("bowl_1").color_override, "red");
}

TEST(Affordance, FridgeChillsOnClose) {
  WorldState w = lab();
  add_object(w, "fridge_1", "fridge", Location::at({4, 1}));
  add_object(w, "bowl_1", "bowl", Location::held());
  w.at("bowl_1").state.set(Flag::kHot, true);
  EXPECT_EQ(run(w, Verb::kPlace, "bowl_1", "fridge_1").error_code, ResultCode::kPreconditionFailed);
  EXPECT_TRUE(run(w, Verb::kOpen, "fridge_1").success);
  EXPECT_TRUE(run(w, Verb::kPlace, "bowl_1", "fridge_1").success);
  EXPECT_EQ(w.at("bowl_1").location, Location::inside("fridge_1"));
  EXPECT_FALSE(w.at("bowl_1").state.get(Flag::kCold));
  EXPECT_TRUE(run(w, Verb::kClose, "fridge_1").success);
  EXPECT_TRUE(w.at("bowl_1").state.get(Flag::kCold));
  EXPECT_FALSE(w.at("bowl_1").state.get(Flag::kHot));

  // Unpowered fridge still closes but chills nothing.
  WorldState u = lab();
  add_object(u, "fridge_1", "fridge", Location::at({4, 1}));
  u.at("fridge_1").state.set(Flag::kPowered, false);
  u.at("fridge_1").state.set(Flag::kOpen, true);
  add_object(u, "mug_1", "mug", Location::inside("fridge_1"));
  const ActionResult r = run(u, Verb::kClose, "fridge_1");
  EXPECT_TRUE(r.success);
  EXPECT_FALSE(u.at("mug_1").state.get(Flag::kCold));
}

TEST(Affordance, LightsNeedFuseBoxReset) {
  WorldState w = lab();
  add_object(w, "light_switch_1", "light_switch", Location::at({3, 2}));
  add_object(w, "fuse_box_1", "fuse_box", Location::at({5, 2}));
  w.room_power["lab"] = false;
  ActionResult r = run(w, Verb::kToggle, "light_switch_1");
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.error_code, ResultCode::kPreconditionFailed);
  EXPECT_NE(r.message.find("room_power"), std::string::npos);
  r = run(w, Verb::kToggle, "fuse_box_1");
  EXPECT_TRUE(r.success);
  EXPECT_TRUE(w.room_powered("lab"));
  EXPECT_TRUE(run(w, Verb::kToggle, "light_switch_1").success);
  EXPECT_TRUE(w.at("light_switch_1").state.get(Flag::kToggledOn));
}

TEST(Affordance, CoffeeNeedsWaterAndBeans) {
  auto setup = [](bool water, bool beans) {
    WorldState w = lab();
    add_object(w, "coffee_maker_1", "coffee_maker", Location::at({4, 2}));
    add_object(w, "mug_1", "mug", Location::on("coffee_maker_1"));
    if (water) w.at("coffee_maker_1").state.filled_with = "water";
    if (beans) add_object(w, "coffee_beans_1", "coffee_beans", Location::on("coffee_maker_1"));
    return w;
  };
  for (auto [water, beans] : {std::pair{false, false}, {true, false}, {false, true}}) {
    WorldState w = setup(water, beans);
    const ActionResult r = run(w, Verb::kToggle, "coffee_maker_1");
    EXPECT_FALSE(r.success);
    EXPECT_EQ(r.error_code, ResultCode::kPreconditionFailed);
    EXPECT_NE(r.message.find(water ? "contains:coffee_beans" : "filled_with:water"), std::string::npos)
        << r.message;
  }
  WorldState w = setup(true, true);
  EXPECT_TRUE(run(w, Verb::kToggle, "coffee_maker_1").success);
  EXPECT_EQ(w.at("mug_1").state.filled_with, "coffee");
  EXPECT_FALSE(w.at("coffee_maker_1").state.filled_with);
  EXPECT_EQ(w.find("coffee_beans_1"), nullptr);
}

TEST(Affordance, FillAtSinkThenPour) {
  WorldState w = lab();
  add_object(w, "mug_1", "mug", Location::held());
  add_object(w, "bowl_1", "bowl", Location::at({3, 3}));
  EXPECT_EQ(run(w, Verb::kFill, "mug_1").error_code, ResultCode::kOutOfRange);
  add_object(w, "sink_1", "sink", Location::at({6, 3}));
  EXPECT_TRUE(run(w, Verb::kFill, "mug_1").success);
  EXPECT_EQ(w.at("mug_1").state.filled_with, "water");
  EXPECT_TRUE(run(w, Verb::kPour, "mug_1", "bowl_1").success);
  EXPECT_EQ(w.at("bowl_1").state.filled_with, "water");
  EXPECT_FALSE(w.at("mug_1").state.filled_with);
}

TEST(Affordance, LaserAndMicrowaveBothHeat) {
  const std::vector<std::string> heatable = {"bowl", "mug", "apple", "bread", "soda_can", "beaker"};
  for (const std::string& cls : heatable) {
    WorldState mw = lab();
    add_object(mw, "microwave_1", "microwave", Location::at({4, 2}));
    add_object(mw, "x_1", cls, Location::inside("microwave_1"));
    mw.at("x_1").state.set(Flag::kCold, true);
    ASSERT_TRUE(run(mw, Verb::kToggle, "microwave_1").success);
    EXPECT_TRUE(mw.at("x_1").state.get(Flag::kHot)) << cls;
    EXPECT_FALSE(mw.at("x_1").state.get(Flag::kCold)) << cls;

    WorldState lw = lab();
    add_object(lw, "laser_cannon_1", "laser_cannon", Location::at({1, 1}));
    add_object(lw, "laser_shelf_1", "laser_shelf", Location::at({7, 1}));
    add_object(lw, "red_monitor_1", "red_monitor", Location::at({4, 2}));
    add_object(lw, "x_1", cls, Location::on("laser_shelf_1"));
    lw.at("x_1").state.set(Flag::kCold, true);
    EXPECT_EQ(run(lw, Verb::kToggle, "red_monitor_1").error_code, ResultCode::kPreconditionFailed);
    add_object(lw, "control_panel_1", "control_panel", Location::inside("laser_cannon_1"));
    ASSERT_TRUE(run(lw, Verb::kToggle, "red_monitor_1").success);
    EXPECT_TRUE(lw.at("x_1").state.get(Flag::kHot)) << cls;
    EXPECT_FALSE(lw.at("x_1").state.get(Flag::kCold)) << cls;
  }
}

TEST(Affordance, PrinterSpawnsToyFromCartridge) {
  WorldState w = lab();
  add_object(w, "printer_3d_1", "printer_3d", Location::at({4, 2}));
  add_object(w, "toy_1", "toy", Location::at({0, 0}));
  EXPECT_FALSE(run(w, Verb::kToggle, "printer_3d_1").success);
  add_object(w, "printer_cartridge_1", "printer_cartridge", Location::inside("printer_3d_1"));
  EXPECT_TRUE(run(w, Verb::kToggle, "printer_3d_1").success);
  ASSERT_NE(w.find("toy_2"), nullptr);
  EXPECT_EQ(w.at("toy_2").location, Location::inside("printer_3d_1"));
  EXPECT_EQ(w.find("printer_cartridge_1"), nullptr);
  EXPECT_TRUE(world_problems(w).empty());
}

TEST(Affordance, ExamineReadsStickyNotes) {
  WorldState w = lab();
  add_object(w, "sticky_note_0", "sticky_note", Location::at({4, 2}));
  w.at("sticky_note_0").note_text = "the fuse box is in the lab";
  add_object(w, "painting_1", "painting", Location::at({3, 2}));
  add_object(w, "mug_1", "mug", Location::at({5, 2}));
  const ActionResult r = run(w, Verb::kExamine, "sticky_note_0");
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.text, "the fuse box is in the lab");
  EXPECT_TRUE(r.state_delta.empty());
  EXPECT_EQ(run(w, Verb::kExamine, "painting_1").error_code, ResultCode::kPreconditionFailed);
  EXPECT_EQ(run(w, Verb::kExamine, "mug_1").error_code, ResultCode::kAffordanceMissing);
  EXPECT_TRUE(run(w, Verb::kScan, "mug_1").success);
  EXPECT_TRUE(w.at("mug_1").state.get(Flag::kUsed));
  EXPECT_EQ(run(w, Verb::kScan, "painting_1").error_code, ResultCode::kAffordanceMissing);
}

TEST(Affordance, CheckOrder) {
  WorldState w = lab();
  add_object(w, "printer_3d_1", "printer_3d", Location::at({0, 0}));
  add_object(w, "mug_1", "mug", Location::at({8, 6}));
  add_object(w, "mug_2", "mug", Location::at({4, 2}));
  add_object(w, "book_1", "book", Location::held());
  EXPECT_EQ(engine().applicable(w, act(Verb::kPickup, "ghost")).code, ResultCode::kUnknownInstance);
  // property before range
  EXPECT_EQ(engine().applicable(w, act(Verb::kPickup, "printer_3d_1")).code,
            ResultCode::kAffordanceMissing);
  // range before hands
  EXPECT_EQ(engine().applicable(w, act(Verb::kPickup, "mug_1")).code, ResultCode::kOutOfRange);
  EXPECT_EQ(engine().applicable(w, act(Verb::kPickup, "mug_2")).code, ResultCode::kHandsFull);
  EXPECT_EQ(engine().applicable(w, act(Verb::kPlace, "book_1")).code, ResultCode::kUnsupported);
  EXPECT_EQ(engine().applicable(w, act(Verb::kPickup, "mug_2", "mug_1")).code, ResultCode::kUnsupported);
  WorldState e = lab();
  add_object(e, "table_1", "table", Location::at({4, 2}));
  add_object(e, "mug_1", "mug", Location::at({3, 3}));
  EXPECT_EQ(engine().applicable(e, act(Verb::kPlace, "mug_1", "table_1")).code, ResultCode::kHandsEmpty);
}

TEST(Affordance, HandsFullRemovesPickups) {
  WorldState w = lab();
  add_object(w, "mug_1", "mug", Location::at({4, 2}));
  auto actions = engine().enumerate_applicable(w);
  EXPECT_NE(std::find(actions.begin(), actions.end(), act(Verb::kPickup, "mug_1")), actions.end());
  add_object(w, "book_1", "book", Location::held());
  for (const auto& a : engine().enumerate_applicable(w)) EXPECT_NE(a.verb, Verb::kPickup);
}

TEST(AffordanceProperties, EnumerateEqualsBruteForceFilter) {
  util::Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const WorldState w = random_world(rng, 2);
    ASSERT_TRUE(world_problems(w).empty()) << world_problems(w).front();
    ASSERT_EQ(w.objects.size(), 5u);
    std::vector<InteractionAction> expect;
    for (const auto& a : all_syntactic(w)) {
      if (engine().applicable(w, a).ok) expect.push_back(a);
    }
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(engine().enumerate_applicable(w), expect) << "trial " << trial;
  }
}

TEST(AffordanceProperties, FailurePurityAndInvariants) {
  util::Rng rng(77);
  int failures = 0, successes = 0;
  for (int trial = 0; trial < 150; ++trial) {
    WorldState w = random_world(rng, 4);
    for (int k = 0; k < 30; ++k) {
      // Half the draws come from the applicable set so successes get exercised too.
      const auto ok = engine().enumerate_applicable(w);
      const auto candidates = (rng.coin() && !ok.empty()) ? ok : all_syntactic(w);
      InteractionAction a = rng.pick(candidates);
      if (rng.below(4) == 0) a.secondary = rng.coin() ? std::optional<std::string>("ghost") : std::nullopt;
      auto [next, r] = engine().apply(w, a);
      EXPECT_EQ(next.tick, w.tick + 1);
      EXPECT_EQ(r.success, !r.error_code.has_value());
      if (!r.success) {
        ++failures;
        EXPECT_TRUE(r.state_delta.empty());
        WorldState same = w;
        same.tick = next.tick;
        EXPECT_TRUE(next == same) << verb_name(a.verb) << " " << a.target;
      } else {
        ++successes;
      }
      const auto problems = world_problems(next);
      ASSERT_TRUE(problems.empty()) << problems.front() << " after " << verb_name(a.verb) << " "
                                    << a.target;
      for (const auto& [id, obj] : next.objects) {
        EXPECT_FALSE(obj.state.get(Flag::kHot) && obj.state.get(Flag::kCold));
      }
      w = std::move(next);
    }
  }
  EXPECT_GT(successes, 1000);
  EXPECT_GT(failures, 100);
}
