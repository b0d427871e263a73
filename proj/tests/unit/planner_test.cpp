#include <gtest/gtest.h>

#include <algorithm>

#include "arena/error.hpp"
#include "arena/planner/compile.hpp"
#include "arena/planner/pddl.hpp"
#include "arena/planner/search.hpp"
#include "arena/util/rng.hpp"
#include "engine_oracle.hpp"
#include "mission_fixtures.hpp"
#include "missions.hpp"

using namespace arena;
using namespace arena::planner;
using arena::testing::fixture_resources;
using arena::testing::mission;
using arena::testing::MissionSpec;
using util::Json;
using namespace arena::testing::fixtures;

namespace {

bool uses(const Plan& p, const std::string& prefix) {
  return std::any_of(p.operators.begin(), p.operators.end(),
                     [&](const std::string& op) { return op.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST(Compile, PickupDeliverOperatorsAndGoal) {
  MissionSpec s{"mini", {2, 3}};
  s.objects = {on("bowl_1", "bowl", "table_1")};
  s.goals = {located("bowl_1", "laser_shelf_1")};
  const PlanningProblem p = compile(mission(s), fixture_resources());

  ASSERT_EQ(p.goal.size(), 1u);
  EXPECT_EQ(p.fluents[p.goal[0]].key(), "(on bowl_1 laser_shelf_1)");
  EXPECT_TRUE(p.find_operator("goto--lab_vp1---from_kitchen_vp1"));
  EXPECT_FALSE(p.find(Fluent{"at-vp", {std::string(kStartPlace)}}));
  EXPECT_TRUE(std::is_sorted(p.operators.begin(), p.operators.end(),
                             [](const Operator& a, const Operator& b) { return a.name < b.name; }));
  // Initial state is the abstraction of the concrete start world.
  const auto w0 = cdf::build_world(mission(s), fixture_resources());
  EXPECT_EQ(p.initial, abstract_state(p, w0, w0.agent.cell));
}

TEST(Compile, HeatHasMicrowaveAndLaserAchievers) {
  const PlanningProblem p = compile(mission(heat_deliver()), fixture_resources());
  const FluentId hot = *p.find(Fluent{"hot", {"bowl_1"}});
  bool microwave = false, laser = false;
  for (const auto& op : p.operators) {
    if (std::find(op.add.begin(), op.add.end(), hot) == op.add.end()) continue;
    microwave |= op.name.rfind("toggle--microwave_1", 0) == 0;
    laser |= op.name.rfind("toggle--red_monitor_1", 0) == 0;
  }
  EXPECT_TRUE(microwave);
  EXPECT_TRUE(laser);
}

TEST(Compile, ColorWithoutChangerIsCompileError) {
  MissionSpec s{"mini", {2, 3}};
  s.objects = {on("bowl_1", "bowl", "table_1")};
  s.goals = {{{"predicate", "colored"}, {"object", "bowl_1"}, {"color", "red"}}};
  s.without = {"color_changer_1"};
  try {
    compile(mission(s), fixture_resources());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kCompileError);
  }
}

TEST(Compile, RoomLocatedGoalIsCompileError) {
  MissionSpec s{"mini", {2, 3}};
  s.objects = {on("bowl_1", "bowl", "table_1")};
  s.goals = {{{"predicate", "located"}, {"object", "bowl_1"}, {"room", "lab"}}};
  EXPECT_THROW(compile(mission(s), fixture_resources()), Error);
}

TEST(Solve, SatisfiedGoalGivesEmptyPlan) {
  MissionSpec s{"mini", {2, 3}};
  s.objects = {on("bowl_1", "bowl", "table_1")};
  s.goals = {located("bowl_1", "table_1")};
  const Plan plan = solve(compile(mission(s), fixture_resources()));
  EXPECT_TRUE(plan.steps.empty());
  EXPECT_EQ(plan.cost, 0);
}

TEST(Solve, CommutingStepsFollowOperatorNameOrder) {
  MissionSpec s{"mini", {2, 3}};
  s.objects = {on("apple_1", "apple", "table_1")};
  s.goals = {located("apple_1", "cabinet_1")};
  const Plan plan = solve(compile(mission(s), fixture_resources()));
  // Open and Pickup commute; "open--" sorts before "pickup--".
  const std::vector<std::string> want = {"Open(cabinet_1)", "Pickup(apple_1)",
                                         "Place(apple_1, cabinet_1)"};
  std::vector<std::string> got;
  for (const auto& a : plan.steps) got.push_back(action_label(a));
  EXPECT_EQ(got, want);
}

TEST(Solve, OneRoomDeliveryIsFourSteps) {
  const auto& res = fixture_resources();
  // Main office of the shipped layout: desk_1 is only workable from vp1,
  // shelf_1 only from vp2, and the agent starts between them.
  MissionSpec s{"office_a", {7, 16}};
  s.objects = {on("book_1", "book", "desk_1")};
  s.goals = {located("book_1", "shelf_1")};
  const cdf::CDF c = mission(s, res);
  const Plan plan = solve(compile(c, res));
  std::vector<std::string> got;
  for (const auto& a : plan.steps) got.push_back(action_label(a));
  const std::vector<std::string> want = {"GotoViewpoint(main_office_vp1)", "Pickup(book_1)",
                                         "GotoViewpoint(main_office_vp2)", "Place(book_1, shelf_1)"};
  EXPECT_EQ(got, want);
  const auto oracle = arena::testing::engine_bfs(c, res, 6);
  ASSERT_TRUE(oracle);
  EXPECT_EQ(oracle->size(), 4u);
}

TEST(Solve, AbsentObjectIsUnsolvable) {
  MissionSpec s{"mini", {2, 3}};
  s.objects = {on("bowl_1", "bowl", "table_1")};
  s.goals = {located("bowl_1", "laser_shelf_1")};
  PlanningProblem p = compile(mission(s), fixture_resources());
  // Remove every trace of the bowl except the goal.
  auto mentions = [&](FluentId f) {
    const auto& a = p.fluents[f].args;
    return std::find(a.begin(), a.end(), "bowl_1") != a.end();
  };
  std::erase_if(p.initial, mentions);
  std::erase_if(p.operators, [&](const Operator& op) { return op.name.find("bowl_1") != std::string::npos; });
  for (bool prune : {true, false}) {
    try {
      solve(p, {SearchMode::kBfs, 100000, prune});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kUnsolvable);
    }
  }
}

TEST(Solve, WalledOffTargetIsUnsolvable) {
  MissionSpec s{"mini", {2, 3}};
  s.objects = {on("bowl_1", "bowl", "table_1")};
  s.goals = {located("bowl_1", "laser_shelf_1")};
  s.obstacles = {{5, 3}};
  const PlanningProblem p = compile(mission(s), fixture_resources());
  for (bool prune : {true, false}) {
    try {
      solve(p, {SearchMode::kBfs, 100000, prune});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kUnsolvable);
    }
  }
}

TEST(Solve, BudgetExceeded) {
  const PlanningProblem p = compile(mission(heat_deliver()), fixture_resources());
  try {
    solve(p, {SearchMode::kBfs, 2, true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kBudgetExceeded);
  }
}

TEST(Solve, WallingOffLaserRoomFlipsTool) {
  const PlanningProblem open = compile(mission(heat_deliver()), fixture_resources());
  const Plan laser = solve(open);
  EXPECT_TRUE(uses(laser, "toggle--red_monitor_1"));
  EXPECT_FALSE(uses(laser, "toggle--microwave_1"));

  MissionSpec walled = heat_deliver();
  walled.obstacles = {{5, 3}};
  const Plan micro = solve(compile(mission(walled), fixture_resources()));
  EXPECT_TRUE(uses(micro, "toggle--microwave_1"));
  EXPECT_FALSE(uses(micro, "toggle--red_monitor_1"));
}

TEST(Solve, ShippedBreakroomScenarioFlipsTool) {
  const auto& res = fixture_resources();
  MissionSpec s{"office_a", {3, 16}};
  s.objects = {on("bowl_1", "bowl", "desk_1"), in("control_panel_1", "control_panel", "laser_cannon_1")};
  s.goals = {state_is("bowl_1", "hot"), located("bowl_1", "table_2")};
  const Plan laser = solve(compile(mission(s, res), res));
  EXPECT_TRUE(uses(laser, "toggle--red_monitor_1"));

  // Both doorways into the quantum lab.
  s.obstacles = {{12, 4}, {20, 8}};
  const Plan micro = solve(compile(mission(s, res), res));
  EXPECT_TRUE(uses(micro, "toggle--microwave_1"));
  EXPECT_FALSE(uses(micro, "toggle--red_monitor_1"));
  EXPECT_GT(micro.cost, laser.cost);
}

TEST(Solve, FixturesMatchEngineBfsAndAstarWithinBound) {
  const auto& res = fixture_resources();
  for (const auto& fx : mini_fixtures()) {
    SCOPED_TRACE(fx.name);
    const cdf::CDF c = mission(fx.spec);
    const PlanningProblem p = compile(c, res);
    const Plan bfs = solve(p);
    const auto oracle = arena::testing::engine_bfs(c, res, 12);
    ASSERT_TRUE(oracle) << "engine search found no plan";
    EXPECT_EQ(bfs.cost, static_cast<int>(oracle->size()));
    EXPECT_EQ(solve(p, {SearchMode::kBfs, 4'000'000, false}).cost, bfs.cost);

    const Plan astar = solve(p, {SearchMode::kAstar});
    EXPECT_LE(astar.cost * 2, bfs.cost * 3);

    for (const Plan* plan : {&bfs, &astar}) {
      const auto w0 = cdf::build_world(c, res);
      const auto end = arena::testing::execute(w0, plan->steps, res);
      EXPECT_TRUE(cdf::goal_status(end, c.goals).mission);
    }
  }
}

TEST(Solve, PlanStepsTrackSymbolicState) {
  const auto& res = fixture_resources();
  for (const auto& fx : mini_fixtures()) {
    SCOPED_TRACE(fx.name);
    const cdf::CDF c = mission(fx.spec);
    const PlanningProblem p = compile(c, res);
    const Plan plan = solve(p);
    auto w = cdf::build_world(c, res);
    const scene::Cell start = w.agent.cell;
    for (size_t i = 0; i < plan.steps.size(); ++i) {
      w = arena::testing::execute(w, {plan.steps[i]}, res);
      const std::vector<std::string> prefix(plan.operators.begin(), plan.operators.begin() + i + 1);
      EXPECT_EQ(abstract_state(p, w, start), simulate(p, prefix)) << "after " << plan.operators[i];
    }
  }
}

// Random walks through the full operator set: every symbolically applicable
// operator must succeed in the engine and land on the predicted abstraction.
TEST(Solve, RandomWalksAgreeWithEngine) {
  const auto& res = fixture_resources();
  util::Rng rng(7);
  for (const auto& fx : mini_fixtures()) {
    SCOPED_TRACE(fx.name);
    const cdf::CDF c = mission(fx.spec);
    const PlanningProblem p = compile(c, res);
    for (int walk = 0; walk < 40; ++walk) {
      auto w = cdf::build_world(c, res);
      const scene::Cell start = w.agent.cell;
      std::vector<std::string> ops;
      for (int step = 0; step < 12; ++step) {
        const auto state = simulate(p, ops);
        std::vector<std::string> options;
        for (const auto& op : p.operators) {
          if (std::includes(state.begin(), state.end(), op.pre.begin(), op.pre.end())) {
            options.push_back(op.name);
          }
        }
        if (options.empty()) break;
        ops.push_back(options[rng.below(options.size())]);
        ASSERT_NO_THROW(w = arena::testing::execute(w, {operator_action(ops.back())}, res))
            << ops.back();
        ASSERT_EQ(abstract_state(p, w, start), simulate(p, ops)) << ops.back();
      }
    }
  }
}

TEST(Solve, BatchMatchesSerial) {
  const auto& res = fixture_resources();
  std::vector<PlanningProblem> problems;
  for (const auto& fx : mini_fixtures()) problems.push_back(compile(mission(fx.spec), res));
  MissionSpec bad{"mini", {2, 3}};
  bad.objects = {on("bowl_1", "bowl", "table_1")};
  bad.goals = {located("bowl_1", "laser_shelf_1")};
  bad.obstacles = {{5, 3}};
  problems.push_back(compile(mission(bad), res));

  const auto par = plan_batch(problems);
  const auto ser = plan_batch_serial(problems);
  ASSERT_EQ(par.size(), ser.size());
  for (size_t i = 0; i < par.size(); ++i) {
    EXPECT_EQ(par[i].error, ser[i].error);
    ASSERT_EQ(par[i].plan.has_value(), ser[i].plan.has_value());
    if (par[i].plan) EXPECT_EQ(par[i].plan->operators, ser[i].plan->operators);
  }
  EXPECT_EQ(par.back().error, Errc::kUnsolvable);
}

TEST(OperatorAction, DecodesNames) {
  EXPECT_EQ(action_label(operator_action("goto--lab_vp1---from_start")), "GotoViewpoint(lab_vp1)");
  EXPECT_EQ(action_label(operator_action("place--bowl_1--table_1---kitchen_vp1")),
            "Place(bowl_1, table_1)");
  EXPECT_EQ(action_label(operator_action("toggle--microwave_1---kitchen_vp1-bowl_1")),
            "Toggle(microwave_1)");
}

TEST(Pddl, ExportParseRoundTrip) {
  const auto& res = fixture_resources();
  for (const auto& fx : mini_fixtures()) {
    SCOPED_TRACE(fx.name);
    const PlanningProblem p = compile(mission(fx.spec), res);
    const PddlText text = export_pddl(p);
    EXPECT_NE(text.problem.find("(:goal (and"), std::string::npos);
    EXPECT_NE(text.domain.find("(:requirements :strips :typing)"), std::string::npos);
    const PlanningProblem back = parse_pddl(text.domain, text.problem);
    EXPECT_EQ(back, p);
    const PddlText again = export_pddl(back);
    EXPECT_EQ(again.domain, text.domain);
    EXPECT_EQ(again.problem, text.problem);
    EXPECT_EQ(solve(back).operators, solve(p).operators);
  }
}

TEST(Pddl, ReaderRejectsMalformedInput) {
  const PlanningProblem p = compile(mission(heat_deliver()), fixture_resources());
  const PddlText text = export_pddl(p);
  auto code_of = [](const std::string& d, const std::string& q) {
    try {
      parse_pddl(d, q);
    } catch (const Error& e) {
      return std::optional<Errc>(e.code());
    }
    return std::optional<Errc>();
  };
  EXPECT_EQ(code_of(text.domain.substr(0, text.domain.size() / 2), text.problem), Errc::kParseError);
  EXPECT_EQ(code_of(text.domain, "(define (problem x) (:domain other) (:goal (and)))"), Errc::kParseError);
  EXPECT_EQ(code_of(text.domain, text.problem + ")"), Errc::kParseError);
  std::string bad_pred = text.problem;
  bad_pred.replace(bad_pred.find("(:init") + 6, 0, "\n    (levitating bowl_1)");
  EXPECT_EQ(code_of(text.domain, bad_pred), Errc::kParseError);
  std::string param = text.domain;
  param.replace(param.find(":parameters ()"), 14, ":parameters (?x - entity)");
  EXPECT_EQ(code_of(param, text.problem), Errc::kParseError);

  try {
    parse_pddl(text.domain, "(define (problem x)\n  (:domain arena-x)\n  (:init (bogus))\n  (:goal (and)))");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("problem:"), std::string::npos) << e.what();
  }
}
