#include <gtest/gtest.h>

#include "arena/cdf/sampler.hpp"
#include "arena/error.hpp"
#include "arena/nav/nav.hpp"
#include "arena/planner/demonstrate.hpp"
#include "arena/runtime/episode_log.hpp"
#include "arena/runtime/session.hpp"
#include "arena/util/rng.hpp"
#include "missions.hpp"

using namespace arena;
using namespace arena::runtime;
using affordance::InteractionAction;
using affordance::Verb;
using arena::testing::fixture_resources;
using arena::testing::mission;
using arena::testing::MissionSpec;
using util::Json;

namespace {

MissionSpec far_goal() {
  MissionSpec s{"mini", {2, 3}};
  s.objects = {{{"id", "bowl_1"}, {"class", "bowl"}, {"location", {{"on", "table_1"}}}}};
  s.goals = {{{"predicate", "located"}, {"object", "bowl_1"}, {"receptacle", "laser_shelf_1"}}};
  return s;
}

Session fresh(SessionConfig cfg = {}) { return Session(mission(far_goal()), fixture_resources(), cfg); }

const Action kTurn = nav::NavAction::rotate(90);
const Action kBad = InteractionAction{Verb::kToggle, "laser_shelf_1", std::nullopt};

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kIoError;
}

}  // namespace

TEST(Session, DefaultsAndFrameZero) {
  const Session s = fresh();
  EXPECT_EQ(s.config().max_steps, 50);
  EXPECT_EQ(s.config().max_failed, 10);
  EXPECT_EQ(s.score(), 1000);
  ASSERT_EQ(s.frames().size(), 1u);
  const Json& f = s.latest_frame();
  EXPECT_EQ(f["score"], 1000);
  EXPECT_EQ(f["tick"], 0);
  EXPECT_EQ(f["phase"], "running");
  EXPECT_TRUE(f["last_action"].is_null());
  EXPECT_EQ(f["goal_status"]["subgoals"][0]["done"], false);
  EXPECT_EQ(f["render"]["sticky_notes"][0]["read"], false);
}

TEST(Session, SatisfiedGoalSucceedsAtFrameZero) {
  MissionSpec s = far_goal();
  s.goals[0]["receptacle"] = "table_1";
  Session done(mission(s), fixture_resources());
  EXPECT_EQ(done.phase(), Phase::kSucceeded);
  EXPECT_EQ(done.latest_frame()["phase"], "succeeded");
  EXPECT_EQ(code_of([&] { done.step(kTurn); }), Errc::kSessionTerminated);
}

TEST(Session, ScoreDecrementsPerAction) {
  Session s = fresh();
  for (int i = 0; i < 10; ++i) s.step(i % 2 ? kTurn : kBad);
  EXPECT_EQ(s.score(), 990);
  EXPECT_EQ(s.frames().size(), 11u);
  Session floor = fresh({50, 10, 3, 2});
  floor.step(kTurn);
  floor.step(kTurn);
  EXPECT_EQ(floor.score(), 0);
}

TEST(Session, StepCapBoundary) {
  Session s = fresh();
  for (int i = 0; i < 49; ++i) s.step(kTurn);
  EXPECT_EQ(s.phase(), Phase::kRunning);
  EXPECT_EQ(s.steps_used(), 49);
  s.step(kTurn);
  EXPECT_EQ(s.phase(), Phase::kFailed);
  EXPECT_EQ(s.steps_used(), 50);
  EXPECT_EQ(code_of([&] { s.step(kTurn); }), Errc::kSessionTerminated);
  EXPECT_EQ(s.frames().size(), 51u);
}

TEST(Session, FailedCapBoundary) {
  Session s = fresh();
  for (int i = 0; i < 9; ++i) {
    const auto out = s.step(kBad);
    EXPECT_FALSE(out.result.success);
  }
  EXPECT_EQ(s.phase(), Phase::kRunning);
  EXPECT_EQ(s.failed_steps(), 9);
  s.step(kBad);
  EXPECT_EQ(s.phase(), Phase::kFailed);
  EXPECT_EQ(s.failed_steps(), 10);
  EXPECT_EQ(code_of([&] { s.step(kBad); }), Errc::kSessionTerminated);
}

TEST(Session, SuccessOnFinalStepWins) {
  // Three-step plan with a cap of exactly three steps.
  Session s(mission(far_goal()), fixture_resources(), {3, 10, 1000, 1});
  s.step(InteractionAction{Verb::kPickup, "bowl_1", std::nullopt});
  s.step(nav::NavAction::goto_viewpoint("lab_vp1"));
  s.step(InteractionAction{Verb::kPlace, "bowl_1", "laser_shelf_1"});
  EXPECT_EQ(s.phase(), Phase::kSucceeded);
  EXPECT_EQ(s.latest_frame()["goal_status"]["m"], 1);
}

TEST(Session, UserEvents) {
  Session s = fresh();
  const auto note = s.user_event(ExamineStickyNote{"sticky_note_1"});
  EXPECT_TRUE(note.result.success) << note.result.message;
  ASSERT_TRUE(note.note_text);
  EXPECT_EQ(*note.note_text, "The laser only fires with its control panel loaded.");
  EXPECT_EQ(s.steps_used(), 1);
  EXPECT_EQ(s.latest_frame()["render"]["sticky_notes"][0]["read"], true);

  const auto hl = s.user_event(RequestHighlight{"bowl_1"});
  EXPECT_EQ(hl.highlight, "bowl_1");
  EXPECT_EQ(s.steps_used(), 1);
  EXPECT_EQ(s.frames().size(), 2u);
  EXPECT_EQ(code_of([&] { s.user_event(RequestHighlight{"ghost_1"}); }), Errc::kUnknownInstance);

  const size_t before = s.transcript().size();
  s.user_event(Utterance{"user", "heat the mug"});
  EXPECT_EQ(s.transcript().size(), before + 1);
  EXPECT_EQ(s.transcript().back().text, "heat the mug");

  // Highlights ride on the next frame only.
  s.step(kTurn);
  EXPECT_EQ(s.latest_frame()["render"]["highlights"], Json::array({"bowl_1"}));
  s.step(kTurn);
  EXPECT_TRUE(s.latest_frame()["render"]["highlights"].empty());
}

TEST(Session, ExamineOutOfRangeCountsAsFailure) {
  MissionSpec spec = far_goal();
  spec.agent = {8, 3};
  Session s(mission(spec), fixture_resources());
  const auto out = s.user_event(ExamineStickyNote{"sticky_note_1"});
  EXPECT_FALSE(out.result.success);
  EXPECT_EQ(s.failed_steps(), 1);
  EXPECT_EQ(s.steps_used(), 1);
}

TEST(Session, AbortIsTerminal) {
  Session s = fresh();
  s.abort();
  EXPECT_EQ(s.phase(), Phase::kAborted);
  EXPECT_EQ(code_of([&] { s.user_event(Utterance{"user", "hi"}); }), Errc::kSessionTerminated);
}

namespace {

// Random mix of actions and events driven by `seed`.
Session random_session(uint64_t seed, const cdf::CDF& c) {
  util::Rng rng(seed);
  Session s(c, fixture_resources());
  const std::vector<Action> menu = {
      nav::NavAction::goto_viewpoint("lab_vp1"), nav::NavAction::goto_viewpoint("kitchen_vp1"),
      nav::NavAction::rotate(90), nav::NavAction::move_forward(2), nav::NavAction::look_around(),
      InteractionAction{Verb::kPickup, "bowl_1", std::nullopt},
      InteractionAction{Verb::kPlace, "bowl_1", "table_1"},
      InteractionAction{Verb::kOpen, "microwave_1", std::nullopt},
      InteractionAction{Verb::kToggle, "red_monitor_1", std::nullopt}};
  while (s.running() && s.steps_used() < 30) {
    switch (rng.below(12)) {
      case 0: s.user_event(Utterance{"user", "step " + std::to_string(s.steps_used())}); break;
      case 1: s.user_event(RequestHighlight{"microwave_1"}); break;
      case 2: s.user_event(ExamineStickyNote{"sticky_note_1"}); break;
      default: s.step(rng.pick(menu));
    }
  }
  return s;
}

}  // namespace

TEST(EpisodeLog, ReplayReproducesBytes) {
  const cdf::CDF c = mission(far_goal());
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const Session s = random_session(seed, c);
    const std::string text = s.log_text();
    EXPECT_EQ(random_session(seed, c).log_text(), text);
    const EpisodeLog log = parse_log(text);
    EXPECT_EQ(log.frame_count(), static_cast<size_t>(1 + s.steps_used()));
    const Session again = replay(log, fixture_resources());
    EXPECT_EQ(again.log_text(), text);
    EXPECT_EQ(log.steps_used(), s.steps_used());
  }
}

TEST(EpisodeLog, CorruptLogDiverges) {
  const cdf::CDF c = mission(far_goal());
  const std::string text = random_session(3, c).log_text();
  std::string edited = text;
  const size_t at = edited.find("\"score\":999");
  ASSERT_NE(at, std::string::npos);
  edited.replace(at, 11, "\"score\":998");
  EXPECT_EQ(code_of([&] { replay(parse_log(edited), fixture_resources()); }), Errc::kReplayDivergence);

  // Drop the last line before the end record.
  std::string truncated = text.substr(0, text.rfind('\n', text.size() - 2));
  truncated = truncated.substr(0, truncated.rfind('\n') + 1);
  EXPECT_EQ(code_of([&] { replay(parse_log(truncated), fixture_resources()); }), Errc::kReplayDivergence);

  EXPECT_EQ(code_of([&] { parse_log("{\"record\":\"frame\"}\n"); }), Errc::kValidationError);
  EXPECT_EQ(code_of([&] { parse_log(text + "not json\n"); }), Errc::kParseError);
}

TEST(Demonstrate, SampledMissionsReplayToSuccess) {
  const auto& res = Resources::shipped();
  cdf::SampleOptions opt;
  opt.seed = 11;
  opt.n = 12;
  for (const auto& c : cdf::sample_missions(cdf::default_pool(), res, opt)) {
    SCOPED_TRACE(c.cdf_id);
    const auto d = planner::demonstrate(c, res);
    const EpisodeLog log = parse_log(d.log);
    EXPECT_EQ(log.m(), 1);
    EXPECT_EQ(log.steps_used(), d.plan.cost);
    EXPECT_EQ(replay(log, res).log_text(), d.log);
  }
}

TEST(Demonstrate, FreezeWithFridgeDisabledUsesFreezeRay) {
  const auto& res = fixture_resources();
  MissionSpec s{"office_a", {8, 10}};
  s.objects = {{{"id", "apple_1"}, {"class", "apple"}, {"location", {{"on", "table_2"}}}},
               {{"id", "fridge_1"}, {"class", "fridge"}, {"location", {{"cell", {8, 1}}}}, {"state", {{"powered", false}}}}};
  s.without = {"fridge_1"};
  s.goals = {{{"predicate", "state_is"}, {"object", "apple_1"}, {"flag", "cold"}, {"value", true}},
             {{"predicate", "located"}, {"object", "apple_1"}, {"receptacle", "desk_1"}}};
  const auto d = planner::demonstrate(mission(s, res), res);
  bool ray = false, fridge = false;
  for (const auto& a : d.plan.steps) {
    ray |= action_label(a) == "Toggle(blue_monitor_1)";
    fridge |= action_label(a).find("fridge_1") != std::string::npos;
  }
  EXPECT_TRUE(ray);
  EXPECT_FALSE(fridge);
}
