#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "arena/error.hpp"
#include "arena/qa/qa.hpp"
#include "arena/util/files.hpp"
#include "arena/util/rng.hpp"
#include "missions.hpp"
#include "qa_golden.hpp"

using namespace arena;
using namespace arena::qa;
using arena::testing::fixture_resources;
using arena::testing::mission;
using arena::testing::MissionSpec;
using scene::Cell;
using scene::Heading;
using util::Json;
using namespace arena::testing::qa_golden;

TEST(Questions, EncodingsAndTemplates) {
  const auto qs = generate_questions("pick up the mug", vocab());
  ASSERT_EQ(qs.size(), 4u);
  EXPECT_EQ(qs[0].text(), "where is mug?");
  EXPECT_EQ(qs[1].text(), "what does mug look like?");
  EXPECT_EQ(qs[2].text(), "which direction should I turn to?");
  EXPECT_EQ(qs[3].text(), "which mug are you referring to?");
  EXPECT_EQ((Question{QType::kApp, "microwave"}.encoding()), "app microwave");
  EXPECT_EQ((Question{QType::kDir, ""}.encoding()), "dir");
  const auto turn = generate_questions("turn around", vocab());
  ASSERT_EQ(turn.size(), 1u);
  EXPECT_EQ(turn[0].type, QType::kDir);
  for (const auto& q : qs) EXPECT_EQ(parse_encoding(q.encoding()), q);
  EXPECT_FALSE(parse_encoding("dir mug"));
  EXPECT_FALSE(parse_encoding("why mug"));
  EXPECT_FALSE(parse_encoding("loc"));
}

TEST(Questions, GoldenFile) {
  const std::string text = golden("questions.txt");
  size_t n = 0;
  EXPECT_EQ(render_questions(text, n), text);
  EXPECT_GE(n, 20u);
}

TEST(Vocabulary, LongestMatchAndErrors) {
  const auto ms = vocab().mentions("put the book on the book shelf");
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_EQ(ms[0].class_id, "book");
  EXPECT_EQ(ms[1].class_id, "shelf");
  EXPECT_EQ(ms[1].length, 2u);
  const auto& cat = *fixture_resources().catalog;
  try {
    Vocabulary::build(cat, "# c\nmug: mug\nbeaker glass: nothing\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kValidationError);
    EXPECT_NE(e.detail().find("synonyms:3"), std::string::npos) << e.detail();
  }
  EXPECT_THROW(Vocabulary::build(cat, "cup: mug\ncup: bowl\n"), Error);
  EXPECT_THROW(Vocabulary::build(cat, "no colon here\n"), Error);
  EXPECT_THROW(Vocabulary::build(cat, "bowl: mug\n"), Error);
}

TEST(Answers, GoldenFile) {
  const std::string text = golden("answers.txt");
  size_t n = 0;
  EXPECT_EQ(render_answers(text, n), text);
  EXPECT_GE(n, 20u);
}

TEST(Answers, SlotsAndErrors) {
  const auto& res = fixture_resources();
  const auto w = cdf::build_world(mission(state_s1()), res);
  const Answer a = answer_location(w, "bowl_1");
  EXPECT_EQ(a.slots.at("container"), "fridge");
  EXPECT_EQ(a.slots.at("landmark"), "apple");
  EXPECT_EQ(a.slots.at("viewpoint"), "kitchen_vp_b");
  EXPECT_EQ(a.slots.at("room"), "kitchen");
  EXPECT_EQ(answer_location(w, "vase_1").slots.count("container"), 0u);
  try {
    answer_location(w, "ghost_1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnknownInstance);
  }
  try {
    answer_appearance(*res.catalog, "unicorn");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnknownClass);
  }
  // decor classes still carry an appearance
  EXPECT_EQ(answer_appearance(*res.catalog, "painting").text,
            "The painting is rectangular and of multicolored. It is made of canvas.");
}

TEST(Answers, DueEastOfNorthFacingIsRight) {
  MissionSpec s{"mini", {2, 3}};
  s.objects = {at("bowl_1", "bowl", {4, 3})};
  const auto w = cdf::build_world(mission(s), fixture_resources());
  EXPECT_EQ(answer_location(w, "bowl_1").slots.at("direction"), "right");
}

namespace {

// Sector by angle: front within 45 degrees (inclusive), behind beyond 135
// (exclusive), otherwise the side.
std::string sector_oracle(Cell o, Heading h, Cell t) {
  const double dx = t.x - o.x, dy = t.y - o.y;
  const double heading_angle = 90.0 * static_cast<int>(h);  // clockwise from north
  double target = std::atan2(dx, -dy) * 180.0 / std::numbers::pi;
  double rel = std::fmod(target - heading_angle + 540.0, 360.0) - 180.0;
  const double a = std::abs(rel);
  if (a <= 45.0 + 1e-9) return "front";
  if (a > 135.0 + 1e-9) return "behind";
  return rel > 0 ? "right" : "left";
}

}  // namespace

TEST(Answers, DirectionMatchesSectorTable) {
  const Cell o{5, 5};
  const std::vector<Cell> eight = {{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};
  for (int hi = 0; hi < 4; ++hi) {
    const Heading h = static_cast<Heading>(hi);
    for (const Cell d : eight) {
      for (int k : {1, 3}) {
        const Cell t{o.x + d.x * k, o.y + d.y * k};
        EXPECT_EQ(direction_name(direction_of(o, h, t)), sector_oracle(o, h, t));
        const std::string want = sector_oracle(o, h, t);
        const std::string text = answer_direction({o, h, std::nullopt}, {t, h, std::nullopt}).text;
        const std::string expect = want == "front"   ? "You don't need to turn."
                                   : want == "behind" ? "You should turn around."
                                                      : "You should turn " + want + ".";
        EXPECT_EQ(text, expect);
      }
    }
  }
  util::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Cell t{static_cast<int>(rng.below(21)) - 10, static_cast<int>(rng.below(21)) - 10};
    const Heading h = static_cast<Heading>(rng.below(4));
    if (t == Cell{0, 0}) continue;
    EXPECT_EQ(direction_name(direction_of({0, 0}, h, t)), sector_oracle({0, 0}, h, t));
  }
  EXPECT_EQ(answer_direction({o, Heading::kN, std::nullopt}, {o, Heading::kS, std::nullopt}).text,
            "You don't need to move.");
}

TEST(Answers, TextsMatchTemplatesEverywhere) {
  const auto& res = fixture_resources();
  const std::regex loc(location_pattern()), app(appearance_pattern()), ref(reference_pattern()),
      dir(direction_pattern());
  for (const auto& spec : {state_s1(), state_s2()}) {
    const auto w = cdf::build_world(mission(spec), res);
    for (const auto& [id, obj] : w.objects) {
      EXPECT_TRUE(std::regex_match(answer_location(w, id).text, loc)) << answer_location(w, id).text;
      EXPECT_TRUE(std::regex_match(answer_reference(w, id).text, ref)) << answer_reference(w, id).text;
      EXPECT_TRUE(std::regex_match(answer_appearance(w, id).text, app)) << answer_appearance(w, id).text;
    }
  }
  for (const auto& [id, cls] : res.catalog->classes()) {
    EXPECT_TRUE(std::regex_match(answer_appearance(*res.catalog, id).text, app)) << id;
  }
  for (int x = 1; x < 5; ++x) {
    for (int y = 1; y < 6; ++y) {
      for (int h = 0; h < 4; ++h) {
        const auto t = answer_direction({{2, 3}, Heading::kE, std::nullopt}, {{x, y}, static_cast<Heading>(h), std::nullopt}).text;
        EXPECT_TRUE(std::regex_match(t, dir)) << t;
      }
    }
  }
}

TEST(Answers, InvariantToObjectOrder) {
  const auto& res = fixture_resources();
  MissionSpec a = state_s1();
  MissionSpec b = a;
  std::reverse(b.objects.begin(), b.objects.end());
  b.without = {"table_1"};
  b.objects.push_back(at("table_1", "table", {1, 5}));
  const auto wa = cdf::build_world(mission(a), res);
  const auto wb = cdf::build_world(mission(b), res);
  for (const auto& [id, obj] : wa.objects) {
    EXPECT_EQ(answer_location(wa, id).text, answer_location(wb, id).text);
  }
}
